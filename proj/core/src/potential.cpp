#include "esrl/potential.hpp"

#include <cmath>
#include <cstdio>

namespace esrl {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

void check_srelu_args(double x, double d) {
  if (!std::isfinite(x)) throw std::invalid_argument("srelu: non-finite input");
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("srelu: width must be > 0");
}

inline double srelu_unchecked(double x, double d) {
  if (x <= 0.0) return 0.0;
  if (x < d) return x * x / (2.0 * d);
  return x - 0.5 * d;
}

inline double srelu_grad_unchecked(double x, double d) {
  if (x <= 0.0) return 0.0;
  if (x < d) return x / d;
  return 1.0;
}

}  // namespace

double srelu(double x, double d) {
  check_srelu_args(x, d);
  return srelu_unchecked(x, d);
}

double srelu_grad(double x, double d) {
  check_srelu_args(x, d);
  return srelu_grad_unchecked(x, d);
}

FicnnParams FicnnParams::zeros(int n, const std::vector<int>& hidden, double srelu_d) {
  FicnnParams p;
  p.srelu_d = srelu_d;
  p.layer_sizes.push_back(n);
  p.layer_sizes.insert(p.layer_sizes.end(), hidden.begin(), hidden.end());
  p.layer_sizes.push_back(1);
  const int k = static_cast<int>(p.layer_sizes.size()) - 1;
  for (int i = 0; i < k; ++i) {
    p.wx.push_back(Mat::Zero(p.layer_sizes[i + 1], n));
    if (i >= 1) p.wz_raw.push_back(Mat::Zero(p.layer_sizes[i + 1], p.layer_sizes[i]));
  }
  return p;
}

void FicnnParams::validate() const {
  require(layer_sizes.size() >= 2, "ficnn: need at least input and output sizes");
  for (int s : layer_sizes) require(s > 0, "ficnn: layer sizes must be positive");
  require(layer_sizes.back() == 1, "ficnn: output must be scalar");
  const int k = static_cast<int>(layer_sizes.size()) - 1;
  const int n = layer_sizes.front();
  require(static_cast<int>(wx.size()) == k, "ficnn: wx count mismatch");
  require(static_cast<int>(wz_raw.size()) == k - 1, "ficnn: wz count mismatch");
  for (int i = 0; i < k; ++i) {
    require(wx[i].rows() == layer_sizes[i + 1] && wx[i].cols() == n, "ficnn: wx shape mismatch");
    require(wx[i].allFinite(), "ficnn: non-finite wx");
    if (i >= 1) {
      const Mat& wz = wz_raw[i - 1];
      require(wz.rows() == layer_sizes[i + 1] && wz.cols() == layer_sizes[i],
              "ficnn: wz shape mismatch");
      require(wz.allFinite(), "ficnn: non-finite wz");
    }
  }
  require(srelu_d > 0.0 && std::isfinite(srelu_d), "ficnn: srelu_d must be > 0");
}

Vec QuadParams::effective_diag() const { return eta.cwiseMax(eta_min).cwiseMin(eta_max); }

void QuadParams::validate() const {
  require(eta.size() > 0, "quad: empty eta");
  require(eta.allFinite(), "quad: non-finite eta");
  require(eta_min > 0.0 && eta_max >= eta_min, "quad: need 0 < eta_min <= eta_max");
}

void PotentialParams::validate() const {
  ficnn.validate();
  quad.validate();
  require(ficnn.input_dim() == dim(), "potential: ficnn and quad dimensions differ");
}

double ficnn_eval_with_grad(const FicnnParams& p, const Vec& x, Vec& grad) {
  const int k = p.num_layers();
  const int n = p.input_dim();
  if (x.size() != n) throw std::invalid_argument("ficnn: input dimension mismatch");
  const double d = p.srelu_d;

  // Forward pass, keeping pre-activations for the reverse sweep.
  std::vector<Vec> pre(k);
  Vec z;
  for (int i = 0; i < k; ++i) {
    if (i == 0) {
      pre[0].noalias() = p.wx[0] * x;
    } else {
      pre[i].noalias() = p.wx[i] * x;
      pre[i].noalias() += p.wz_raw[i - 1].cwiseMax(0.0) * z;
    }
    z = pre[i].unaryExpr([d](double a) { return srelu_unchecked(a, d); });
  }
  const double psi = z(0);

  // Reverse sweep: delta_i = dPsi/dpre_i.
  grad.setZero(n);
  Vec delta = pre[k - 1].unaryExpr([d](double a) { return srelu_grad_unchecked(a, d); });
  for (int i = k - 1; i >= 0; --i) {
    grad.noalias() += p.wx[i].transpose() * delta;
    if (i == 0) break;
    Vec back = p.wz_raw[i - 1].cwiseMax(0.0).transpose() * delta;
    delta = back.cwiseProduct(
        pre[i - 1].unaryExpr([d](double a) { return srelu_grad_unchecked(a, d); }));
  }
  return psi;
}

double ficnn_eval(const FicnnParams& p, const Vec& x) {
  const int k = p.num_layers();
  if (x.size() != p.input_dim()) throw std::invalid_argument("ficnn: input dimension mismatch");
  const double d = p.srelu_d;
  Vec z;
  for (int i = 0; i < k; ++i) {
    Vec a = p.wx[i] * x;
    if (i > 0) a.noalias() += p.wz_raw[i - 1].cwiseMax(0.0) * z;
    z = a.unaryExpr([d](double v) { return srelu_unchecked(v, d); });
  }
  return z(0);
}

Vec ficnn_input_grad(const FicnnParams& p, const Vec& x) {
  Vec g;
  ficnn_eval_with_grad(p, x, g);
  return g;
}

double potential_eval(const PotentialParams& p, const Vec& x) {
  if (x.size() != p.dim()) throw std::invalid_argument("potential: input dimension mismatch");
  const Vec s = p.quad.effective_diag();
  return 0.5 * x.dot(s.cwiseProduct(x)) + ficnn_eval(p.ficnn, x);
}

Vec potential_grad(const PotentialParams& p, const Vec& x) {
  if (x.size() != p.dim()) throw std::invalid_argument("potential: input dimension mismatch");
  Vec g;
  ficnn_eval_with_grad(p.ficnn, x, g);
  g += p.quad.effective_diag().cwiseProduct(x);
  return g;
}

}  // namespace esrl
