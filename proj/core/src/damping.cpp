#include "esrl/damping.hpp"

#include <cmath>

namespace esrl {

FcnnParams FcnnParams::zeros(int in, const std::vector<int>& hidden, int out) {
  FcnnParams p;
  p.layer_sizes.push_back(in);
  p.layer_sizes.insert(p.layer_sizes.end(), hidden.begin(), hidden.end());
  p.layer_sizes.push_back(out);
  for (std::size_t i = 0; i + 1 < p.layer_sizes.size(); ++i) {
    p.w.push_back(Mat::Zero(p.layer_sizes[i + 1], p.layer_sizes[i]));
    p.b.push_back(Vec::Zero(p.layer_sizes[i + 1]));
  }
  return p;
}

void FcnnParams::validate() const {
  require(layer_sizes.size() >= 2, "fcnn: need at least input and output sizes");
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i)
    require(layer_sizes[i] > 0, "fcnn: input and hidden sizes must be positive");
  // The output may be empty: a 1-D damping matrix has no off-diagonal terms.
  require(layer_sizes.back() >= 0, "fcnn: negative output size");
  const std::size_t k = layer_sizes.size() - 1;
  require(w.size() == k && b.size() == k, "fcnn: layer count mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    require(w[i].rows() == layer_sizes[i + 1] && w[i].cols() == layer_sizes[i],
            "fcnn: weight shape mismatch");
    require(b[i].size() == layer_sizes[i + 1], "fcnn: bias shape mismatch");
    require(w[i].allFinite() && b[i].allFinite(), "fcnn: non-finite parameters");
  }
}

Vec fcnn_eval(const FcnnParams& p, const Vec& v) {
  if (v.size() != p.input_dim()) throw std::invalid_argument("fcnn: input dimension mismatch");
  const std::size_t k = p.w.size();
  Vec h = v;
  for (std::size_t i = 0; i < k; ++i) {
    Vec a = p.w[i] * h + p.b[i];
    if (i + 1 < k) {
      h = a.array().tanh().matrix();
    } else {
      h = std::move(a);
    }
  }
  return h;
}

void DampingParams::validate() const {
  diag_net.validate();
  offdiag_net.validate();
  const int n = dim();
  require(n > 0, "damping: zero dimension");
  require(diag_net.output_dim() == n, "damping: diag_net output must equal n");
  require(offdiag_net.input_dim() == n, "damping: offdiag_net input must equal n");
  require(offdiag_net.output_dim() == n * (n - 1) / 2,
          "damping: offdiag_net output must equal n(n-1)/2");
  require(eps_diag > 0.0 && std::isfinite(eps_diag), "damping: eps_diag must be > 0");
}

Mat damping_lower_factor(const DampingParams& p, const Vec& xdot) {
  const int n = p.dim();
  if (xdot.size() != n) throw std::invalid_argument("damping: velocity dimension mismatch");
  const Vec diag = fcnn_eval(p.diag_net, xdot);
  Mat lower = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) lower(j, j) = std::max(diag(j), 0.0) + p.eps_diag;
  if (n > 1) {
    const Vec off = fcnn_eval(p.offdiag_net, xdot);
    int idx = 0;
    for (int r = 1; r < n; ++r)
      for (int c = 0; c < r; ++c) lower(r, c) = off(idx++);
  }
  return lower;
}

Mat damping_matrix(const DampingParams& p, const Vec& xdot) {
  const Mat lower = damping_lower_factor(p, xdot);
  return lower * lower.transpose();
}

Vec damping_force(const DampingParams& p, const Vec& xdot) {
  const Mat lower = damping_lower_factor(p, xdot);
  return -(lower * (lower.transpose() * xdot));
}

double damping_eigen_lower_bound(const Mat& lower) {
  const int n = static_cast<int>(lower.rows());
  const double det = lower.diagonal().prod();
  const double fro2 = lower.squaredNorm();
  return det * det / std::pow(fro2, n - 1);
}

}  // namespace esrl
