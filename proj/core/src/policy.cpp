#include "esrl/policy.hpp"

#include <cmath>
#include <sstream>

namespace esrl {

std::string to_string(PotentialVariant v) {
  switch (v) {
    case PotentialVariant::kCombined: return "combined";
    case PotentialVariant::kIcnnOnly: return "icnn_only";
    case PotentialVariant::kQuadOnly: return "quad_only";
  }
  return "unknown";
}

PotentialVariant parse_variant(const std::string& name) {
  if (name == "combined") return PotentialVariant::kCombined;
  if (name == "icnn_only") return PotentialVariant::kIcnnOnly;
  if (name == "quad_only") return PotentialVariant::kQuadOnly;
  throw std::invalid_argument("unknown potential variant '" + name + "'");
}

void PolicyArchitecture::validate() const {
  require(dim > 0, "architecture: dim must be positive");
  require(!icnn_hidden.empty(), "architecture: ICNN needs at least one hidden layer");
  for (int h : icnn_hidden) require(h > 0, "architecture: ICNN widths must be positive");
  for (int h : diag_hidden) require(h > 0, "architecture: damping widths must be positive");
  for (int h : offdiag_hidden) require(h > 0, "architecture: damping widths must be positive");
  require(srelu_d > 0.0, "architecture: srelu_d must be > 0");
  require(eta_min > 0.0 && eta_max >= eta_min, "architecture: need 0 < eta_min <= eta_max");
  require(eps_diag > 0.0, "architecture: eps_diag must be > 0");
  require(goal.size() == dim && goal.allFinite(), "architecture: goal must be finite, size dim");
}

void EsPolicyParams::validate() const {
  potential.validate();
  damping.validate();
  require(damping.dim() == dim(), "policy: potential and damping dimensions differ");
  require(goal.size() == dim() && goal.allFinite(), "policy: goal must be finite, size n");
}

Vec policy_action(const EsPolicyParams& p, const Vec& x, const Vec& xdot) {
  const int n = p.dim();
  if (x.size() != n || xdot.size() != n)
    throw std::invalid_argument("policy: state dimension mismatch");
  if (!x.allFinite() || !xdot.allFinite())
    throw std::invalid_argument("policy: non-finite state");
  const Vec e = x - p.goal;
  Vec u = -potential_grad(p.potential, e);
  u += damping_force(p.damping, xdot);
  return u;
}

// -- Flat layout --------------------------------------------------------------

namespace {

void add_segment(FlatLayout& l, std::string name, int rows, int cols) {
  FlatSegment s{std::move(name), rows, cols, l.total};
  l.total += s.size();
  l.segments.push_back(std::move(s));
}

void add_fcnn_segments(FlatLayout& l, const std::string& prefix, int in,
                       const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    add_segment(l, prefix + ".w" + std::to_string(i), sizes[i + 1], sizes[i]);
    add_segment(l, prefix + ".b" + std::to_string(i), sizes[i + 1], 1);
  }
}

void write_block(const Mat& m, Vec& out, const FlatSegment& s) {
  if (m.rows() != s.rows || m.cols() != s.cols)
    throw std::invalid_argument("flatten: shape mismatch in segment " + s.name);
  int k = s.offset;
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) out(k++) = m(r, c);
}

Mat read_block(const Vec& values, const FlatSegment& s) {
  Mat m(s.rows, s.cols);
  int k = s.offset;
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) m(r, c) = values(k++);
  return m;
}

EsPolicyParams skeleton(const PolicyArchitecture& a) {
  EsPolicyParams p;
  p.potential.ficnn = FicnnParams::zeros(a.dim, a.icnn_hidden, a.srelu_d);
  p.potential.quad.eta = Vec::Constant(a.dim, a.eta_init);
  p.potential.quad.eta_min = a.eta_min;
  p.potential.quad.eta_max = a.eta_max;
  p.damping.diag_net = FcnnParams::zeros(a.dim, a.diag_hidden, a.dim);
  p.damping.offdiag_net = FcnnParams::zeros(a.dim, a.offdiag_hidden, a.dim * (a.dim - 1) / 2);
  p.damping.eps_diag = a.eps_diag;
  p.goal = a.goal;
  if (a.variant == PotentialVariant::kIcnnOnly) p.potential.quad.eta.setConstant(a.eta_min);
  return p;
}

// Visits every (segment name, parameter block) pair of a policy in layout
// order. Blocks not present in the layout are skipped by the callers.
template <typename P, typename F>
void for_each_block(P& p, F&& f) {
  f(std::string("eta"), p.potential.quad.eta);
  auto& icnn = p.potential.ficnn;
  for (int i = 0; i < static_cast<int>(icnn.wx.size()); ++i) {
    if (i >= 1) f("icnn.wz" + std::to_string(i), icnn.wz_raw[i - 1]);
    f("icnn.wx" + std::to_string(i), icnn.wx[i]);
  }
  auto fcnn = [&f](const std::string& prefix, auto& net) {
    for (std::size_t i = 0; i < net.w.size(); ++i) {
      f(prefix + ".w" + std::to_string(i), net.w[i]);
      f(prefix + ".b" + std::to_string(i), net.b[i]);
    }
  };
  fcnn("diag", p.damping.diag_net);
  fcnn("offdiag", p.damping.offdiag_net);
}

}  // namespace

FlatLayout FlatLayout::make(const PolicyArchitecture& a) {
  a.validate();
  FlatLayout l;
  l.arch = a;
  const int n = a.dim;
  if (a.variant != PotentialVariant::kIcnnOnly) add_segment(l, "eta", n, 1);
  if (a.variant != PotentialVariant::kQuadOnly) {
    std::vector<int> sizes{n};
    sizes.insert(sizes.end(), a.icnn_hidden.begin(), a.icnn_hidden.end());
    sizes.push_back(1);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      if (i >= 1) add_segment(l, "icnn.wz" + std::to_string(i), sizes[i + 1], sizes[i]);
      add_segment(l, "icnn.wx" + std::to_string(i), sizes[i + 1], n);
    }
  }
  add_fcnn_segments(l, "diag", n, a.diag_hidden, n);
  add_fcnn_segments(l, "offdiag", n, a.offdiag_hidden, n * (n - 1) / 2);
  return l;
}

std::string FlatLayout::descriptor() const {
  std::ostringstream os;
  os << "esrl-layout/1;variant=" << to_string(arch.variant) << ";dim=" << arch.dim;
  for (const auto& s : segments) os << ';' << s.name << ':' << s.rows << 'x' << s.cols;
  return os.str();
}

std::uint64_t FlatLayout::hash() const { return fnv1a64(descriptor()); }

const FlatSegment* FlatLayout::find(const std::string& name) const {
  for (const auto& s : segments)
    if (s.name == name) return &s;
  return nullptr;
}

FlatParamVector flatten(const EsPolicyParams& p, const FlatLayout& layout) {
  FlatParamVector out{Vec::Zero(layout.total), layout};
  int written = 0;
  for_each_block(p, [&](const std::string& name, const auto& block) {
    const FlatSegment* s = layout.find(name);
    if (s == nullptr) return;
    write_block(Mat(block), out.values, *s);
    written += s->size();
  });
  if (written != layout.total)
    throw std::invalid_argument("flatten: parameters do not cover the layout");
  return out;
}

PolicyArchitecture architecture_of(const EsPolicyParams& p) {
  p.validate();
  PolicyArchitecture a;
  a.dim = p.dim();
  const auto& ls = p.potential.ficnn.layer_sizes;
  a.icnn_hidden.assign(ls.begin() + 1, ls.end() - 1);
  const auto& dl = p.damping.diag_net.layer_sizes;
  a.diag_hidden.assign(dl.begin() + 1, dl.end() - 1);
  const auto& ol = p.damping.offdiag_net.layer_sizes;
  a.offdiag_hidden.assign(ol.begin() + 1, ol.end() - 1);
  a.srelu_d = p.potential.ficnn.srelu_d;
  a.eta_min = p.potential.quad.eta_min;
  a.eta_max = p.potential.quad.eta_max;
  a.eps_diag = p.damping.eps_diag;
  a.goal = p.goal;
  a.variant = PotentialVariant::kCombined;
  return a;
}

FlatParamVector flatten(const EsPolicyParams& p) {
  return flatten(p, FlatLayout::make(architecture_of(p)));
}

EsPolicyParams unflatten(const FlatLayout& layout, const Vec& values) {
  if (values.size() != layout.total)
    throw std::invalid_argument("unflatten: expected " + std::to_string(layout.total) +
                                " values, got " + std::to_string(values.size()));
  EsPolicyParams p = skeleton(layout.arch);
  for_each_block(p, [&](const std::string& name, auto& block) {
    const FlatSegment* s = layout.find(name);
    if (s == nullptr) return;
    block = read_block(values, *s);
  });
  return p;
}

EsPolicyParams initialize_policy(const PolicyArchitecture& arch, std::mt19937_64& rng) {
  const FlatLayout layout = FlatLayout::make(arch);
  EsPolicyParams p = skeleton(arch);
  // Frozen blocks consume their draws too.
  for_each_block(p, [&](const std::string& name, auto& block) {
    if (name == "eta" || name.find(".b") != std::string::npos) return;
    const bool searched = layout.find(name) != nullptr;
    // Xavier-uniform: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
    const double a = std::sqrt(6.0 / static_cast<double>(block.rows() + block.cols()));
    std::uniform_real_distribution<double> dist(-a, a);
    for (int r = 0; r < block.rows(); ++r)
      for (int c = 0; c < block.cols(); ++c) {
        const double w = dist(rng);
        if (searched) block(r, c) = w;
      }
  });
  return p;
}

FlatParamVector random_flat(const FlatLayout& layout, std::mt19937_64& rng, double radius) {
  require(std::isfinite(radius) && radius > 0.0, "random_flat: radius must be > 0");
  std::uniform_real_distribution<double> unif(-radius, radius);
  FlatParamVector out{Vec(layout.total), layout};
  for (int i = 0; i < layout.total; ++i) out.values(i) = unif(rng);
  return out;
}

}  // namespace esrl
