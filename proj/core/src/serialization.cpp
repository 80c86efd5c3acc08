#include "esrl/serialization.hpp"

namespace esrl {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix: expected nested arrays");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

json vector_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace {

json matrices_to_json(const std::vector<Mat>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<Mat> matrices_from_json(const json& j) {
  std::vector<Mat> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

json to_json(const FicnnParams& p) {
  return {{"layer_sizes", p.layer_sizes},
          {"Wz_raw", matrices_to_json(p.wz_raw)},
          {"Wx", matrices_to_json(p.wx)},
          {"srelu_d", p.srelu_d}};
}

json to_json(const QuadParams& p) {
  return {{"eta", vector_to_json(p.eta)}, {"eta_min", p.eta_min}, {"eta_max", p.eta_max}};
}

json to_json(const PotentialParams& p) {
  return {{"ficnn", to_json(p.ficnn)}, {"quad", to_json(p.quad)}};
}

json to_json(const FcnnParams& p) {
  json b = json::array();
  for (const auto& v : p.b) b.push_back(vector_to_json(v));
  return {{"layer_sizes", p.layer_sizes}, {"W", matrices_to_json(p.w)}, {"b", b}};
}

json to_json(const DampingParams& p) {
  return {{"diag_net", to_json(p.diag_net)},
          {"offdiag_net", to_json(p.offdiag_net)},
          {"eps_diag", p.eps_diag}};
}

json to_json(const EsPolicyParams& p) {
  return {{"potential", to_json(p.potential)},
          {"damping", to_json(p.damping)},
          {"goal", vector_to_json(p.goal)}};
}

json to_json(const PolicyArchitecture& a) {
  return {{"dim", a.dim},
          {"icnn_hidden", a.icnn_hidden},
          {"diag_hidden", a.diag_hidden},
          {"offdiag_hidden", a.offdiag_hidden},
          {"srelu_d", a.srelu_d},
          {"eta_init", a.eta_init},
          {"eta_min", a.eta_min},
          {"eta_max", a.eta_max},
          {"eps_diag", a.eps_diag},
          {"variant", to_string(a.variant)},
          {"goal", vector_to_json(a.goal)}};
}

json to_json(const CemDistribution& d) {
  return {{"mu", vector_to_json(d.mu)}, {"sigma", vector_to_json(d.sigma)}};
}

FicnnParams ficnn_from_json(const json& j) {
  FicnnParams p;
  p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  p.wz_raw = matrices_from_json(j.at("Wz_raw"));
  p.wx = matrices_from_json(j.at("Wx"));
  p.srelu_d = j.at("srelu_d").get<double>();
  p.validate();
  return p;
}

QuadParams quad_from_json(const json& j) {
  QuadParams p;
  p.eta = vector_from_json(j.at("eta"));
  p.eta_min = j.at("eta_min").get<double>();
  p.eta_max = j.at("eta_max").get<double>();
  p.validate();
  return p;
}

PotentialParams potential_from_json(const json& j) {
  PotentialParams p{ficnn_from_json(j.at("ficnn")), quad_from_json(j.at("quad"))};
  p.validate();
  return p;
}

FcnnParams fcnn_from_json(const json& j) {
  FcnnParams p;
  p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  p.w = matrices_from_json(j.at("W"));
  for (const auto& b : j.at("b")) p.b.push_back(vector_from_json(b));
  p.validate();
  return p;
}

DampingParams damping_from_json(const json& j) {
  DampingParams p{fcnn_from_json(j.at("diag_net")), fcnn_from_json(j.at("offdiag_net")),
                  j.at("eps_diag").get<double>()};
  p.validate();
  return p;
}

EsPolicyParams policy_from_json(const json& j) {
  EsPolicyParams p{potential_from_json(j.at("potential")), damping_from_json(j.at("damping")),
                   vector_from_json(j.at("goal"))};
  p.validate();
  return p;
}

PolicyArchitecture architecture_from_json(const json& j) {
  PolicyArchitecture a;
  a.dim = j.at("dim").get<int>();
  a.icnn_hidden = j.at("icnn_hidden").get<std::vector<int>>();
  a.diag_hidden = j.at("diag_hidden").get<std::vector<int>>();
  a.offdiag_hidden = j.at("offdiag_hidden").get<std::vector<int>>();
  a.srelu_d = j.at("srelu_d").get<double>();
  a.eta_init = j.at("eta_init").get<double>();
  a.eta_min = j.at("eta_min").get<double>();
  a.eta_max = j.at("eta_max").get<double>();
  a.eps_diag = j.at("eps_diag").get<double>();
  a.variant = parse_variant(j.at("variant").get<std::string>());
  a.goal = vector_from_json(j.at("goal"));
  a.validate();
  return a;
}

CemDistribution distribution_from_json(const json& j) {
  CemDistribution d{vector_from_json(j.at("mu")), vector_from_json(j.at("sigma"))};
  d.validate();
  return d;
}

json checkpoint_to_json(const Checkpoint& c) {
  const FlatLayout layout = FlatLayout::make(c.arch);
  return {{"format", "esrl-checkpoint/1"},
          {"architecture", to_json(c.arch)},
          {"layout_hash", hex64(layout.hash())},
          {"parameter_count", layout.total},
          {"values", vector_to_json(c.values)},
          {"distribution", to_json(c.distribution)},
          {"best_fitness", c.best_fitness},
          {"config_hash", c.config_hash},
          {"seed", c.seed}};
}

Checkpoint checkpoint_from_json(const json& j) {
  if (j.value("format", std::string()) != "esrl-checkpoint/1")
    throw std::runtime_error("checkpoint: unknown format");
  Checkpoint c;
  c.arch = architecture_from_json(j.at("architecture"));
  const FlatLayout layout = FlatLayout::make(c.arch);
  const std::string stored = j.at("layout_hash").get<std::string>();
  if (stored != hex64(layout.hash()))
    throw std::runtime_error("checkpoint: layout hash mismatch (stored " + stored +
                             ", expected " + hex64(layout.hash()) + ")");
  c.values = vector_from_json(j.at("values"));
  if (c.values.size() != layout.total)
    throw std::runtime_error("checkpoint: value count does not match the layout");
  c.distribution = distribution_from_json(j.at("distribution"));
  if (c.distribution.mu.size() != layout.total)
    throw std::runtime_error("checkpoint: distribution size does not match the layout");
  c.best_fitness = j.value("best_fitness", 0.0);
  c.config_hash = j.value("config_hash", std::string());
  c.seed = j.value("seed", std::uint64_t{0});
  return c;
}

}  // namespace esrl
