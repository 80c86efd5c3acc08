#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "esrl/cem.hpp"
#include "esrl/policy.hpp"

namespace esrl {

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vec& v);
Vec vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FicnnParams& p);
nlohmann::json to_json(const QuadParams& p);
nlohmann::json to_json(const PotentialParams& p);
nlohmann::json to_json(const FcnnParams& p);
nlohmann::json to_json(const DampingParams& p);
nlohmann::json to_json(const EsPolicyParams& p);
nlohmann::json to_json(const PolicyArchitecture& a);
nlohmann::json to_json(const CemDistribution& d);

FicnnParams ficnn_from_json(const nlohmann::json& j);
QuadParams quad_from_json(const nlohmann::json& j);
PotentialParams potential_from_json(const nlohmann::json& j);
FcnnParams fcnn_from_json(const nlohmann::json& j);
DampingParams damping_from_json(const nlohmann::json& j);
EsPolicyParams policy_from_json(const nlohmann::json& j);
PolicyArchitecture architecture_from_json(const nlohmann::json& j);
CemDistribution distribution_from_json(const nlohmann::json& j);

/// Checkpoint document: architecture, layout hash, flat values of the best
/// sample and the final search distribution.
struct Checkpoint {
  PolicyArchitecture arch;
  Vec values;
  CemDistribution distribution;
  std::string config_hash;
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
};

nlohmann::json checkpoint_to_json(const Checkpoint& c);
/// Throws std::runtime_error when the stored layout hash does not match the
/// layout rebuilt from the stored architecture, or the value count differs.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace esrl
