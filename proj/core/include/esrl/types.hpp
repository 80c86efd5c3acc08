#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace esrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a rollout produces a non-finite state or action. Rollouts
/// convert it into an early termination instead of propagating it.
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// 64-bit FNV-1a. Used for layout and config fingerprints that must be stable
// across platforms and runs (std::hash is neither).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

}  // namespace esrl
