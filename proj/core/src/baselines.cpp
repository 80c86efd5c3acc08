#include "esrl/baselines.hpp"

namespace esrl {

EsPolicyParams make_policy(PotentialVariant variant, PolicyArchitecture arch,
                           std::mt19937_64& rng) {
  arch.variant = variant;
  return initialize_policy(arch, rng);
}

}  // namespace esrl
