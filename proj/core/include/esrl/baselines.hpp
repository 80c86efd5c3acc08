#pragma once

#include <random>

#include "esrl/policy.hpp"

namespace esrl {

/// Initial policy for one of the potential ablation variants. Damping is
/// identical across variants. icnn_only pins eta at eta_min; quad_only has
/// an all-zero ICNN that stays out of the search vector.
EsPolicyParams make_policy(PotentialVariant variant, PolicyArchitecture arch,
                           std::mt19937_64& rng);

}  // namespace esrl
