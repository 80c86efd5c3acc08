#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "esrl/damping.hpp"
#include "esrl/potential.hpp"

namespace esrl {

/// Which parts of the potential are present and searchable.
enum class PotentialVariant { kCombined, kIcnnOnly, kQuadOnly };

std::string to_string(PotentialVariant v);
PotentialVariant parse_variant(const std::string& name);

/// Shapes and fixed constants of an ES policy. Everything the flat layout
/// depends on lives here.
struct PolicyArchitecture {
  int dim = 2;
  std::vector<int> icnn_hidden{16, 16};
  std::vector<int> diag_hidden{8, 8};
  std::vector<int> offdiag_hidden{8, 8};
  double srelu_d = 0.1;
  double eta_init = 0.1;
  double eta_min = 1e-3;
  double eta_max = 5.0;
  double eps_diag = 1e-2;
  PotentialVariant variant = PotentialVariant::kCombined;
  Vec goal = Vec::Zero(2);

  void validate() const;
};

/// u = -S (x - goal) - grad Psi(x - goal) - D(xdot) xdot
struct EsPolicyParams {
  PotentialParams potential;
  DampingParams damping;
  Vec goal;

  int dim() const { return potential.dim(); }
  void validate() const;
};

Vec policy_action(const EsPolicyParams& p, const Vec& x, const Vec& xdot);

/// One contiguous block of the flat parameter vector. Matrices are stored
/// row-major.
struct FlatSegment {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size() const { return rows * cols; }
};

/// Ordering of the CEM search vector:
///   eta | icnn.wx[0] | icnn.wz[1] | icnn.wx[1] | ... | diag.w[0] | diag.b[0]
///   | ... | offdiag.w[0] | offdiag.b[0] | ...
/// Segments absent from the search (eta for icnn_only, the ICNN for
/// quad_only) are left out and take their frozen values on unflatten.
struct FlatLayout {
  PolicyArchitecture arch;
  std::vector<FlatSegment> segments;
  int total = 0;

  static FlatLayout make(const PolicyArchitecture& arch);
  /// Canonical text of the segment list; hashed for checkpoint checks.
  std::string descriptor() const;
  std::uint64_t hash() const;
  const FlatSegment* find(const std::string& name) const;
};

struct FlatParamVector {
  Vec values;
  FlatLayout layout;
};

FlatParamVector flatten(const EsPolicyParams& p, const FlatLayout& layout);
/// Combined-variant layout inferred from the parameter shapes.
FlatParamVector flatten(const EsPolicyParams& p);
EsPolicyParams unflatten(const FlatLayout& layout, const Vec& values);

/// Architecture matching the shapes of `p` (combined variant).
PolicyArchitecture architecture_of(const EsPolicyParams& p);

/// Xavier-uniform weights, zero biases, eta = arch.eta_init. Frozen parts of
/// the chosen variant are set to their frozen values.
EsPolicyParams initialize_policy(const PolicyArchitecture& arch, std::mt19937_64& rng);

/// Every searched entry drawn uniformly from [-radius, radius].
FlatParamVector random_flat(const FlatLayout& layout, std::mt19937_64& rng, double radius = 1.0);

}  // namespace esrl
