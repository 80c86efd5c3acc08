#pragma once

#include <vector>

#include "esrl/types.hpp"

namespace esrl {

/// Smoothed rectifier: 0 for x <= 0, x^2/(2d) on (0, d), x - d/2 beyond.
/// Convex, nonnegative and C^1.
double srelu(double x, double d);
double srelu_grad(double x, double d);

/// Fully input-convex network without biases.
///
///   z_1     = srelu(Wx[0] x)
///   z_{i+1} = srelu(max(Wz[i], 0) z_i + Wx[i] x),   i = 1 .. k-1
///   Psi(x)  = z_k  (scalar)
///
/// `wz_raw[j]` holds the unconstrained z-weights of layer j+1, so it has one
/// entry fewer than `wx`. The nonnegativity projection is applied on every
/// evaluation and never written back, which keeps the stored parameters free
/// for unconstrained search.
struct FicnnParams {
  std::vector<int> layer_sizes;  // {n, h_1, ..., h_m, 1}
  std::vector<Mat> wz_raw;       // layer_sizes.size() - 2 entries
  std::vector<Mat> wx;           // layer_sizes.size() - 1 entries
  double srelu_d = 0.1;

  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  int num_layers() const { return static_cast<int>(wx.size()); }

  /// All-zero parameters with the given hidden widths.
  static FicnnParams zeros(int n, const std::vector<int>& hidden, double srelu_d = 0.1);
  void validate() const;
};

/// Diagonal of S, stored unclamped; clamped to [eta_min, eta_max] on use.
struct QuadParams {
  Vec eta;
  double eta_min = 1e-3;
  double eta_max = 5.0;

  Vec effective_diag() const;
  void validate() const;
};

/// Convex potential 0.5 x^T S x + Psi(x).
struct PotentialParams {
  FicnnParams ficnn;
  QuadParams quad;

  int dim() const { return static_cast<int>(quad.eta.size()); }
  void validate() const;
};

double ficnn_eval(const FicnnParams& p, const Vec& x);
Vec ficnn_input_grad(const FicnnParams& p, const Vec& x);

/// Forward and reverse pass in one go; returns Psi(x) and writes the
/// gradient into `grad`.
double ficnn_eval_with_grad(const FicnnParams& p, const Vec& x, Vec& grad);

double potential_eval(const PotentialParams& p, const Vec& x);
/// S x + grad Psi(x). The policy negates it.
Vec potential_grad(const PotentialParams& p, const Vec& x);

}  // namespace esrl
