#pragma once

#include <vector>

#include "esrl/types.hpp"

namespace esrl {

/// Plain MLP: affine -> tanh -> ... -> affine (identity output).
struct FcnnParams {
  std::vector<int> layer_sizes;  // {in, h_1, ..., out}
  std::vector<Mat> w;
  std::vector<Vec> b;

  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  int output_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }

  static FcnnParams zeros(int in, const std::vector<int>& hidden, int out);
  void validate() const;
};

Vec fcnn_eval(const FcnnParams& p, const Vec& v);

/// Velocity-dependent damping D(xdot) = L L^T. `diag_net` yields the
/// diagonal of L through max(., 0) + eps_diag; `offdiag_net` yields the
/// strictly-lower entries packed row-major: (1,0), (2,0), (2,1), (3,0), ...
struct DampingParams {
  FcnnParams diag_net;
  FcnnParams offdiag_net;
  double eps_diag = 1e-2;

  int dim() const { return diag_net.input_dim(); }
  void validate() const;
};

Mat damping_lower_factor(const DampingParams& p, const Vec& xdot);
Mat damping_matrix(const DampingParams& p, const Vec& xdot);
/// -D(xdot) xdot
Vec damping_force(const DampingParams& p, const Vec& xdot);

/// Lower bound on lambda_min(L L^T) from det(L)^2 / ||L||_F^(2(n-1)).
double damping_eigen_lower_bound(const Mat& lower);

}  // namespace esrl
