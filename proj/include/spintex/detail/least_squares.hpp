// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <functional>

namespace spintex::detail {

/// Residual callback: fill `r` (pre-sized to m) for parameters `p`.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)>;

struct LsqResult {
  Eigen::VectorXd params;
  Eigen::VectorXd std_error;  // sqrt(diag(s^2 (J^T J)^-1)), s^2 = rss / (m - n)
  double rss = 0.0;
  int status = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with a forward-difference Jacobian (Eigen's
/// unsupported MINPACK port), followed by a central-difference Jacobian at
/// the optimum for the covariance.
LsqResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0, int m,
                              double tol = 1e-12, int max_evals = 20000);

}  // namespace spintex::detail
