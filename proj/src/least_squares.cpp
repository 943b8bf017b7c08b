// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#include "spintex/detail/least_squares.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace spintex::detail {

namespace {

struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ResidualFn* fn;
  int n;
  int m;

  int inputs() const { return n; }
  int values() const { return m; }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    r.resize(m);
    (*fn)(p, r);
    return r.allFinite() ? 0 : -1;
  }
};

}  // namespace

LsqResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0, int m,
                              double tol, int max_evals) {
  const int n = static_cast<int>(p0.size());
  Functor f{&fn, n, m};
  Eigen::NumericalDiff<Functor> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(nd);
  lm.parameters.ftol = tol;
  lm.parameters.xtol = tol;
  lm.parameters.maxfev = max_evals;
  const auto status = lm.minimize(p0);

  LsqResult out;
  out.params = p0;
  out.status = static_cast<int>(status);
  out.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;

  Eigen::VectorXd r(m);
  fn(p0, r);
  out.rss = r.squaredNorm();

  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd rp(m), rm(m);
  for (int k = 0; k < n; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(p0[k]));
    Eigen::VectorXd pp = p0, pm = p0;
    pp[k] += h;
    pm[k] -= h;
    fn(pp, rp);
    fn(pm, rm);
    jac.col(k) = (rp - rm) / (2.0 * h);
  }
  const double dof = std::max(1, m - n);
  const Eigen::MatrixXd cov =
      (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() *
      (out.rss / dof);
  out.std_error = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

}  // namespace spintex::detail
