// fitting.hpp — Deterministic nonlinear least squares (Levenberg–Marquardt
// with finite-difference Jacobians and covariance-based uncertainties) and
// non-negative least squares for population unfolding.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace sqz {

// y = model(params, x)
using CurveModel = std::function<double(const Eigen::VectorXd&, double)>;

struct FitOptions {
  int max_iterations = 200;
  double tol = 1e-12;           // relative cost-improvement stop
  double initial_lambda = 1e-3;
  std::vector<double> sigma;    // per-point errors; empty = unit weights
};

struct FitResult {
  Eigen::VectorXd params;
  Eigen::VectorXd uncertainties;  // 1σ, from the scaled covariance
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;              // weighted sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

// Minimizes Σ ((model(p, x_i) − y_i)/σ_i)².  When no per-point errors are
// given, the covariance is scaled by the reduced χ² so uncertainties reflect
// the observed scatter.
FitResult fit_curve(const CurveModel& model, const std::vector<double>& x,
                    const std::vector<double>& y, Eigen::VectorXd initial,
                    const FitOptions& options = {});

// Lawson–Hanson active-set solve of min ‖A w − b‖ subject to w ≥ 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations = 300, double tol = 1e-12);

}  // namespace sqz
