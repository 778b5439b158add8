#include "sqz/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace sqz {
namespace {

Eigen::VectorXd residuals(const CurveModel& model, const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& sigma,
                          const Eigen::VectorXd& p) {
  Eigen::VectorXd r(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double w = sigma.empty() ? 1.0 : sigma[i];
    r(i) = (model(p, x[i]) - y[i]) / w;
  }
  return r;
}

// Central finite differences, step scaled to the parameter magnitude.
Eigen::MatrixXd jacobian(const CurveModel& model, const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::vector<double>& sigma,
                         const Eigen::VectorXd& p) {
  Eigen::MatrixXd j(x.size(), p.size());
  for (int k = 0; k < p.size(); ++k) {
    const double h = 1e-7 * (1.0 + std::abs(p(k)));
    Eigen::VectorXd pl = p, pr = p;
    pl(k) -= h;
    pr(k) += h;
    j.col(k) =
        (residuals(model, x, y, sigma, pr) - residuals(model, x, y, sigma, pl)) /
        (2.0 * h);
  }
  return j;
}

}  // namespace

FitResult fit_curve(const CurveModel& model, const std::vector<double>& x,
                    const std::vector<double>& y, Eigen::VectorXd initial,
                    const FitOptions& options) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit_curve: x and y sizes differ");
  if (!options.sigma.empty() && options.sigma.size() != x.size())
    throw std::invalid_argument("fit_curve: sigma size mismatch");
  if (initial.size() == 0)
    throw std::invalid_argument("fit_curve: no parameters");
  if (x.size() < size_t(initial.size()))
    throw std::invalid_argument("fit_curve: fewer points than parameters");

  FitResult res;
  res.params = std::move(initial);
  Eigen::VectorXd r = residuals(model, x, y, options.sigma, res.params);
  double cost = r.squaredNorm();
  double lambda = options.initial_lambda;

  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it + 1;
    const Eigen::MatrixXd j = jacobian(model, x, y, options.sigma, res.params);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;

    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::MatrixXd m = jtj;
      m.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = m.ldlt().solve(-g);
      const Eigen::VectorXd trial = res.params + step;
      const Eigen::VectorXd rt = residuals(model, x, y, options.sigma, trial);
      const double trial_cost = rt.squaredNorm();
      if (trial_cost < cost) {
        const double improvement = (cost - trial_cost) / std::max(cost, 1e-300);
        res.params = trial;
        r = rt;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (improvement < options.tol) res.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) {  // no downhill direction left at any damping: at a minimum
      res.converged = true;
      break;
    }
    if (res.converged) break;
  }

  res.chi2 = cost;
  const Eigen::MatrixXd j = jacobian(model, x, y, options.sigma, res.params);
  Eigen::MatrixXd jtj = j.transpose() * j;
  // Guard singular directions so the covariance stays finite.
  jtj.diagonal() += Eigen::VectorXd::Constant(jtj.rows(), 1e-300);
  Eigen::MatrixXd cov = jtj.inverse();
  const int dof = int(x.size()) - int(res.params.size());
  if (options.sigma.empty() && dof > 0) cov *= cost / dof;
  res.covariance = cov;
  res.uncertainties = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return res;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations, double tol) {
  if (a.rows() != b.size())
    throw std::invalid_argument("nnls: dimension mismatch");
  const int n = int(a.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> active(n, true);  // active = clamped at zero

  for (int it = 0; it < max_iterations; ++it) {
    // Most-violating gradient among clamped variables.
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    int best = -1;
    double wmax = tol;
    for (int k = 0; k < n; ++k)
      if (active[k] && w(k) > wmax) {
        wmax = w(k);
        best = k;
      }
    if (best < 0) break;
    active[best] = false;

    // Solve the unconstrained problem on the passive set; shrink back any
    // variable the solve drives negative.
    for (int inner = 0; inner < max_iterations; ++inner) {
      std::vector<int> passive;
      for (int k = 0; k < n; ++k)
        if (!active[k]) passive.push_back(k);
      Eigen::MatrixXd ap(a.rows(), passive.size());
      for (size_t c = 0; c < passive.size(); ++c) ap.col(c) = a.col(passive[c]);
      const Eigen::VectorXd z =
          ap.colPivHouseholderQr().solve(b);

      if ((z.array() > 0).all()) {
        x.setZero();
        for (size_t c = 0; c < passive.size(); ++c) x(passive[c]) = z(c);
        break;
      }
      double alpha = 1.0;
      for (size_t c = 0; c < passive.size(); ++c)
        if (z(c) <= 0) {
          const double xc = x(passive[c]);
          alpha = std::min(alpha, xc / (xc - z(c)));
        }
      for (size_t c = 0; c < passive.size(); ++c) {
        x(passive[c]) += alpha * (z(c) - x(passive[c]));
        if (x(passive[c]) <= tol) {
          x(passive[c]) = 0.0;
          active[passive[c]] = true;
        }
      }
    }
  }
  return x;
}

}  // namespace sqz
