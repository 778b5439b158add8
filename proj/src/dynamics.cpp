#include "sqz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqz {
namespace {

// Dormand-Prince 5(4) tableau.  k7 is FSAL: it equals k1 of the next step.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <class State>
double error_ratio(const State& err, const State& y0, const State& y1,
                   double rtol, double atol) {
  const auto scale = atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

// Adaptive integration of dy/dt = rhs(t, y) over [t0, t1].  `observer` is
// called after every accepted step with the current time and state.
template <class State, class Rhs>
void integrate_adaptive(const Rhs& rhs, State& y, double t0, double t1,
                        double rtol, double atol, double max_step,
                        const std::function<void(double, const State&)>&
                            observer = {}) {
  if (t1 <= t0) return;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y;
  State ytmp = y, ynew = y, yerr = y;

  rhs(t0, y, k1);
  double t = t0;
  double h = (t1 - t0) / 100.0;
  if (max_step > 0) h = std::min(h, max_step);

  const int max_steps = 50'000'000;
  for (int step = 0; step < max_steps; ++step) {
    if (t >= t1) return;
    h = std::min(h, t1 - t);

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double err = error_ratio(yerr, y, ynew, rtol, atol);
    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (observer) observer(t, y);
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    if (max_step > 0) h = std::min(h, max_step);
    if (!(h > 0) || t + h == t)
      throw std::runtime_error("integrate_adaptive: step size underflow");
  }
  throw std::runtime_error("integrate_adaptive: step budget exhausted");
}

// Runs the integrator over each inter-sample segment so samples land exactly.
template <class State, class Rhs>
void integrate_with_samples(const Rhs& rhs, State& y, const EvolutionSpec& spec,
                            const std::vector<double>& samples,
                            const std::function<void(double, const State&)>&
                                on_sample) {
  spec.validate();
  double t = spec.t_start;
  if (!samples.empty()) {
    if (!on_sample)
      throw std::invalid_argument("evolve: samples given without a callback");
    double prev = spec.t_start;
    for (double ts : samples) {
      if (ts < prev || ts > spec.t_end)
        throw std::invalid_argument(
            "evolve: sample times must be ascending within the window");
      prev = ts;
    }
    for (double ts : samples) {
      integrate_adaptive(rhs, y, t, ts, spec.rtol, spec.atol, spec.max_step);
      t = ts;
      on_sample(t, y);
    }
  }
  integrate_adaptive(rhs, y, t, spec.t_end, spec.rtol, spec.atol,
                     spec.max_step);
}

// In-place shifted-scaled products with the oscillator ladder operators on a
// spin ⊗ oscillator density matrix, used to apply the heating dissipator in
// O(dim²) without forming the collapse operators.
//
//   (a ρ a†)_{(s,n),(t,m)} = √(n+1)√(m+1) ρ_{(s,n+1),(t,m+1)}
//   (a† ρ a)_{(s,n),(t,m)} = √n √m       ρ_{(s,n−1),(t,m−1)}
void add_heating_dissipator(const Matrix& rho, double rate, int dim,
                            Matrix& out) {
  const int total = 2 * dim;
  // √(n+1)√(m+1)·down-shifted and √n√m·up-shifted sandwich terms.
  for (int s = 0; s < 2; ++s) {
    for (int u = 0; u < 2; ++u) {
      const int ro = s * dim, co = u * dim;
      for (int n = 0; n + 1 < dim; ++n) {
        const double fn = std::sqrt(double(n + 1));
        for (int m = 0; m + 1 < dim; ++m) {
          out(ro + n, co + m) +=
              rate * fn * std::sqrt(double(m + 1)) * rho(ro + n + 1, co + m + 1);
        }
      }
      for (int n = 1; n < dim; ++n) {
        const double fn = std::sqrt(double(n));
        for (int m = 1; m < dim; ++m) {
          out(ro + n, co + m) +=
              rate * fn * std::sqrt(double(m)) * rho(ro + n - 1, co + m - 1);
        }
      }
    }
  }
  // −½{a a† + a† a, ρ} with a a† + a† a diagonal: (2n+1) on level n.
  for (int r = 0; r < total; ++r) {
    const double gr = 2.0 * (r % dim) + 1.0;
    for (int c = 0; c < total; ++c) {
      const double gc = 2.0 * (c % dim) + 1.0;
      out(r, c) -= 0.5 * rate * (gr + gc) * rho(r, c);
    }
  }
}

}  // namespace

Vector evolve_schrodinger(
    const TimeDependentHamiltonian& hamiltonian, Vector psi,
    const EvolutionSpec& spec, const std::vector<double>& samples,
    const std::function<void(double, const Vector&)>& on_sample) {
  if (hamiltonian.dim() != psi.size())
    throw std::invalid_argument("evolve_schrodinger: dimension mismatch");
  Matrix h(psi.size(), psi.size());
  auto rhs = [&](double t, const Vector& y, Vector& dydt) {
    hamiltonian.evaluate_into(h, t);
    dydt.noalias() = h * y;
    dydt *= -iu;
  };
  integrate_with_samples(rhs, psi, spec, samples, on_sample);
  return psi;
}

Matrix evolve_lindblad(
    const TimeDependentHamiltonian& hamiltonian, Matrix rho,
    const EvolutionSpec& spec, const HeatingModel& heating, FockSpace space,
    const std::vector<double>& samples,
    const std::function<void(double, const Matrix&)>& on_sample) {
  heating.validate();
  const int total = 2 * space.dim;
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("evolve_lindblad: state dimension mismatch");
  if (!hamiltonian.empty() && hamiltonian.dim() != total)
    throw std::invalid_argument("evolve_lindblad: Hamiltonian dimension mismatch");

  Matrix h(total, total), k(total, total);
  auto rhs = [&](double t, const Matrix& y, Matrix& dydt) {
    if (!hamiltonian.empty()) {
      hamiltonian.evaluate_into(h, t);
      // ρ stays Hermitian along the flow, so ρH = (Hρ)†: one product suffices.
      k.noalias() = h * y;
      dydt = -iu * k + iu * k.adjoint();
    } else {
      dydt.setZero();
    }
    if (heating.rate > 0) add_heating_dissipator(y, heating.rate, space.dim, dydt);
  };
  integrate_with_samples(rhs, rho, spec, samples, on_sample);
  return rho;
}

Matrix time_ordered_propagator(const TimeDependentHamiltonian& hamiltonian,
                               double t_start, double t_end, double tol,
                               int initial_steps, int max_doublings) {
  if (t_end < t_start)
    throw std::invalid_argument("time_ordered_propagator: t_end < t_start");
  const int n = hamiltonian.dim();
  Matrix h(n, n);

  auto product = [&](int steps) {
    const double dt = (t_end - t_start) / steps;
    Matrix u = Matrix::Identity(n, n);
    for (int kstep = 0; kstep < steps; ++kstep) {
      const double tm = t_start + (kstep + 0.5) * dt;
      hamiltonian.evaluate_into(h, tm);
      u = unitary_from_hermitian(h, dt) * u;
    }
    return u;
  };

  int steps = std::max(initial_steps, 1);
  Matrix u = product(steps);
  for (int it = 0; it < max_doublings; ++it) {
    steps *= 2;
    Matrix u2 = product(steps);
    const double diff = (u2 - u).cwiseAbs().maxCoeff();
    u.swap(u2);
    if (diff < tol) return u;
  }
  throw std::runtime_error("time_ordered_propagator: failed to converge");
}

}  // namespace sqz
