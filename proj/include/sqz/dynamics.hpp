// dynamics.hpp — Time evolution: adaptive Runge-Kutta integration of the
// Schrödinger, von Neumann and Lindblad equations, plus a step-doubling
// time-ordered propagator used as an independent cross-check.
//
// Heating enters through the pair of collapse operators √ṅ a† and √ṅ a,
// which raise ⟨n̂⟩ at the constant rate ṅ for any state.

#pragma once

#include <functional>
#include <vector>

#include "sqz/hilbert.hpp"
#include "sqz/model.hpp"

namespace sqz {

// ------------------------------- Specifications -------------------------------

struct EvolutionSpec {
  double t_start = 0.0;
  double t_end = 0.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;  // 0: unlimited

  void validate() const {
    if (t_end < t_start)
      throw std::invalid_argument("EvolutionSpec: t_end must be >= t_start");
    if (rtol <= 0 || atol <= 0)
      throw std::invalid_argument("EvolutionSpec: tolerances must be > 0");
  }
};

struct HeatingModel {
  double rate = 0.0;  // ṅ, quanta per second

  void validate() const {
    if (rate < 0) throw std::invalid_argument("HeatingModel: rate must be >= 0");
  }
};

// ------------------------------ State evolution -------------------------------

// Integrates dψ/dt = −i H(t) ψ.  If `samples` is nonempty, `on_sample` is
// invoked at exactly those times (which must be ascending and inside the
// window); the final state is returned either way.
Vector evolve_schrodinger(
    const TimeDependentHamiltonian& hamiltonian, Vector psi,
    const EvolutionSpec& spec, const std::vector<double>& samples = {},
    const std::function<void(double, const Vector&)>& on_sample = {});

// Integrates dρ/dt = −i[H(t), ρ] + ṅ (D[a†] + D[a]) ρ with the dissipator
// acting on the oscillator factor.  rate = 0 gives closed-system evolution.
Matrix evolve_lindblad(
    const TimeDependentHamiltonian& hamiltonian, Matrix rho,
    const EvolutionSpec& spec, const HeatingModel& heating, FockSpace space,
    const std::vector<double>& samples = {},
    const std::function<void(double, const Matrix&)>& on_sample = {});

// Closed-system density-matrix evolution (von Neumann equation).
inline Matrix evolve_unitary(const TimeDependentHamiltonian& hamiltonian,
                             Matrix rho, const EvolutionSpec& spec,
                             FockSpace space,
                             const std::vector<double>& samples = {},
                             const std::function<void(double, const Matrix&)>&
                                 on_sample = {}) {
  return evolve_lindblad(hamiltonian, std::move(rho), spec, HeatingModel{0.0},
                         space, samples, on_sample);
}

// --------------------------- Time-ordered propagator ---------------------------

// Product of midpoint-evaluated exponentials, Π_k exp(−i H(t_k + h/2) h).
// The step count is doubled until two refinements agree to `tol` in the
// element-wise maximum; throws if max_doublings is exhausted.
Matrix time_ordered_propagator(const TimeDependentHamiltonian& hamiltonian,
                               double t_start, double t_end, double tol = 1e-9,
                               int initial_steps = 64, int max_doublings = 16);

}  // namespace sqz
