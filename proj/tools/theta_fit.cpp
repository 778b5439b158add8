// Scratch: determine the interaction phase offset θ₀(n, sign Δ) by fitting
// the numerically integrated propagator of the two-force drive against the
// effective-interaction form.  Projects (i/t)·log U onto σ_β ⊗ aⁿ and reads
// the phase of the coefficient.  Not built by default.

#include <cstdio>
#include <unsupported/Eigen/MatrixFunctions>

#include "sqz/dynamics.hpp"
#include "sqz/model.hpp"

using namespace sqz;

int main() {
  constexpr double tp = 2.0 * pi;
  FockSpace space{16};

  struct Case {
    int order;
    double delta;
    double omega_a, omega_ap;
    SpinAxis axis_a, axis_ap;
  };
  // Weak drives so the window is long (small edge corrections ~1/ΔT) while
  // ‖H_eff·t‖ stays below the log branch bound; t = K·2π/|Δ| stroboscopic.
  std::vector<Case> cases = {
      {2, tp * 50e3, tp * 2.0e3, tp * 2.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi)},
      {2, -tp * 50e3, tp * 2.0e3, tp * 2.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi)},
      {3, tp * 25e3, tp * 3.0e3, tp * 1.3e3, SpinAxis::equatorial(0.0),
       SpinAxis::z()},
      {3, -tp * 25e3, tp * 3.0e3, tp * 1.3e3, SpinAxis::equatorial(0.0),
       SpinAxis::z()},
      {4, tp * 25e3, tp * 2.0e3, tp * 2.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi)},
      {4, -tp * 25e3, tp * 1.5e3, tp * 1.5e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi)},
  };

  for (const auto& c : cases) {
    auto cfg = make_interaction(c.order, c.delta, c.omega_a, c.axis_a,
                                c.omega_ap, c.axis_ap, RampShape{});
    const int periods = 16;
    const double t1 = periods * tp / std::abs(c.delta);
    auto ham = interaction_hamiltonian(cfg, space);
    // Assemble the propagator column by column.
    const int n = 2 * space.dim;
    Matrix u(n, n);
    EvolutionSpec spec;
    spec.t_end = t1;
    spec.rtol = 1e-10;
    spec.atol = 1e-12;
    for (int col = 0; col < n; ++col) {
      Vector e = Vector::Zero(n);
      e(col) = 1.0;
      u.col(col) = evolve_schrodinger(ham, e, spec);
    }

    Matrix gen = u.log();           // anti-Hermitian ≈ −i H_eff t
    Matrix heff = (iu / t1) * gen;  // ≈ H_eff

    auto eff = effective_interaction(cfg);
    // All cases here have σ_β = ±ẑ; use the spin block with eigenvalue +1 and
    // read the coefficient from low Fock levels, far from the truncation edge.
    const double sz = eff.spin_axis.n.z() > 0 ? 0 : 1;  // block index of +1
    const int blk = int(sz) * space.dim;
    complexd zsum = 0.0;
    int count = 0;
    for (int lvl = 0; lvl <= 5; ++lvl) {
      double fac = 1.0;
      for (int k = 1; k <= c.order; ++k) fac *= lvl + k;
      // element ⟨lvl|·|lvl+n⟩ of the oscillator factor
      complexd el = heff(blk + lvl, blk + lvl + c.order) / std::sqrt(fac);
      // even: (iΩ/2)(−e^{−iθ});  odd: (Ω/2)e^{−iθ}
      complexd z = eff.even_order ? el / (-iu) : el;
      zsum += z;
      ++count;
    }
    complexd z = zsum / double(count);
    const double mag = 2.0 * std::abs(z);
    const double theta0 = -std::arg(z);  // φα=φα′=0 here
    std::printf(
        "n=%d sign=%+d  |coef|→Ω=%9.3f Hz (pred %9.3f)  θ₀ = %+.4f rad "
        "(%+.3f π)\n",
        c.order, c.delta > 0 ? 1 : -1, mag / tp, eff.magnitude / tp,
        theta0, theta0 / pi);
  }
  return 0;
}
