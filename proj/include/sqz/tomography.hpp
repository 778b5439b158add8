// tomography.hpp — Oscillator-state readout through the spin: probe-force
// splitting curves, squeezing-parameter fits, characteristic-function
// sampling, Wigner reconstruction, and blue-sideband population analysis.

#pragma once

#include <optional>
#include <vector>

#include "sqz/dynamics.hpp"
#include "sqz/fitting.hpp"
#include "sqz/hilbert.hpp"
#include "sqz/model.hpp"

namespace sqz {

// ------------------------------ Probe splitting ------------------------------

// A resonant spin-dependent force used as a measurement probe.  Over a
// duration t it splits the oscillator along ±β(t) conditioned on the spin,
// with β(t) = (strength · t / 2) · e^{i·motional_phase}.
struct ProbeParams {
  double strength = 0.0;                        // rad/s
  double motional_phase = 0.0;                  // rad
  SpinAxis spin_axis = SpinAxis::equatorial(0.0);
  std::vector<double> durations;                // seconds

  complexd beta(double t) const {
    return 0.5 * strength * t * std::exp(iu * motional_phase);
  }
  void validate() const;
};

// Closed-form description of a squeezed thermal state as seen by the probe:
// p↓(t) = (1 + C·exp(−g·h))/2 with g = |2β|²(n̄+½) and
// h = e^{2r}cos²(φ_probe−θ/2) + e^{−2r}sin²(φ_probe−θ/2).
// θ/2 is the probe phase of maximal decay; for the probe Hamiltonian
// (Ω/2)σ(a e^{−iφ}+a† e^{iφ}) it relates to the position-space squeezed
// quadrature angle θ_sq as θ = 2θ_sq + π (verified against simulation).
struct SplittingModel {
  double r = 0.0;
  double theta = 0.0;
  double nbar = 0.0;
  double contrast = 1.0;
  void validate() const;
};

// Convert an oscillator squeezed-quadrature angle (as reported by
// QuadratureStats::squeezed_axis_angle) into the splitting-model θ.
double splitting_theta_for_axis(double squeezed_axis_angle);

// Probe phase of maximal decay for a given oscillator squeezed-axis angle.
double probe_phase_for_axis(double squeezed_axis_angle);

std::vector<double> analytic_splitting(const SplittingModel& model,
                                       const ProbeParams& probe);

// Evolves the state under the probe Hamiltonian for each duration and returns
// the |↓⟩ population.  heating.rate == 0 uses an exact spectral evaluation;
// otherwise each duration is integrated with the dissipator attached.
std::vector<double> simulate_probe_splitting(const SpinFockState& state,
                                             const ProbeParams& probe,
                                             const HeatingModel& heating = {});

// ------------------------------ Squeezing fits -------------------------------

struct SqueezingFitOptions {
  double nbar = 0.0;            // occupation assumed for the reference curve
  double nbar_squeezed = -1.0;  // occupation for the squeezed-stage fit;
                                // negative means "same as nbar" (a heated
                                // pulse raises it to nbar + rate·t_pulse)
  double strength_guess = 0.0;  // initial probe-strength guess (rad/s)
  double contrast_guess = 0.95;
  double r_guess = 0.7;
};

struct SqueezingFitResult {
  double probe_strength = 0.0;  // calibrated on the reference curve
  double probe_strength_err = 0.0;
  double contrast_ref = 0.0;
  double contrast_ref_err = 0.0;
  double r = 0.0;
  double r_err = 0.0;
  double contrast = 0.0;        // contrast of the squeezed-axis curve
  double contrast_err = 0.0;
  double db = 0.0;              // 10·log10(e^{2r})
  double db_err = 0.0;
  double chi2_reference = 0.0;
  double chi2_squeezed = 0.0;
  bool r_clipped = false;       // negative estimate clipped to zero
};

// Two-stage fit: (1) calibrate probe strength and contrast on a reference
// (unsqueezed) curve with r = 0; (2) fit r and contrast on the squeezed-axis
// curve with the strength held fixed.  Both curves share the duration grid.
SqueezingFitResult fit_squeezing_parameter(
    const std::vector<double>& durations,
    const std::vector<double>& reference_curve,
    const std::vector<double>& squeezed_curve,
    const SqueezingFitOptions& options);

inline double squeezing_db(double r) {
  if (r < 0) throw std::invalid_argument("squeezing_db: r must be >= 0");
  return 10.0 * std::log10(std::exp(2.0 * r));
}

// --------------------------- Characteristic function -------------------------

enum class ChiMethod {
  direct,   // evaluate tr(ρ D(β)) exactly
  circuit,  // simulate probe + spin rotation + readout for Re and Im
};

struct CharacteristicGrid {
  Eigen::VectorXd beta_re;   // uniform sample axes
  Eigen::VectorXd beta_im;
  Eigen::MatrixXcd values;   // values(i, j) = χ(beta_re[i] + i·beta_im[j])

  complexd beta(int i, int j) const {
    return complexd(beta_re(i), beta_im(j));
  }
  void validate() const;     // uniform axes, matching dimensions
};

// Fast exact evaluator of χ(β) = tr(ρ D(β)) built on the eigendecompositions
// of x̂ and p̂, so each point costs one matrix–vector product.
class CharacteristicSampler {
 public:
  CharacteristicSampler(const Matrix& rho_osc, FockSpace space);
  complexd operator()(complexd beta) const;
  CharacteristicGrid grid(int points, double extent) const;

 private:
  Eigen::VectorXd xvals_, pvals_;
  Matrix weights_;  // weights(j,k) couples e^{i√2 βi x_j} to e^{−i√2 βr p_k}
};

// Independent single-point evaluators (slow; used as oracles and for the
// measurement-circuit variant).
complexd characteristic_point_direct(const Matrix& rho_osc, complexd beta,
                                     FockSpace space);
// Simulates the measurement sequence: probe SDF for t = |β|/Ω at the phase
// that realizes D(β), then a ±π/4 spin rotation selects the real or the
// imaginary part, and χ is reassembled from the two |↓⟩ populations.
complexd characteristic_point_circuit(const Matrix& rho_osc, complexd beta,
                                      FockSpace space, double probe_strength);

CharacteristicGrid sample_characteristic(const Matrix& rho_osc, FockSpace space,
                                         ChiMethod method = ChiMethod::direct,
                                         int points = 41, double extent = 3.0,
                                         double probe_strength = 0.0);

// ------------------------------ Wigner function ------------------------------

struct WignerGrid {
  Eigen::VectorXd x;         // output quadrature axes
  Eigen::VectorXd p;
  Eigen::MatrixXd values;    // values(i, j) = W(x[i], p[j])
  double max_imag = 0.0;     // largest |Im| discarded in the transform

  double cell_area() const;
  double integral() const;   // Riemann sum over the grid
  double min_value() const;
};

// Zero-pads the characteristic grid by `pad` points per side and applies the
// discrete version of W(x,p) = (1/2π²)∫∫ χ(β) e^{i√2(p·βr − x·βi)} dβr dβi,
// the convention under which x̂=(a+a†)/√2 and ∫∫W dx dp = 1.
WignerGrid wigner_from_characteristic(const CharacteristicGrid& grid,
                                      int pad = 200);

// Bilinear interpolation of W at (x, p); throws outside the grid.
double wigner_interpolate(const WignerGrid& grid, double x, double p);

// Max |W(v) − W(R_{2π/k} v)| over grid points within `radius` of the origin,
// divided by max |W|; `use_abs` compares |W| instead of W.
double rotational_symmetry_deviation(const WignerGrid& grid, int k,
                                     double radius, bool use_abs = false);

// Closed-form Wigner function of a Gaussian state with quadrature mean and
// covariance; useful as an oracle for the reconstruction pipeline.
double gaussian_wigner(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                       double x, double p);

// ------------------------------ Blue sideband --------------------------------

struct SidebandParams {
  double strength = 0.0;           // Ω_sb, rad/s
  std::vector<double> durations;   // seconds
  void validate() const;
};

// Evolution under (Ω_sb/2)(σ₊a† + σ₋a) from |↓⟩⊗ρ_osc; returns p↓ per
// duration.  Fock level n flops at √(n+1)·Ω_sb.
std::vector<double> simulate_blue_sideband(const Matrix& rho_osc,
                                           FockSpace space,
                                           const SidebandParams& params);

struct FockPopulations {
  Eigen::VectorXd populations;     // length max_n+1, non-negative, sum ≤ 1
  Eigen::VectorXd uncertainties;   // zero for levels pinned at zero
  double residual_rms = 0.0;
};

// Decomposes a sideband curve into the √(n+1)-frequency basis with populations
// constrained non-negative.  `decay_rate` applies a shared phenomenological
// damping e^{−γt} to the oscillatory part of every component.
FockPopulations fit_fock_populations(const std::vector<double>& durations,
                                     const std::vector<double>& p_down,
                                     double sideband_strength, int max_n,
                                     double decay_rate = 0.0);

}  // namespace sqz
