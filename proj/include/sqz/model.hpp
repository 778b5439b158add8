// model.hpp — Interaction model for spin-dependent forces on a trapped
// oscillator: pulse envelopes, single-SDF and bichromatic Hamiltonians,
// and the effective nonlinear interactions they generate at order n.
//
// All frequencies are angular (rad/s) and ħ = 1.  A spin-dependent force
// detuned by Δ together with a second force detuned by mΔ, m = 1 − n,
// produces an order-n interaction (n = 2 squeezing, 3 trisqueezing,
// 4 quadsqueezing) with magnitudes
//   Ω₂ = Ω_α′ Ω_α / Δ,   Ω₃ = Ω_α′ Ω_α² / (2Δ²),   Ω₄ = Ω_α′ Ω_α³ / (8Δ³).

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "sqz/hilbert.hpp"

namespace sqz {

// ------------------------------ Pulse envelope --------------------------------

// sin² rise over t_ramp, unit plateau, sin² fall over the final t_ramp.
struct RampShape {
  double t_ramp = 0.0;
  double t_total = 0.0;

  RampShape() = default;
  RampShape(double ramp, double total) : t_ramp(ramp), t_total(total) {
    if (ramp < 0 || total <= 0 || 2 * ramp > total)
      throw std::invalid_argument("RampShape: need 0 <= 2*t_ramp <= t_total");
  }

  // ∫ g(t)^n dt over the pulse: plateau plus two sin^{2n} ramp edges.
  double envelope_exposure(int order) const {
    return (t_total - 2 * t_ramp) + 2 * sin_power_integral(order) * t_ramp;
  }

  // ∫₀¹ sin^{2n}(π u / 2) du
  static double sin_power_integral(int order) {
    switch (order) {
      case 1: return 0.5;
      case 2: return 3.0 / 8.0;
      case 3: return 5.0 / 16.0;
      case 4: return 35.0 / 128.0;
      default: throw std::invalid_argument("RampShape: order must be 1..4");
    }
  }
};

inline double ramp_envelope(double t, const RampShape& ramp) {
  if (ramp.t_total <= 0.0) return 1.0;  // default-constructed: unshaped drive
  if (t <= 0.0 || t >= ramp.t_total) return 0.0;
  if (ramp.t_ramp > 0.0 && t < ramp.t_ramp) {
    const double s = std::sin(0.5 * pi * t / ramp.t_ramp);
    return s * s;
  }
  if (ramp.t_ramp > 0.0 && t > ramp.t_total - ramp.t_ramp) {
    const double s = std::sin(0.5 * pi * (ramp.t_total - t) / ramp.t_ramp);
    return s * s;
  }
  return 1.0;
}

// ------------------------------ SDF parameters --------------------------------

// One spin-dependent force in the oscillator's rotating frame:
//   H = (Ω/2) g(t) σ_axis (a e^{−i(Δt+φ)} + a† e^{+i(Δt+φ)}).
struct SdfParams {
  double strength = 0.0;        // Ω, rad/s
  double detuning = 0.0;        // Δ, rad/s (signed)
  SpinAxis axis = SpinAxis::equatorial(0.0);
  double motional_phase = 0.0;  // φ

  void validate() const {
    if (strength < 0) throw std::invalid_argument("SdfParams: strength must be >= 0");
  }
};

// Bichromatic drive that realizes an SDF: carrier Rabi rate Ω_c, tone
// detuning δ from the qubit, tone phases φ₁ and φ₂, Lamb-Dicke factor η.
// The spin phase is (φ₁+φ₂)/2 and the motional phase (φ₁−φ₂)/2.
struct BichromaticParams {
  double carrier_rabi = 0.0;   // Ω_c, rad/s
  double tone_detuning = 0.0;  // δ, rad/s
  double phi1 = 0.0;
  double phi2 = 0.0;
  double lamb_dicke = 0.0;     // η

  double spin_phase() const { return 0.5 * (phi1 + phi2); }
  double motional_phase() const { return 0.5 * (phi1 - phi2); }

  void validate() const {
    if (carrier_rabi < 0)
      throw std::invalid_argument("BichromaticParams: carrier_rabi must be >= 0");
    if (lamb_dicke <= 0 || lamb_dicke >= 1)
      throw std::invalid_argument("BichromaticParams: need 0 < lamb_dicke < 1");
    if (tone_detuning <= 0)
      throw std::invalid_argument("BichromaticParams: tone_detuning must be > 0");
  }
};

// Which resonance a bichromatic drive addresses: tones near the oscillator
// frequency give an equatorial-basis force, tones near half the oscillator
// frequency give a σ_z-basis force.
enum class SdfRegime { near_oscillator, near_half_oscillator };

// ---------------------------- Hamiltonian builders ----------------------------

// Cached operator blocks for one SDF on spin ⊗ oscillator.
struct SdfOperators {
  Matrix spin_lower;  // σ_axis ⊗ a
  double strength;
  double detuning;
  double motional_phase;

  SdfOperators(const SdfParams& p, FockSpace space)
      : spin_lower(tensor_product(spin_axis_op(p.axis), annihilation(space))),
        strength(p.strength),
        detuning(p.detuning),
        motional_phase(p.motional_phase) {}

  // accumulate (Ω/2) g σ (a e^{−i(Δt+φ)} + h.c.) into h
  void add_to(Matrix& h, double t, double envelope) const {
    const complexd c = 0.5 * strength * envelope *
                       std::exp(-iu * (detuning * t + motional_phase));
    h.noalias() += c * spin_lower;
    h.noalias() += std::conj(c) * spin_lower.adjoint();
  }
};

// Single SDF under the rotating-wave approximation, as a dense matrix.
inline Matrix sdf_hamiltonian_rwa(double t, const SdfParams& p, double envelope,
                                  FockSpace space) {
  p.validate();
  Matrix h = Matrix::Zero(2 * space.dim, 2 * space.dim);
  SdfOperators(p, space).add_to(h, t, envelope);
  return h;
}

// Full bichromatic Hamiltonian without the rotating-wave approximation with
// respect to the oscillator frequency:
//   H = η Ω_c g cos(δt+φ_m) σ_{φ_s} (a e^{+iωt} + a† e^{−iωt})
//       + Ω_c g cos(δt+φ_m) σ_{φ_s−π/2}.
// Averaging the first line over the fast factors e^{±i(δ+ω)t} recovers the
// RWA force with Ω = ηΩ_c, Δ = δ − ω and motional phase φ_m.
inline Matrix bichromatic_hamiltonian(double t, const BichromaticParams& p,
                                      double envelope, const OscillatorParams& osc,
                                      FockSpace space) {
  p.validate();
  osc.validate();
  const double beat = std::cos(p.tone_detuning * t + p.motional_phase());
  const Matrix sdf_spin = spin_axis_op(SpinAxis::equatorial(p.spin_phase()));
  const Matrix flip_spin =
      spin_axis_op(SpinAxis::equatorial(p.spin_phase() - 0.5 * pi));
  const Matrix a = annihilation(space);
  const Matrix osc_part = a * std::exp(iu * osc.freq * t) +
                          a.adjoint() * std::exp(-iu * osc.freq * t);
  Matrix h = p.lamb_dicke * p.carrier_rabi * envelope * beat *
             tensor_product(sdf_spin, osc_part);
  h += p.carrier_rabi * envelope * beat *
       tensor_embed_spin(flip_spin, space);
  return h;
}

// Effective SDF strength of a bichromatic drive, including the carrier-induced
// Bessel-function renormalization:
//   near ω:    η Ω_c |J₀(2Ω_c/δ) + J₂(2Ω_c/δ)|   (equatorial basis)
//   near ω/2:  η Ω_c |J₁(2Ω_c/δ) + J₃(2Ω_c/δ)|   (σ_z basis)
inline double effective_sdf_strength(const BichromaticParams& p, SdfRegime regime) {
  p.validate();
  const double x = 2.0 * p.carrier_rabi / p.tone_detuning;
  switch (regime) {
    case SdfRegime::near_oscillator:
      return p.lamb_dicke * p.carrier_rabi *
             std::abs(std::cyl_bessel_j(0, x) + std::cyl_bessel_j(2, x));
    case SdfRegime::near_half_oscillator:
      return p.lamb_dicke * p.carrier_rabi *
             std::abs(std::cyl_bessel_j(1, x) + std::cyl_bessel_j(3, x));
  }
  throw std::logic_error("effective_sdf_strength: unknown regime");
}

// --------------------------- Interaction configuration ------------------------

// Optional spin-flip (carrier) term accompanying a simulated SDF.  The spin
// axis is perpendicular to an equatorial force axis; δ is the tone detuning.
struct CarrierTerm {
  double rabi = 0.0;       // Ω_c, rad/s
  double tone_detuning = 0.0;
  SpinAxis axis = SpinAxis::equatorial(-0.5 * pi);
};

// One leg of a two-SDF interaction, with enough detail to simulate it at
// laboratory level (carrier term, non-RWA oscillator factors).
struct SdfLeg {
  SdfParams sdf;
  std::optional<CarrierTerm> carrier;
};

// Two spin-dependent forces at detunings Δ and mΔ with m = 1 − n.
struct InteractionConfig {
  int order = 2;            // n
  double delta = 0.0;       // Δ, rad/s, signed
  SdfLeg leg_alpha;         // detuning Δ
  SdfLeg leg_alpha_prime;   // detuning (1−n)Δ
  RampShape ramp;
  bool include_carrier = false;
  bool rwa_oscillator = true;  // drop e^{±iωt} counter-rotating SDF factors
  OscillatorParams oscillator;

  void validate() const {
    if (order < 2 || order > 4)
      throw std::invalid_argument("InteractionConfig: order must be 2, 3 or 4");
    if (delta == 0.0)
      throw std::invalid_argument("InteractionConfig: delta must be nonzero");
    leg_alpha.sdf.validate();
    leg_alpha_prime.sdf.validate();
    oscillator.validate();
    const double m = double(1 - order);
    if (std::abs(leg_alpha.sdf.detuning - delta) > 1e-9 * std::abs(delta) ||
        std::abs(leg_alpha_prime.sdf.detuning - m * delta) >
            1e-9 * std::abs(delta))
      throw std::invalid_argument(
          "InteractionConfig: SDF detunings must be delta and (1-order)*delta");
  }
};

// Convenience constructor enforcing the resonance rule m = 1 − n.
inline InteractionConfig make_interaction(int order, double delta,
                                          double omega_alpha, SpinAxis axis_alpha,
                                          double omega_alpha_prime,
                                          SpinAxis axis_alpha_prime,
                                          RampShape ramp,
                                          double phi_alpha = 0.0,
                                          double phi_alpha_prime = 0.0) {
  InteractionConfig cfg;
  cfg.order = order;
  cfg.delta = delta;
  cfg.leg_alpha.sdf = {omega_alpha, delta, axis_alpha, phi_alpha};
  cfg.leg_alpha_prime.sdf = {omega_alpha_prime, double(1 - order) * delta,
                             axis_alpha_prime, phi_alpha_prime};
  cfg.ramp = ramp;
  cfg.validate();
  return cfg;
}

// ----------------------------- Effective interaction --------------------------

// Order-n interaction produced by the two forces:
//   even n:  H = (i Ω_n/2) σ_β (−aⁿ e^{−iθ} + a†ⁿ e^{+iθ})
//   odd  n:  H = (Ω_n/2) σ_β (aⁿ e^{−iθ} + a†ⁿ e^{+iθ})
struct EffectiveInteraction {
  int order = 2;
  double magnitude = 0.0;  // Ω_n ≥ 0, rad/s
  SpinAxis spin_axis = SpinAxis::z();  // σ_β, unit Bloch vector
  double theta = 0.0;      // oscillator phase of the interaction
  bool even_order = true;
};

// Magnitude of the order-n interaction for force strengths Ω_α, Ω_α′ at
// detuning Δ: Ω_n = Ω_α′ Ω_α^{n−1} / (n−1)! ... specifically
//   Ω₂ = Ω_α′Ω_α/Δ, Ω₃ = Ω_α′Ω_α²/(2Δ²), Ω₄ = Ω_α′Ω_α³/(8Δ³).
inline double interaction_magnitude(int order, double omega_alpha,
                                    double omega_alpha_prime, double delta) {
  if (delta == 0.0)
    throw std::invalid_argument("interaction_magnitude: delta must be nonzero");
  const double ad = std::abs(delta);
  switch (order) {
    case 2: return omega_alpha_prime * omega_alpha / ad;
    case 3: return omega_alpha_prime * omega_alpha * omega_alpha / (2.0 * ad * ad);
    case 4:
      return omega_alpha_prime * omega_alpha * omega_alpha * omega_alpha /
             (8.0 * ad * ad * ad);
    default:
      throw std::invalid_argument("interaction_magnitude: order must be 2..4");
  }
}

// Residual error scale ε = (Ω_α/Δ)^{n+1} of the order-n description.
inline double magnus_error_estimate(int order, double omega_alpha, double delta) {
  if (order < 2 || order > 4)
    throw std::invalid_argument("magnus_error_estimate: order must be 2..4");
  return std::pow(std::abs(omega_alpha / delta), order + 1);
}

// Strength of a direct (single-field) realization of the order-n term:
// Ω_{ηⁿ} = Ω_c ηⁿ / n!.  Order 1 is the plain linear force ηΩ_c.
inline double direct_drive_strength(int order, double carrier_rabi, double eta) {
  if (order < 1 || order > 4)
    throw std::invalid_argument("direct_drive_strength: order must be 1..4");
  double fact = 1.0;
  for (int k = 2; k <= order; ++k) fact *= k;
  return carrier_rabi * std::pow(eta, order) / fact;
}

EffectiveInteraction effective_interaction(const InteractionConfig& cfg);

// Dense matrix of the effective Hamiltonian on spin ⊗ oscillator.
Matrix effective_hamiltonian_matrix(const EffectiveInteraction& eff,
                                    FockSpace space);

// --------------------------- Time-dependent Hamiltonian -----------------------

// H(t) assembled from cached constant blocks with scalar coefficients; the
// shared assembly path for integrators and propagators.
class TimeDependentHamiltonian {
 public:
  using Coefficient = std::function<complexd(double)>;

  void add_term(Matrix block, Coefficient coeff) {
    blocks_.push_back(std::move(block));
    coeffs_.push_back(std::move(coeff));
  }

  // Adds c(t)·B + c*(t)·B† as two terms.
  void add_hermitian_pair(const Matrix& block, Coefficient coeff) {
    add_term(block, coeff);
    add_term(block.adjoint(),
             [coeff](double t) { return std::conj(coeff(t)); });
  }

  int dim() const { return blocks_.empty() ? 0 : int(blocks_.front().rows()); }
  bool empty() const { return blocks_.empty(); }

  void evaluate_into(Matrix& h, double t) const {
    h.setZero(dim(), dim());
    for (size_t k = 0; k < blocks_.size(); ++k)
      h.noalias() += complexd(coeffs_[k](t)) * blocks_[k];
  }

  Matrix operator()(double t) const {
    Matrix h;
    evaluate_into(h, t);
    return h;
  }

 private:
  std::vector<Matrix> blocks_;
  std::vector<Coefficient> coeffs_;
};

// Laboratory-level Hamiltonian of a two-SDF interaction: both forces with
// their envelopes, optional carrier spin-flip terms, optional non-RWA
// oscillator factors.
TimeDependentHamiltonian interaction_hamiltonian(const InteractionConfig& cfg,
                                                 FockSpace space);

// Single SDF (e.g. an analysis probe) as a time-dependent Hamiltonian.
TimeDependentHamiltonian sdf_hamiltonian(const SdfParams& sdf, FockSpace space,
                                         RampShape ramp = {});

}  // namespace sqz
