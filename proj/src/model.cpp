// Effective nonlinear interactions generated by two spin-dependent forces,
// and assembly of the laboratory-level time-dependent Hamiltonians.

#include "sqz/model.hpp"

namespace sqz {

namespace {

// Interaction phase offset θ₀(n, sign Δ) for φ_α = φ_α′ = 0 and the canonical
// axis orientation (σ_β along axis_alpha × axis_alpha_prime for even n, along
// the perpendicular part of axis_alpha_prime for odd n).  Values follow from
// the resonant term of the Magnus expansion and are pinned by unit tests that
// fit the oscillator phase of numerically integrated propagators: θ₀ = 0
// everywhere except even orders with Δ < 0, where the a†ⁿ term flips sign.
double theta_offset(int order, bool positive_delta) {
  if (order < 2 || order > 4)
    throw std::invalid_argument("theta_offset: order must be 2..4");
  return (order % 2 == 0 && !positive_delta) ? pi : 0.0;
}

}  // namespace

EffectiveInteraction effective_interaction(const InteractionConfig& cfg) {
  cfg.validate();
  const Eigen::Vector3d a = cfg.leg_alpha.sdf.axis.n;
  const Eigen::Vector3d b = cfg.leg_alpha_prime.sdf.axis.n;
  const Eigen::Vector3d cross = a.cross(b);
  const double sin_angle = cross.norm();

  EffectiveInteraction eff;
  eff.order = cfg.order;
  eff.even_order = cfg.order % 2 == 0;

  if (eff.even_order) {
    if (sin_angle < 1e-12)
      throw std::invalid_argument(
          "effective_interaction: commuting spin axes give a degenerate "
          "even-order interaction");
    eff.spin_axis = SpinAxis(cross);
  } else {
    if (sin_angle < 1e-12) {
      // commuting forces: no odd-order interaction is generated
      eff.spin_axis = cfg.leg_alpha_prime.sdf.axis;
      eff.magnitude = 0.0;
      eff.theta = 0.0;
      return eff;
    }
    eff.spin_axis = SpinAxis(b - a.dot(b) * a);
  }

  eff.magnitude = sin_angle * interaction_magnitude(
                                  cfg.order, cfg.leg_alpha.sdf.strength,
                                  cfg.leg_alpha_prime.sdf.strength, cfg.delta);
  eff.theta = double(cfg.order - 1) * cfg.leg_alpha.sdf.motional_phase +
              cfg.leg_alpha_prime.sdf.motional_phase +
              theta_offset(cfg.order, cfg.delta > 0);
  return eff;
}

Matrix effective_hamiltonian_matrix(const EffectiveInteraction& eff,
                                    FockSpace space) {
  if (eff.magnitude < 0)
    throw std::invalid_argument(
        "effective_hamiltonian_matrix: magnitude must be >= 0");
  Matrix an = Matrix::Identity(space.dim, space.dim);
  const Matrix a = annihilation(space);
  for (int k = 0; k < eff.order; ++k) an = a * an;  // aⁿ

  const complexd phase = std::exp(-iu * eff.theta);
  Matrix osc;
  if (eff.even_order) {
    // (i Ω/2)(−aⁿ e^{−iθ} + a†ⁿ e^{+iθ})
    osc = iu * 0.5 * eff.magnitude *
          (an.adjoint() * std::conj(phase) - an * phase);
  } else {
    // (Ω/2)(aⁿ e^{−iθ} + a†ⁿ e^{+iθ})
    osc = 0.5 * eff.magnitude * (an * phase + an.adjoint() * std::conj(phase));
  }
  return tensor_product(spin_axis_op(eff.spin_axis), osc);
}

TimeDependentHamiltonian interaction_hamiltonian(const InteractionConfig& cfg,
                                                 FockSpace space) {
  cfg.validate();
  TimeDependentHamiltonian h;
  const RampShape ramp = cfg.ramp;
  const double omega_osc = cfg.oscillator.freq;

  for (const SdfLeg* leg : {&cfg.leg_alpha, &cfg.leg_alpha_prime}) {
    const SdfParams sdf = leg->sdf;
    const Matrix block =
        tensor_product(spin_axis_op(sdf.axis), annihilation(space));
    if (cfg.rwa_oscillator) {
      h.add_hermitian_pair(block, [sdf, ramp](double t) {
        return 0.5 * sdf.strength * ramp_envelope(t, ramp) *
               std::exp(-iu * (sdf.detuning * t + sdf.motional_phase));
      });
    } else {
      // counter-rotating factors kept; effective tone at δ = ω + Δ
      const double delta_tone = omega_osc + sdf.detuning;
      h.add_hermitian_pair(block, [sdf, ramp, delta_tone, omega_osc](double t) {
        return sdf.strength * ramp_envelope(t, ramp) *
               std::cos(delta_tone * t + sdf.motional_phase) *
               std::exp(iu * omega_osc * t);
      });
    }
    if (cfg.include_carrier && leg->carrier) {
      const CarrierTerm carrier = *leg->carrier;
      const double phase = sdf.motional_phase;
      h.add_term(tensor_embed_spin(spin_axis_op(carrier.axis), space),
                 [carrier, ramp, phase](double t) {
                   return complexd(carrier.rabi * ramp_envelope(t, ramp) *
                                   std::cos(carrier.tone_detuning * t + phase));
                 });
    }
  }
  return h;
}

TimeDependentHamiltonian sdf_hamiltonian(const SdfParams& sdf, FockSpace space,
                                         RampShape ramp) {
  sdf.validate();
  TimeDependentHamiltonian h;
  const Matrix block = tensor_product(spin_axis_op(sdf.axis), annihilation(space));
  h.add_hermitian_pair(block, [sdf, ramp](double t) {
    return 0.5 * sdf.strength * ramp_envelope(t, ramp) *
           std::exp(-iu * (sdf.detuning * t + sdf.motional_phase));
  });
  return h;
}

}  // namespace sqz
