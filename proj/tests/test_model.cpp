#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "sqz/dynamics.hpp"
#include "sqz/model.hpp"

using namespace sqz;

namespace {
constexpr double tp = 2.0 * pi;  // cycles → angular
}

TEST_CASE("ramp envelope: sine-squared edges and flat top") {
  RampShape ramp{40e-6, 450e-6};
  CHECK(ramp_envelope(-1e-9, ramp) == doctest::Approx(0.0));
  CHECK(ramp_envelope(0.0, ramp) == doctest::Approx(0.0));
  CHECK(ramp_envelope(20e-6, ramp) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ramp_envelope(40e-6, ramp) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ramp_envelope(225e-6, ramp) == doctest::Approx(1.0));
  CHECK(ramp_envelope(430e-6, ramp) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ramp_envelope(450e-6, ramp) == doctest::Approx(0.0));
  CHECK(ramp_envelope(451e-6, ramp) == doctest::Approx(0.0));
  // Default shape = always-on drive.
  CHECK(ramp_envelope(123.0, RampShape{}) == doctest::Approx(1.0));
}

TEST_CASE("ramp envelope: power integrals of the edges") {
  CHECK(RampShape::sin_power_integral(1) == doctest::Approx(0.5));
  CHECK(RampShape::sin_power_integral(2) == doctest::Approx(3.0 / 8));
  CHECK(RampShape::sin_power_integral(3) == doctest::Approx(5.0 / 16));
  CHECK(RampShape::sin_power_integral(4) == doctest::Approx(35.0 / 128));

  // Numerical cross-check of ∫ g(t)^n dt against the closed form.
  RampShape ramp{40e-6, 450e-6};
  for (int order = 1; order <= 4; ++order) {
    const int steps = 200000;
    const double dt = ramp.t_total / steps;
    double acc = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double g = ramp_envelope((i + 0.5) * dt, ramp);
      acc += std::pow(g, order) * dt;
    }
    CHECK(acc == doctest::Approx(ramp.envelope_exposure(order)).epsilon(1e-6));
  }
  CHECK(ramp.envelope_exposure(2) == doctest::Approx(400e-6));
  CHECK(RampShape{}.envelope_exposure(2) == doctest::Approx(0.0));
}

TEST_CASE("ramp shape guards") {
  CHECK_THROWS(RampShape{-1e-6, 100e-6});
  CHECK_THROWS(RampShape{60e-6, 100e-6});  // edges longer than the pulse
  CHECK_NOTHROW(RampShape{50e-6, 100e-6});
}

TEST_CASE("interaction magnitudes for the dual-drive scheme") {
  // Ω_n = Ω' Ω^{n−1} / (c_n Δ^{n−1}) with c = {1, 2, 8}.
  CHECK(interaction_magnitude(2, tp * 4.6e3, tp * 4.6e3, tp * 50e3) ==
        doctest::Approx(tp * 423.2).epsilon(1e-12));
  CHECK(interaction_magnitude(3, tp * 6.5e3, tp * 1.3e3, tp * 25e3) ==
        doctest::Approx(tp * 43.94).epsilon(1e-12));
  CHECK(interaction_magnitude(4, tp * 6.5e3, tp * 6.5e3, tp * 25e3) ==
        doctest::Approx(tp * 14.2805).epsilon(1e-12));
  // Sign of the detuning must not change the magnitude.
  CHECK(interaction_magnitude(3, tp * 6.5e3, tp * 1.3e3, -tp * 25e3) ==
        doctest::Approx(tp * 43.94).epsilon(1e-12));
  CHECK_THROWS(interaction_magnitude(5, 1.0, 1.0, 1.0));
  CHECK_THROWS(interaction_magnitude(2, 1.0, 1.0, 0.0));
}

TEST_CASE("single-drive nonlinear strengths fall off as eta^n / n!") {
  const double carrier = tp * 132.65e3, eta = 0.049;
  CHECK(direct_drive_strength(1, carrier, eta) ==
        doctest::Approx(eta * carrier).epsilon(1e-12));
  CHECK(direct_drive_strength(2, carrier, eta) ==
        doctest::Approx(tp * 159.246325).epsilon(1e-9));
  CHECK(direct_drive_strength(3, carrier, eta) ==
        doctest::Approx(tp * 2.6010233083).epsilon(1e-9));
  CHECK(direct_drive_strength(4, carrier, eta) ==
        doctest::Approx(tp * 0.0318625355).epsilon(1e-8));
}

TEST_CASE("coherent-error scale of the effective interaction") {
  CHECK(magnus_error_estimate(2, tp * 4.6e3, tp * 50e3) ==
        doctest::Approx(7.786880e-4).epsilon(1e-6));
  CHECK(magnus_error_estimate(3, tp * 6.5e3, tp * 25e3) ==
        doctest::Approx(std::pow(6.5 / 25.0, 4)).epsilon(1e-12));
}

TEST_CASE("Bessel renormalization of the drive strength") {
  BichromaticParams p;
  p.carrier_rabi = tp * 132.65e3;
  p.lamb_dicke = 0.049;
  p.tone_detuning = tp * 1.2e6;
  CHECK(effective_sdf_strength(p, SdfRegime::near_oscillator) ==
        doctest::Approx(tp * 6460.2184661).epsilon(1e-9));
  p.carrier_rabi = tp * 93.88e3;
  CHECK(effective_sdf_strength(p, SdfRegime::near_oscillator) ==
        doctest::Approx(tp * 4586.0569403).epsilon(1e-9));
  p.carrier_rabi = tp * 132.65e3;
  p.tone_detuning = tp * 0.6e6;
  CHECK(effective_sdf_strength(p, SdfRegime::near_half_oscillator) ==
        doctest::Approx(tp * 1413.7384598).epsilon(1e-9));
  // Weak-drive limit: renormalization disappears.
  p.carrier_rabi = tp * 10.0;
  p.tone_detuning = tp * 1.2e6;
  CHECK(effective_sdf_strength(p, SdfRegime::near_oscillator) ==
        doctest::Approx(0.049 * tp * 10.0).epsilon(1e-6));
}

TEST_CASE("resonance rule fixes the second drive's detuning") {
  for (int order = 2; order <= 4; ++order) {
    const double delta = tp * 25e3;
    auto cfg = make_interaction(order, delta, tp * 6.5e3,
                                SpinAxis::equatorial(0.0), tp * 1.3e3,
                                SpinAxis::z(), RampShape{});
    CHECK(cfg.leg_alpha.sdf.detuning == doctest::Approx(delta));
    CHECK(cfg.leg_alpha_prime.sdf.detuning ==
          doctest::Approx((1 - order) * delta));
    CHECK_NOTHROW(cfg.validate());
    cfg.leg_alpha_prime.sdf.detuning *= 1.01;
    CHECK_THROWS(cfg.validate());
  }
  CHECK_THROWS(make_interaction(5, tp * 25e3, 1.0, SpinAxis::z(), 1.0,
                                SpinAxis::z(), RampShape{}));
  CHECK_THROWS(make_interaction(2, 0.0, 1.0, SpinAxis::equatorial(0), 1.0,
                                SpinAxis::equatorial(pi / 2), RampShape{}));
}

TEST_CASE("effective interaction: axis geometry") {
  const double delta = tp * 50e3, omega = tp * 4.6e3;

  SUBCASE("even order requires non-commuting spin axes") {
    auto cfg = make_interaction(2, delta, omega, SpinAxis::equatorial(0.2),
                                omega, SpinAxis::equatorial(0.2), RampShape{});
    CHECK_THROWS_AS((void)effective_interaction(cfg), std::invalid_argument);
  }

  SUBCASE("even order: strength scales with the axis angle") {
    const double full =
        effective_interaction(
            make_interaction(2, delta, omega, SpinAxis::equatorial(0.0), omega,
                             SpinAxis::equatorial(pi / 2), RampShape{}))
            .magnitude;
    CHECK(full == doctest::Approx(tp * 423.2).epsilon(1e-9));
    for (double dphi : {pi / 6, pi / 3, 2.5}) {
      auto eff = effective_interaction(
          make_interaction(2, delta, omega, SpinAxis::equatorial(0.0), omega,
                           SpinAxis::equatorial(dphi), RampShape{}));
      CHECK(eff.magnitude ==
            doctest::Approx(full * std::abs(std::sin(dphi))).epsilon(1e-9));
    }
  }

  SUBCASE("even order: mediating axis is orthogonal to both drives") {
    auto eff = effective_interaction(
        make_interaction(2, delta, omega, SpinAxis::equatorial(0.0), omega,
                         SpinAxis::equatorial(pi / 2), RampShape{}));
    CHECK(std::abs(eff.spin_axis.n.dot(Eigen::Vector3d::UnitZ())) ==
          doctest::Approx(1.0));
    CHECK(eff.even_order);
  }

  SUBCASE("odd order: mediating axis is the second drive's, made orthogonal") {
    auto eff = effective_interaction(
        make_interaction(3, tp * 25e3, tp * 6.5e3, SpinAxis::equatorial(0.0),
                         tp * 1.3e3, SpinAxis::z(), RampShape{}));
    CHECK(eff.magnitude == doctest::Approx(tp * 43.94).epsilon(1e-9));
    CHECK(std::abs(eff.spin_axis.n.dot(Eigen::Vector3d::UnitZ())) ==
          doctest::Approx(1.0));
    CHECK_FALSE(eff.even_order);

    // Tilted second axis: only the orthogonal component mediates.
    Eigen::Vector3d tilted =
        (Eigen::Vector3d::UnitZ() + 0.5 * Eigen::Vector3d::UnitX()).normalized();
    auto eff2 = effective_interaction(
        make_interaction(3, tp * 25e3, tp * 6.5e3, SpinAxis::equatorial(0.0),
                         tp * 1.3e3, SpinAxis{tilted}, RampShape{}));
    const double sin_angle = std::sqrt(1.0 - std::pow(tilted.x(), 2));
    CHECK(eff2.magnitude ==
          doctest::Approx(tp * 43.94 * sin_angle).epsilon(1e-9));
    // component of the tilted axis orthogonal to the first drive's x̂
    CHECK(std::abs(eff2.spin_axis.n.dot(Eigen::Vector3d::UnitZ())) ==
          doctest::Approx(1.0).epsilon(1e-9));

    // Parallel axes: the interaction vanishes rather than throwing.
    auto eff3 = effective_interaction(
        make_interaction(3, tp * 25e3, tp * 6.5e3, SpinAxis::z(), tp * 1.3e3,
                         SpinAxis::z(), RampShape{}));
    CHECK(eff3.magnitude == doctest::Approx(0.0));
  }
}

TEST_CASE("effective interaction: oscillator phase follows the drive phases") {
  const double delta = tp * 50e3, omega = tp * 4.6e3;
  auto theta_of = [&](int order, double phi_a, double phi_ap, double d) {
    auto cfg = make_interaction(order, d, omega, SpinAxis::equatorial(0.0),
                                omega, SpinAxis::equatorial(pi / 2), RampShape{},
                                phi_a, phi_ap);
    return effective_interaction(cfg).theta;
  };
  auto wrap = [](double x) {
    x = std::fmod(x, 2 * pi);
    return x < 0 ? x + 2 * pi : x;
  };
  // Base offsets at zero drive phase, then linear transport:
  // θ_n = (n−1)φ_α + φ_α′ + θ_n(0).
  for (int order : {2, 3, 4}) {
    const double base = theta_of(order, 0.0, 0.0, delta);
    CHECK(wrap(theta_of(order, 0.3, -0.2, delta)) ==
          doctest::Approx(wrap((order - 1) * 0.3 - 0.2 + base)).epsilon(1e-9));
  }
  CHECK(wrap(theta_of(2, 0.0, 0.0, delta)) == doctest::Approx(0.0));
  CHECK(wrap(theta_of(2, 0.0, 0.0, -delta)) == doctest::Approx(pi));
  CHECK(wrap(theta_of(3, 0.0, 0.0, delta)) == doctest::Approx(0.0));
  CHECK(wrap(theta_of(3, 0.0, 0.0, -delta)) == doctest::Approx(0.0));
  CHECK(wrap(theta_of(4, 0.0, 0.0, delta)) == doctest::Approx(0.0));
  CHECK(wrap(theta_of(4, 0.0, 0.0, -delta)) == doctest::Approx(pi));
}

TEST_CASE("interaction phase offsets match integrated propagators") {
  // For each order and detuning sign, integrate the two-force drive over a
  // stroboscopic window, take the matrix log of the propagator, and read the
  // oscillator phase from low Fock-level elements of σ_β ⊗ aⁿ.
  FockSpace space{12};
  struct Case {
    int order;
    double delta, omega_a, omega_ap;
    SpinAxis axis_a, axis_ap;
    double expected_theta;
  };
  const std::vector<Case> cases = {
      {2, tp * 50e3, tp * 2.0e3, tp * 2.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi), 0.0},
      {2, -tp * 50e3, tp * 2.0e3, tp * 2.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi), pi},
      {3, tp * 25e3, tp * 3.0e3, tp * 1.3e3, SpinAxis::equatorial(0.0),
       SpinAxis::z(), 0.0},
      {3, -tp * 25e3, tp * 3.0e3, tp * 1.3e3, SpinAxis::equatorial(0.0),
       SpinAxis::z(), 0.0},
      {4, tp * 25e3, tp * 3.0e3, tp * 3.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi), 0.0},
      {4, -tp * 25e3, tp * 3.0e3, tp * 3.0e3, SpinAxis::equatorial(0.0),
       SpinAxis::equatorial(0.5 * pi), pi},
  };
  for (const auto& c : cases) {
    CAPTURE(c.order);
    CAPTURE(c.delta);
    auto cfg = make_interaction(c.order, c.delta, c.omega_a, c.axis_a,
                                c.omega_ap, c.axis_ap, RampShape{});
    const double t1 = 6.0 * tp / std::abs(c.delta);
    auto ham = interaction_hamiltonian(cfg, space);
    const int n = 2 * space.dim;
    Matrix u(n, n);
    EvolutionSpec spec;
    spec.t_end = t1;
    spec.rtol = 1e-9;
    spec.atol = 1e-12;
    for (int col = 0; col < n; ++col) {
      Vector e = Vector::Zero(n);
      e(col) = 1.0;
      u.col(col) = evolve_schrodinger(ham, e, spec);
    }
    Matrix heff = (iu / t1) * Matrix(u.log());

    auto eff = effective_interaction(cfg);
    // All cases have σ_β = ±ẑ: pick the spin block with eigenvalue +1.
    const int blk = (eff.spin_axis.n.z() > 0 ? 0 : 1) * space.dim;
    complexd zsum = 0.0;
    for (int lvl = 0; lvl <= 3; ++lvl) {
      double fac = 1.0;
      for (int k = 1; k <= c.order; ++k) fac *= lvl + k;
      complexd el = heff(blk + lvl, blk + lvl + c.order) / std::sqrt(fac);
      zsum += eff.even_order ? el / (-iu) : el;  // → (∓Ω/2)e^{−iθ}
    }
    double theta_meas = -std::arg(zsum / 4.0);
    double diff = std::remainder(theta_meas - c.expected_theta, 2 * pi);
    CHECK(std::abs(diff) < 0.05);
    CHECK(std::abs(std::remainder(eff.theta - c.expected_theta, 2 * pi)) <
          1e-12);
  }
}

TEST_CASE("effective Hamiltonian matrix: structure and hermiticity") {
  FockSpace space{18};
  const Matrix a = annihilation(space);

  SUBCASE("even order is an anti-Hermitian oscillator pair times the axis") {
    EffectiveInteraction eff;
    eff.order = 2;
    eff.magnitude = tp * 400.0;
    eff.spin_axis = SpinAxis::z();
    eff.theta = 0.7;
    eff.even_order = true;
    Matrix h = effective_hamiltonian_matrix(eff, space);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Matrix osc = iu * (eff.magnitude / 2.0) *
                 (std::exp(iu * 0.7) * (a.adjoint() * a.adjoint()) -
                  std::exp(-iu * 0.7) * (a * a));
    Matrix expect = tensor_product(sigma_z(), osc);
    CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("odd order is a Hermitian oscillator pair times the axis") {
    EffectiveInteraction eff;
    eff.order = 3;
    eff.magnitude = tp * 40.0;
    eff.spin_axis = SpinAxis::equatorial(0.4);
    eff.theta = -0.3;
    eff.even_order = false;
    Matrix h = effective_hamiltonian_matrix(eff, space);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Matrix a3 = a * a * a;
    Matrix osc = (eff.magnitude / 2.0) * (std::exp(-iu * (-0.3)) * a3 +
                                          std::exp(iu * (-0.3)) * a3.adjoint());
    Matrix expect = tensor_product(spin_axis_op(SpinAxis::equatorial(0.4)), osc);
    CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("drive Hamiltonians: explicit matrix forms") {
  FockSpace space{12};
  const Matrix a = annihilation(space);

  SUBCASE("rotating-frame force term") {
    SdfParams p;
    p.strength = tp * 4.6e3;
    p.detuning = tp * 50e3;
    p.axis = SpinAxis::equatorial(0.3);
    p.motional_phase = 0.9;
    const double t = 3.7e-6;
    Matrix h = sdf_hamiltonian_rwa(t, p, 1.0, space);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    complexd ph = std::exp(-iu * (p.detuning * t + 0.9));
    Matrix expect = tensor_product(
        spin_axis_op(p.axis),
        (p.strength / 2.0) * (ph * a + std::conj(ph) * a.adjoint()));
    CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-10);
    // Envelope scales the whole term.
    Matrix h2 = sdf_hamiltonian_rwa(t, p, 0.25, space);
    CHECK((h2 - 0.25 * expect).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("two-tone lab-frame drive") {
    BichromaticParams p;
    p.carrier_rabi = tp * 132.65e3;
    p.lamb_dicke = 0.049;
    p.tone_detuning = tp * 1.25e6;
    p.phi1 = 0.5;
    p.phi2 = 0.1;
    OscillatorParams osc;
    osc.freq = tp * 1.2e6;
    const double t = 1.3e-6;
    Matrix h = bichromatic_hamiltonian(t, p, 1.0, osc, space);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    const double beat = std::cos(p.tone_detuning * t + p.motional_phase());
    Matrix force = tensor_product(
        spin_axis_op(SpinAxis::equatorial(p.spin_phase())),
        p.lamb_dicke * p.carrier_rabi * beat *
            (std::exp(iu * osc.freq * t) * a +
             std::exp(-iu * osc.freq * t) * a.adjoint()));
    Matrix carrier = tensor_product(
        spin_axis_op(SpinAxis::equatorial(p.spin_phase() - pi / 2)),
        p.carrier_rabi * beat * Matrix::Identity(space.dim, space.dim));
    CHECK((h - (force + carrier)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("assembled drive configuration matches the per-term forms") {
  FockSpace space{10};
  auto cfg = make_interaction(2, tp * 50e3, tp * 4.6e3, SpinAxis::equatorial(0),
                              tp * 4.6e3, SpinAxis::equatorial(pi / 2),
                              RampShape{40e-6, 450e-6}, 0.2, -0.1);
  auto ham = interaction_hamiltonian(cfg, space);
  const double t = 57e-6;
  Matrix h = ham(t);
  const double env = ramp_envelope(t, cfg.ramp);
  Matrix expect = sdf_hamiltonian_rwa(t, cfg.leg_alpha.sdf, env, space) +
                  sdf_hamiltonian_rwa(t, cfg.leg_alpha_prime.sdf, env, space);
  CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}
