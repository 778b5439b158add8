// Probe splitting, squeezing fits, characteristic function, Wigner
// reconstruction, and sideband population analysis against closed forms.

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "sqz/tomography.hpp"

using namespace sqz;

namespace {

constexpr double tp = 2.0 * pi;

// exp(r(a²−a†²)/2) squeezes x̂: Var x = e^{−2r}(n̄+½).
Matrix squeeze_unitary(double r, FockSpace space) {
  const Matrix a = annihilation(space);
  const Matrix a2 = a * a;
  const Matrix h = iu * 0.5 * (a2 - a2.adjoint());
  return unitary_from_hermitian(h, r);  // exp(−i h r) = exp(r(a²−a†²)/2)
}

Matrix squeezed_thermal(double r, double nbar, FockSpace space) {
  const Matrix s = squeeze_unitary(r, space);
  return s * thermal_state(nbar, space) * s.adjoint();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

complexd coherent_chi(complexd alpha, complexd beta) {
  return std::exp(-0.5 * std::norm(beta) + beta * std::conj(alpha) -
                  std::conj(beta) * alpha);
}

}  // namespace

TEST_CASE("squeeze helper squeezes the position quadrature") {
  const FockSpace space{80};
  const Matrix rho = squeezed_thermal(0.8, 0.0, space);
  const QuadratureStats st = quadrature_stats(rho, space);
  CHECK(st.cov(0, 0) == doctest::Approx(0.5 * std::exp(-1.6)).epsilon(1e-6));
  CHECK(st.cov(1, 1) == doctest::Approx(0.5 * std::exp(1.6)).epsilon(1e-6));
  // The minor-axis angle lives on [0, pi); an x-squeezed state may come back
  // as either 0 or just below pi, so measure the distance modulo pi.
  const double axis = st.squeezed_axis_angle();
  CHECK(std::min(axis, pi - axis) < 1e-6);
}

TEST_CASE("analytic splitting reduces to the simple limits") {
  ProbeParams probe;
  probe.strength = tp * 10.0e3;
  probe.durations = linspace(0.0, 60e-6, 13);

  SplittingModel ground;  // r = 0, nbar = 0, C = 1
  const auto p = analytic_splitting(ground, probe);
  CHECK(p[0] == doctest::Approx(1.0));  // (1+C)/2 at t = 0
  for (size_t i = 0; i < p.size(); ++i) {
    const double b2 = std::norm(probe.beta(probe.durations[i]));
    CHECK(p[i] == doctest::Approx(0.5 * (1.0 + std::exp(-2.0 * b2)))
                      .epsilon(1e-12));
  }

  SplittingModel half;
  half.contrast = 0.8;
  const auto q = analytic_splitting(half, probe);
  CHECK(q[0] == doctest::Approx(0.9));

  // Probing along the squeezed axis accelerates the decay by e^{2r}.
  SplittingModel sq;
  sq.r = 1.09;
  probe.motional_phase = 0.5 * sq.theta;  // φ − θ/2 = 0
  const auto fast = analytic_splitting(sq, probe);
  const auto slow = analytic_splitting(ground, probe);
  const double lf = std::log(2.0 * fast[4] - 1.0);
  const double ls = std::log(2.0 * slow[4] - 1.0);
  CHECK(lf / ls == doctest::Approx(std::exp(2.0 * 1.09)).epsilon(1e-9));
}

TEST_CASE("probe splitting on vacuum and thermal states matches closed form") {
  const FockSpace space{60};
  ProbeParams probe;
  probe.strength = tp * 10.0e3;
  probe.durations = linspace(0.0, 80e-6, 17);

  for (double nbar : {0.0, 0.09}) {
    const SpinFockState state = spin_thermal_state(spin_down_ket(), nbar, space);
    const auto sim = simulate_probe_splitting(state, probe);
    SplittingModel model;
    model.nbar = nbar;
    const auto ref = analytic_splitting(model, probe);
    for (size_t i = 0; i < sim.size(); ++i)
      CHECK(std::abs(sim[i] - ref[i]) < 1e-4);
  }
}

TEST_CASE("initial spin up flips the splitting pattern") {
  const FockSpace space{60};
  ProbeParams probe;
  probe.strength = tp * 10.0e3;
  probe.durations = linspace(0.0, 60e-6, 9);

  const Matrix rho_osc = squeezed_thermal(0.6, 0.0, space);
  const Matrix down = tensor_product(spin_down_ket() * spin_down_ket().adjoint(), rho_osc);
  const Matrix up = tensor_product(spin_up_ket() * spin_up_ket().adjoint(), rho_osc);

  // p↓ curves from |↑⟩ and |↓⟩ are exact complements, which moves the probe
  // phase of maximal decay by π/2.
  std::vector<double> phases = {0.0, 0.3, 0.7854, 1.2, 1.5708};
  for (double phi : phases) {
    probe.motional_phase = phi;
    const auto pd = simulate_probe_splitting(SpinFockState(down, space), probe);
    const auto pu = simulate_probe_splitting(SpinFockState(up, space), probe);
    for (size_t i = 0; i < pd.size(); ++i)
      CHECK(pd[i] + pu[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("probe splitting on a squeezed thermal state pins the theta map") {
  const FockSpace space{90};
  const double r = 0.8, nbar = 0.09;
  const Matrix rho_osc = squeezed_thermal(r, nbar, space);
  const double axis = quadrature_stats(rho_osc, space).squeezed_axis_angle();
  CHECK(std::min(axis, pi - axis) < 1e-6);  // squeezed along x (mod pi)

  const SpinFockState state(
      tensor_product(spin_down_ket() * spin_down_ket().adjoint(), rho_osc),
      space);
  ProbeParams probe;
  probe.strength = tp * 8.0e3;
  probe.durations = linspace(0.0, 30e-6, 11);

  SplittingModel model;
  model.r = r;
  model.nbar = nbar;
  model.theta = splitting_theta_for_axis(axis);

  // Max-decay probe phase, then a perpendicular (slow) one.
  for (double phi : {probe_phase_for_axis(axis), probe_phase_for_axis(axis) + 0.5 * pi}) {
    probe.motional_phase = phi;
    const auto sim = simulate_probe_splitting(state, probe);
    const auto ref = analytic_splitting(model, probe);
    for (size_t i = 0; i < sim.size(); ++i)
      CHECK(std::abs(sim[i] - ref[i]) < 5e-4);
  }

  // The fast curve must decay ~e^{4r} faster than the slow one.
  probe.motional_phase = probe_phase_for_axis(axis);
  const auto fast = simulate_probe_splitting(state, probe);
  probe.motional_phase = probe_phase_for_axis(axis) + 0.5 * pi;
  const auto slow = simulate_probe_splitting(state, probe);
  const double lf = std::log(2.0 * fast[3] - 1.0);
  const double ls = std::log(2.0 * slow[3] - 1.0);
  CHECK(lf / ls == doctest::Approx(std::exp(4.0 * r)).epsilon(0.02));
}

TEST_CASE("probe heating path degrades coherence and validates input") {
  const FockSpace space{50};
  const SpinFockState state = spin_thermal_state(spin_down_ket(), 0.0, space);
  ProbeParams probe;
  probe.strength = tp * 10.0e3;
  probe.durations = linspace(5e-6, 25e-6, 5);

  const auto clean = simulate_probe_splitting(state, probe);
  const auto tiny = simulate_probe_splitting(state, probe, HeatingModel{1e-3});
  for (size_t i = 0; i < clean.size(); ++i)
    CHECK(std::abs(clean[i] - tiny[i]) < 1e-6);

  const auto heated = simulate_probe_splitting(state, probe, HeatingModel{3000.0});
  CHECK(heated.back() < clean.back() - 1e-4);

  ProbeParams bad = probe;
  bad.strength = -1.0;
  CHECK_THROWS_AS(simulate_probe_splitting(state, bad), std::invalid_argument);
  bad = probe;
  bad.durations = {2e-6, 1e-6};
  CHECK_THROWS_AS(simulate_probe_splitting(state, bad), std::invalid_argument);
}

TEST_CASE("two-stage squeezing fit inverts the analytic model") {
  ProbeParams probe;
  probe.strength = tp * 11.3e3;
  probe.durations = linspace(0.0, 50e-6, 26);

  SplittingModel ref_model;
  ref_model.nbar = 0.09;
  ref_model.contrast = 0.98;
  SplittingModel sqz_model = ref_model;
  sqz_model.r = 1.09;
  probe.motional_phase = 0.5 * sqz_model.theta;

  const auto ref = analytic_splitting(ref_model, probe);
  const auto sqz = analytic_splitting(sqz_model, probe);

  SqueezingFitOptions opt;
  opt.nbar = 0.09;
  opt.strength_guess = tp * 9.0e3;
  const SqueezingFitResult fit =
      fit_squeezing_parameter(probe.durations, ref, sqz, opt);
  CHECK(fit.r == doctest::Approx(1.09).epsilon(1e-6));
  CHECK(fit.probe_strength == doctest::Approx(probe.strength).epsilon(1e-8));
  CHECK(fit.contrast_ref == doctest::Approx(0.98).epsilon(1e-8));
  CHECK(fit.contrast == doctest::Approx(0.98).epsilon(1e-6));
  CHECK(fit.db == doctest::Approx(9.47).epsilon(1e-3));
  CHECK_FALSE(fit.r_clipped);
  CHECK(fit.r_err < 1e-3);

  // Rescaling durations while preserving Ω·t leaves r untouched.
  ProbeParams probe2 = probe;
  probe2.strength = 0.5 * probe.strength;
  for (double& t : probe2.durations) t *= 2.0;
  const auto ref2 = analytic_splitting(ref_model, probe2);
  const auto sqz2 = analytic_splitting(sqz_model, probe2);
  SqueezingFitOptions opt2 = opt;
  opt2.strength_guess = 0.5 * opt.strength_guess;
  const SqueezingFitResult fit2 =
      fit_squeezing_parameter(probe2.durations, ref2, sqz2, opt2);
  CHECK(fit2.r == doctest::Approx(fit.r).epsilon(1e-9));
}

TEST_CASE("anti-squeezed input clips the estimate at zero") {
  ProbeParams probe;
  probe.strength = tp * 10.0e3;
  probe.durations = linspace(0.0, 40e-6, 21);
  SplittingModel ref_model;  // r = 0
  SplittingModel anti;
  anti.r = 0.3;
  anti.theta = pi;  // probe at φ = 0 sees the slow axis: h = e^{−2r} < 1
  const auto ref = analytic_splitting(ref_model, probe);
  const auto slow = analytic_splitting(anti, probe);
  SqueezingFitOptions opt;
  opt.strength_guess = tp * 10.0e3;
  opt.r_guess = 0.2;
  const SqueezingFitResult fit =
      fit_squeezing_parameter(probe.durations, ref, slow, opt);
  CHECK(fit.r == 0.0);
  CHECK(fit.r_clipped);
  CHECK(squeezing_db(0.0) == 0.0);
}

TEST_CASE("squeezing_db conversions") {
  CHECK(squeezing_db(0.0) == 0.0);
  CHECK(squeezing_db(1.09) == doctest::Approx(9.47).epsilon(2e-3));
  CHECK(squeezing_db(0.5 * std::log(10.0)) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(squeezing_db(-0.1), std::invalid_argument);
}

TEST_CASE("characteristic sampler matches Gaussian closed forms") {
  const FockSpace space{100};

  // Vacuum: χ = e^{−|β|²/2} on |β| ≤ 2.
  const Matrix vac = ket_to_density(fock_ket(0, space));
  const CharacteristicSampler chi_vac(vac, space);
  for (double br : {-2.0, -1.0, 0.0, 0.7, 1.4}) {
    for (double bi : {-1.4, 0.0, 0.9}) {
      if (br * br + bi * bi > 4.0) continue;
      const complexd beta(br, bi);
      CHECK(std::abs(chi_vac(beta) - std::exp(-0.5 * std::norm(beta))) < 1e-8);
    }
  }

  // Coherent state: χ = e^{−|β|²/2} e^{βᾱ−β̄α}.
  const complexd alpha(0.7, 0.3);
  const Matrix coh = ket_to_density(coherent_ket(alpha, space));
  const CharacteristicSampler chi_coh(coh, space);
  CHECK(std::abs(chi_coh(complexd(0, 0)) - 1.0) < 1e-10);
  for (double br : {-1.5, -0.4, 0.8}) {
    for (double bi : {-0.9, 0.2, 1.3}) {
      const complexd beta(br, bi);
      CHECK(std::abs(chi_coh(beta) - coherent_chi(alpha, beta)) < 1e-8);
    }
  }

  // x-squeezed vacuum: χ = exp(−(e^{2r}βr² + e^{−2r}βi²)/2), purely real.
  const double r = 0.8;
  const Matrix sq = squeezed_thermal(r, 0.0, FockSpace{150});
  const CharacteristicSampler chi_sq(sq, FockSpace{150});
  for (double br : {-1.2, 0.0, 0.5}) {
    for (double bi : {-2.0, 0.3, 1.8}) {
      const complexd val = chi_sq(complexd(br, bi));
      const double expected = std::exp(
          -0.5 * (std::exp(2 * r) * br * br + std::exp(-2 * r) * bi * bi));
      CHECK(std::abs(val - expected) < 1e-8);
      CHECK(std::abs(val.imag()) < 1e-8);
    }
  }
}

TEST_CASE("sampler agrees with the displacement-operator oracle") {
  const FockSpace space{60};
  const Matrix rho = 0.6 * ket_to_density(coherent_ket(complexd(0.5, -0.2), space)) +
                     0.4 * thermal_state(0.3, space);
  const CharacteristicSampler chi(rho, space);
  for (double br : {-1.5, -0.3, 0.9}) {
    for (double bi : {-0.8, 0.4, 1.2}) {
      const complexd beta(br, bi);
      CHECK(std::abs(chi(beta) - characteristic_point_direct(rho, beta, space)) <
            1e-9);
    }
  }

  // Grid-level properties: |χ| ≤ 1 and χ(−β) = χ(β)*.
  const CharacteristicGrid g = chi.grid(21, 1.8);
  g.validate();
  const int n = 21;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(g.values(i, j)) <= 1.0 + 1e-6);
      const complexd mirrored = g.values(n - 1 - i, n - 1 - j);
      CHECK(std::abs(g.values(i, j) - std::conj(mirrored)) < 1e-10);
    }
  }
}

TEST_CASE("measurement-circuit sampling matches the direct evaluation") {
  const FockSpace space{60};
  const Matrix rho = 0.5 * ket_to_density(coherent_ket(complexd(0.6, 0.0), space)) +
                     0.5 * squeezed_thermal(0.4, 0.0, space);
  const double strength = tp * 20.0e3;
  const CharacteristicGrid direct =
      sample_characteristic(rho, space, ChiMethod::direct, 9, 1.2);
  const CharacteristicGrid circuit =
      sample_characteristic(rho, space, ChiMethod::circuit, 9, 1.2, strength);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      CHECK(std::abs(direct.values(i, j) - circuit.values(i, j)) < 1e-6);
}

TEST_CASE("wigner transform of an analytic vacuum grid") {
  CharacteristicGrid g;
  g.beta_re = Eigen::VectorXd::LinSpaced(41, -3.0, 3.0);
  g.beta_im = g.beta_re;
  g.values.resize(41, 41);
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j)
      g.values(i, j) = std::exp(
          -0.5 * (g.beta_re(i) * g.beta_re(i) + g.beta_im(j) * g.beta_im(j)));

  const WignerGrid w = wigner_from_characteristic(g, 200);
  CHECK(w.x.size() == 441);
  CHECK(w.p.size() == 441);
  CHECK(w.max_imag < 1e-9);
  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-9));

  const Eigen::Vector2d mean(0.0, 0.0);
  const Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();
  double worst = 0.0;
  for (int i = 0; i < 441; i += 4)
    for (int j = 0; j < 441; j += 4)
      worst = std::max(worst, std::abs(w.values(i, j) -
                                       gaussian_wigner(mean, cov, w.x(i), w.p(j))));
  CHECK(worst < 1.5e-3);
  CHECK(w.values(220, 220) == doctest::Approx(1.0 / pi).epsilon(1e-2));

  // Padding only refines the output sampling.
  const WignerGrid coarse = wigner_from_characteristic(g, 0);
  for (int i = 5; i < 36; ++i)
    for (int j = 5; j < 36; ++j)
      CHECK(std::abs(coarse.values(i, j) -
                     wigner_interpolate(w, coarse.x(i), coarse.p(j))) < 2e-3);
}

TEST_CASE("wigner reconstruction of a coherent state through the sampler") {
  const FockSpace space{100};
  const Matrix rho = ket_to_density(coherent_ket(complexd(1.0, 0.0), space));
  const CharacteristicGrid g =
      sample_characteristic(rho, space, ChiMethod::direct, 41, 3.0);
  const WignerGrid w = wigner_from_characteristic(g, 200);

  const Eigen::Vector2d mean(std::sqrt(2.0), 0.0);
  const Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();
  double worst = 0.0;
  for (int i = 0; i < 441; i += 2)
    for (int j = 0; j < 441; j += 2)
      worst = std::max(worst, std::abs(w.values(i, j) -
                                       gaussian_wigner(mean, cov, w.x(i), w.p(j))));
  CHECK(worst < 2e-3);

  // Peak sits within one output cell of (√2, 0).
  int bi = 0, bj = 0;
  w.values.maxCoeff(&bi, &bj);
  CHECK(std::abs(w.x(bi) - std::sqrt(2.0)) <= w.x(1) - w.x(0));
  CHECK(std::abs(w.p(bj)) <= w.p(1) - w.p(0));
  CHECK(wigner_interpolate(w, std::sqrt(2.0), 0.0) ==
        doctest::Approx(1.0 / pi).epsilon(5e-3));
}

TEST_CASE("wigner reconstruction of a strongly squeezed state") {
  // Extent 7 balances the two 41-point discretisation errors for r = 1.09:
  // a larger span undersamples chi along the squeezed axis (the broad
  // momentum profile of W then aliases into the frame), while a smaller one
  // truncates the chi tail along the anti-squeezed axis.
  const double r = 1.09;
  const FockSpace space{320};
  const Matrix rho = squeezed_thermal(r, 0.0, space);
  const CharacteristicGrid g =
      sample_characteristic(rho, space, ChiMethod::direct, 41, 7.0);
  const WignerGrid w = wigner_from_characteristic(g, 200);

  Eigen::Matrix2d cov;
  cov << 0.5 * std::exp(-2 * r), 0.0, 0.0, 0.5 * std::exp(2 * r);
  double worst = 0.0;
  for (int i = 0; i < 441; i += 2)
    for (int j = 0; j < 441; j += 2)
      worst = std::max(worst,
                       std::abs(w.values(i, j) - gaussian_wigner({0.0, 0.0}, cov,
                                                                 w.x(i), w.p(j))));
  CHECK(worst < 1e-2);
}

TEST_CASE("trisqueezed vacuum shows negativity and three-fold symmetry") {
  const FockSpace space{120};
  const Matrix a = annihilation(space);
  const Matrix a3 = a * a * a;
  const Matrix h = 0.5 * (a3 + a3.adjoint());
  const Matrix u = unitary_from_hermitian(h, 0.19);
  const Matrix rho = ket_to_density(u * fock_ket(0, space));

  const CharacteristicGrid g =
      sample_characteristic(rho, space, ChiMethod::direct, 41, 4.0);
  const WignerGrid w = wigner_from_characteristic(g, 200);
  CHECK(w.min_value() < -1e-4);
  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rotational_symmetry_deviation(w, 3, 2.0, true) < 0.02);
}

TEST_CASE("grid and transform inputs are validated") {
  CharacteristicGrid g;
  g.beta_re = Eigen::VectorXd::LinSpaced(5, -1, 1);
  g.beta_im = g.beta_re;
  g.values = Eigen::MatrixXcd::Ones(5, 4);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.values = Eigen::MatrixXcd::Ones(5, 5);
  CHECK_NOTHROW(g.validate());
  g.beta_im(3) += 0.2;  // non-uniform
  CHECK_THROWS_AS(wigner_from_characteristic(g, 10), std::invalid_argument);

  g.beta_im = g.beta_re;
  const WignerGrid w = wigner_from_characteristic(g, 10);
  CHECK_THROWS_AS(wigner_interpolate(w, w.x(0) - 1.0, 0.0), std::out_of_range);
  CHECK_THROWS_AS(sample_characteristic(Matrix::Identity(4, 4), FockSpace{4},
                                        ChiMethod::circuit, 5, 1.0),
                  std::invalid_argument);  // circuit needs a probe strength
}

TEST_CASE("blue-sideband flopping follows the sqrt(n+1) ladder") {
  const FockSpace space{40};
  SidebandParams sb;
  sb.strength = tp * 50.0e3;
  sb.durations = linspace(0.0, 40e-6, 41);

  const auto p0 = simulate_blue_sideband(ket_to_density(fock_ket(0, space)),
                                         space, sb);
  const auto p1 = simulate_blue_sideband(ket_to_density(fock_ket(1, space)),
                                         space, sb);
  for (size_t i = 0; i < sb.durations.size(); ++i) {
    const double t = sb.durations[i];
    const double c0 = std::cos(0.5 * sb.strength * t);
    const double c1 = std::cos(0.5 * std::sqrt(2.0) * sb.strength * t);
    CHECK(std::abs(p0[i] - c0 * c0) < 1e-10);
    CHECK(std::abs(p1[i] - c1 * c1) < 1e-10);
  }

  // Thermal state: population-weighted sum of Fock flops.
  const Matrix th = thermal_state(0.09, space);
  const auto pt = simulate_blue_sideband(th, space, sb);
  for (size_t i = 0; i < sb.durations.size(); ++i) {
    double expected = 0.0;
    for (int n = 0; n < space.dim; ++n) {
      const double c =
          std::cos(0.5 * std::sqrt(double(n + 1)) * sb.strength * sb.durations[i]);
      expected += th(n, n).real() * c * c;
    }
    CHECK(std::abs(pt[i] - expected) < 1e-8);
  }
}

TEST_CASE("fock populations are unfolded from sideband curves") {
  const FockSpace space{40};
  SidebandParams sb;
  sb.strength = tp * 50.0e3;
  sb.durations = linspace(0.0, 60e-6, 121);

  // Ground state.
  const auto p0 = simulate_blue_sideband(ket_to_density(fock_ket(0, space)),
                                         space, sb);
  const FockPopulations f0 =
      fit_fock_populations(sb.durations, p0, sb.strength, 6);
  CHECK(std::abs(f0.populations(0) - 1.0) < 1e-4);
  for (int n = 1; n <= 6; ++n) CHECK(f0.populations(n) < 1e-6);

  // Thermal state: geometric distribution within 1e-3 per level.
  const Matrix th = thermal_state(0.5, space);
  const auto pt = simulate_blue_sideband(th, space, sb);
  const FockPopulations ft =
      fit_fock_populations(sb.durations, pt, sb.strength, 18);
  for (int n = 0; n <= 18; ++n) {
    const double expect = std::pow(0.5 / 1.5, n) / 1.5;
    CHECK(std::abs(ft.populations(n) - expect) < 1e-3);
  }
  CHECK(ft.populations.sum() <= 1.0 + 1e-12);

  // Squeezed vacuum: even-odd structure matching the density-matrix diagonal.
  const Matrix sqv = squeezed_thermal(0.9, 0.0, space);
  const auto ps = simulate_blue_sideband(sqv, space, sb);
  const FockPopulations fs =
      fit_fock_populations(sb.durations, ps, sb.strength, 16);
  for (int n = 0; n <= 16; ++n) {
    CHECK(std::abs(fs.populations(n) - sqv(n, n).real()) < 2e-3);
    if (n % 2 == 1) CHECK(fs.populations(n) < 1e-4);
  }
}
