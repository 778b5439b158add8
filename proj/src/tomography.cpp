#include "sqz/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqz {
namespace {

// p↓(t) = tr(P e^{−iHt} ρ e^{iHt}) for constant H, evaluated for many t from
// one eigendecomposition: with ρ̃ = V†ρV, P̃ = V†PV and phases e^{−iλt},
// p(t) = Σ_jk ρ̃_jk P̃_kj e^{−i(λ_j−λ_k)t}.
std::vector<double> projection_series(const Matrix& h, const Matrix& rho,
                                      const Matrix& projector,
                                      const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("projection_series: eigensolver failed");
  const Matrix& v = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Matrix rho_t = v.adjoint() * rho * v;
  const Matrix proj_t = v.adjoint() * projector * v;
  const Matrix m = rho_t.cwiseProduct(proj_t.transpose());

  std::vector<double> out;
  out.reserve(times.size());
  Vector phase(lam.size());
  for (double t : times) {
    for (int j = 0; j < lam.size(); ++j) phase(j) = std::exp(-iu * lam(j) * t);
    out.push_back((phase.transpose() * (m * phase.conjugate())).value().real());
  }
  return out;
}

Matrix probe_hamiltonian(const ProbeParams& probe, FockSpace space) {
  const Matrix a = annihilation(space);
  const Matrix osc = a * std::exp(-iu * probe.motional_phase) +
                     a.adjoint() * std::exp(iu * probe.motional_phase);
  return 0.5 * probe.strength *
         tensor_product(spin_axis_op(probe.spin_axis), osc);
}

Matrix spin_down_projector(FockSpace space) {
  return tensor_product(spin_down_ket() * spin_down_ket().adjoint(),
                        Matrix::Identity(space.dim, space.dim));
}

}  // namespace

// ------------------------------ Probe splitting ------------------------------

void ProbeParams::validate() const {
  if (strength < 0)
    throw std::invalid_argument("ProbeParams: strength must be >= 0");
  double prev = 0.0;
  for (double t : durations) {
    if (t < prev)
      throw std::invalid_argument(
          "ProbeParams: durations must be ascending and non-negative");
    prev = t;
  }
}

void SplittingModel::validate() const {
  if (r < 0) throw std::invalid_argument("SplittingModel: r must be >= 0");
  if (nbar < 0)
    throw std::invalid_argument("SplittingModel: nbar must be >= 0");
  if (contrast < 0 || contrast > 1)
    throw std::invalid_argument("SplittingModel: contrast must be in [0, 1]");
}

double splitting_theta_for_axis(double squeezed_axis_angle) {
  return std::remainder(2.0 * squeezed_axis_angle + pi, 2.0 * pi);
}

double probe_phase_for_axis(double squeezed_axis_angle) {
  return std::remainder(squeezed_axis_angle + 0.5 * pi, 2.0 * pi);
}

std::vector<double> analytic_splitting(const SplittingModel& model,
                                       const ProbeParams& probe) {
  model.validate();
  probe.validate();
  const double ang = probe.motional_phase - 0.5 * model.theta;
  const double c = std::cos(ang), s = std::sin(ang);
  const double h =
      std::exp(2.0 * model.r) * c * c + std::exp(-2.0 * model.r) * s * s;
  std::vector<double> out;
  out.reserve(probe.durations.size());
  for (double t : probe.durations) {
    const double g =
        std::norm(2.0 * probe.beta(t)) * (model.nbar + 0.5);
    out.push_back(0.5 * (1.0 + model.contrast * std::exp(-g * h)));
  }
  return out;
}

std::vector<double> simulate_probe_splitting(const SpinFockState& state,
                                             const ProbeParams& probe,
                                             const HeatingModel& heating) {
  probe.validate();
  heating.validate();
  const Matrix h = probe_hamiltonian(probe, state.space);
  const Matrix proj = spin_down_projector(state.space);
  if (heating.rate == 0.0)
    return projection_series(h, state.rho, proj, probe.durations);

  TimeDependentHamiltonian tdh;
  tdh.add_term(h, [](double) { return complexd(1.0, 0.0); });
  std::vector<double> out;
  out.reserve(probe.durations.size());
  EvolutionSpec spec;
  spec.t_end = probe.durations.empty() ? 0.0 : probe.durations.back();
  evolve_lindblad(tdh, state.rho, spec, heating, state.space, probe.durations,
                  [&](double, const Matrix& rho) {
                    out.push_back((proj * rho).trace().real());
                  });
  return out;
}

// ------------------------------ Squeezing fits -------------------------------

SqueezingFitResult fit_squeezing_parameter(
    const std::vector<double>& durations,
    const std::vector<double>& reference_curve,
    const std::vector<double>& squeezed_curve,
    const SqueezingFitOptions& options) {
  if (durations.size() != reference_curve.size() ||
      durations.size() != squeezed_curve.size())
    throw std::invalid_argument(
        "fit_squeezing_parameter: curves must share the duration grid");
  if (options.strength_guess <= 0)
    throw std::invalid_argument(
        "fit_squeezing_parameter: strength_guess must be > 0");
  if (options.nbar < 0)
    throw std::invalid_argument("fit_squeezing_parameter: nbar must be >= 0");

  const double occ = options.nbar + 0.5;
  SqueezingFitResult res;

  // Stage 1: probe strength and contrast from the unsqueezed reference.
  const CurveModel ref_model = [occ](const Eigen::VectorXd& p, double t) {
    const double wt = p(0) * t;
    return 0.5 * (1.0 + p(1) * std::exp(-wt * wt * occ));
  };
  Eigen::VectorXd init(2);
  init << options.strength_guess, options.contrast_guess;
  const FitResult ref = fit_curve(ref_model, durations, reference_curve, init);
  if (!ref.converged)
    throw std::runtime_error(
        "fit_squeezing_parameter: reference fit did not converge");
  res.probe_strength = std::abs(ref.params(0));
  res.probe_strength_err = ref.uncertainties(0);
  res.contrast_ref = ref.params(1);
  res.contrast_ref_err = ref.uncertainties(1);
  res.chi2_reference = ref.chi2;

  // Stage 2: r and contrast along the squeezed axis, strength held fixed.
  // The squeezed state may carry extra thermal occupation (e.g. heating
  // accumulated during the pulse), so its stage may use its own nbar.
  const double occ2 =
      (options.nbar_squeezed >= 0 ? options.nbar_squeezed : options.nbar) + 0.5;
  const double w = res.probe_strength;
  const CurveModel sqz_model = [occ2, w](const Eigen::VectorXd& p, double t) {
    const double wt = w * t;
    return 0.5 *
           (1.0 + p(1) * std::exp(-wt * wt * occ2 * std::exp(2.0 * p(0))));
  };
  Eigen::VectorXd init2(2);
  init2 << options.r_guess, res.contrast_ref;
  const FitResult sqz = fit_curve(sqz_model, durations, squeezed_curve, init2);
  if (!sqz.converged)
    throw std::runtime_error(
        "fit_squeezing_parameter: squeezed-axis fit did not converge");
  res.r = sqz.params(0);
  res.r_err = sqz.uncertainties(0);
  res.contrast = sqz.params(1);
  res.contrast_err = sqz.uncertainties(1);
  res.chi2_squeezed = sqz.chi2;
  if (res.r < 0) {
    res.r = 0.0;
    res.r_clipped = true;
  }
  res.db = squeezing_db(res.r);
  res.db_err = 20.0 * res.r_err / std::log(10.0);
  return res;
}

// --------------------------- Characteristic function -------------------------

void CharacteristicGrid::validate() const {
  if (values.rows() != beta_re.size() || values.cols() != beta_im.size())
    throw std::invalid_argument("CharacteristicGrid: dimension mismatch");
  for (const Eigen::VectorXd* ax : {&beta_re, &beta_im}) {
    if (ax->size() < 2)
      throw std::invalid_argument("CharacteristicGrid: need >= 2 samples");
    const double step = ((*ax)(1) - (*ax)(0));
    if (step <= 0)
      throw std::invalid_argument("CharacteristicGrid: axes must ascend");
    for (int i = 2; i < ax->size(); ++i)
      if (std::abs((*ax)(i) - (*ax)(i - 1) - step) > 1e-9 * std::abs(step))
        throw std::invalid_argument("CharacteristicGrid: axes must be uniform");
  }
}

CharacteristicSampler::CharacteristicSampler(const Matrix& rho_osc,
                                             FockSpace space) {
  if (rho_osc.rows() != space.dim || rho_osc.cols() != space.dim)
    throw std::invalid_argument("CharacteristicSampler: dimension mismatch");
  const Matrix a = annihilation(space);
  const Matrix x = (a + a.adjoint()) / std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> ex(x);
  if (ex.info() != Eigen::Success)
    throw std::runtime_error("CharacteristicSampler: eigensolver failed");
  xvals_ = ex.eigenvalues();
  pvals_ = xvals_;  // p̂ = R x̂ R† with R = diag(i^n), so spectra coincide
  Vector rot(space.dim);
  for (int n = 0; n < space.dim; ++n)
    rot(n) = std::exp(iu * (0.5 * pi) * double(n));
  const Matrix vp = rot.asDiagonal() * ex.eigenvectors();
  // χ(β) = e^{−iβrβi} Σ_jk weights(j,k) e^{i√2 βi x_j} e^{−i√2 βr p_k},
  // from D(β) = e^{i√2 βi x̂} e^{−i√2 βr p̂} e^{−iβrβi} and the trace in the
  // mixed eigenbases: weights(j,k) = (Vp†ρVx)_{kj} (Vx†Vp)_{jk}.
  const Matrix m = vp.adjoint() * rho_osc * ex.eigenvectors();
  const Matrix q = ex.eigenvectors().adjoint() * vp;
  weights_ = m.transpose().cwiseProduct(q);
}

complexd CharacteristicSampler::operator()(complexd beta) const {
  const double br = beta.real(), bi = beta.imag();
  const double s2 = std::sqrt(2.0);
  Vector u(xvals_.size()), v(pvals_.size());
  for (int j = 0; j < xvals_.size(); ++j)
    u(j) = std::exp(iu * s2 * bi * xvals_(j));
  for (int k = 0; k < pvals_.size(); ++k)
    v(k) = std::exp(-iu * s2 * br * pvals_(k));
  return std::exp(-iu * br * bi) * (u.transpose() * (weights_ * v)).value();
}

CharacteristicGrid CharacteristicSampler::grid(int points,
                                               double extent) const {
  if (points < 2)
    throw std::invalid_argument("CharacteristicSampler: need >= 2 points");
  if (extent <= 0)
    throw std::invalid_argument("CharacteristicSampler: extent must be > 0");
  CharacteristicGrid g;
  g.beta_re = Eigen::VectorXd::LinSpaced(points, -extent, extent);
  g.beta_im = g.beta_re;
  const double s2 = std::sqrt(2.0);
  const int n = int(xvals_.size());
  Matrix u(points, n), v(n, points);
  for (int a = 0; a < points; ++a)
    for (int j = 0; j < n; ++j)
      u(a, j) = std::exp(iu * s2 * g.beta_im(a) * xvals_(j));
  for (int k = 0; k < n; ++k)
    for (int b = 0; b < points; ++b)
      v(k, b) = std::exp(-iu * s2 * g.beta_re(b) * pvals_(k));
  const Matrix core = u * weights_ * v;  // (βi index, βr index)
  g.values.resize(points, points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      g.values(i, j) =
          std::exp(-iu * g.beta_re(i) * g.beta_im(j)) * core(j, i);
  return g;
}

complexd characteristic_point_direct(const Matrix& rho_osc, complexd beta,
                                     FockSpace space) {
  return (rho_osc * displacement_op(beta, space)).trace();
}

complexd characteristic_point_circuit(const Matrix& rho_osc, complexd beta,
                                      FockSpace space, double probe_strength) {
  if (probe_strength <= 0)
    throw std::invalid_argument(
        "characteristic_point_circuit: probe_strength must be > 0");
  if (std::norm(beta) > space.dim / 4.0)
    throw std::invalid_argument(
        "characteristic_point_circuit: |beta|^2 exceeds dim/4");
  const double t = std::abs(beta) / probe_strength;
  ProbeParams probe;
  probe.strength = probe_strength;
  probe.motional_phase = std::arg(beta) - 0.5 * pi;
  probe.spin_axis = SpinAxis::equatorial(0.0);

  const Matrix h = probe_hamiltonian(probe, space);
  const Matrix u = unitary_from_hermitian(h, t);
  const Matrix rho_full =
      tensor_product(spin_down_ket() * spin_down_ket().adjoint(), rho_osc);
  const Matrix after = u * rho_full * u.adjoint();
  const Matrix proj = spin_down_projector(space);
  const double p_re = (proj * after).trace().real();

  // A π/2 rotation about the probe axis converts the imaginary part of the
  // interference term into a population difference: p↓ = (1 − Im χ)/2.
  const Matrix rot = tensor_embed_spin(
      unitary_from_hermitian(spin_axis_op(probe.spin_axis), 0.25 * pi), space);
  const double p_im = (proj * rot * after * rot.adjoint()).trace().real();
  return complexd(2.0 * p_re - 1.0, 1.0 - 2.0 * p_im);
}

CharacteristicGrid sample_characteristic(const Matrix& rho_osc,
                                         FockSpace space, ChiMethod method,
                                         int points, double extent,
                                         double probe_strength) {
  if (method == ChiMethod::direct)
    return CharacteristicSampler(rho_osc, space).grid(points, extent);

  if (points < 2)
    throw std::invalid_argument("sample_characteristic: need >= 2 points");
  CharacteristicGrid g;
  g.beta_re = Eigen::VectorXd::LinSpaced(points, -extent, extent);
  g.beta_im = g.beta_re;
  g.values.resize(points, points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      g.values(i, j) = characteristic_point_circuit(
          rho_osc, g.beta(i, j), space, probe_strength);
  return g;
}

// ------------------------------ Wigner function ------------------------------

double WignerGrid::cell_area() const {
  if (x.size() < 2 || p.size() < 2) return 0.0;
  return (x(1) - x(0)) * (p(1) - p(0));
}

double WignerGrid::integral() const { return values.sum() * cell_area(); }

double WignerGrid::min_value() const { return values.minCoeff(); }

WignerGrid wigner_from_characteristic(const CharacteristicGrid& grid,
                                      int pad) {
  grid.validate();
  if (pad < 0)
    throw std::invalid_argument("wigner_from_characteristic: pad must be >= 0");
  const int nr = int(grid.beta_re.size()), ni = int(grid.beta_im.size());
  const double dr = grid.beta_re(1) - grid.beta_re(0);
  const double di = grid.beta_im(1) - grid.beta_im(0);
  const int npr = nr + 2 * pad, npi = ni + 2 * pad;

  Matrix padded = Matrix::Zero(npr, npi);
  padded.block(pad, pad, nr, ni) = grid.values;

  const double s2 = std::sqrt(2.0);
  WignerGrid w;
  w.p = Eigen::VectorXd::Zero(npr);
  for (int b = 0; b < npr; ++b)
    w.p(b) = 2.0 * pi * (b - 0.5 * (npr - 1)) / (npr * s2 * dr);
  w.x = Eigen::VectorXd::Zero(npi);
  for (int a = 0; a < npi; ++a)
    w.x(a) = 2.0 * pi * (a - 0.5 * (npi - 1)) / (npi * s2 * di);

  // Padded sample coordinates continue the measured axes outward.
  Eigen::VectorXd br(npr), bi(npi);
  for (int j = 0; j < npr; ++j) br(j) = grid.beta_re(0) + (j - pad) * dr;
  for (int k = 0; k < npi; ++k) bi(k) = grid.beta_im(0) + (k - pad) * di;

  // W = (1/2π²) T1 · χᵀ · T2 with T1(a,k) = e^{−i√2 x_a βi_k} Δi and
  // T2(j,b) = e^{i√2 βr_j p_b} Δr.
  Matrix t1(npi, npi), t2(npr, npr);
  for (int a = 0; a < npi; ++a)
    for (int k = 0; k < npi; ++k)
      t1(a, k) = std::exp(-iu * s2 * w.x(a) * bi(k)) * di;
  for (int j = 0; j < npr; ++j)
    for (int b = 0; b < npr; ++b)
      t2(j, b) = std::exp(iu * s2 * br(j) * w.p(b)) * dr;

  const Matrix wc =
      (t1 * (padded.transpose() * t2)) / (2.0 * pi * pi);
  w.values = wc.real();
  w.max_imag = wc.imag().cwiseAbs().maxCoeff();
  return w;
}

double wigner_interpolate(const WignerGrid& grid, double x, double p) {
  const auto locate = [](const Eigen::VectorXd& ax, double v) {
    const double step = ax(1) - ax(0);
    const double f = (v - ax(0)) / step;
    const int i = int(std::floor(f));
    if (f < 0 || i + 1 >= ax.size())
      throw std::out_of_range("wigner_interpolate: point outside the grid");
    return std::pair<int, double>(i, f - i);
  };
  const auto [i, fx] = locate(grid.x, x);
  const auto [j, fp] = locate(grid.p, p);
  return (1 - fx) * (1 - fp) * grid.values(i, j) +
         fx * (1 - fp) * grid.values(i + 1, j) +
         (1 - fx) * fp * grid.values(i, j + 1) +
         fx * fp * grid.values(i + 1, j + 1);
}

double rotational_symmetry_deviation(const WignerGrid& grid, int k,
                                     double radius, bool use_abs) {
  if (k < 2)
    throw std::invalid_argument(
        "rotational_symmetry_deviation: order must be >= 2");
  const double c = std::cos(2.0 * pi / k), s = std::sin(2.0 * pi / k);
  const double scale = grid.values.cwiseAbs().maxCoeff();
  double worst = 0.0;
  int used = 0;
  for (int i = 0; i < grid.x.size(); ++i) {
    for (int j = 0; j < grid.p.size(); ++j) {
      const double x = grid.x(i), p = grid.p(j);
      if (x * x + p * p > radius * radius) continue;
      double rot;
      try {
        rot = wigner_interpolate(grid, c * x - s * p, s * x + c * p);
      } catch (const std::out_of_range&) {
        continue;
      }
      double val = grid.values(i, j);
      if (use_abs) {
        val = std::abs(val);
        rot = std::abs(rot);
      }
      worst = std::max(worst, std::abs(val - rot));
      ++used;
    }
  }
  if (used == 0)
    throw std::invalid_argument(
        "rotational_symmetry_deviation: no grid points within radius");
  return worst / scale;
}

double gaussian_wigner(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                       double x, double p) {
  const double det = cov.determinant();
  if (det <= 0)
    throw std::invalid_argument("gaussian_wigner: covariance not positive");
  const Eigen::Vector2d d(x - mean.x(), p - mean.y());
  const double quad = d.dot(cov.inverse() * d);
  return std::exp(-0.5 * quad) / (2.0 * pi * std::sqrt(det));
}

// ------------------------------ Blue sideband --------------------------------

void SidebandParams::validate() const {
  if (strength < 0)
    throw std::invalid_argument("SidebandParams: strength must be >= 0");
  for (double t : durations)
    if (t < 0)
      throw std::invalid_argument("SidebandParams: durations must be >= 0");
}

std::vector<double> simulate_blue_sideband(const Matrix& rho_osc,
                                           FockSpace space,
                                           const SidebandParams& params) {
  params.validate();
  if (rho_osc.rows() != space.dim || rho_osc.cols() != space.dim)
    throw std::invalid_argument("simulate_blue_sideband: dimension mismatch");
  const Matrix a = annihilation(space);
  const Matrix h = 0.5 * params.strength *
                   (tensor_product(sigma_plus(), a.adjoint()) +
                    tensor_product(sigma_minus(), a));
  const Matrix rho_full =
      tensor_product(spin_down_ket() * spin_down_ket().adjoint(), rho_osc);
  return projection_series(h, rho_full, spin_down_projector(space),
                           params.durations);
}

FockPopulations fit_fock_populations(const std::vector<double>& durations,
                                     const std::vector<double>& p_down,
                                     double sideband_strength, int max_n,
                                     double decay_rate) {
  if (durations.size() != p_down.size())
    throw std::invalid_argument("fit_fock_populations: size mismatch");
  if (durations.empty())
    throw std::invalid_argument("fit_fock_populations: empty curve");
  if (sideband_strength <= 0)
    throw std::invalid_argument(
        "fit_fock_populations: sideband_strength must be > 0");
  if (max_n < 0)
    throw std::invalid_argument("fit_fock_populations: max_n must be >= 0");

  const int rows = int(durations.size()), cols = max_n + 1;
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < rows; ++i) {
    const double t = durations[i];
    b(i) = p_down[i];
    for (int n = 0; n < cols; ++n) {
      const double f = std::sqrt(double(n + 1)) * sideband_strength * t;
      a(i, n) = 0.5 * (1.0 + std::exp(-decay_rate * t) * std::cos(f));
    }
  }

  FockPopulations res;
  res.populations = nnls(a, b);
  const double total = res.populations.sum();
  if (total > 1.0) res.populations /= total;

  const Eigen::VectorXd resid = a * res.populations - b;
  res.residual_rms = std::sqrt(resid.squaredNorm() / rows);

  // Covariance on the populated levels only; clamped levels report zero.
  std::vector<int> act;
  for (int n = 0; n < cols; ++n)
    if (res.populations(n) > 0) act.push_back(n);
  res.uncertainties = Eigen::VectorXd::Zero(cols);
  if (!act.empty() && rows > int(act.size())) {
    Eigen::MatrixXd aa(rows, act.size());
    for (size_t c = 0; c < act.size(); ++c) aa.col(c) = a.col(act[c]);
    const double sig2 = resid.squaredNorm() / (rows - int(act.size()));
    Eigen::MatrixXd gram = aa.transpose() * aa;
    gram.diagonal() += Eigen::VectorXd::Constant(gram.rows(), 1e-300);
    const Eigen::VectorXd var = (gram.inverse() * sig2).diagonal();
    for (size_t c = 0; c < act.size(); ++c)
      res.uncertainties(act[c]) = std::sqrt(std::max(var(c), 0.0));
  }
  return res;
}

}  // namespace sqz
