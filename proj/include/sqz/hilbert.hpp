// hilbert.hpp — Spin ⊗ oscillator Hilbert-space primitives: ladder and Pauli
// operators, displacement, thermal/coherent states, fidelity, embeddings.
//
// Conventions (used throughout the library):
//   * spin basis index 0 = |↑⟩, index 1 = |↓⟩, so σ_z = diag(+1, −1);
//   * composite order is spin ⊗ oscillator, dimension 2·dim;
//   * equatorial axis σ_φ = cos φ σ_x + sin φ σ_y;
//   * quadratures x̂ = (â + â†)/√2, p̂ = i(â† − â)/√2.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqz {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using complexd = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr complexd iu{0.0, 1.0};  // imaginary unit

// --------------------------------- Fock space --------------------------------

// Truncated oscillator space spanned by |0⟩ … |dim−1⟩.
struct FockSpace {
  int dim;

  explicit FockSpace(int d) : dim(d) {
    if (d < 2) throw std::invalid_argument("FockSpace: dim must be >= 2");
  }
};

// a |n⟩ = √n |n−1⟩  →  a_{n−1,n} = √n
inline Matrix annihilation(FockSpace space) {
  Matrix a = Matrix::Zero(space.dim, space.dim);
  for (int n = 1; n < space.dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

inline Matrix creation(FockSpace space) { return annihilation(space).adjoint(); }

inline Matrix number_op(FockSpace space) {
  Matrix n = Matrix::Zero(space.dim, space.dim);
  for (int k = 0; k < space.dim; ++k) n(k, k) = double(k);
  return n;
}

// ------------------------------- Spin operators ------------------------------

inline Matrix identity2() { return Matrix::Identity(2, 2); }

inline Matrix sigma_x() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline Matrix sigma_y() {
  Matrix s(2, 2);
  s << 0, -iu, iu, 0;
  return s;
}

inline Matrix sigma_z() {
  Matrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

inline Matrix sigma_plus() {  // |↑⟩⟨↓|
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1;
  return s;
}

inline Matrix sigma_minus() { return sigma_plus().adjoint(); }

// Unit Bloch vector labelling a spin operator n·σ.
struct SpinAxis {
  Eigen::Vector3d n;

  explicit SpinAxis(const Eigen::Vector3d& v) : n(v) {
    const double norm = v.norm();
    if (norm < 1e-12) throw std::invalid_argument("SpinAxis: zero Bloch vector");
    if (std::abs(norm - 1.0) > 1e-9) n /= norm;
  }

  // σ_φ in the equatorial plane.
  static SpinAxis equatorial(double phi) {
    return SpinAxis({std::cos(phi), std::sin(phi), 0.0});
  }

  static SpinAxis z() { return SpinAxis({0.0, 0.0, 1.0}); }
};

// n·σ; Hermitian, unitary, eigenvalues ±1.
inline Matrix spin_axis_op(const SpinAxis& axis) {
  return axis.n.x() * sigma_x() + axis.n.y() * sigma_y() + axis.n.z() * sigma_z();
}

// ------------------------------ Matrix functions -----------------------------

// exp(−i H t) for Hermitian H, via eigendecomposition (exactly unitary up to
// the eigensolver's accuracy).
inline Matrix unitary_from_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("unitary_from_hermitian: eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (int k = 0; k < lam.size(); ++k) phases(k) = std::exp(-iu * lam(k) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// √M for Hermitian PSD M; eigenvalues in [−tol, 0) are clipped to 0.
inline Matrix sqrt_psd(const Matrix& m, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sqrt_psd: eigensolver failed");
  Eigen::VectorXd lam = es.eigenvalues();
  for (int k = 0; k < lam.size(); ++k) {
    if (lam(k) < -tol)
      throw std::invalid_argument("sqrt_psd: matrix is not PSD (eigenvalue " +
                                  std::to_string(lam(k)) + ")");
    lam(k) = lam(k) > 0.0 ? std::sqrt(lam(k)) : 0.0;
  }
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

// ------------------------------ Displacement ---------------------------------

// D(β) = exp(β a† − β* a), computed as the exponential of the truncated
// generator so the result is unitary on the truncated space.  The truncation
// guard keeps the displaced state's support away from the top of the space.
inline Matrix displacement_op(complexd beta, FockSpace space) {
  if (std::norm(beta) > space.dim / 4.0)
    throw std::invalid_argument("displacement_op: |beta|^2 exceeds dim/4");
  const Matrix a = annihilation(space);
  const Matrix h = iu * (beta * a.adjoint() - std::conj(beta) * a);  // Hermitian
  return unitary_from_hermitian(h, 1.0);
}

// Factors D(β) = R_φ exp(|β|(a†−a)) R_φ† with R_φ = exp(iφ n̂); one Hermitian
// eigendecomposition serves every β on a tomography grid.
class DisplacementFactory {
 public:
  explicit DisplacementFactory(FockSpace space) : space_(space) {
    const Matrix a = annihilation(space);
    Eigen::SelfAdjointEigenSolver<Matrix> es(iu * (a.adjoint() - a));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("DisplacementFactory: eigensolver failed");
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
  }

  Matrix operator()(complexd beta) const {
    if (std::norm(beta) > space_.dim / 4.0)
      throw std::invalid_argument("DisplacementFactory: |beta|^2 exceeds dim/4");
    const double r = std::abs(beta);
    const double phi = std::arg(beta);
    Vector phases(vals_.size());
    for (int k = 0; k < vals_.size(); ++k) phases(k) = std::exp(-iu * r * vals_(k));
    Matrix d = vecs_ * phases.asDiagonal() * vecs_.adjoint();
    // conjugate by the diagonal phase rotation R_φ
    for (int row = 0; row < space_.dim; ++row)
      for (int col = 0; col < space_.dim; ++col)
        d(row, col) *= std::exp(iu * phi * double(row - col));
    return d;
  }

 private:
  FockSpace space_;
  Matrix vecs_;
  Eigen::VectorXd vals_;
};

// --------------------------------- States ------------------------------------

inline Vector fock_ket(int n, FockSpace space) {
  if (n < 0 || n >= space.dim)
    throw std::invalid_argument("fock_ket: n outside truncated space");
  Vector v = Vector::Zero(space.dim);
  v(n) = 1.0;
  return v;
}

inline Vector spin_up_ket() {
  Vector v = Vector::Zero(2);
  v(0) = 1.0;
  return v;
}

inline Vector spin_down_ket() {
  Vector v = Vector::Zero(2);
  v(1) = 1.0;
  return v;
}

// ⟨n|α⟩ = e^{−|α|²/2} α^n/√n!.  Guarded like displacement_op.
inline Vector coherent_ket(complexd alpha, FockSpace space) {
  if (std::norm(alpha) > space.dim / 4.0)
    throw std::invalid_argument("coherent_ket: |alpha|^2 exceeds dim/4");
  Vector v(space.dim);
  complexd amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < space.dim; ++n) {
    v(n) = amp;
    amp *= alpha / std::sqrt(double(n + 1));
  }
  return v;
}

// Thermal state with p_n ∝ (n̄/(n̄+1))^n, renormalized on the truncated space.
inline Matrix thermal_state(double nbar, FockSpace space) {
  if (nbar < 0) throw std::invalid_argument("thermal_state: nbar must be >= 0");
  Eigen::VectorXd p(space.dim);
  const double q = nbar / (nbar + 1.0);
  double w = 1.0;
  for (int n = 0; n < space.dim; ++n) {
    p(n) = w;
    w *= q;
  }
  p /= p.sum();
  Matrix rho = Matrix::Zero(space.dim, space.dim);
  rho.diagonal() = p.cast<complexd>();
  return rho;
}

inline Matrix ket_to_density(const Vector& psi) { return psi * psi.adjoint(); }

// ------------------------------- Embeddings ----------------------------------

// spin_op ⊗ 1_osc
inline Matrix tensor_embed_spin(const Matrix& spin_op, FockSpace space) {
  if (spin_op.rows() != 2 || spin_op.cols() != 2)
    throw std::invalid_argument("tensor_embed_spin: operator must be 2x2");
  return Eigen::kroneckerProduct(spin_op, Matrix::Identity(space.dim, space.dim));
}

// 1_spin ⊗ osc_op
inline Matrix tensor_embed_osc(const Matrix& osc_op, FockSpace space) {
  if (osc_op.rows() != space.dim || osc_op.cols() != space.dim)
    throw std::invalid_argument("tensor_embed_osc: operator does not match dim");
  return Eigen::kroneckerProduct(identity2(), osc_op);
}

inline Matrix tensor_product(const Matrix& spin_op, const Matrix& osc_op) {
  return Eigen::kroneckerProduct(spin_op, osc_op);
}

inline Vector kron_ket(const Vector& spin, const Vector& osc) {
  Vector v(spin.size() * osc.size());
  for (int s = 0; s < spin.size(); ++s)
    v.segment(s * osc.size(), osc.size()) = spin(s) * osc;
  return v;
}

// Zero-pad an oscillator density matrix into a larger truncated space, e.g.
// when handing a state produced at a small dimension to a stage that needs
// more Fock headroom.
inline Matrix embed_oscillator_state(const Matrix& rho_osc, FockSpace from,
                                     FockSpace to) {
  if (rho_osc.rows() != from.dim || rho_osc.cols() != from.dim)
    throw std::invalid_argument("embed_oscillator_state: dimension mismatch");
  if (to.dim < from.dim)
    throw std::invalid_argument(
        "embed_oscillator_state: target space is smaller than the source");
  Matrix out = Matrix::Zero(to.dim, to.dim);
  out.topLeftCorner(from.dim, from.dim) = rho_osc;
  return out;
}

// ------------------------------ Partial traces -------------------------------

inline Matrix partial_trace_osc(const Matrix& rho, FockSpace space) {
  const int d = space.dim;
  if (rho.rows() != 2 * d || rho.cols() != 2 * d)
    throw std::invalid_argument("partial_trace_osc: dimension mismatch");
  Matrix out = Matrix::Zero(2, 2);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      out(s, t) = rho.block(s * d, t * d, d, d).trace();
  return out;
}

inline Matrix partial_trace_spin(const Matrix& rho, FockSpace space) {
  const int d = space.dim;
  if (rho.rows() != 2 * d || rho.cols() != 2 * d)
    throw std::invalid_argument("partial_trace_spin: dimension mismatch");
  return rho.block(0, 0, d, d) + rho.block(d, d, d, d);
}

// -------------------------------- Fidelity -----------------------------------

// Uhlmann fidelity F(ρ,σ) = (tr √(√ρ σ √ρ))²; eigenvalues within −tol are
// clipped, anything lower is an error.
inline double fidelity(const Matrix& rho, const Matrix& sigma, double tol = 1e-8) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const Matrix sr = sqrt_psd(rho, tol);
  const Matrix inner = sqrt_psd(sr * sigma * sr, tol);
  const double f = inner.real().trace();
  return f * f;
}

// --------------------------- Moments and diagnostics -------------------------

inline double expect_real(const Matrix& op, const Matrix& rho) {
  return (op * rho).trace().real();
}

inline complexd expect(const Matrix& op, const Matrix& rho) {
  return (op * rho).trace();
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

// Mean and covariance of (x̂, p̂) for an oscillator-only density matrix.
struct QuadratureStats {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;  // symmetrized second moments

  // Angle of the minor (least-variance) principal axis, in [0, π).
  double squeezed_axis_angle() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    Eigen::Vector2d v = es.eigenvectors().col(0);  // smallest eigenvalue first
    double ang = std::atan2(v.y(), v.x());
    if (ang < 0) ang += pi;
    if (ang >= pi) ang -= pi;
    return ang;
  }
};

inline QuadratureStats quadrature_stats(const Matrix& rho_osc, FockSpace space) {
  const Matrix a = annihilation(space);
  const Matrix x = (a + a.adjoint()) / std::sqrt(2.0);
  const Matrix p = iu * (a.adjoint() - a) / std::sqrt(2.0);
  QuadratureStats st;
  st.mean << expect_real(x, rho_osc), expect_real(p, rho_osc);
  const double xx = expect_real(x * x, rho_osc) - st.mean.x() * st.mean.x();
  const double pp = expect_real(p * p, rho_osc) - st.mean.y() * st.mean.y();
  const double xp = 0.5 * expect_real(x * p + p * x, rho_osc) -
                    st.mean.x() * st.mean.y();
  st.cov << xx, xp, xp, pp;
  return st;
}

// ---------------------------- Composite state type ---------------------------

struct StateTolerances {
  double hermiticity = 1e-8;
  double trace = 1e-10;
  double psd = 1e-8;
  double leakage = 1e-4;  // population allowed in the top 5% of Fock levels
};

// Density matrix on spin ⊗ oscillator with validity guards.  The leakage guard
// flags states whose support reaches the truncation edge.
struct SpinFockState {
  Matrix rho;
  FockSpace space;

  SpinFockState(Matrix density, FockSpace s, StateTolerances tol = {})
      : rho(std::move(density)), space(s) {
    validate(tol);
  }

  void validate(const StateTolerances& tol = {}) const {
    const int d = space.dim;
    if (rho.rows() != 2 * d || rho.cols() != 2 * d)
      throw std::invalid_argument("SpinFockState: dimension mismatch");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
      throw std::invalid_argument("SpinFockState: density matrix not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tol.trace ||
        std::abs(rho.trace().imag()) > tol.trace)
      throw std::invalid_argument("SpinFockState: trace differs from one");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.psd)
      throw std::invalid_argument("SpinFockState: density matrix not PSD");
    if (fock_leakage() > tol.leakage)
      throw std::invalid_argument(
          "SpinFockState: population too close to the truncation edge");
  }

  // Population in the top 5% of Fock levels (at least one level).
  double fock_leakage() const {
    const int d = space.dim;
    const int top = std::max(1, int(std::ceil(0.05 * d)));
    double leak = 0.0;
    for (int n = d - top; n < d; ++n)
      leak += rho(n, n).real() + rho(d + n, d + n).real();
    return leak;
  }

  Matrix oscillator_marginal() const { return partial_trace_spin(rho, space); }
  Matrix spin_marginal() const { return partial_trace_osc(rho, space); }
};

// Spin ket ⊗ thermal oscillator, the standard initial state of every scenario.
inline SpinFockState spin_thermal_state(const Vector& spin_ket, double nbar,
                                        FockSpace space) {
  if (spin_ket.size() != 2)
    throw std::invalid_argument("spin_thermal_state: spin ket must have size 2");
  const Matrix rho =
      tensor_product(spin_ket * spin_ket.adjoint(), thermal_state(nbar, space));
  return SpinFockState(rho, space);
}

// --------------------------- Oscillator parameters ---------------------------

// Mode frequency, initial occupation, and heating rate (quanta per second).
struct OscillatorParams {
  double freq = 2 * pi * 1.2e6;  // angular, rad/s
  double nbar = 0.0;
  double heating_rate = 0.0;

  void validate() const {
    if (freq <= 0) throw std::invalid_argument("OscillatorParams: freq must be > 0");
    if (nbar < 0) throw std::invalid_argument("OscillatorParams: nbar must be >= 0");
    if (heating_rate < 0)
      throw std::invalid_argument("OscillatorParams: heating_rate must be >= 0");
  }
};

}  // namespace sqz
