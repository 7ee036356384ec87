#pragma once

// Validated complex-matrix value types and small-unitary primitives.
// Inputs that fail a validity check are rejected with an exception,
// never silently repaired (no re-orthonormalization).

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace udesign {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using complexd = std::complex<double>;

inline constexpr double unitary_tol = 1e-12;
inline constexpr double det_tol = 1e-10;
inline constexpr double hermitian_tol = 1e-12;
inline constexpr double trace_tol = 1e-10;
inline constexpr double axis_tol = 1e-12;

namespace detail {

// Largest entrywise absolute value.
inline double max_abs(const cmat& m) {
  return m.cwiseAbs().maxCoeff();
}

inline const cmat& require_square(const cmat& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": square matrix required");
  return m;
}

}  // namespace detail

// Unitary matrix, optionally certified to have unit determinant.
class unitary_op {
 public:
  explicit unitary_op(cmat m, bool special = false)
      : mat_(std::move(m)), special_(special) {
    detail::require_square(mat_, "unitary_op");
    const cmat gram = mat_.adjoint() * mat_;
    cmat eye = cmat::Identity(mat_.rows(), mat_.cols());
    if (detail::max_abs(gram - eye) > unitary_tol)
      throw std::invalid_argument("unitary_op: matrix is not unitary");
    if (special_ && std::abs(mat_.determinant() - complexd(1.0, 0.0)) > det_tol)
      throw std::invalid_argument("unitary_op: determinant is not 1");
  }

  const cmat& mat() const { return mat_; }
  bool special() const { return special_; }
  Eigen::Index dim() const { return mat_.rows(); }

  unitary_op inverse() const { return unitary_op(mat_.adjoint(), special_); }

 private:
  cmat mat_;
  bool special_;
};

// Hermitian matrix, optionally certified traceless.
class hermitian_op {
 public:
  explicit hermitian_op(cmat m, bool traceless = false)
      : mat_(std::move(m)), traceless_(traceless) {
    detail::require_square(mat_, "hermitian_op");
    if (detail::max_abs(mat_ - cmat(mat_.adjoint())) > hermitian_tol)
      throw std::invalid_argument("hermitian_op: matrix is not Hermitian");
    if (traceless_ && std::abs(mat_.trace()) > trace_tol)
      throw std::invalid_argument("hermitian_op: trace is not 0");
  }

  const cmat& mat() const { return mat_; }
  bool traceless() const { return traceless_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  cmat mat_;
  bool traceless_;
};

// Unit vector in R^3, used as a rotation axis or noise direction.
class axis3 {
 public:
  explicit axis3(const Eigen::Vector3d& v) : v_(v) {
    if (std::abs(v_.norm() - 1.0) > axis_tol)
      throw std::invalid_argument("axis3: vector is not unit length");
  }
  axis3(double x, double y, double z) : axis3(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  Eigen::Vector3d v_;
};

inline cmat pauli_x() {
  cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline cmat pauli_y() {
  cmat m(2, 2);
  m << 0, complexd(0, -1), complexd(0, 1), 0;
  return m;
}

inline cmat pauli_z() {
  cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// n . sigma for a unit axis n.
inline cmat axis_dot_sigma(const axis3& n) {
  return n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
}

// exp(-i angle (n.sigma)/2) = cos(angle/2) I - i sin(angle/2) n.sigma.
inline unitary_op su2_rotation(const axis3& n, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  cmat m = c * cmat::Identity(2, 2) - complexd(0, 1) * s * axis_dot_sigma(n);
  return unitary_op(std::move(m), true);
}

// exp(-i H t) through the self-adjoint eigendecomposition of H.
inline unitary_op expm_hermitian(const hermitian_op& h, double t) {
  Eigen::SelfAdjointEigenSolver<cmat> es(h.mat());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  cvec phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases(k) = std::exp(complexd(0, -lam(k) * t));
  cmat u = es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
  // Unit determinant holds exactly when H is traceless.
  return unitary_op(std::move(u), h.traceless());
}

inline cmat tensor(const cmat& a, const cmat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline unitary_op tensor(const unitary_op& a, const unitary_op& b) {
  return unitary_op(tensor(a.mat(), b.mat()), a.special() && b.special());
}

// |Tr(U^dag V)|; invariant under swapping arguments and global phases.
inline double overlap(const unitary_op& u, const unitary_op& v) {
  if (u.dim() != v.dim())
    throw std::invalid_argument("overlap: dimension mismatch");
  return std::abs((u.mat().adjoint() * v.mat()).trace());
}

struct labeled_mat {
  std::string label;
  cmat mat;
};

// All 4^n tensor products of {I, X, Y, Z}, in lexicographic label order
// with the leftmost letter acting on the first tensor factor.
inline std::vector<labeled_mat> pauli_basis(int num_qubits) {
  if (num_qubits < 1)
    throw std::invalid_argument("pauli_basis: need at least one qubit");
  const std::array<std::pair<char, cmat>, 4> single = {
      std::pair<char, cmat>{'I', cmat::Identity(2, 2)},
      {'X', pauli_x()},
      {'Y', pauli_y()},
      {'Z', pauli_z()}};
  std::vector<labeled_mat> basis = {{"", cmat::Identity(1, 1)}};
  for (int q = 0; q < num_qubits; ++q) {
    std::vector<labeled_mat> next;
    next.reserve(basis.size() * 4);
    for (const auto& head : basis)
      for (const auto& [letter, sigma] : single)
        next.push_back({head.label + letter, tensor(head.mat, sigma)});
    basis = std::move(next);
  }
  return basis;
}

// Split a 2x2 Hermitian H as (tr/2) I + v.sigma; returns (tr, v).
inline std::pair<double, Eigen::Vector3d> bloch_decompose(
    const hermitian_op& h) {
  if (h.dim() != 2)
    throw std::invalid_argument("bloch_decompose: 2x2 matrix required");
  const cmat& m = h.mat();
  double tr = m.trace().real();
  Eigen::Vector3d v((m * pauli_x()).trace().real() / 2.0,
                    (m * pauli_y()).trace().real() / 2.0,
                    (m * pauli_z()).trace().real() / 2.0);
  return {tr, v};
}

// Inverse of bloch_decompose.
inline hermitian_op bloch_compose(double tr, const Eigen::Vector3d& v) {
  cmat m = (tr / 2.0) * cmat::Identity(2, 2) + v.x() * pauli_x() +
           v.y() * pauli_y() + v.z() * pauli_z();
  return hermitian_op(std::move(m), std::abs(tr) <= trace_tol);
}

}  // namespace udesign
