// Fixed-size matrix types and elementary two-qubit operator algebra.
//
// Basis conventions used throughout the library:
//   * single-qubit basis ordered {|1>, |0>} (excited first), so
//     sigma_z = diag(+1, -1) and sigma_- = |0><1| lowers;
//   * two-qubit canonical basis ordered {|11>, |10>, |01>, |00>}, i.e. the
//     Kronecker product (qubit 1) x (qubit 2) of the single-qubit ordering;
//   * density matrices are vectorised by column stacking, vec(A rho B) =
//     (B^T (x) A) vec(rho), matching Eigen's column-major storage.
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qme {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

inline constexpr cplx I_UNIT{0.0, 1.0};

// --- single-qubit operators in the {|1>, |0>} ordering ---------------------

inline Mat2 sigma_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
inline Mat2 sigma_y() { return (Mat2() << 0, -I_UNIT, I_UNIT, 0).finished(); }
inline Mat2 sigma_z() { return (Mat2() << 1, 0, 0, -1).finished(); }
inline Mat2 sigma_minus() { return (Mat2() << 0, 0, 1, 0).finished(); }
inline Mat2 sigma_plus() { return (Mat2() << 0, 1, 0, 0).finished(); }
inline Mat2 id2() { return Mat2::Identity(); }

// --- Kronecker products -----------------------------------------------------

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Mat16 kron(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

// Embed a single-qubit operator on qubit 1 or 2 (1-based index).
inline Mat4 on_qubit(const Mat2& op, int qubit) {
  return qubit == 1 ? kron(op, id2()) : kron(id2(), op);
}

// --- column-stacking vectorisation ------------------------------------------

inline Vec16 vec(const Mat4& m) {
  return Eigen::Map<const Vec16>(m.data());
}

inline Mat4 unvec(const Vec16& v) {
  return Eigen::Map<const Mat4>(v.data());
}

// Superoperator for rho -> A rho B under column stacking: (B^T (x) A).
inline Mat16 sandwich(const Mat4& a, const Mat4& b) {
  return kron(Mat4(b.transpose()), a);
}

// Superoperator for rho -> A rho.
inline Mat16 left_mult(const Mat4& a) {
  return kron(Mat4(Mat4::Identity()), a);
}

// Superoperator for rho -> rho B.
inline Mat16 right_mult(const Mat4& b) {
  return kron(Mat4(b.transpose()), Mat4(Mat4::Identity()));
}

// Superoperator for rho -> -i [H, rho].
inline Mat16 commutator_superop(const Mat4& h) {
  return -I_UNIT * (left_mult(h) - right_mult(h));
}

// Force exact Hermiticity (round-off cleanup after linear-algebra kernels).
inline Mat4 hermitize(const Mat4& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace qme
