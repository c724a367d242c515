#pragma once

#include "oee/types.hpp"

#include <array>

namespace oee {

/// Pauli matrix sigma_mu, mu in {0,1,2,3} with sigma_0 = identity.
template <typename Scalar = cplx>
Mat2<Scalar> pauli(int mu) {
  using C = Scalar;
  Mat2<Scalar> m;
  switch (mu) {
    case 0: m << C(1), C(0), C(0), C(1); break;
    case 1: m << C(0), C(1), C(1), C(0); break;
    case 2: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case 3: m << C(1), C(0), C(0), C(-1); break;
    default: throw std::out_of_range("pauli index must be 0..3");
  }
  return m;
}

/// v . sigma for a 3-vector (real or complex components).
template <typename Derived>
Mat2c pauli_dot(const Eigen::MatrixBase<Derived>& v) {
  return cplx(v(0)) * pauli(1) + cplx(v(1)) * pauli(2) + cplx(v(2)) * pauli(3);
}

/// Kronecker product of two 2x2 blocks: (a ⊗ b)_{(i,k),(j,l)} = a_ij b_kl.
Mat4c kron(const Mat2c& a, const Mat2c& b);

/// tau_a ⊗ sigma_b with tau acting on the particle-hole (outer block) index.
inline Mat4c tau_sigma(int a, int b) { return kron(pauli(a), pauli(b)); }

/// 4x4 block-diagonal matrix diag(a, b).
Mat4c block_diag(const Mat2c& a, const Mat2c& b);

/// Partial trace over the outer (non-spin) factor: sum of the two diagonal 2x2 blocks.
Mat2c trace_out_outer(const Mat4c& m);

/// Spin representation S_mu = diag(sigma_mu, -sigma_mu^*) and the rotation
/// U = I ⊕ sigma_y that maps it onto I ⊗ sigma_mu.
struct SpinRepresentation {
  std::array<Mat4c, 3> S;
  Mat4c U;

  static SpinRepresentation standard();
};

/// Hermitian matrix (I + s.sigma)/2 built from a spin expectation vector.
Mat2c spin_density(const Vec3d& s);

/// (Tr[m sigma_1], Tr[m sigma_2], Tr[m sigma_3]) real parts.
Vec3d pauli_components(const Mat2c& m);

}  // namespace oee
