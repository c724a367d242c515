#include "oee/pauli.hpp"

namespace oee {

Mat4c kron(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Mat4c block_diag(const Mat2c& a, const Mat2c& b) {
  Mat4c out = Mat4c::Zero();
  out.topLeftCorner<2, 2>() = a;
  out.bottomRightCorner<2, 2>() = b;
  return out;
}

Mat2c trace_out_outer(const Mat4c& m) {
  return m.topLeftCorner<2, 2>() + m.bottomRightCorner<2, 2>();
}

SpinRepresentation SpinRepresentation::standard() {
  SpinRepresentation rep;
  for (int mu = 1; mu <= 3; ++mu) {
    const Mat2c s = pauli(mu);
    rep.S[mu - 1] = block_diag(s, -s.conjugate());
  }
  rep.U = block_diag(pauli(0), pauli(2));
  return rep;
}

Mat2c spin_density(const Vec3d& s) { return 0.5 * (pauli(0) + pauli_dot(s)); }

Vec3d pauli_components(const Mat2c& m) {
  Vec3d out;
  for (int mu = 1; mu <= 3; ++mu) out(mu - 1) = (m * pauli(mu)).trace().real();
  return out;
}

}  // namespace oee
