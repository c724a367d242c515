#pragma once

#include "oee/config.hpp"
#include "oee/pauli.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace oee::test {

inline ModelSpec preset_model(const std::string& preset, std::size_t index = 0) {
  return parse_config(preset_document(preset)).models.at(index).spec;
}

inline Mat4c random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat4c a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

inline Momentum random_momentum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-pi, pi);
  return {u(rng), u(rng)};
}

inline VecXd eigenvalues(const MatXc& h) {
  return Eigen::SelfAdjointEigenSolver<MatXc>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

// Total Berry curvature of the `filling` lowest bands from the Kubo formula
// with finite-difference velocities, integrated with the midpoint rule.
inline double kubo_chern(const ModelSpec& spec, int n, int filling = 2) {
  const double h = 1e-5;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Momentum k{-pi + 2.0 * pi * (i + 0.5) / n, -pi + 2.0 * pi * (j + 0.5) / n};
      const Mat4c vx = (assemble_bdg(spec, {k.kx + h, k.ky}) - assemble_bdg(spec, {k.kx - h, k.ky})) / (2 * h);
      const Mat4c vy = (assemble_bdg(spec, {k.kx, k.ky + h}) - assemble_bdg(spec, {k.kx, k.ky - h})) / (2 * h);
      Eigen::SelfAdjointEigenSolver<Mat4c> es(assemble_bdg(spec, k));
      const Mat4c u = es.eigenvectors();
      const Mat4c ax = u.adjoint() * vx * u;
      const Mat4c ay = u.adjoint() * vy * u;
      double omega = 0.0;
      for (int a = 0; a < filling; ++a)
        for (int b = filling; b < 4; ++b) {
          const double de = es.eigenvalues()(a) - es.eigenvalues()(b);
          omega += -2.0 * (ax(a, b) * ay(b, a)).imag() / (de * de);
        }
      total += omega;
    }
  // Curvature of A = i<u|grad u>; C = (1/2pi) * its integral.
  return total * (2.0 * pi / n) * (2.0 * pi / n) / (2.0 * pi);
}

// (1/4pi) * integral of n . (d_x n x d_y n) for the unit ground-state spin,
// central differences on an n x n grid.
inline double continuum_skyrmion(const ModelSpec& spec, int n) {
  const auto rep = SpinRepresentation::standard();
  const auto spin = [&](double kx, double ky) {
    Eigen::SelfAdjointEigenSolver<Mat4c> es(assemble_bdg(spec, {kx, ky}));
    const Mat4c p = es.eigenvectors().leftCols<2>() * es.eigenvectors().leftCols<2>().adjoint();
    Vec3d s;
    for (int mu = 0; mu < 3; ++mu) s(mu) = (p * rep.S[mu]).trace().real();
    return Vec3d(s.normalized());
  };
  const double dk = 2.0 * pi / n;
  const double h = 1e-5;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double kx = -pi + dk * (i + 0.5);
      const double ky = -pi + dk * (j + 0.5);
      const Vec3d dx = (spin(kx + h, ky) - spin(kx - h, ky)) / (2 * h);
      const Vec3d dy = (spin(kx, ky + h) - spin(kx, ky - h)) / (2 * h);
      total += spin(kx, ky).dot(dx.cross(dy));
    }
  return total * dk * dk / (4.0 * pi);
}

}  // namespace oee::test
