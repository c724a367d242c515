#include "doctest.h"
#include "support.hpp"

#include "oee/bulk.hpp"

using namespace oee;

TEST_CASE("spin density of fixed spin vectors") {
  CHECK((spin_density(Vec3d::Zero()) - 0.5 * pauli(0)).norm() < 1e-15);
  Mat2c up = Mat2c::Zero();
  up(0, 0) = 1.0;
  CHECK((spin_density(Vec3d(0, 0, 1)) - up).norm() < 1e-15);
  CHECK((pauli_components(spin_density(Vec3d(0.1, -0.2, 0.3))) - Vec3d(0.1, -0.2, 0.3)).norm() < 1e-15);
}

TEST_CASE("OEPT preserves spin expectations of random ground states") {
  std::mt19937_64 rng(2024);
  const auto rep = SpinRepresentation::standard();
  double worst = 0.0;
  double rotated = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto gs = ground_state_projector(test::random_hermitian(rng), 2);
    const auto red = oept_bulk(gs, rep);
    const Mat4c rho_gs = gs.P / 2.0;
    const Mat2c rho_t = oept_rotated(gs, rep.U);
    for (int mu = 0; mu < 3; ++mu) {
      worst = std::max(worst, std::abs((rho_gs * rep.S[mu]).trace() - (red.rho * pauli(mu + 1)).trace()));
      rotated = std::max(rotated, std::abs((gs.P * rep.S[mu]).trace() - (rho_t * pauli(mu + 1)).trace()));
    }
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Mat2c>(red.rho).eigenvalues();
    CHECK(ev.minCoeff() > -1e-12);
    CHECK(ev.maxCoeff() < 1.0 + 1e-12);
    CHECK(std::abs(red.rho.trace() - 1.0) < 1e-12);
    CHECK(hermiticity_error(red.rho) < 1e-14);
  }
  CHECK(worst < 1e-12);
  CHECK(rotated < 1e-12);
}

TEST_CASE("projector is invariant under eigenvector re-phasing") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  for (int n = 0; n < 50; ++n) {
    const Mat4c h = test::random_hermitian(rng);
    Eigen::SelfAdjointEigenSolver<Mat4c> es(h);
    Eigen::Matrix<cplx, 4, 2> v = es.eigenvectors().leftCols<2>();
    for (int c = 0; c < 2; ++c) v.col(c) *= std::polar(1.0, phase(rng));
    CHECK((ground_state_projector(h, 2).P - v * v.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("ground-state projector rejects degenerate filling") {
  Mat4c h = Mat4c::Zero();
  CHECK_THROWS_AS(ground_state_projector(h, 2), GapClosure);
  CHECK_THROWS_AS(ground_state_projector(Mat4c::Identity(), 0), std::invalid_argument);
}

TEST_CASE("full-ground-state and OEPT textures coincide") {
  for (const char* name : {"fig1_qwz", "fig1_sticlet", "fig3"}) {
    CAPTURE(name);
    const auto spec = test::preset_model(name);
    const BZGrid grid(41);
    TextureOptions opts;
    opts.normalize = false;
    const auto full = bulk_texture(spec, grid, opts);
    opts.path = TexturePath::RotatedTrace;
    const auto reduced = bulk_texture(spec, grid, opts);
    double diff = 0.0;
    for (std::size_t i = 0; i < full.vectors.size(); ++i)
      diff = std::max(diff, (full.vectors[i] - reduced.vectors[i]).cwiseAbs().maxCoeff());
    CHECK(diff < 1e-12);
  }
}

TEST_CASE("normalized texture has unit vectors and keeps the raw norms") {
  const auto spec = test::preset_model("fig2_qwz");
  const BZGrid grid(21);
  const auto tex = bulk_texture(spec, grid);
  REQUIRE(tex.normalized);
  for (std::size_t i = 0; i < tex.vectors.size(); ++i) {
    CHECK(std::abs(tex.vectors[i].norm() - 1.0) < 1e-12);
    CHECK(tex.norms[i] > 0.0);
  }
  CHECK(tex.min_norm() > 1e-3);
}
