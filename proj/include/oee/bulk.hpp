#pragma once

#include "oee/models.hpp"
#include "oee/pauli.hpp"

namespace oee {

/// Uniform Nx x Ny momentum grid over [-pi, pi)^2.
struct BZGrid {
  int nx = 101;
  int ny = 101;

  BZGrid() = default;
  BZGrid(int nx_, int ny_);
  explicit BZGrid(int n) : BZGrid(n, n) {}

  double kx(int i) const { return -pi + 2.0 * pi * i / nx; }
  double ky(int j) const { return -pi + 2.0 * pi * j / ny; }
  Momentum at(int i, int j) const { return {kx(i), ky(j)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
};

struct GroundStateProjector {
  Momentum k;
  Mat4c P = Mat4c::Zero();
  int n_occ = 0;
};

struct ReducedSpinState {
  Momentum k;
  Mat2c rho = Mat2c::Zero();
  Vec3d s_expect = Vec3d::Zero();
};

/// Spin vectors on a momentum grid (or, with an empty grid, on real-space sites).
struct SpinTexture {
  BZGrid grid;
  std::vector<Vec3d> vectors;  // normalized when `normalized` is set
  std::vector<double> norms;   // |<S>| before normalization
  bool normalized = false;

  const Vec3d& at(int i, int j) const { return vectors[grid.index(i, j)]; }
  double min_norm() const;
};

struct ProjectorOptions {
  double gap_tolerance = 1e-10;
};

/// Projector onto the `filling` lowest eigenvectors of a 4x4 Hermitian matrix.
GroundStateProjector ground_state_projector(const Mat4c& h, int filling,
                                            const Momentum& k = {},
                                            const ProjectorOptions& opts = {});

/// (Tr[P S_1], Tr[P S_2], Tr[P S_3]).
Vec3d spin_expectation(const GroundStateProjector& gs, const SpinRepresentation& rep);

/// rho_s = (I + <S>.sigma)/2 with <S> = Tr[rho_GS S] for the unit-trace
/// ground-state density matrix rho_GS = P / n_occ.
ReducedSpinState oept_bulk(const GroundStateProjector& gs, const SpinRepresentation& rep);

/// Tr_{non-spin}[U^dag P U].
Mat2c oept_rotated(const Mat4c& P, const Mat4c& U);
inline Mat2c oept_rotated(const GroundStateProjector& gs, const Mat4c& U) {
  return oept_rotated(gs.P, U);
}

enum class TexturePath {
  FullGroundState,  // Tr[P S_mu]
  RotatedTrace,     // Tr[rho_s sigma_mu] with rho_s = Tr_{non-spin}[U^dag P U]
};

struct TextureOptions {
  int filling = 2;
  bool normalize = true;
  double singular_tolerance = 1e-8;
  TexturePath path = TexturePath::FullGroundState;
  int threads = 1;
  ProjectorOptions projector;
};

/// Ground-state spin texture over the grid. Throws GapClosure or, when
/// normalizing, SingularSpin at the first offending momentum.
SpinTexture bulk_texture(const ModelSpec& spec, const BZGrid& grid, const TextureOptions& opts = {});

}  // namespace oee
