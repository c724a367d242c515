#include "oee/bulk.hpp"

#include "oee/parallel.hpp"

#include <Eigen/Eigenvalues>

namespace oee {

BZGrid::BZGrid(int nx_, int ny_) : nx(nx_), ny(ny_) {
  if (nx < 4 || ny < 4) throw ConfigError("BZ grid needs at least 4 points per direction");
}

double SpinTexture::min_norm() const {
  return norms.empty() ? 0.0 : *std::min_element(norms.begin(), norms.end());
}

GroundStateProjector ground_state_projector(const Mat4c& h, int filling, const Momentum& k,
                                            const ProjectorOptions& opts) {
  if (filling < 1 || filling > 3) throw std::invalid_argument("filling must be in 1..3");
  Eigen::SelfAdjointEigenSolver<Mat4c> es(h);
  const auto& e = es.eigenvalues();
  const double bandwidth = std::max(1.0, e(3) - e(0));
  const double gap = e(filling) - e(filling - 1);
  if (gap < opts.gap_tolerance * bandwidth) throw GapClosure(k, gap);

  GroundStateProjector gs;
  gs.k = k;
  gs.n_occ = filling;
  const auto occ = es.eigenvectors().leftCols(filling);
  gs.P = occ * occ.adjoint();
  return gs;
}

Vec3d spin_expectation(const GroundStateProjector& gs, const SpinRepresentation& rep) {
  Vec3d s;
  for (int mu = 0; mu < 3; ++mu) s(mu) = (gs.P * rep.S[mu]).trace().real();
  return s;
}

ReducedSpinState oept_bulk(const GroundStateProjector& gs, const SpinRepresentation& rep) {
  ReducedSpinState out;
  out.k = gs.k;
  if (gs.n_occ < 1) throw std::invalid_argument("ground state has no occupied bands");
  out.s_expect = spin_expectation(gs, rep) / gs.n_occ;
  out.rho = spin_density(out.s_expect);
  return out;
}

Mat2c oept_rotated(const Mat4c& P, const Mat4c& U) {
  return trace_out_outer(U.adjoint() * P * U);
}

SpinTexture bulk_texture(const ModelSpec& spec, const BZGrid& grid, const TextureOptions& opts) {
  spec.validate();
  const auto rep = SpinRepresentation::standard();
  SpinTexture tex;
  tex.grid = grid;
  tex.vectors.assign(grid.size(), Vec3d::Zero());
  tex.norms.assign(grid.size(), 0.0);
  tex.normalized = opts.normalize;

  // Rows are independent; each writes its own slots.
  parallel_for(static_cast<std::size_t>(grid.nx), opts.threads, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < grid.ny; ++j) {
      const Momentum k = grid.at(i, j);
      const auto gs = ground_state_projector(assemble_bdg(spec, k), opts.filling, k, opts.projector);
      const Vec3d s = opts.path == TexturePath::FullGroundState
                          ? spin_expectation(gs, rep)
                          : pauli_components(oept_rotated(gs, rep.U));
      tex.vectors[grid.index(i, j)] = s;
      tex.norms[grid.index(i, j)] = s.norm();
    }
  });

  if (opts.normalize) {
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j) {
        const auto idx = grid.index(i, j);
        if (tex.norms[idx] < opts.singular_tolerance) throw SingularSpin(grid.at(i, j), tex.norms[idx]);
        tex.vectors[idx] /= tex.norms[idx];
      }
  }
  return tex;
}

}  // namespace oee
