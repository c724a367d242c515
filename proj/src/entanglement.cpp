#include "oee/entanglement.hpp"

#include "oee/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>

namespace oee {

CutSpec CutSpec::standard(CutGeometry geometry, int nx) {
  CutSpec cut;
  cut.geometry = geometry;
  if (geometry == CutGeometry::Torus) {
    cut.begin = nx / 2;
    cut.end = nx;
  } else {
    cut.begin = 0;
    cut.end = nx / 2;
  }
  return cut;
}

std::vector<int> CutSpec::layers(int nx) const {
  std::vector<int> out(static_cast<std::size_t>(size(nx)));
  std::iota(out.begin(), out.end(), begin);
  return out;
}

void CutSpec::validate(int nx) const {
  const int e = resolved_end(nx);
  if (begin < 0 || e > nx || begin >= e) throw ConfigError("cut must select a nonempty layer range inside the slab");
  if (e - begin >= nx) throw ConfigError("cut must be strictly smaller than the system");
}

EdgeTag CutSpec::begin_edge(int nx) const {
  (void)nx;
  return geometry == CutGeometry::Cylinder && begin == 0 ? EdgeTag::Real : EdgeTag::Virtual;
}

EdgeTag CutSpec::end_edge(int nx) const {
  return geometry == CutGeometry::Cylinder && resolved_end(nx) == nx ? EdgeTag::Real : EdgeTag::Virtual;
}

MatXc restricted_correlation(const MatXc& projector, const std::vector<int>& layers) {
  const int n = static_cast<int>(layers.size());
  MatXc out(4 * n, 4 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.block<4, 4>(4 * i, 4 * j) = projector.block<4, 4>(4 * layers[i], 4 * layers[j]);
  return out;
}

MatXc oept_blocks(const MatXc& correlation, const Mat4c& U, OeesDiagonal diagonal) {
  if (correlation.rows() != correlation.cols() || correlation.rows() % 4 != 0)
    throw std::invalid_argument("correlation matrix must consist of 4x4 layer blocks");
  const int n = static_cast<int>(correlation.rows() / 4);
  const Mat2c id = pauli(0);
  MatXc out(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat2c m = trace_out_outer(U.adjoint() * correlation.block<4, 4>(4 * i, 4 * j) * U);
      if (diagonal == OeesDiagonal::UnitSite) {
        // Keep only the spin part, then put a unit weight on each site.
        m -= 0.5 * m.trace() * id;
        if (i == j) m += 0.5 * id;
      }
      out.block<2, 2>(2 * i, 2 * j) = m;
    }
  return out;
}

double oees_midpoint(OeesDiagonal diagonal) { return diagonal == OeesDiagonal::Projector ? 1.0 : 0.5; }

ChiralCountOptions ChiralCountOptions::enriched(OeesDiagonal d) {
  ChiralCountOptions o;
  o.level = oees_midpoint(d);
  o.window = 0.9 * o.level;
  return o;
}

namespace {

// Eigenpairs of one Hermitian block whose rows are grouped into layers of
// `orbitals` entries.
struct Piece {
  VecXd values;
  MatXc vectors;
  int orbitals = 4;
};

Piece solve(const MatXc& m, int orbitals) {
  Eigen::SelfAdjointEigenSolver<MatXc> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors(), orbitals};
}

Piece solve_values(const MatXc& m) {
  Eigen::SelfAdjointEigenSolver<MatXc> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return {es.eigenvalues(), MatXc(), 0};
}

std::vector<int> degeneracies(const VecXd& sorted, double tol) {
  const int n = static_cast<int>(sorted.size());
  std::vector<int> out(static_cast<std::size_t>(n), 1);
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && sorted(j) - sorted(j - 1) < tol) ++j;
    for (int k = i; k < j; ++k) out[k] = j - i;
    i = j;
  }
  return out;
}

// Merges the pieces into one ascending point; ties keep piece order.
SpectrumPoint assemble_point(double ky, const std::vector<Piece>& pieces, const CutSpec& cut, int nx,
                             const EntanglementOptions& opts) {
  struct Entry {
    double value;
    int piece;
    int col;
  };
  std::vector<Entry> entries;
  for (int p = 0; p < static_cast<int>(pieces.size()); ++p)
    for (int c = 0; c < pieces[p].values.size(); ++c) entries.push_back({pieces[p].values(c), p, c});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  SpectrumPoint pt;
  pt.k = ky;
  pt.values.resize(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) pt.values(static_cast<Eigen::Index>(i)) = entries[i].value;
  pt.degeneracy = degeneracies(pt.values, opts.degeneracy_tolerance);

  const bool with_vectors = std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) { return p.vectors.size() > 0; });
  if (!with_vectors) return pt;
  const EdgeTag lo = cut.begin_edge(nx);
  const EdgeTag hi = cut.end_edge(nx);
  for (const auto& e : entries) {
    const auto& piece = pieces[e.piece];
    const EdgeWeights w = layer_edge_weights(piece.vectors.col(e.col), piece.orbitals, opts.edge_depth);
    pt.weights.push_back(w);
    pt.edge_tag.push_back(w.begin_quarter > 0.5 ? lo : w.end_quarter > 0.5 ? hi : EdgeTag::Bulk);
  }
  return pt;
}

struct SlabContext {
  HoppingSet hoppings;
  std::optional<OnsiteSymmetry> symmetry;
  Boundary boundary;
};

SlabContext prepare(const ModelSpec& spec, int nx, const CutSpec& cut) {
  cut.validate(nx);
  SlabContext ctx;
  ctx.hoppings = extract_hoppings(spec, model_range(spec));
  ctx.symmetry = find_onsite_symmetry(ctx.hoppings);
  ctx.boundary = cut.geometry == CutGeometry::Cylinder ? Boundary::Open : Boundary::Periodic;
  return ctx;
}

double ky_sample(int i, int n) { return -pi + 2.0 * pi * i / n; }

std::vector<Piece> plain_pieces(const SiteEigenSystem& es, int n_occ, const std::vector<int>& layers) {
  std::vector<Piece> pieces;
  const auto parts = es.projector_sectors(n_occ, layers);
  for (int s = 0; s < static_cast<int>(parts.size()); ++s)
    pieces.push_back(solve(parts[s], static_cast<int>(es.sector_orbitals(s).size())));
  return pieces;
}

}  // namespace

EntanglementResult entanglement_spectra(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut,
                                        const EntanglementOptions& opts) {
  if (ky_samples < 1) throw ConfigError("need at least one ky sample");
  const auto ctx = prepare(spec, nx, cut);
  const auto rep = SpinRepresentation::standard();
  const auto layers = cut.layers(nx);

  EntanglementResult out;
  out.nx = nx;
  out.cut = cut;
  out.plain.points.resize(static_cast<std::size_t>(ky_samples));
  out.enriched.points.resize(static_cast<std::size_t>(ky_samples));
  parallel_for(static_cast<std::size_t>(ky_samples), opts.threads, [&](std::size_t i) {
    const double ky = ky_sample(static_cast<int>(i), ky_samples);
    const SiteEigenSystem es(slab_couplings(ctx.hoppings, ky, nx, ctx.boundary), ctx.symmetry);
    const int n_occ = 2 * nx;
    out.plain.points[i] = assemble_point(ky, plain_pieces(es, n_occ, layers), cut, nx, opts);
    const MatXc reduced = oept_blocks(es.projector_block(n_occ, layers), rep.U, opts.diagonal);
    out.enriched.points[i] = assemble_point(ky, {solve(reduced, 2)}, cut, nx, opts);
  });
  return out;
}

SpectrumSeries entanglement_spectrum(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut,
                                     bool enriched, const EntanglementOptions& opts) {
  auto result = entanglement_spectra(spec, nx, ky_samples, cut, opts);
  return enriched ? std::move(result.enriched) : std::move(result.plain);
}

TorusSuite torus_suite(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut_in,
                       const EntanglementOptions& opts) {
  if (ky_samples < 1) throw ConfigError("need at least one ky sample");
  CutSpec cut = cut_in;
  cut.geometry = CutGeometry::Torus;
  const auto ctx = prepare(spec, nx, cut);
  const auto rep = SpinRepresentation::standard();
  const auto layers = cut.layers(nx);
  std::vector<int> all(static_cast<std::size_t>(nx));
  std::iota(all.begin(), all.end(), 0);
  CutSpec whole;
  whole.geometry = CutGeometry::Torus;
  whole.begin = 0;
  whole.end = nx;

  TorusSuite out;
  for (auto* s : {&out.full, &out.cut, &out.enriched_full, &out.enriched_cut})
    s->points.resize(static_cast<std::size_t>(ky_samples));
  parallel_for(static_cast<std::size_t>(ky_samples), opts.threads, [&](std::size_t i) {
    const double ky = ky_sample(static_cast<int>(i), ky_samples);
    const SiteEigenSystem es(slab_couplings(ctx.hoppings, ky, nx, ctx.boundary), ctx.symmetry);
    const int n_occ = 2 * nx;

    std::vector<Piece> full;
    for (const auto& part : es.projector_sectors(n_occ, all)) full.push_back(solve_values(part));
    out.full.points[i] = assemble_point(ky, full, whole, nx, opts);
    out.cut.points[i] = assemble_point(ky, plain_pieces(es, n_occ, layers), cut, nx, opts);
    const MatXc reduced_full = oept_blocks(es.projector_block(n_occ, all), rep.U, opts.diagonal);
    out.enriched_full.points[i] = assemble_point(ky, {solve_values(reduced_full)}, whole, nx, opts);
    const MatXc reduced_cut = oept_blocks(es.projector_block(n_occ, layers), rep.U, opts.diagonal);
    out.enriched_cut.points[i] = assemble_point(ky, {solve(reduced_cut, 2)}, cut, nx, opts);
  });
  return out;
}

}  // namespace oee
