#pragma once

#include "oee/realspace.hpp"

#include <functional>

namespace oee {

enum class CutGeometry { Cylinder, Torus };

/// Subsystem A = layers [begin, end) of a slab of nx layers (0-based).
struct CutSpec {
  CutGeometry geometry = CutGeometry::Cylinder;
  int begin = 0;
  int end = -1;  // -1: nx / 2

  /// Layers 0 .. nx/2 - 1 (cylinder) or nx/2 .. nx - 1 (torus).
  static CutSpec standard(CutGeometry geometry, int nx);

  int resolved_end(int nx) const { return end < 0 ? nx / 2 : end; }
  int size(int nx) const { return resolved_end(nx) - begin; }
  std::vector<int> layers(int nx) const;
  /// Throws ConfigError unless A is nonempty and strictly smaller than the system.
  void validate(int nx) const;
  /// Tag of each end of A: Real when it coincides with an open boundary.
  EdgeTag begin_edge(int nx) const;
  EdgeTag end_edge(int nx) const;
};

/// How the diagonal 2x2 blocks of the reduced correlation matrix are normalized.
enum class OeesDiagonal {
  Projector,  // Tr_{non-spin}[U^dag rho_{r,r'} U] on every block; spectrum centred on 1
  UnitSite,   // (delta_{rr'} I + Tr[rho_{r,r'} S].sigma) / 2; spectrum centred on 1/2
};

/// Sub-block of a projector on the rows and columns of A (four orbitals per layer).
MatXc restricted_correlation(const MatXc& projector, const std::vector<int>& layers);

/// Per-block spin reduction of a correlation matrix with 4x4 layer blocks.
MatXc oept_blocks(const MatXc& correlation, const Mat4c& U, OeesDiagonal diagonal = OeesDiagonal::Projector);

/// Midpoint of the spectral range for a reduction convention.
double oees_midpoint(OeesDiagonal diagonal);

struct EntanglementOptions {
  int threads = 1;
  int edge_depth = 10;             // layers counted as "near" an end for EdgeWeights
  double degeneracy_tolerance = 1e-6;
  OeesDiagonal diagonal = OeesDiagonal::Projector;
};

/// Plain and enriched spectra of the same cut, computed from one set of slab
/// diagonalizations. Every point carries degeneracies, edge tags and weights.
struct EntanglementResult {
  int nx = 0;
  CutSpec cut;
  SpectrumSeries plain;
  SpectrumSeries enriched;
};

EntanglementResult entanglement_spectra(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut,
                                        const EntanglementOptions& opts = {});

/// Only the plain (enriched = false) or the enriched spectrum.
SpectrumSeries entanglement_spectrum(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut,
                                     bool enriched, const EntanglementOptions& opts = {});

/// Panels of the fully periodic geometry: (a) spectrum of the full projector,
/// (b) plain ES of A, (c) enriched spectrum without a cut, (d) enriched ES of A.
struct TorusSuite {
  SpectrumSeries full;
  SpectrumSeries cut;
  SpectrumSeries enriched_full;
  SpectrumSeries enriched_cut;
};

TorusSuite torus_suite(const ModelSpec& spec, int nx, int ky_samples, const CutSpec& cut,
                       const EntanglementOptions& opts = {});

struct ChiralCountOptions {
  double level = 0.5;
  double window = 0.45;            // only values with |xi - level| < window are tracked
  double hysteresis = 1e-6;        // values this close to the level keep their side
  double skip_cost = -1.0;         // birth/death cost in the alignment; < 0 means window / 4
  std::optional<EdgeTag> tag;      // restrict to values with this edge tag
  /// Further restriction on (point, value index); applied after `tag`.
  std::function<bool(const SpectrumPoint&, std::size_t)> filter;

  static ChiralCountOptions plain() { return {}; }
  static ChiralCountOptions enriched(OeesDiagonal d = OeesDiagonal::Projector);
};

struct ChiralModeCount {
  int net_crossings = 0;
  int total_crossings = 0;               // unsigned
  std::vector<double> crossing_momenta;  // sample at which the branch is first seen on its new side
  std::vector<int> crossing_signs;       // +1 upward through the level as ky increases
  double largest_crossing_jump = 0.0;
};

/// Signed number of spectral-flow crossings through `level` over one ky
/// period. Branches are followed between adjacent samples by an
/// order-preserving alignment that allows branches to enter or leave the
/// window. Throws TrackingAmbiguous when a crossing is resolved only by a
/// jump comparable to the birth/death cost.
ChiralModeCount count_chiral_modes(const SpectrumSeries& series, const ChiralCountOptions& opts = {});

/// Recomputes with doubled ky sampling (up to `max_refinements` times) while
/// counting is ambiguous.
ChiralModeCount count_chiral_modes_refined(const std::function<SpectrumSeries(int)>& compute, int ky_samples,
                                           const ChiralCountOptions& opts, int max_refinements = 4);

/// Flow counted separately on states with most weight in the first or the
/// last quarter of the cut.
struct EndResolvedCount {
  ChiralModeCount begin;
  ChiralModeCount end;

  int net() const { return begin.net_crossings + end.net_crossings; }
  int total() const { return begin.total_crossings + end.total_crossings; }
};

EndResolvedCount count_chiral_modes_by_end(const SpectrumSeries& series, const ChiralCountOptions& opts);

struct EdgeBandReport {
  EdgeTag edge = EdgeTag::None;
  int states = 0;                 // tagged values inside the tracking window, all ky
  ChiralModeCount flow;
  double median_depth_weight = 0.0;  // weight within edge_depth layers of the edge
  double min_depth_weight = 0.0;
  double median_quarter_weight = 0.0;
  double min_quarter_weight = 0.0;
};

struct AnomalyReport {
  EdgeBandReport real;
  EdgeBandReport virtual_edge;
  bool real_edge_state_present = false;
};

/// Splits the in-window enriched spectrum by edge and reports each edge's
/// spectral flow and localization.
AnomalyReport real_edge_anomaly_detect(const SpectrumSeries& series, const CutSpec& cut, int nx,
                                       const ChiralCountOptions& opts);

}  // namespace oee
