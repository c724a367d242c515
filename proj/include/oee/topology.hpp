#pragma once

#include "oee/bulk.hpp"

#include <functional>
#include <string>

namespace oee {

/// Quantized invariant plus the accumulator it was rounded from.
struct InvariantResult {
  int value = 0;
  double raw = 0.0;
  double residual = 0.0;
  BZGrid grid;

  static InvariantResult from_raw(double raw, const BZGrid& grid);
  bool quantized(double threshold = 0.01) const { return residual < threshold; }
};

/// Signed solid angle of the spherical triangle (a, b, c) of unit vectors
/// (Oosterom-Strackee form). Returns NaN for a degenerate triangle.
template <typename DA, typename DB, typename DC>
double solid_angle(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                   const Eigen::MatrixBase<DC>& c, double tol = 1e-10) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  if (std::abs(num) <= tol && den <= tol) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * std::atan2(num, den);
}

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Lattice skyrmion number: solid angles of the two triangles of every
/// periodic plaquette, summed and divided by 4 pi.
InvariantResult skyrmion_number(const SpinTexture& texture, int threads = 1);

/// Finite-difference estimate of (1/4pi) ∫ S.(d_x S × d_y S); diagnostics only.
double skyrmion_number_continuum(const SpinTexture& texture);

/// Winding of v(k)/|v(k)| over the grid. Throws SingularTriangle when v vanishes.
InvariantResult vector_winding(const std::function<Vec3d(const Momentum&)>& v, const BZGrid& grid,
                               double zero_tolerance = 1e-10);

/// Total Chern number of the `filling` lowest bands from Fukui-Hatsugai-Suzuki
/// link variables, with the convention A = i<u|grad u>.
InvariantResult chern_number(const ModelSpec& spec, const BZGrid& grid, int filling = 2,
                             int threads = 1);

/// Q[h + delta0 d] + Q[h - delta0 d] for the block-diagonal family.
InvariantResult analytic_chern(const ModelSpec& spec, const BZGrid& grid);

/// -Q[(h+d)/|h+d| + (h-d)/|h-d|] for the block-diagonal family.
InvariantResult analytic_skyrmion(const ModelSpec& spec, const BZGrid& grid);

/// -Q[(h+d)/|h+d| + alpha (h-d)/|h-d|] for each alpha.
std::vector<InvariantResult> homotopy_interpolation_check(const ModelSpec& spec, const BZGrid& grid,
                                                          const std::vector<double>& alphas);

/// Skyrmion number of the normalized ground-state texture of a model.
InvariantResult model_skyrmion_number(const ModelSpec& spec, const BZGrid& grid, int filling = 2,
                                      int threads = 1);

struct PhasePoint {
  double mu = 0.0;      // mu / t for the QWZ template
  double delta0 = 0.0;
  int chern = 0;
  int skyrmion = 0;
  double chern_raw = 0.0;
  double skyrmion_raw = 0.0;
  double min_spin_norm = 0.0;
  double min_gap = 0.0;
  std::string status;   // ok | gap_closure | type_ii | singular_triangle | unquantized

  bool ok() const { return status == "ok"; }
};

struct PhaseDiagram {
  std::vector<double> mu_values;
  std::vector<double> delta0_values;
  std::vector<PhasePoint> points;  // row-major in (mu, delta0)

  const PhasePoint& at(std::size_t i_mu, std::size_t i_delta) const {
    return points[i_mu * delta0_values.size() + i_delta];
  }
  std::vector<std::pair<double, double>> singular_points() const;
};

struct PhaseDiagramOptions {
  BZGrid grid{64, 64};
  int filling = 2;
  int threads = 1;
  double type_ii_tolerance = 1e-6;
  double quantization_threshold = 0.01;
};

/// Sweeps mu/t and delta0 of a QWZ-based template; per-point failures are
/// recorded in the point status rather than thrown.
PhaseDiagram phase_diagram(const ModelSpec& spec_template, const std::vector<double>& mu_values,
                           const std::vector<double>& delta0_values, const PhaseDiagramOptions& opts);

/// Qualitative checks on a phase diagram.
struct PhaseDiagramSummary {
  bool skyrmion_independent_of_delta0 = true;
  bool chern_regions_narrow = true;
  bool chern_equals_minus_two_skyrmion_at_zero_pairing = true;
  std::vector<double> skyrmion_jumps_without_gap_closing;  // midpoints in mu
};

PhaseDiagramSummary summarize(const PhaseDiagram& diagram);

}  // namespace oee
