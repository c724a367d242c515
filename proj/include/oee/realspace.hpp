#pragma once

#include "oee/bulk.hpp"

#include <map>
#include <optional>

namespace oee {

/// Real-space hopping blocks t_delta with H(k) = sum_delta t_delta exp(i k.delta).
struct HoppingSet {
  std::map<std::pair<int, int>, Mat4c> entries;

  int range() const;
  Mat4c bloch(const Momentum& k) const;
  /// max over delta of |t_{-delta} - t_delta^dag|.
  double hermiticity_violation() const;
};

/// Inverse Fourier transform of the Bloch Hamiltonian on a grid fine enough to
/// resolve offsets up to max_range. Throws RangeTooSmall when the model has
/// weight beyond max_range.
HoppingSet extract_hoppings(const ModelSpec& spec, int max_range = 1, double drop_tolerance = 1e-12);

enum class Boundary { Open, Periodic };

struct SlabHamiltonian {
  double ky = 0.0;
  int nx = 0;
  Boundary boundary = Boundary::Open;
  MatXc matrix;  // 4 nx x 4 nx, orbital index 4 x + o
};

/// H_{from,to} += block for a Hamiltonian with four orbitals per site.
struct SiteCoupling {
  int from = 0;
  int to = 0;
  Mat4c block = Mat4c::Zero();
};

/// Sparse block form of a real-space Hamiltonian.
struct SiteHamiltonian {
  int sites = 0;
  std::vector<SiteCoupling> couplings;

  MatXc dense() const;
  /// Nonzero 4x4 blocks of a dense matrix.
  static SiteHamiltonian from_dense(const MatXc& h, double tol = 0.0);
};

/// Slab couplings: H_{x,x'} = sum_dy t_{(x'-x, dy)} exp(i ky dy).
SiteHamiltonian slab_couplings(const HoppingSet& hoppings, double ky, int nx, Boundary boundary);

/// Slab with x as a lattice direction and ky a good quantum number.
SlabHamiltonian build_slab(const HoppingSet& hoppings, double ky, int nx, Boundary boundary);

/// Couplings of the full two-dimensional lattice; site index x * ny + y.
SiteHamiltonian lattice_couplings(const HoppingSet& hoppings, int nx, int ny, Boundary bx, Boundary by);

inline MatXc build_lattice(const HoppingSet& hoppings, int nx, int ny, Boundary bx, Boundary by) {
  return lattice_couplings(hoppings, nx, ny, bx, by).dense();
}

/// Unitary on-site involution commuting with every hopping block, with an
/// eigenbasis ordered as (+1, +1, -1, -1).
struct OnsiteSymmetry {
  Mat4c generator;
  Mat4c basis;
  std::string name;
};

/// Searches the tau_a ⊗ sigma_b products for an involution that commutes with
/// every hopping block (tau_y ⊗ sigma_y for real pairing, tau_x ⊗ sigma_y for
/// the pure H' pairing).
std::optional<OnsiteSymmetry> find_onsite_symmetry(const HoppingSet& hoppings, double tol = 1e-12);

/// Eigen-decomposition of a Hamiltonian with four orbitals per site, split
/// into symmetry sectors when an on-site symmetry is supplied.
class SiteEigenSystem {
 public:
  explicit SiteEigenSystem(const SiteHamiltonian& h,
                           const std::optional<OnsiteSymmetry>& symmetry = std::nullopt);

  int sites() const { return sites_; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  int dimension() const { return 4 * sites_; }
  /// All eigenvalues, ascending; ties keep sector order.
  VecXd energies() const;
  /// Eigenvector of the n-th lowest level in the original orbital basis.
  Eigen::VectorXcd state(int level) const;
  /// Ground-state projector on the `n_occ` lowest levels, restricted to the
  /// rows and columns of `site_list`, in the original basis.
  MatXc projector_block(int n_occ, const std::vector<int>& site_list) const;
  /// The same restricted projector in the rotated basis, one block per
  /// sector; row index site_position * orbitals + local orbital.
  std::vector<MatXc> projector_sectors(int n_occ, const std::vector<int>& site_list) const;
  const std::vector<int>& sector_orbitals(int sector) const { return sectors_[sector].orbitals; }
  const Mat4c& basis() const { return basis_; }
  /// On-site 4x4 blocks of the same projector for every site.
  std::vector<Mat4c> onsite_projectors(int n_occ) const;

 private:
  struct Sector {
    std::vector<int> orbitals;  // local orbitals of the rotated basis
    VecXd values;
    MatXc vectors;  // rows: site * orbitals.size() + local
  };
  struct Level {
    double energy;
    int sector;
    int index;
  };

  /// Occupied states of each sector; always a prefix of its ascending levels.
  std::vector<int> occupied_counts(int n_occ) const;

  int sites_ = 0;
  Mat4c basis_ = Mat4c::Identity();
  std::vector<Sector> sectors_;
  std::vector<Level> levels_;
};

/// Weight of a vector (`orbitals` entries per layer) in the outer quarter and
/// the first/last `depth` layers at each end.
EdgeWeights layer_edge_weights(const Eigen::Ref<const Eigen::VectorXcd>& v, int orbitals, int depth);

/// Slab eigenvalues for each ky sample in [-pi, pi). With `edge_weights` set,
/// every level also carries its EdgeWeights and a Real/Bulk tag (open
/// boundaries) so that the two physical edges can be told apart.
SpectrumSeries slab_spectrum(const ModelSpec& spec, int nx, int ky_samples, Boundary boundary,
                             int threads = 1, bool edge_weights = false, int edge_depth = 10);

struct LocalizationProfile {
  std::vector<int> layer_index;
  std::vector<double> probability;
};

/// Per-layer probability of the `state_index`-th lowest slab eigenstate.
LocalizationProfile localization_profile(const SlabHamiltonian& slab, int state_index);

/// Per-layer probability of an arbitrary vector with `orbitals` entries per layer.
LocalizationProfile layer_weights(const Eigen::VectorXcd& v, int orbitals);

struct RealSpaceTexture {
  int nx = 0;
  int ny = 0;
  std::vector<Vec3d> spins;  // unnormalized, index x * ny + y

  const Vec3d& at(int x, int y) const { return spins[static_cast<std::size_t>(x) * ny + y]; }
};

/// Ground-state spin texture with open boundaries in x and y, from the on-site
/// blocks of the many-body projector.
RealSpaceTexture realspace_texture(const ModelSpec& spec, int nx, int ny, double filling_fraction = 0.5);

/// Signed circulation of the in-plane spin along the outer boundary loop,
/// traversed counterclockwise: sum of (Sx, Sy) . tangent.
double boundary_circulation(const RealSpaceTexture& texture);

/// Net winding (in turns) of the in-plane spin angle along the counterclockwise
/// boundary loop. Throws NumericalError where the in-plane spin vanishes.
double boundary_winding(const RealSpaceTexture& texture, double zero_tolerance = 1e-10);

}  // namespace oee
