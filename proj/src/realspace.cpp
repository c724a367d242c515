#include "oee/realspace.hpp"

#include "oee/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace oee {

int HoppingSet::range() const {
  int r = 0;
  for (const auto& [d, t] : entries) r = std::max({r, std::abs(d.first), std::abs(d.second)});
  return r;
}

Mat4c HoppingSet::bloch(const Momentum& k) const {
  Mat4c h = Mat4c::Zero();
  for (const auto& [d, t] : entries) h += t * std::exp(cplx(0, k.kx * d.first + k.ky * d.second));
  return h;
}

double HoppingSet::hermiticity_violation() const {
  double worst = 0.0;
  for (const auto& [d, t] : entries) {
    const auto partner = entries.find({-d.first, -d.second});
    const Mat4c mirror = partner == entries.end() ? Mat4c::Zero() : partner->second;
    worst = std::max(worst, (mirror - t.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

HoppingSet extract_hoppings(const ModelSpec& spec, int max_range, double drop_tolerance) {
  spec.validate();
  if (max_range < 0) throw ConfigError("max_range must be non-negative");
  const int n = std::max(16, 4 * max_range + 4);
  std::vector<Mat4c> samples(static_cast<std::size_t>(n) * n);
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = 2.0 * pi * i / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) samples[static_cast<std::size_t>(i) * n + j] = assemble_bdg(spec, {k[i], k[j]});

  HoppingSet out;
  double dropped = 0.0;
  for (int dx = -n / 2; dx < n / 2; ++dx)
    for (int dy = -n / 2; dy < n / 2; ++dy) {
      Mat4c t = Mat4c::Zero();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          t += samples[static_cast<std::size_t>(i) * n + j] *
               std::exp(cplx(0, -(k[i] * dx + k[j] * dy)));
      t /= static_cast<double>(n) * n;
      const double weight = t.cwiseAbs().maxCoeff();
      if (std::max(std::abs(dx), std::abs(dy)) > max_range) {
        dropped = std::max(dropped, weight);
      } else if (weight > drop_tolerance) {
        // Entries below the drop tolerance are rounding noise; zero them.
        t = t.unaryExpr([&](const cplx& z) {
          return cplx(std::abs(z.real()) > drop_tolerance ? z.real() : 0.0,
                      std::abs(z.imag()) > drop_tolerance ? z.imag() : 0.0);
        });
        out.entries.emplace(std::make_pair(dx, dy), t);
      }
    }
  if (dropped > 1e-10)
    throw RangeTooSmall("hopping weight " + std::to_string(dropped) + " beyond range " +
                        std::to_string(max_range));
  return out;
}

MatXc SiteHamiltonian::dense() const {
  MatXc h = MatXc::Zero(4 * sites, 4 * sites);
  for (const auto& c : couplings) h.block<4, 4>(4 * c.from, 4 * c.to) += c.block;
  return h;
}

SiteHamiltonian SiteHamiltonian::from_dense(const MatXc& h, double tol) {
  if (h.rows() != h.cols() || h.rows() % 4 != 0)
    throw std::invalid_argument("dense Hamiltonian must be square with 4 orbitals per site");
  SiteHamiltonian out;
  out.sites = static_cast<int>(h.rows() / 4);
  for (int a = 0; a < out.sites; ++a)
    for (int b = 0; b < out.sites; ++b) {
      const Mat4c blk = h.block<4, 4>(4 * a, 4 * b);
      if (blk.cwiseAbs().maxCoeff() > tol) out.couplings.push_back({a, b, blk});
    }
  return out;
}

namespace {

// Maps x + dx into [0, n) or returns -1 when the bond leaves an open system.
int shift(int x, int dx, int n, Boundary b) {
  const int y = x + dx;
  if (b == Boundary::Open) return (y >= 0 && y < n) ? y : -1;
  return ((y % n) + n) % n;
}

}  // namespace

SiteHamiltonian slab_couplings(const HoppingSet& hoppings, double ky, int nx, Boundary boundary) {
  if (nx < 1) throw ConfigError("slab needs at least one layer");
  // Sum over dy first so each layer pair gets one block.
  std::map<int, Mat4c> by_dx;
  for (const auto& [d, t] : hoppings.entries) {
    auto [it, inserted] = by_dx.try_emplace(d.first, Mat4c::Zero());
    it->second += t * std::exp(cplx(0, ky * d.second));
  }
  SiteHamiltonian h;
  h.sites = nx;
  for (int x = 0; x < nx; ++x)
    for (const auto& [dx, t] : by_dx) {
      const int xp = shift(x, dx, nx, boundary);
      if (xp >= 0) h.couplings.push_back({x, xp, t});
    }
  return h;
}

SlabHamiltonian build_slab(const HoppingSet& hoppings, double ky, int nx, Boundary boundary) {
  SlabHamiltonian slab;
  slab.ky = ky;
  slab.nx = nx;
  slab.boundary = boundary;
  slab.matrix = slab_couplings(hoppings, ky, nx, boundary).dense();
  return slab;
}

SiteHamiltonian lattice_couplings(const HoppingSet& hoppings, int nx, int ny, Boundary bx, Boundary by) {
  if (nx < 1 || ny < 1) throw ConfigError("lattice needs at least one site per direction");
  SiteHamiltonian h;
  h.sites = nx * ny;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (const auto& [d, t] : hoppings.entries) {
        const int xp = shift(x, d.first, nx, bx);
        const int yp = shift(y, d.second, ny, by);
        if (xp >= 0 && yp >= 0) h.couplings.push_back({x * ny + y, xp * ny + yp, t});
      }
  return h;
}

std::optional<OnsiteSymmetry> find_onsite_symmetry(const HoppingSet& hoppings, double tol) {
  static const char* names = "0xyz";
  // The two generators of the model family first, then the remaining products.
  std::vector<std::pair<int, int>> order = {{2, 2}, {1, 2}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if ((a || b) && !(a == 2 && b == 2) && !(a == 1 && b == 2)) order.emplace_back(a, b);

  for (const auto& [a, b] : order) {
    const Mat4c g = tau_sigma(a, b);
    const bool commutes = std::all_of(hoppings.entries.begin(), hoppings.entries.end(), [&](const auto& e) {
      const Mat4c& t = e.second;
      return (g * t - t * g).cwiseAbs().maxCoeff() <= tol * std::max(1.0, t.cwiseAbs().maxCoeff());
    });
    if (!commutes) continue;
    Eigen::SelfAdjointEigenSolver<Mat4c> es(g);
    OnsiteSymmetry sym;
    sym.generator = g;
    // Eigenvalues come out as (-1, -1, 1, 1); reorder to (+1, +1, -1, -1).
    sym.basis << es.eigenvectors().col(2), es.eigenvectors().col(3), es.eigenvectors().col(0),
        es.eigenvectors().col(1);
    sym.name = std::string("tau_") + names[a] + " sigma_" + names[b];
    return sym;
  }
  return std::nullopt;
}

SiteEigenSystem::SiteEigenSystem(const SiteHamiltonian& h, const std::optional<OnsiteSymmetry>& symmetry)
    : sites_(h.sites) {
  if (symmetry) {
    basis_ = symmetry->basis;
    sectors_.push_back({{0, 1}, {}, {}});
    sectors_.push_back({{2, 3}, {}, {}});
  } else {
    sectors_.push_back({{0, 1, 2, 3}, {}, {}});
  }

  for (int s = 0; s < static_cast<int>(sectors_.size()); ++s) {
    auto& sec = sectors_[s];
    const int m = static_cast<int>(sec.orbitals.size());
    MatXc hs = MatXc::Zero(static_cast<Eigen::Index>(sites_) * m, static_cast<Eigen::Index>(sites_) * m);
    for (const auto& c : h.couplings) {
      const Mat4c rotated = basis_.adjoint() * c.block * basis_;
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          hs(c.from * m + p, c.to * m + q) += rotated(sec.orbitals[p], sec.orbitals[q]);
    }
    Eigen::SelfAdjointEigenSolver<MatXc> es(hs);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    sec.values = es.eigenvalues();
    sec.vectors = es.eigenvectors();
    for (int i = 0; i < sec.values.size(); ++i) levels_.push_back({sec.values(i), s, i});
  }
  std::stable_sort(levels_.begin(), levels_.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
}

VecXd SiteEigenSystem::energies() const {
  VecXd e(static_cast<Eigen::Index>(levels_.size()));
  for (std::size_t i = 0; i < levels_.size(); ++i) e(static_cast<Eigen::Index>(i)) = levels_[i].energy;
  return e;
}

Eigen::VectorXcd SiteEigenSystem::state(int level) const {
  const auto& lv = levels_.at(static_cast<std::size_t>(level));
  const auto& sec = sectors_[lv.sector];
  const int m = static_cast<int>(sec.orbitals.size());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension());
  for (int a = 0; a < sites_; ++a) {
    Eigen::Vector4cd local = Eigen::Vector4cd::Zero();
    for (int p = 0; p < m; ++p) local(sec.orbitals[p]) = sec.vectors(a * m + p, lv.index);
    v.segment<4>(4 * a) = basis_ * local;
  }
  return v;
}

std::vector<int> SiteEigenSystem::occupied_counts(int n_occ) const {
  if (n_occ < 0 || n_occ > dimension()) throw std::out_of_range("occupation out of range");
  std::vector<int> counts(sectors_.size(), 0);
  for (int i = 0; i < n_occ; ++i) ++counts[levels_[i].sector];
  return counts;
}

std::vector<MatXc> SiteEigenSystem::projector_sectors(int n_occ, const std::vector<int>& site_list) const {
  const auto counts = occupied_counts(n_occ);
  const int n = static_cast<int>(site_list.size());
  std::vector<MatXc> out;
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& sec = sectors_[s];
    const int m = static_cast<int>(sec.orbitals.size());
    MatXc rows(static_cast<Eigen::Index>(n) * m, counts[s]);
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < m; ++p) rows.row(i * m + p) = sec.vectors.row(site_list[i] * m + p).head(counts[s]);
    out.push_back(rows * rows.adjoint());
  }
  return out;
}

MatXc SiteEigenSystem::projector_block(int n_occ, const std::vector<int>& site_list) const {
  const auto parts = projector_sectors(n_occ, site_list);
  const int n = static_cast<int>(site_list.size());
  MatXc rotated = MatXc::Zero(4 * n, 4 * n);
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& orb = sectors_[s].orbitals;
    const int m = static_cast<int>(orb.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) rotated(4 * i + orb[p], 4 * j + orb[q]) = parts[s](i * m + p, j * m + q);
  }
  if (sectors_.size() == 1) return rotated;
  MatXc out(4 * n, 4 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block<4, 4>(4 * i, 4 * j) = basis_ * rotated.block<4, 4>(4 * i, 4 * j) * basis_.adjoint();
  return out;
}

std::vector<Mat4c> SiteEigenSystem::onsite_projectors(int n_occ) const {
  const auto counts = occupied_counts(n_occ);
  std::vector<Mat4c> out(static_cast<std::size_t>(sites_), Mat4c::Zero());
  for (int a = 0; a < sites_; ++a) {
    Mat4c rotated = Mat4c::Zero();
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      const auto& sec = sectors_[s];
      const int m = static_cast<int>(sec.orbitals.size());
      const MatXc rows = sec.vectors.block(a * m, 0, m, counts[s]);
      const MatXc ps = rows * rows.adjoint();
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) rotated(sec.orbitals[p], sec.orbitals[q]) = ps(p, q);
    }
    out[a] = basis_ * rotated * basis_.adjoint();
  }
  return out;
}

EdgeWeights layer_edge_weights(const Eigen::Ref<const Eigen::VectorXcd>& v, int orbitals, int depth) {
  const int layers = static_cast<int>(v.size()) / orbitals;
  const int quarter = std::max(1, layers / 4);
  const int d = std::min(depth, layers);
  std::vector<double> w(static_cast<std::size_t>(layers));
  for (int x = 0; x < layers; ++x) w[x] = v.segment(x * orbitals, orbitals).squaredNorm();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const auto sum = [&](int from, int to) { return std::accumulate(w.begin() + from, w.begin() + to, 0.0) / total; };
  return {sum(0, quarter), sum(layers - quarter, layers), sum(0, d), sum(layers - d, layers)};
}

SpectrumSeries slab_spectrum(const ModelSpec& spec, int nx, int ky_samples, Boundary boundary, int threads,
                             bool edge_weights, int edge_depth) {
  if (ky_samples < 1) throw ConfigError("need at least one ky sample");
  const auto hoppings = extract_hoppings(spec, model_range(spec));
  const auto symmetry = find_onsite_symmetry(hoppings);
  SpectrumSeries series;
  series.points.resize(static_cast<std::size_t>(ky_samples));
  parallel_for(series.points.size(), threads, [&](std::size_t i) {
    const double ky = -pi + 2.0 * pi * static_cast<double>(i) / ky_samples;
    const SiteEigenSystem es(slab_couplings(hoppings, ky, nx, boundary), symmetry);
    auto& pt = series.points[i];
    pt.k = ky;
    pt.values = es.energies();
    if (!edge_weights) return;
    const EdgeTag edge = boundary == Boundary::Open ? EdgeTag::Real : EdgeTag::Bulk;
    for (int n = 0; n < es.dimension(); ++n) {
      const auto w = layer_edge_weights(es.state(n), 4, edge_depth);
      pt.weights.push_back(w);
      pt.edge_tag.push_back(w.begin_quarter > 0.5 || w.end_quarter > 0.5 ? edge : EdgeTag::Bulk);
    }
  });
  return series;
}

LocalizationProfile layer_weights(const Eigen::VectorXcd& v, int orbitals) {
  const int layers = static_cast<int>(v.size()) / orbitals;
  LocalizationProfile out;
  out.layer_index.resize(layers);
  out.probability.resize(layers);
  const double total = v.squaredNorm();
  for (int x = 0; x < layers; ++x) {
    out.layer_index[x] = x;
    out.probability[x] = v.segment(x * orbitals, orbitals).squaredNorm() / total;
  }
  return out;
}

LocalizationProfile localization_profile(const SlabHamiltonian& slab, int state_index) {
  if (state_index < 0 || state_index >= slab.matrix.rows()) throw std::out_of_range("state index out of range");
  Eigen::SelfAdjointEigenSolver<MatXc> es(slab.matrix);
  return layer_weights(es.eigenvectors().col(state_index), 4);
}

RealSpaceTexture realspace_texture(const ModelSpec& spec, int nx, int ny, double filling_fraction) {
  const auto hoppings = extract_hoppings(spec, model_range(spec));
  const auto symmetry = find_onsite_symmetry(hoppings);
  const SiteEigenSystem es(lattice_couplings(hoppings, nx, ny, Boundary::Open, Boundary::Open), symmetry);

  const int n_occ = static_cast<int>(std::lround(filling_fraction * es.dimension()));
  const VecXd e = es.energies();
  if (n_occ > 0 && n_occ < es.dimension() && e(n_occ) - e(n_occ - 1) < 1e-10)
    throw GapClosure("degenerate filling in open lattice: gap " + std::to_string(e(n_occ) - e(n_occ - 1)));

  const auto rep = SpinRepresentation::standard();
  RealSpaceTexture tex;
  tex.nx = nx;
  tex.ny = ny;
  tex.spins.reserve(static_cast<std::size_t>(nx) * ny);
  for (const auto& p : es.onsite_projectors(n_occ)) tex.spins.push_back(pauli_components(oept_rotated(p, rep.U)));
  return tex;
}

namespace {

// Perimeter sites in counterclockwise order (x to the right, y up).
std::vector<std::pair<int, int>> perimeter(int nx, int ny) {
  std::vector<std::pair<int, int>> loop;
  for (int x = 0; x < nx - 1; ++x) loop.emplace_back(x, 0);
  for (int y = 0; y < ny - 1; ++y) loop.emplace_back(nx - 1, y);
  for (int x = nx - 1; x > 0; --x) loop.emplace_back(x, ny - 1);
  for (int y = ny - 1; y > 0; --y) loop.emplace_back(0, y);
  return loop;
}

}  // namespace

double boundary_circulation(const RealSpaceTexture& texture) {
  const auto loop = perimeter(texture.nx, texture.ny);
  double c = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [x, y] = loop[i];
    const auto [xn, yn] = loop[(i + 1) % loop.size()];
    const Vec3d& s = texture.at(x, y);
    c += s(0) * (xn - x) + s(1) * (yn - y);
  }
  return c;
}

double boundary_winding(const RealSpaceTexture& texture, double zero_tolerance) {
  const auto loop = perimeter(texture.nx, texture.ny);
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const double m = texture.at(loop[i].first, loop[i].second).head<2>().norm();
    if (m < zero_tolerance)
      throw NumericalError("in-plane spin vanishes at boundary site (" + std::to_string(loop[i].first) + ", " +
                           std::to_string(loop[i].second) + "), magnitude " + std::to_string(m));
    const Vec3d& a = texture.at(loop[i].first, loop[i].second);
    const auto& nb = loop[(i + 1) % loop.size()];
    const Vec3d& b = texture.at(nb.first, nb.second);
    total += wrap_momentum(std::atan2(b(1), b(0)) - std::atan2(a(1), a(0)));
  }
  return total / (2.0 * pi);
}

}  // namespace oee
