#include "oee/topology.hpp"

#include "oee/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <set>

namespace oee {

InvariantResult InvariantResult::from_raw(double raw, const BZGrid& grid) {
  InvariantResult r;
  r.raw = raw;
  r.value = static_cast<int>(std::lround(raw));
  r.residual = std::abs(raw - r.value);
  r.grid = grid;
  return r;
}

std::vector<std::pair<double, double>> PhaseDiagram::singular_points() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : points)
    if (!p.ok()) out.emplace_back(p.mu, p.delta0);
  return out;
}

namespace {

double plaquette_solid_angle(const Vec3d& a, const Vec3d& b, const Vec3d& c, const Vec3d& d) {
  const double t1 = solid_angle(a, b, c);
  const double t2 = solid_angle(a, c, d);
  if (std::isnan(t1) || std::isnan(t2))
    throw SingularTriangle("degenerate spherical triangle (antipodal vertices)");
  return t1 + t2;
}

// Row partial sums are combined in a fixed order so the total does not
// depend on the thread count.
template <typename RowFn>
double sum_rows(int rows, int threads, RowFn&& row_sum) {
  std::vector<double> partial(static_cast<std::size_t>(rows), 0.0);
  parallel_for(partial.size(), threads, [&](std::size_t i) { partial[i] = row_sum(static_cast<int>(i)); });
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

double winding_raw(const std::vector<Vec3d>& unit, const BZGrid& g, int threads) {
  const double total = sum_rows(g.nx, threads, [&](int i) {
    CompensatedSum row;
    const int ip = (i + 1) % g.nx;
    for (int j = 0; j < g.ny; ++j) {
      const int jp = (j + 1) % g.ny;
      row.add(plaquette_solid_angle(unit[g.index(i, j)], unit[g.index(ip, j)],
                                    unit[g.index(ip, jp)], unit[g.index(i, jp)]));
    }
    return row.value();
  });
  return total / (4.0 * pi);
}

}  // namespace

InvariantResult skyrmion_number(const SpinTexture& texture, int threads) {
  if (!texture.normalized) throw SingularTriangle("skyrmion number needs a normalized texture");
  if (texture.vectors.size() != texture.grid.size())
    throw std::invalid_argument("texture is not defined on a momentum grid");
  return InvariantResult::from_raw(winding_raw(texture.vectors, texture.grid, threads), texture.grid);
}

double skyrmion_number_continuum(const SpinTexture& texture) {
  const auto& g = texture.grid;
  const double dkx = 2.0 * pi / g.nx;
  const double dky = 2.0 * pi / g.ny;
  CompensatedSum total;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const Vec3d dx = (texture.at((i + 1) % g.nx, j) - texture.at((i + g.nx - 1) % g.nx, j)) / (2 * dkx);
      const Vec3d dy = (texture.at(i, (j + 1) % g.ny) - texture.at(i, (j + g.ny - 1) % g.ny)) / (2 * dky);
      total.add(texture.at(i, j).dot(dx.cross(dy)) * dkx * dky);
    }
  return total.value() / (4.0 * pi);
}

InvariantResult vector_winding(const std::function<Vec3d(const Momentum&)>& v, const BZGrid& grid,
                               double zero_tolerance) {
  std::vector<Vec3d> unit(grid.size());
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      const Vec3d x = v(grid.at(i, j));
      const double n = x.norm();
      if (n < zero_tolerance)
        throw SingularTriangle("vector vanishes at k=(" + std::to_string(grid.kx(i)) + ", " +
                               std::to_string(grid.ky(j)) + ")");
      unit[grid.index(i, j)] = x / n;
    }
  return InvariantResult::from_raw(winding_raw(unit, grid, 1), grid);
}

InvariantResult chern_number(const ModelSpec& spec, const BZGrid& grid, int filling, int threads) {
  spec.validate();
  using Frame = Eigen::Matrix<cplx, 4, Eigen::Dynamic>;
  std::vector<Frame> frames(grid.size());
  parallel_for(static_cast<std::size_t>(grid.nx), threads, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < grid.ny; ++j) {
      const Momentum k = grid.at(i, j);
      Eigen::SelfAdjointEigenSolver<Mat4c> es(assemble_bdg(spec, k));
      const auto& e = es.eigenvalues();
      const double gap = e(filling) - e(filling - 1);
      if (gap < 1e-10 * std::max(1.0, e(3) - e(0))) throw GapClosure(k, gap);
      frames[grid.index(i, j)] = es.eigenvectors().leftCols(filling);
    }
  });

  auto link = [](const Frame& a, const Frame& b) {
    const cplx det = (a.adjoint() * b).determinant();
    return det / std::abs(det);
  };
  const double flux = sum_rows(grid.nx, threads, [&](int i) {
    CompensatedSum row;
    const int ip = (i + 1) % grid.nx;
    for (int j = 0; j < grid.ny; ++j) {
      const int jp = (j + 1) % grid.ny;
      const auto& f00 = frames[grid.index(i, j)];
      const auto& f10 = frames[grid.index(ip, j)];
      const auto& f11 = frames[grid.index(ip, jp)];
      const auto& f01 = frames[grid.index(i, jp)];
      const cplx loop = link(f00, f10) * link(f10, f11) * link(f11, f01) * link(f01, f00);
      row.add(std::arg(loop));
    }
    return row.value();
  });
  // Berry phase around a loop is -arg(prod <u_i|u_i+1>).
  return InvariantResult::from_raw(-flux / (2.0 * pi), grid);
}

InvariantResult analytic_chern(const ModelSpec& spec, const BZGrid& grid) {
  spec.validate();
  const auto plus = vector_winding([&](const Momentum& k) { return block_vectors(spec, k).first; }, grid);
  const auto minus = vector_winding([&](const Momentum& k) { return block_vectors(spec, k).second; }, grid);
  return InvariantResult::from_raw(plus.raw + minus.raw, grid);
}

namespace {

InvariantResult interpolated_winding(const ModelSpec& spec, const BZGrid& grid, double alpha) {
  const auto r = vector_winding(
      [&](const Momentum& k) -> Vec3d {
        const auto [plus, minus] = block_vectors(spec, k);
        const double np = plus.norm();
        const double nm = minus.norm();
        if (np < 1e-10 || nm < 1e-10) throw SingularTriangle("block vector h ± d vanishes");
        return plus / np + alpha * minus / nm;
      },
      grid);
  return InvariantResult::from_raw(-r.raw, grid);
}

}  // namespace

InvariantResult analytic_skyrmion(const ModelSpec& spec, const BZGrid& grid) {
  spec.validate();
  return interpolated_winding(spec, grid, 1.0);
}

std::vector<InvariantResult> homotopy_interpolation_check(const ModelSpec& spec, const BZGrid& grid,
                                                          const std::vector<double>& alphas) {
  spec.validate();
  std::vector<InvariantResult> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(interpolated_winding(spec, grid, a));
  return out;
}

InvariantResult model_skyrmion_number(const ModelSpec& spec, const BZGrid& grid, int filling, int threads) {
  TextureOptions opts;
  opts.filling = filling;
  opts.threads = threads;
  return skyrmion_number(bulk_texture(spec, grid, opts), threads);
}

PhaseDiagram phase_diagram(const ModelSpec& spec_template, const std::vector<double>& mu_values,
                           const std::vector<double>& delta0_values, const PhaseDiagramOptions& opts) {
  if (mu_values.empty() || delta0_values.empty()) throw ConfigError("phase diagram ranges must be nonempty");
  if (!std::holds_alternative<Qwz>(spec_template.normal_state))
    throw ConfigError("phase diagram sweeps the QWZ mass; template must use the QWZ normal state");

  PhaseDiagram pd;
  pd.mu_values = mu_values;
  pd.delta0_values = delta0_values;
  pd.points.resize(mu_values.size() * delta0_values.size());

  parallel_for(pd.points.size(), opts.threads, [&](std::size_t idx) {
    PhasePoint& p = pd.points[idx];
    p.mu = mu_values[idx / delta0_values.size()];
    p.delta0 = delta0_values[idx % delta0_values.size()];
    ModelSpec spec = spec_template;
    auto& qwz = std::get<Qwz>(spec.normal_state);
    qwz.mu = p.mu * qwz.t;
    spec.delta0 = p.delta0;

    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opts.grid.nx; ++i)
      for (int j = 0; j < opts.grid.ny; ++j) {
        Eigen::SelfAdjointEigenSolver<Mat4c> es(assemble_bdg(spec, opts.grid.at(i, j)), Eigen::EigenvaluesOnly);
        min_gap = std::min(min_gap, es.eigenvalues()(opts.filling) - es.eigenvalues()(opts.filling - 1));
      }
    p.min_gap = min_gap;
    try {
      TextureOptions topts;
      topts.filling = opts.filling;
      topts.normalize = false;
      auto tex = bulk_texture(spec, opts.grid, topts);
      p.min_spin_norm = tex.min_norm();
      const auto c = chern_number(spec, opts.grid, opts.filling);
      p.chern = c.value;
      p.chern_raw = c.raw;
      if (p.min_spin_norm < opts.type_ii_tolerance) {
        p.status = "type_ii";
        return;
      }
      for (std::size_t n = 0; n < tex.vectors.size(); ++n) tex.vectors[n] /= tex.norms[n];
      tex.normalized = true;
      const auto q = skyrmion_number(tex);
      p.skyrmion = q.value;
      p.skyrmion_raw = q.raw;
      const bool quantized = c.residual < opts.quantization_threshold && q.residual < opts.quantization_threshold;
      p.status = quantized ? "ok" : "unquantized";
    } catch (const GapClosure&) {
      p.status = "gap_closure";
    } catch (const SingularTriangle&) {
      p.status = "singular_triangle";
    }
  });
  return pd;
}

PhaseDiagramSummary summarize(const PhaseDiagram& pd) {
  PhaseDiagramSummary s;
  const std::size_t nm = pd.mu_values.size();
  const std::size_t nd = pd.delta0_values.size();

  for (std::size_t i = 0; i < nm; ++i) {
    std::set<int> seen;
    for (std::size_t j = 0; j < nd; ++j)
      if (pd.at(i, j).ok()) seen.insert(pd.at(i, j).skyrmion);
    if (seen.size() > 1) s.skyrmion_independent_of_delta0 = false;
  }

  // Columns ordered by increasing |delta0|.
  std::vector<std::size_t> order(nd);
  for (std::size_t j = 0; j < nd; ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return std::abs(pd.delta0_values[a]) < std::abs(pd.delta0_values[b]); });
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (auto j : order) {
    std::size_t nontrivial = 0;
    for (std::size_t i = 0; i < nm; ++i)
      if (pd.at(i, j).ok() && pd.at(i, j).chern != 0) ++nontrivial;
    if (nontrivial > previous) s.chern_regions_narrow = false;
    previous = nontrivial;
  }

  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = 0; j < nd; ++j) {
      const auto& p = pd.at(i, j);
      if (p.ok() && p.delta0 == 0.0 && p.chern != -2 * p.skyrmion)
        s.chern_equals_minus_two_skyrmion_at_zero_pairing = false;
    }

  // Adjacent mu rows (sorted) whose skyrmion number differs while the gap stays open.
  std::vector<std::size_t> rows(nm);
  for (std::size_t i = 0; i < nm; ++i) rows[i] = i;
  std::sort(rows.begin(), rows.end(), [&](auto a, auto b) { return pd.mu_values[a] < pd.mu_values[b]; });
  std::set<double> jumps;
  for (std::size_t r = 0; r + 1 < nm; ++r)
    for (std::size_t j = 0; j < nd; ++j) {
      const auto& a = pd.at(rows[r], j);
      const auto& b = pd.at(rows[r + 1], j);
      if (a.ok() && b.ok() && a.skyrmion != b.skyrmion && a.chern == b.chern && a.min_gap > 1e-6 &&
          b.min_gap > 1e-6)
        jumps.insert(0.5 * (a.mu + b.mu));
    }
  s.skyrmion_jumps_without_gap_closing.assign(jumps.begin(), jumps.end());
  return s;
}

}  // namespace oee
