#include "oee/entanglement.hpp"

#include <algorithm>

namespace oee {

namespace {

// Order-preserving alignment of two ascending lists: matching a with b costs
// |a - b|, leaving an element unmatched costs `gap`. Returns matched pairs.
std::vector<std::pair<int, int>> align(const std::vector<double>& a, const std::vector<double>& b, double gap) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const auto at = [m](int i, int j) { return static_cast<std::size_t>(i) * (m + 1) + j; };
  std::vector<double> cost(static_cast<std::size_t>(n + 1) * (m + 1));
  std::vector<char> move(cost.size(), 0);  // 0 diagonal, 1 skip a, 2 skip b
  for (int i = 0; i <= n; ++i) cost[at(i, 0)] = i * gap, move[at(i, 0)] = 1;
  for (int j = 0; j <= m; ++j) cost[at(0, j)] = j * gap, move[at(0, j)] = 2;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j) {
      const double diag = cost[at(i - 1, j - 1)] + std::abs(a[i - 1] - b[j - 1]);
      const double up = cost[at(i - 1, j)] + gap;
      const double left = cost[at(i, j - 1)] + gap;
      // Ties prefer a match, then dropping from a.
      if (diag <= up && diag <= left) {
        cost[at(i, j)] = diag;
        move[at(i, j)] = 0;
      } else if (up <= left) {
        cost[at(i, j)] = up;
        move[at(i, j)] = 1;
      } else {
        cost[at(i, j)] = left;
        move[at(i, j)] = 2;
      }
    }
  std::vector<std::pair<int, int>> pairs;
  for (int i = n, j = m; i > 0 && j > 0;) {
    switch (move[at(i, j)]) {
      case 0: pairs.emplace_back(i - 1, j - 1); --i, --j; break;
      case 1: --i; break;
      default: --j; break;
    }
  }
  std::reverse(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace

ChiralModeCount count_chiral_modes(const SpectrumSeries& series, const ChiralCountOptions& opts) {
  if (opts.tag && !series.tagged()) throw ConfigError("edge-tag filter needs a tagged spectrum");
  if (opts.window <= 0.0) throw ConfigError("tracking window must be positive");
  const double gap = opts.skip_cost < 0.0 ? 0.25 * opts.window : opts.skip_cost;

  const std::size_t n = series.size();
  std::vector<std::vector<double>> tracked(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pt = series.points[i];
    for (Eigen::Index c = 0; c < pt.values.size(); ++c) {
      if (std::abs(pt.values(c) - opts.level) >= opts.window) continue;
      if (opts.tag && pt.edge_tag[static_cast<std::size_t>(c)] != *opts.tag) continue;
      if (opts.filter && !opts.filter(pt, static_cast<std::size_t>(c))) continue;
      tracked[i].push_back(pt.values(c));
    }
  }

  const auto side_of = [&](double x) { return x < opts.level - opts.hysteresis ? -1 : x > opts.level + opts.hysteresis ? 1 : 0; };
  // Side of each tracked value; 0 while a branch has only been seen at the level.
  std::vector<std::vector<int>> side(n);
  for (std::size_t i = 0; i < n; ++i) side[i].assign(tracked[i].size(), 0);

  ChiralModeCount result;
  if (n < 2) return result;
  // The first lap settles every branch's side; the second lap counts.
  for (int lap = 0; lap < 2; ++lap)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const auto& a = tracked[i];
      const auto& b = tracked[j];
      std::vector<int> next(b.size(), 0);
      std::vector<char> matched(b.size(), 0);
      for (const auto& [p, q] : align(a, b, gap)) {
        matched[q] = 1;
        const int prev = side[i][p];
        const int s = side_of(b[q]);
        if (s == 0) {
          next[q] = prev;
          continue;
        }
        if (lap == 1 && prev != 0 && prev != s) {
          const double jump = std::abs(a[p] - b[q]);
          result.crossing_signs.push_back(s);
          result.crossing_momenta.push_back(series.points[j].k);
          result.largest_crossing_jump = std::max(result.largest_crossing_jump, jump);
          if (jump > gap)
            throw TrackingAmbiguous("crossing at ky=" + std::to_string(series.points[j].k) +
                                    " needs a jump of " + std::to_string(jump));
        }
        next[q] = s;
      }
      for (std::size_t q = 0; q < b.size(); ++q)
        if (!matched[q]) next[q] = side_of(b[q]);
      side[j] = std::move(next);
    }
  for (int s : result.crossing_signs) result.net_crossings += s;
  result.total_crossings = static_cast<int>(result.crossing_signs.size());
  return result;
}

ChiralModeCount count_chiral_modes_refined(const std::function<SpectrumSeries(int)>& compute, int ky_samples,
                                           const ChiralCountOptions& opts, int max_refinements) {
  for (int r = 0;; ++r) {
    try {
      return count_chiral_modes(compute(ky_samples), opts);
    } catch (const TrackingAmbiguous&) {
      if (r >= max_refinements) throw;
      ky_samples *= 2;
    }
  }
}

EndResolvedCount count_chiral_modes_by_end(const SpectrumSeries& series, const ChiralCountOptions& opts) {
  if (!series.tagged()) throw ConfigError("end-resolved counting needs a tagged spectrum");
  const auto restrict = [&](bool begin) {
    ChiralCountOptions o = opts;
    o.filter = [begin, outer = opts.filter](const SpectrumPoint& pt, std::size_t c) {
      const auto& w = pt.weights[c];
      return (begin ? w.begin_quarter : w.end_quarter) > 0.5 &&
             (!outer || outer(pt, c));
    };
    return o;
  };
  return {count_chiral_modes(series, restrict(true)), count_chiral_modes(series, restrict(false))};
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

EdgeBandReport edge_report(const SpectrumSeries& series, EdgeTag edge, const CutSpec& cut, int nx,
                           const ChiralCountOptions& opts) {
  EdgeBandReport rep;
  rep.edge = edge;
  ChiralCountOptions o = opts;
  o.tag = edge;
  rep.flow = count_chiral_modes(series, o);

  const bool at_begin = cut.begin_edge(nx) == edge;
  const bool at_end = cut.end_edge(nx) == edge;
  std::vector<double> depth;
  std::vector<double> quarter;
  for (const auto& pt : series.points)
    for (std::size_t c = 0; c < pt.edge_tag.size(); ++c) {
      if (pt.edge_tag[c] != edge || std::abs(pt.values(static_cast<Eigen::Index>(c)) - opts.level) >= opts.window)
        continue;
      const auto& w = pt.weights[c];
      // On a torus both ends are virtual; use the end the state sits on.
      const bool begin_side = at_begin && (!at_end || w.begin_quarter >= w.end_quarter);
      depth.push_back(begin_side ? w.begin_depth : w.end_depth);
      quarter.push_back(begin_side ? w.begin_quarter : w.end_quarter);
    }
  rep.states = static_cast<int>(depth.size());
  if (!depth.empty()) {
    rep.median_depth_weight = median(depth);
    rep.min_depth_weight = *std::min_element(depth.begin(), depth.end());
    rep.median_quarter_weight = median(quarter);
    rep.min_quarter_weight = *std::min_element(quarter.begin(), quarter.end());
  }
  return rep;
}

}  // namespace

AnomalyReport real_edge_anomaly_detect(const SpectrumSeries& series, const CutSpec& cut, int nx,
                                       const ChiralCountOptions& opts) {
  if (!series.tagged()) throw ConfigError("anomaly detection needs a tagged spectrum");
  AnomalyReport rep;
  rep.real = edge_report(series, EdgeTag::Real, cut, nx, opts);
  rep.virtual_edge = edge_report(series, EdgeTag::Virtual, cut, nx, opts);
  rep.real_edge_state_present = rep.real.states > 0;
  return rep;
}

}  // namespace oee
