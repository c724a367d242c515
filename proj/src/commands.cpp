#include "oee/commands.hpp"

#include "oee/csv.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace oee {

using nlohmann::json;
namespace fs = std::filesystem;

RunConfig resolve_config(const std::string& preset, const std::string& config_path, const Overrides& overrides) {
  if (preset.empty() && config_path.empty()) throw ConfigError("give --preset or --config");
  json doc = preset.empty() ? json::object() : preset_document(preset);
  if (!config_path.empty()) doc.merge_patch(load_json_file(config_path));
  RunConfig cfg = parse_config(doc);
  if (!overrides.output_directory.empty()) cfg.output_directory = overrides.output_directory;
  if (overrides.threads > 0) cfg.threads = overrides.threads;
  if (overrides.grid > 0) {
    cfg.numerics.grid = overrides.grid;
    cfg.numerics.texture_grid = overrides.grid;
  }
  cfg.validate();
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Doubles in reports go through the same shortest round-trip formatting as CSVs.
json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

class OutputDir {
 public:
  explicit OutputDir(const RunConfig& cfg) : root_(cfg.output_directory) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  std::string prefix(const RunConfig& cfg, const LabelledModel& m) const {
    return cfg.models.size() == 1 ? std::string() : m.label + "_";
  }

  void csv(CommandResult& result, const std::string& name, const csv::Table& table) const {
    std::ofstream out(root_ / name, std::ios::binary);
    csv::write(out, table);
    finish(result, out, name);
  }

  void json_file(CommandResult& result, const std::string& name, const json& doc) const {
    std::ofstream out(root_ / name, std::ios::binary);
    out << doc.dump(2) << '\n';
    finish(result, out, name);
  }

  const fs::path& root() const { return root_; }

 private:
  void finish(CommandResult& result, std::ofstream& out, const std::string& name) const {
    out.close();
    if (!out) throw Error("failed to write '" + (root_ / name).string() + "'");
    result.files.push_back(root_ / name);
  }

  fs::path root_;
};

json invariant_json(const InvariantResult& r) {
  return {{"value", r.value}, {"raw", number(r.raw)}, {"residual", number(r.residual)},
          {"grid", {r.grid.nx, r.grid.ny}}};
}

json count_json(const ChiralModeCount& c) {
  json momenta = json::array();
  for (double k : c.crossing_momenta) momenta.push_back(number(k));
  return {{"net_crossings", c.net_crossings},
          {"total_crossings", c.total_crossings},
          {"crossing_momenta", momenta},
          {"crossing_signs", c.crossing_signs},
          {"largest_crossing_jump", number(c.largest_crossing_jump)}};
}

json ends_json(const EndResolvedCount& c) {
  return {{"net_crossings", c.net()}, {"total_crossings", c.total()},
          {"begin", count_json(c.begin)}, {"end", count_json(c.end)}};
}

json edge_json(const EdgeBandReport& e) {
  return {{"edge", to_string(e.edge)},
          {"states", e.states},
          {"flow", count_json(e.flow)},
          {"median_depth_weight", number(e.median_depth_weight)},
          {"min_depth_weight", number(e.min_depth_weight)},
          {"median_quarter_weight", number(e.median_quarter_weight)},
          {"min_quarter_weight", number(e.min_quarter_weight)}};
}

double min_bulk_gap(const ModelSpec& spec, int filling, int n = 64) {
  const BZGrid grid(n);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::SelfAdjointEigenSolver<Mat4c> es(assemble_bdg(spec, grid.at(i, j)), Eigen::EigenvaluesOnly);
      gap = std::min(gap, es.eigenvalues()(filling) - es.eigenvalues()(filling - 1));
    }
  return gap;
}

EntanglementOptions entanglement_options(const RunConfig& cfg) {
  EntanglementOptions o;
  o.threads = cfg.threads;
  o.edge_depth = cfg.numerics.edge_depth;
  o.degeneracy_tolerance = cfg.numerics.degeneracy_tolerance;
  o.diagonal = cfg.numerics.oees_diagonal;
  return o;
}

CutSpec cut_for(const RunConfig& cfg, CutGeometry geometry) {
  CutSpec cut = CutSpec::standard(geometry, cfg.geometry.nx);
  if (cfg.geometry.cut_begin >= 0) cut.begin = cfg.geometry.cut_begin;
  if (cfg.geometry.cut_end >= 0) cut.end = cfg.geometry.cut_end;
  cut.validate(cfg.geometry.nx);
  return cut;
}

// Recomputes with doubled ky sampling while any count is ambiguous.
template <typename Compute, typename Count>
auto with_refinement(const RunConfig& cfg, Compute compute, Count count) {
  int samples = cfg.geometry.ky_samples;
  for (int r = 0;; ++r) {
    auto data = compute(samples);
    try {
      auto summary = count(data);
      return std::make_tuple(std::move(data), std::move(summary), samples);
    } catch (const TrackingAmbiguous&) {
      if (r >= cfg.numerics.max_refinements) throw;
      samples *= 2;
    }
  }
}

}  // namespace

CommandResult cmd_texture(const RunConfig& cfg) {
  OutputDir out(cfg);
  CommandResult result;
  for (const auto& m : cfg.models) {
    const std::string p = out.prefix(cfg, m);
    json report;
    if (cfg.texture.bulk) {
      const BZGrid grid(cfg.numerics.texture_grid);
      TextureOptions opts;
      opts.filling = cfg.numerics.filling;
      opts.normalize = false;
      opts.threads = cfg.threads;
      opts.projector.gap_tolerance = cfg.numerics.gap_tolerance;
      opts.path = TexturePath::FullGroundState;
      const auto full = bulk_texture(m.spec, grid, opts);
      opts.path = TexturePath::RotatedTrace;
      const auto reduced = bulk_texture(m.spec, grid, opts);
      double diff = 0.0;
      for (std::size_t i = 0; i < full.vectors.size(); ++i)
        diff = std::max(diff, (full.vectors[i] - reduced.vectors[i]).cwiseAbs().maxCoeff());
      out.csv(result, p + "texture_full.csv", csv::texture_table(full));
      out.csv(result, p + "texture_oept.csv", csv::texture_table(reduced));
      report["bulk"] = {{"grid", {grid.nx, grid.ny}},
                        {"max_abs_difference", number(diff)},
                        {"min_spin_norm", number(full.min_norm())},
                        {"equal_within_1e-12", diff < 1e-12}};
    }
    if (cfg.texture.realspace) {
      const auto tex = realspace_texture(m.spec, cfg.texture.nx, cfg.texture.ny);
      out.csv(result, p + "realspace_texture.csv", csv::realspace_texture_table(tex));
      double in_plane = 0.0;
      double boundary_sz = 0.0;
      int boundary_sites = 0;
      for (int x = 0; x < tex.nx; ++x)
        for (int y = 0; y < tex.ny; ++y) {
          in_plane = std::max(in_plane, tex.at(x, y).head<2>().norm());
          if (x == 0 || y == 0 || x == tex.nx - 1 || y == tex.ny - 1) {
            boundary_sz += tex.at(x, y)(2);
            ++boundary_sites;
          }
        }
      json winding;
      try {
        winding = boundary_winding(tex);
      } catch (const NumericalError& e) {
        winding = std::string("undefined: ") + e.what();
      }
      report["realspace"] = {{"lattice", {tex.nx, tex.ny}},
                             {"boundary_circulation", number(boundary_circulation(tex))},
                             {"boundary_winding", winding},
                             {"max_in_plane_magnitude", number(in_plane)},
                             {"mean_boundary_sz", number(boundary_sz / boundary_sites)},
                             {"centre_sz", number(tex.at(tex.nx / 2, tex.ny / 2)(2))}};
    }
    out.json_file(result, p + "texture_report.json", report);
    result.summary[m.label] = report;
  }
  return result;
}

CommandResult cmd_invariants(const RunConfig& cfg) {
  OutputDir out(cfg);
  CommandResult result;
  std::string failures;
  for (const auto& m : cfg.models) {
    const BZGrid grid(cfg.numerics.grid);
    const auto chern = chern_number(m.spec, grid, cfg.numerics.filling, cfg.threads);
    const auto sky = model_skyrmion_number(m.spec, grid, cfg.numerics.filling, cfg.threads);
    json report = {{"chern", chern.value},
                   {"skyrmion", sky.value},
                   {"chern_detail", invariant_json(chern)},
                   {"skyrmion_detail", invariant_json(sky)},
                   {"grid", {grid.nx, grid.ny}},
                   {"model", to_json(m.spec)}};
    json checks;
    try {
      const auto ac = analytic_chern(m.spec, grid);
      const auto as = analytic_skyrmion(m.spec, grid);
      checks["analytic_chern"] = invariant_json(ac);
      checks["analytic_skyrmion"] = invariant_json(as);
      checks["chern_matches_analytic"] = ac.value == chern.value;
      checks["skyrmion_matches_analytic"] = as.value == sky.value;
      checks["chern_equals_minus_two_skyrmion"] = chern.value == -2 * sky.value;
    } catch (const BlockDecompositionUnavailable& e) {
      checks["analytic"] = std::string("unavailable: ") + e.what();
    }
    report["cross_checks"] = checks;
    const double threshold = cfg.numerics.quantization_threshold;
    report["quantized"] = chern.quantized(threshold) && sky.quantized(threshold);
    out.json_file(result, out.prefix(cfg, m) + "invariants.json", report);
    result.summary[m.label] = report;
    if (!report["quantized"].get<bool>())
      failures += m.label + ": residuals " + std::to_string(chern.residual) + ", " + std::to_string(sky.residual) + "; ";
  }
  if (!failures.empty()) throw CheckFailed("invariants not quantized: " + failures);
  return result;
}

CommandResult cmd_spectra(const RunConfig& cfg, const std::vector<std::string>& kinds_in) {
  const auto& kinds = kinds_in.empty() ? cfg.spectra.kinds : kinds_in;
  const auto wants = [&](const char* k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  for (const auto& k : kinds)
    if (k != "slab" && k != "es" && k != "oees" && k != "torus-suite") throw ConfigError("unknown spectrum kind '" + k + "'");

  OutputDir out(cfg);
  CommandResult result;
  const int nx = cfg.geometry.nx;
  const auto eopts = entanglement_options(cfg);
  const auto plain_opts = ChiralCountOptions::plain();
  const auto enriched_opts = ChiralCountOptions::enriched(cfg.numerics.oees_diagonal);

  for (const auto& m : cfg.models) {
    const std::string p = out.prefix(cfg, m);
    json summary;

    if (wants("slab")) {
      const double gap = min_bulk_gap(m.spec, cfg.numerics.filling);
      ChiralCountOptions o;
      o.level = 0.0;
      o.window = 0.45 * gap;
      const auto on_begin = [](const SpectrumPoint& pt, std::size_t c) { return pt.weights[c].begin_quarter > 0.5; };
      const auto on_end = [](const SpectrumPoint& pt, std::size_t c) { return pt.weights[c].end_quarter > 0.5; };
      auto [series, counts, samples] = with_refinement(
          cfg,
          [&](int n) {
            return slab_spectrum(m.spec, nx, n, Boundary::Open, cfg.threads, true, cfg.numerics.edge_depth);
          },
          [&](const SpectrumSeries& s) {
            ChiralCountOptions lo = o, hi = o;
            lo.filter = on_begin;
            hi.filter = on_end;
            return std::make_pair(count_chiral_modes(s, lo), count_chiral_modes(s, hi));
          });
      out.csv(result, p + "slab_spectrum.csv", csv::spectrum_table(series));

      // In-gap states closest to zero energy at ky = -pi/2 and +pi/2.
      const auto hop = extract_hoppings(m.spec, model_range(m.spec));
      for (const auto& [tag, ky] : {std::pair{"kym", -pi / 2}, std::pair{"kyp", pi / 2}}) {
        const auto slab = build_slab(hop, ky, nx, Boundary::Open);
        Eigen::SelfAdjointEigenSolver<MatXc> es(slab.matrix, Eigen::EigenvaluesOnly);
        Eigen::Index idx = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&idx);
        out.csv(result, p + "localization_" + tag + ".csv",
                csv::localization_table(localization_profile(slab, static_cast<int>(idx))));
      }
      summary["slab"] = {{"ky_samples", samples},
                         {"bulk_gap", number(gap)},
                         {"level", 0.0},
                         {"window", number(o.window)},
                         {"low_edge", count_json(counts.first)},
                         {"high_edge", count_json(counts.second)}};
    }

    if (wants("es") || wants("oees")) {
      const CutSpec cut = cut_for(cfg, CutGeometry::Cylinder);
      auto [res, counts, samples] = with_refinement(
          cfg, [&](int n) { return entanglement_spectra(m.spec, nx, n, cut, eopts); },
          [&](const EntanglementResult& r) {
            json s;
            if (wants("es")) {
              s["es"] = count_json(count_chiral_modes(r.plain, plain_opts));
              const auto rep = real_edge_anomaly_detect(r.plain, cut, nx, plain_opts);
              s["es"]["virtual_edge"] = edge_json(rep.virtual_edge);
              s["es"]["real_edge"] = edge_json(rep.real);
            }
            if (wants("oees")) {
              s["oees"] = count_json(count_chiral_modes(r.enriched, enriched_opts));
              const auto rep = real_edge_anomaly_detect(r.enriched, cut, nx, enriched_opts);
              s["oees"]["virtual_edge"] = edge_json(rep.virtual_edge);
              s["oees"]["real_edge"] = edge_json(rep.real);
              s["oees"]["real_edge_state_present"] = rep.real_edge_state_present;
              s["oees"]["level"] = enriched_opts.level;
            }
            return s;
          });
      if (wants("es")) out.csv(result, p + "es.csv", csv::entanglement_table(res.plain));
      if (wants("oees")) out.csv(result, p + "oees.csv", csv::entanglement_table(res.enriched));
      for (auto& [k, v] : counts.items()) {
        v["ky_samples"] = samples;
        v["cut"] = {cut.begin, cut.resolved_end(nx)};
        summary[k] = v;
      }
    }

    if (wants("torus-suite")) {
      const CutSpec cut = cut_for(cfg, CutGeometry::Torus);
      auto [suite, counts, samples] = with_refinement(
          cfg, [&](int n) { return torus_suite(m.spec, nx, n, cut, eopts); },
          [&](const TorusSuite& t) {
            double purity = 0.0;
            for (const auto& pt : t.full.points)
              for (Eigen::Index i = 0; i < pt.values.size(); ++i)
                purity = std::max(purity, std::min(std::abs(pt.values(i)), std::abs(pt.values(i) - 1.0)));
            return json{{"a_full", {{"max_distance_from_0_or_1", number(purity)}}},
                        {"b_cut", ends_json(count_chiral_modes_by_end(t.cut, plain_opts))},
                        {"c_enriched_full", count_json(count_chiral_modes(t.enriched_full, enriched_opts))},
                        {"d_enriched_cut", ends_json(count_chiral_modes_by_end(t.enriched_cut, enriched_opts))}};
          });
      out.csv(result, p + "torus_a_full.csv", csv::entanglement_table(suite.full));
      out.csv(result, p + "torus_b_cut.csv", csv::entanglement_table(suite.cut));
      out.csv(result, p + "torus_c_enriched_full.csv", csv::entanglement_table(suite.enriched_full));
      out.csv(result, p + "torus_d_enriched_cut.csv", csv::entanglement_table(suite.enriched_cut));
      counts["ky_samples"] = samples;
      counts["cut"] = {cut.begin, cut.resolved_end(nx)};
      summary["torus_suite"] = counts;
    }

    out.json_file(result, p + "spectra_summary.json", summary);
    result.summary[m.label] = summary;
  }
  return result;
}

CommandResult cmd_phasediagram(const RunConfig& cfg) {
  if (cfg.phasediagram.mu_values.empty() || cfg.phasediagram.delta0_values.empty())
    throw ConfigError("phasediagram needs 'mu' and 'delta0' ranges");
  OutputDir out(cfg);
  CommandResult result;
  for (const auto& m : cfg.models) {
    PhaseDiagramOptions opts;
    opts.grid = BZGrid(cfg.numerics.grid);
    opts.filling = cfg.numerics.filling;
    opts.threads = cfg.threads;
    opts.type_ii_tolerance = cfg.numerics.type_ii_tolerance;
    opts.quantization_threshold = cfg.numerics.quantization_threshold;
    const auto pd = phase_diagram(m.spec, cfg.phasediagram.mu_values, cfg.phasediagram.delta0_values, opts);
    const auto s = summarize(pd);
    const std::string p = out.prefix(cfg, m);
    out.csv(result, p + "phase_diagram.csv", csv::phase_diagram_table(pd));
    json jumps = json::array();
    for (double x : s.skyrmion_jumps_without_gap_closing) jumps.push_back(number(x));
    json singular = json::array();
    for (const auto& [mu, d] : pd.singular_points()) singular.push_back({number(mu), number(d)});
    const json summary = {{"grid", {opts.grid.nx, opts.grid.ny}},
                          {"skyrmion_independent_of_delta0", s.skyrmion_independent_of_delta0},
                          {"chern_regions_narrow", s.chern_regions_narrow},
                          {"chern_equals_minus_two_skyrmion_at_zero_pairing",
                           s.chern_equals_minus_two_skyrmion_at_zero_pairing},
                          {"skyrmion_jumps_without_gap_closing", jumps},
                          {"non_ok_points", singular}};
    out.json_file(result, p + "phase_diagram_summary.json", summary);
    result.summary[m.label] = summary;
  }
  return result;
}

fs::path write_manifest(const RunConfig& cfg, const std::string& command, const CommandResult& result) {
  json outputs = json::array();
  for (const auto& f : result.files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    outputs.push_back({{"file", f.filename().string()}, {"bytes", bytes.size()}, {"fnv1a64", hex(fnv1a64(bytes))}});
  }
  const json config = to_json(cfg);
  char stamp[32];
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  const json manifest = {{"artifact_version", kArtifactVersion},
                         {"command", command},
                         {"config_hash", hex(fnv1a64(config.dump()))},
                         {"config", config},
                         {"created", stamp},
                         {"outputs", outputs}};
  const fs::path path = fs::path(cfg.output_directory) / (command + "_manifest.json");
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed to write manifest");
  return path;
}

}  // namespace oee
