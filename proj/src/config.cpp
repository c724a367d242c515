#include "oee/config.hpp"

#include "presets.hpp"

#include <fstream>
#include <set>

namespace oee {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

std::vector<FourierVector::Term> parse_terms(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where + " must be an array of terms");
  std::vector<FourierVector::Term> out;
  for (const auto& t : arr) {
    check_keys(t, {"dx", "dy", "re", "im"}, where);
    FourierVector::Term term;
    term.dx = get(t, "dx", 0, where);
    term.dy = get(t, "dy", 0, where);
    const auto re = get(t, "re", std::vector<double>{0, 0, 0}, where);
    const auto im = get(t, "im", std::vector<double>{0, 0, 0}, where);
    if (re.size() != 3 || im.size() != 3) throw ConfigError(where + ": 're' and 'im' need three components");
    for (int i = 0; i < 3; ++i) term.coeff(i) = cplx(re[i], im[i]);
    out.push_back(term);
  }
  return out;
}

json terms_to_json(const FourierVector& f) {
  json arr = json::array();
  for (const auto& t : f.terms)
    arr.push_back({{"dx", t.dx},
                   {"dy", t.dy},
                   {"re", {t.coeff(0).real(), t.coeff(1).real(), t.coeff(2).real()}},
                   {"im", {t.coeff(0).imag(), t.coeff(1).imag(), t.coeff(2).imag()}}});
  return arr;
}

std::vector<double> parse_range(const json& doc, const std::string& where) {
  if (doc.is_array()) {
    try {
      return doc.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError(where + " must be a list of numbers");
    }
  }
  check_keys(doc, {"min", "max", "steps"}, where);
  const double lo = get(doc, "min", 0.0, where);
  const double hi = get(doc, "max", 0.0, where);
  const int steps = get(doc, "steps", 0, where);
  if (steps < 1) throw ConfigError(where + ".steps must be positive");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  return out;
}

}  // namespace

ModelSpec parse_model(const json& doc) {
  const std::string where = "model";
  check_keys(doc, {"normal_state", "h0", "d0", "pairing", "delta0", "hprime"}, where);
  ModelSpec spec;
  if (doc.contains("normal_state")) {
    const auto& ns = doc.at("normal_state");
    const std::string type = get(ns, "type", std::string("qwz"), "model.normal_state");
    if (type == "qwz") {
      check_keys(ns, {"type", "mu", "t", "beta"}, "model.normal_state");
      Qwz q;
      q.mu = get(ns, "mu", q.mu, where);
      q.t = get(ns, "t", q.t, where);
      q.beta = get(ns, "beta", q.beta, where);
      spec.normal_state = q;
    } else if (type == "sticlet") {
      check_keys(ns, {"type", "alpha", "t"}, "model.normal_state");
      Sticlet s;
      s.alpha = get(ns, "alpha", s.alpha, where);
      s.t = get(ns, "t", s.t, where);
      spec.normal_state = s;
    } else if (type == "fourier") {
      check_keys(ns, {"type", "terms"}, "model.normal_state");
      spec.normal_state = FourierVector{parse_terms(ns.value("terms", json::array()), "model.normal_state.terms")};
    } else {
      throw ConfigError("unknown normal_state type '" + type + "'");
    }
  }
  spec.h0 = get(doc, "h0", 0.0, where);
  spec.d0 = get(doc, "d0", 0.0, where);
  spec.delta0 = get(doc, "delta0", 0.0, where);
  spec.hprime_enabled = get(doc, "hprime", false, where);
  if (doc.contains("pairing")) {
    const auto& p = doc.at("pairing");
    const std::string type = get(p, "type", std::string("zero"), "model.pairing");
    if (type == "zero") {
      check_keys(p, {"type"}, "model.pairing");
      spec.d_vector.kind = PairingKind::Zero;
    } else if (type == "h") {
      check_keys(p, {"type"}, "model.pairing");
      spec.d_vector.kind = PairingKind::EqualToH;
    } else if (type == "custom") {
      check_keys(p, {"type", "terms"}, "model.pairing");
      spec.d_vector.kind = PairingKind::Custom;
      spec.d_vector.custom = FourierVector{parse_terms(p.value("terms", json::array()), "model.pairing.terms")};
    } else {
      throw ConfigError("unknown pairing type '" + type + "'");
    }
  }
  spec.validate();
  return spec;
}

json to_json(const ModelSpec& spec) {
  json ns = std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Qwz>) {
          return {{"type", "qwz"}, {"mu", n.mu}, {"t", n.t}, {"beta", n.beta}};
        } else if constexpr (std::is_same_v<T, Sticlet>) {
          return {{"type", "sticlet"}, {"alpha", n.alpha}, {"t", n.t}};
        } else {
          return {{"type", "fourier"}, {"terms", terms_to_json(n)}};
        }
      },
      spec.normal_state);
  json pairing;
  switch (spec.d_vector.kind) {
    case PairingKind::Zero: pairing = {{"type", "zero"}}; break;
    case PairingKind::EqualToH: pairing = {{"type", "h"}}; break;
    case PairingKind::Custom: pairing = {{"type", "custom"}, {"terms", terms_to_json(spec.d_vector.custom)}}; break;
  }
  return {{"normal_state", ns}, {"h0", spec.h0},         {"d0", spec.d0},
          {"pairing", pairing}, {"delta0", spec.delta0}, {"hprime", spec.hprime_enabled}};
}

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  if (models.empty()) throw ConfigError("config needs a model");
  std::set<std::string> labels;
  for (const auto& m : models) {
    if (m.label.empty() || m.label.find_first_of("/\\. ") != std::string::npos)
      throw ConfigError("model labels must be nonempty and free of path characters");
    if (!labels.insert(m.label).second) throw ConfigError("duplicate model label '" + m.label + "'");
  }
  if (geometry.nx < 4) throw ConfigError("geometry.nx must be at least 4");
  if (geometry.ky_samples < 4) throw ConfigError("geometry.ky_samples must be at least 4");
  if (numerics.grid < 4 || numerics.texture_grid < 4) throw ConfigError("BZ grids need at least 4 points");
  if (numerics.filling < 1 || numerics.filling > 3) throw ConfigError("numerics.filling must be 1..3");
  for (double tol : {numerics.gap_tolerance, numerics.singular_tolerance, numerics.quantization_threshold,
                     numerics.degeneracy_tolerance, numerics.type_ii_tolerance})
    if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (numerics.edge_depth < 1) throw ConfigError("numerics.edge_depth must be positive");
  if (numerics.max_refinements < 0) throw ConfigError("numerics.max_refinements must be non-negative");
  if (texture.nx < 2 || texture.ny < 2) throw ConfigError("texture lattice needs at least 2x2 sites");
  static const std::set<std::string> kinds{"slab", "es", "oees", "torus-suite"};
  for (const auto& k : spectra.kinds)
    if (!kinds.count(k)) throw ConfigError("unknown spectrum kind '" + k + "'");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (output_directory.empty()) throw ConfigError("output directory must be nonempty");
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, {"schema_version", "name", "description", "model", "models", "geometry", "numerics", "texture",
                   "spectra", "phasediagram", "output", "threads"},
             "config");
  RunConfig cfg;
  cfg.schema_version = get(doc, "schema_version", 0, "config");
  cfg.name = get(doc, "name", std::string(), "config");
  cfg.threads = get(doc, "threads", 1, "config");

  if (doc.contains("model") && doc.contains("models")) throw ConfigError("give either 'model' or 'models'");
  if (doc.contains("model")) cfg.models.push_back({"main", parse_model(doc.at("model"))});
  if (doc.contains("models")) {
    if (!doc.at("models").is_array()) throw ConfigError("'models' must be an array");
    for (const auto& entry : doc.at("models")) {
      check_keys(entry, {"label", "model"}, "models[]");
      cfg.models.push_back({get(entry, "label", std::string(), "models[]"), parse_model(entry.value("model", json::object()))});
    }
  }

  if (doc.contains("geometry")) {
    const auto& g = doc.at("geometry");
    check_keys(g, {"nx", "ny", "ky_samples", "cut_begin", "cut_end"}, "geometry");
    auto& geo = cfg.geometry;
    geo.nx = get(g, "nx", geo.nx, "geometry");
    geo.ny = get(g, "ny", geo.ny, "geometry");
    geo.ky_samples = get(g, "ky_samples", geo.ky_samples, "geometry");
    geo.cut_begin = get(g, "cut_begin", geo.cut_begin, "geometry");
    geo.cut_end = get(g, "cut_end", geo.cut_end, "geometry");
  }
  if (doc.contains("numerics")) {
    const auto& n = doc.at("numerics");
    check_keys(n, {"grid", "texture_grid", "filling", "gap_tolerance", "singular_tolerance", "quantization_threshold",
                   "degeneracy_tolerance", "type_ii_tolerance", "edge_depth", "max_refinements", "oees_diagonal"},
               "numerics");
    auto& num = cfg.numerics;
    num.grid = get(n, "grid", num.grid, "numerics");
    num.texture_grid = get(n, "texture_grid", num.texture_grid, "numerics");
    num.filling = get(n, "filling", num.filling, "numerics");
    num.gap_tolerance = get(n, "gap_tolerance", num.gap_tolerance, "numerics");
    num.singular_tolerance = get(n, "singular_tolerance", num.singular_tolerance, "numerics");
    num.quantization_threshold = get(n, "quantization_threshold", num.quantization_threshold, "numerics");
    num.degeneracy_tolerance = get(n, "degeneracy_tolerance", num.degeneracy_tolerance, "numerics");
    num.type_ii_tolerance = get(n, "type_ii_tolerance", num.type_ii_tolerance, "numerics");
    num.edge_depth = get(n, "edge_depth", num.edge_depth, "numerics");
    num.max_refinements = get(n, "max_refinements", num.max_refinements, "numerics");
    const std::string diag = get(n, "oees_diagonal", std::string("projector"), "numerics");
    if (diag == "projector") num.oees_diagonal = OeesDiagonal::Projector;
    else if (diag == "unit") num.oees_diagonal = OeesDiagonal::UnitSite;
    else throw ConfigError("numerics.oees_diagonal must be 'projector' or 'unit'");
  }
  if (doc.contains("texture")) {
    const auto& t = doc.at("texture");
    check_keys(t, {"bulk", "realspace", "nx", "ny"}, "texture");
    auto& tex = cfg.texture;
    tex.bulk = get(t, "bulk", tex.bulk, "texture");
    tex.realspace = get(t, "realspace", tex.realspace, "texture");
    tex.nx = get(t, "nx", tex.nx, "texture");
    tex.ny = get(t, "ny", tex.ny, "texture");
  }
  if (doc.contains("spectra")) {
    const auto& s = doc.at("spectra");
    check_keys(s, {"kinds"}, "spectra");
    cfg.spectra.kinds = get(s, "kinds", cfg.spectra.kinds, "spectra");
  }
  if (doc.contains("phasediagram")) {
    const auto& p = doc.at("phasediagram");
    check_keys(p, {"mu", "delta0"}, "phasediagram");
    if (p.contains("mu")) cfg.phasediagram.mu_values = parse_range(p.at("mu"), "phasediagram.mu");
    if (p.contains("delta0")) cfg.phasediagram.delta0_values = parse_range(p.at("delta0"), "phasediagram.delta0");
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    check_keys(o, {"directory"}, "output");
    cfg.output_directory = get(o, "directory", cfg.output_directory, "output");
  }
  cfg.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json models = json::array();
  for (const auto& m : cfg.models) models.push_back({{"label", m.label}, {"model", to_json(m.spec)}});
  const auto& g = cfg.geometry;
  const auto& n = cfg.numerics;
  return {{"schema_version", cfg.schema_version},
          {"name", cfg.name},
          {"models", models},
          {"geometry",
           {{"nx", g.nx}, {"ny", g.ny}, {"ky_samples", g.ky_samples}, {"cut_begin", g.cut_begin}, {"cut_end", g.cut_end}}},
          {"numerics",
           {{"grid", n.grid},
            {"texture_grid", n.texture_grid},
            {"filling", n.filling},
            {"gap_tolerance", n.gap_tolerance},
            {"singular_tolerance", n.singular_tolerance},
            {"quantization_threshold", n.quantization_threshold},
            {"degeneracy_tolerance", n.degeneracy_tolerance},
            {"type_ii_tolerance", n.type_ii_tolerance},
            {"edge_depth", n.edge_depth},
            {"max_refinements", n.max_refinements},
            {"oees_diagonal", n.oees_diagonal == OeesDiagonal::Projector ? "projector" : "unit"}}},
          {"texture",
           {{"bulk", cfg.texture.bulk}, {"realspace", cfg.texture.realspace}, {"nx", cfg.texture.nx}, {"ny", cfg.texture.ny}}},
          {"spectra", {{"kinds", cfg.spectra.kinds}}},
          {"phasediagram", {{"mu", cfg.phasediagram.mu_values}, {"delta0", cfg.phasediagram.delta0_values}}},
          {"output", {{"directory", cfg.output_directory}}},
          {"threads", cfg.threads}};
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : embedded_presets()) names.emplace_back(p.name);
  return names;
}

json preset_document(const std::string& name) {
  for (const auto& p : embedded_presets())
    if (p.name == name) return json::parse(p.text);
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace oee
