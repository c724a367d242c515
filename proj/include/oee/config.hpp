#pragma once

#include "oee/entanglement.hpp"
#include "oee/topology.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace oee {

inline constexpr int kSchemaVersion = 1;

struct LabelledModel {
  std::string label;
  ModelSpec spec;
};

struct GeometryConfig {
  int nx = 200;
  int ny = 40;              // real-space texture only
  int ky_samples = 201;
  int cut_begin = -1;       // -1: geometry default
  int cut_end = -1;
};

struct NumericsConfig {
  int grid = 256;                 // BZ grid for invariants
  int texture_grid = 101;         // BZ grid for textures
  int filling = 2;
  double gap_tolerance = 1e-10;
  double singular_tolerance = 1e-8;
  double quantization_threshold = 0.01;
  double degeneracy_tolerance = 1e-6;
  double type_ii_tolerance = 1e-6;
  int edge_depth = 10;
  int max_refinements = 4;
  OeesDiagonal oees_diagonal = OeesDiagonal::Projector;
};

struct TextureConfig {
  bool bulk = true;
  bool realspace = false;
  int nx = 40;
  int ny = 40;
};

struct SpectraConfig {
  std::vector<std::string> kinds{"slab", "es", "oees"};  // subset of slab, es, oees, torus-suite
};

struct PhaseDiagramConfig {
  std::vector<double> mu_values;      // mu / t
  std::vector<double> delta0_values;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::vector<LabelledModel> models;
  GeometryConfig geometry;
  NumericsConfig numerics;
  TextureConfig texture;
  SpectraConfig spectra;
  PhaseDiagramConfig phasediagram;
  std::string output_directory = "out";
  int threads = 1;

  /// Throws ConfigError when a value is out of range.
  void validate() const;
};

/// Parses a configuration document; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ModelSpec& spec);
ModelSpec parse_model(const nlohmann::json& doc);

std::vector<std::string> preset_names();
/// The bundled preset document; throws ConfigError for an unknown name.
nlohmann::json preset_document(const std::string& name);

/// Loads a JSON file; parse failures become ConfigError.
nlohmann::json load_json_file(const std::string& path);

}  // namespace oee
