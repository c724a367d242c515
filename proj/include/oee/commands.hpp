#pragma once

#include "oee/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace oee {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Command-line overrides applied on top of a preset or config file.
struct Overrides {
  std::string output_directory;
  int threads = 0;  // 0: keep config value
  int grid = 0;     // 0: keep config value; otherwise sets every BZ grid
};

/// Preset document, then the config file merged over it (RFC 7386), then the
/// overrides. At least one of preset and config path must be given.
RunConfig resolve_config(const std::string& preset, const std::string& config_path, const Overrides& overrides);

/// A quantity failed its quantization or physical check after the report was written.
class CheckFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// Bulk textures from the full ground state and from the OEPT, with an
/// equality report; optionally the open-lattice real-space texture.
CommandResult cmd_texture(const RunConfig& cfg);

/// Chern and skyrmion numbers with method cross-checks. Throws CheckFailed
/// when a residual reaches the quantization threshold.
CommandResult cmd_invariants(const RunConfig& cfg);

/// Slab, entanglement, enriched and torus spectra with crossing summaries.
CommandResult cmd_spectra(const RunConfig& cfg, const std::vector<std::string>& kinds);

/// Chern/skyrmion phase diagram of a QWZ-based model versus mu/t and delta0.
CommandResult cmd_phasediagram(const RunConfig& cfg);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Writes <command>_manifest.json listing every output with its checksum.
std::filesystem::path write_manifest(const RunConfig& cfg, const std::string& command, const CommandResult& result);

}  // namespace oee
