#pragma once

#include <string_view>
#include <vector>

namespace oee {

struct EmbeddedPreset {
  std::string_view name;
  std::string_view text;
};

/// Preset documents compiled in from presets/*.json, sorted by name.
const std::vector<EmbeddedPreset>& embedded_presets();

}  // namespace oee
