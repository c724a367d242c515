#include "oee/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitNumerical = 2;
constexpr int kExitConfig = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbital-enriched entanglement of spin-triplet superconductors"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string preset;
  std::string config;
  oee::Overrides overrides;
  bool list_presets = false;
  app.add_option("--preset", preset, "Bundled preset name");
  app.add_option("--config", config, "JSON config file, merged over the preset");
  app.add_option("--out", overrides.output_directory, "Output directory");
  app.add_option("--threads", overrides.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--grid", overrides.grid, "Brillouin-zone grid size")->check(CLI::Range(4, 1 << 14));
  app.add_flag("--list-presets", list_presets, "Print bundled preset names and exit");

  std::vector<std::string> kinds;
  auto* texture = app.add_subcommand("texture", "Bulk and real-space spin textures");
  auto* invariants = app.add_subcommand("invariants", "Chern and skyrmion numbers");
  auto* spectra = app.add_subcommand("spectra", "Slab, entanglement and enriched spectra");
  spectra->add_option("--kind", kinds, "slab, es, oees or torus-suite (repeatable)");
  auto* phase = app.add_subcommand("phasediagram", "Invariants versus mu/t and delta0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitConfig;
  }

  if (list_presets) {
    for (const auto& n : oee::preset_names()) std::cout << n << '\n';
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  std::string command;
  try {
    const auto cfg = oee::resolve_config(preset, config, overrides);
    oee::CommandResult result;
    if (texture->parsed()) {
      command = "texture";
      result = oee::cmd_texture(cfg);
    } else if (invariants->parsed()) {
      command = "invariants";
      result = oee::cmd_invariants(cfg);
    } else if (spectra->parsed()) {
      command = "spectra";
      result = oee::cmd_spectra(cfg, kinds);
    } else if (phase->parsed()) {
      command = "phasediagram";
      result = oee::cmd_phasediagram(cfg);
    }
    const auto manifest = oee::write_manifest(cfg, command, result);
    std::cout << result.summary.dump(2) << '\n' << "manifest: " << manifest.string() << '\n';
    return 0;
  } catch (const oee::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const oee::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
