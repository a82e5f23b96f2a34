// Command-line experiment runner. Links the C API only.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "edgeprov/edgeprov.h"

namespace {

int fail(const char* what) {
  std::fprintf(stderr, "edgeprov: %s: %s\n", what, edgeprov_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency-aware edge resource provisioning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string policy;
  std::string load_semantics;
  double v = -1.0;
  long long seed = -1;
  long long slots = -1;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a configuration or sweep");
  run_cmd->add_option("--config", config_path, "JSON experiment configuration");
  run_cmd->add_option("--seed", seed, "Override the seed list with a single seed");
  run_cmd->add_option("--out", out_dir, "Output directory for CSV files");
  run_cmd->add_option("--policy", policy,
                      "Provisioning policy: lrr, lyapunov-only, every-slot, greedy-match");
  run_cmd->add_option("--v", v, "Tradeoff parameter V");
  run_cmd->add_option("--slots", slots, "Number of slots to simulate");
  run_cmd->add_option("--load-semantics", load_semantics,
                      "Reallocation load measure: consumed or paper-verbatim");

  CLI::App* presets_cmd = app.add_subcommand("presets", "List the named device presets");

  CLI11_PARSE(app, argc, argv);

  if (presets_cmd->parsed()) {
    const int count = edgeprov_preset_count();
    for (int i = 0; i < count; ++i) {
      const char* name = edgeprov_preset_name(i);
      char* description = nullptr;
      if (edgeprov_preset_describe(name, &description) != EDGEPROV_OK) {
        return fail("describe preset");
      }
      std::printf("%s\n", description);
      edgeprov_string_free(description);
    }
    return 0;
  }

  edgeprov_spec* spec = nullptr;
  if (config_path.empty()) {
    if (edgeprov_spec_create(&spec) != EDGEPROV_OK) return fail("default config");
  } else {
    if (edgeprov_spec_load(config_path.c_str(), &spec) != EDGEPROV_OK) {
      return fail("load config");
    }
  }

  auto set = [&spec](const char* key, const std::string& value) {
    if (edgeprov_spec_set(spec, key, value.c_str()) != EDGEPROV_OK) {
      std::fprintf(stderr, "edgeprov: --%s: %s\n", key, edgeprov_last_error());
      edgeprov_spec_free(spec);
      return false;
    }
    return true;
  };

  if (seed >= 0 && !set("seed", std::to_string(seed))) return 1;
  if (!out_dir.empty() && !set("output_dir", out_dir)) return 1;
  if (!policy.empty() && !set("policy", policy)) return 1;
  if (v >= 0.0 && !set("V", std::to_string(v))) return 1;
  if (slots >= 0 && !set("slots", std::to_string(slots))) return 1;
  if (!load_semantics.empty() && !set("load_semantics", load_semantics)) return 1;

  int runs = 0;
  const edgeprov_status status = edgeprov_run_experiments(spec, /*print_table=*/1, &runs);
  edgeprov_spec_free(spec);
  if (status != EDGEPROV_OK) return fail("run");
  std::printf("%d run(s) complete\n", runs);
  return 0;
}
