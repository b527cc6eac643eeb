// Command-line front end for the coarcta pipeline. Talks to the shared
// library exclusively through the C API in coarcta.h.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coarcta.h"

namespace {

struct Options {
  std::string config_path;
  std::string seed;
  std::string out;
  std::string models;
  std::string bc_mode;
  std::string input;
};

int fail_with(coa_status status) {
  std::fprintf(stderr, "error: %s\n", coa_last_error());
  switch (status) {
    case COA_ERR_CONFIG: return 1;
    case COA_ERR_DATA: return 2;
    case COA_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

int run(const std::string& command, const Options& options) {
  coa_config* config = nullptr;
  coa_status status = options.config_path.empty()
                          ? coa_config_create(&config)
                          : coa_config_load(options.config_path.c_str(),
                                            &config);
  if (status != COA_OK) return fail_with(status);

  const std::vector<std::pair<const char*, const std::string*>> overrides = {
      {"split_seed", &options.seed},
      {"output_dir", &options.out},
      {"models", &options.models},
      {"bc_mode", &options.bc_mode},
      {"input_dir", &options.input},
  };
  for (const auto& [key, value] : overrides) {
    if (value->empty()) continue;
    status = coa_config_set(config, key, value->c_str());
    if (status != COA_OK) {
      coa_config_free(config);
      return fail_with(status);
    }
  }

  status = coa_run_command(config, command.c_str());
  coa_config_free(config);
  return status == COA_OK ? 0 : fail_with(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "coarcta: heart-rate-consistent boundary conditions for coarctation "
      "flow modelling from Doppler echo velocity traces"};
  app.set_version_flag("--version", std::string(coa_version()));

  Options options;
  app.add_option("-c,--config", options.config_path,
                 "Pipeline config file (key = value lines)");
  app.add_option("--seed", options.seed, "Override split_seed");
  app.add_option("--out", options.out, "Override output_dir");
  app.add_option("--in", options.input, "Override input_dir");
  app.add_option("--models", options.models,
                 "Override the model roster (comma-separated names)");
  app.add_option("--bc-mode", options.bc_mode,
                 "BC export mode: snapshot or transient");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "Generate a synthetic Doppler trace corpus"},
      {"ingest", "Parse, clean, and resample traces into the dataset CSV"},
      {"train", "Fit the model roster (grid search + final refit)"},
      {"evaluate", "Write the per-model test RMSE table"},
      {"bcgen", "Generate and export boundary-condition files"},
      {"oracle", "Evaluate BC sets with the reduced-order flow check"},
      {"report", "Write per-vessel BC values, deviation stats, and the SVG"},
  };
  std::string chosen;
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->fallthrough();
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  return run(chosen, options);
}
