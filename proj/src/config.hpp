#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bc.hpp"
#include "common.hpp"

namespace coarcta {

// Pipeline settings. Key-value text file, one `key = value` per line,
// '#' comments. Unknown keys are rejected by name.
struct PipelineConfig {
  std::string input_dir;   // digitizer CSVs (+ .peaks.csv sidecars)
  std::string output_dir;
  std::string geometry_path;  // empty -> synthetic placeholder geometry

  double density_kg_per_m3 = 1060.0;
  double viscosity_kg_per_m_s = 0.004;
  std::uint64_t split_seed = 42;
  std::uint64_t synth_seed = 7;
  double diastole_fraction = 0.05;
  int resample_steps = 0;  // 0 = auto (200 single-cycle, 350 multi-cycle)
  double eval_heart_rate_bpm = 135.6;
  double measured_peak_velocity_m_per_s = 3.49;
  BcExportMode bc_mode = BcExportMode::snapshot;
  std::vector<std::string> models;  // empty -> full roster
  int bc_top_models = 5;
  CaseId eval_case = CaseId::pre_intervention;
  double synth_noise_m_per_s = 0.02;

  // Overrides for the default hyperparameter grids, keyed "family.param".
  std::map<std::string, std::vector<double>> grid_overrides;

  FluidProperties fluid() const {
    return {density_kg_per_m3, viscosity_kg_per_m_s};
  }
  VesselGeometry load_geometry() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(std::string_view content);

// Applies a single `key = value` setting (also used for CLI flag overrides).
void apply_config_entry(PipelineConfig& config, std::string_view key,
                        std::string_view value);

// Serializes every setting; parse_config(dump_config(c)) == c semantically.
std::string dump_config(const PipelineConfig& config);

void validate_config(const PipelineConfig& config);

}  // namespace coarcta
