#include "config.hpp"

#include <cmath>
#include <limits>

namespace coarcta {

VesselGeometry PipelineConfig::load_geometry() const {
  if (geometry_path.empty()) return VesselGeometry::synthetic_default();
  return VesselGeometry::from_text(read_text_file(geometry_path));
}

namespace {

double numeric(std::string_view key, std::string_view value) {
  auto v = parse_double(value);
  if (!v || !std::isfinite(*v)) {
    throw ConfigError("config key '" + std::string(key) +
                      "': expected a number, got '" + std::string(value) + "'");
  }
  return *v;
}

std::uint64_t unsigned_integer(std::string_view key, std::string_view value) {
  const double v = numeric(key, value);
  if (v < 0.0 || std::floor(v) != v) {
    throw ConfigError("config key '" + std::string(key) +
                      "': expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> string_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto item : split(value, ',')) {
    item = trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::vector<double> numeric_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  for (auto item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(numeric(key, item));
  }
  if (out.empty()) {
    throw ConfigError("config key '" + std::string(key) +
                      "': expected a comma-separated number list");
  }
  return out;
}

}  // namespace

namespace {

double checked_range(std::string_view key, double v, double lo, double hi,
                     bool lo_open, bool hi_open) {
  const bool below = lo_open ? v <= lo : v < lo;
  const bool above = hi_open ? v >= hi : v > hi;
  if (below || above) {
    throw ConfigError("config key '" + std::string(key) +
                      "': value out of range");
  }
  return v;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void apply_config_entry(PipelineConfig& config, std::string_view key,
                        std::string_view value) {
  key = trim(key);
  value = trim(value);

  if (key == "input_dir") {
    config.input_dir = value;
  } else if (key == "output_dir") {
    config.output_dir = value;
  } else if (key == "geometry") {
    config.geometry_path = value;
  } else if (key == "density_kg_per_m3") {
    config.density_kg_per_m3 =
        checked_range(key, numeric(key, value), 0.0, kInf, true, true);
  } else if (key == "viscosity_kg_per_m_s") {
    config.viscosity_kg_per_m_s =
        checked_range(key, numeric(key, value), 0.0, kInf, false, true);
  } else if (key == "split_seed") {
    config.split_seed = unsigned_integer(key, value);
  } else if (key == "synth_seed") {
    config.synth_seed = unsigned_integer(key, value);
  } else if (key == "diastole_fraction") {
    config.diastole_fraction =
        checked_range(key, numeric(key, value), 0.0, 1.0, false, true);
  } else if (key == "resample_steps") {
    if (value == "auto") {
      config.resample_steps = 0;
    } else {
      const int n = static_cast<int>(unsigned_integer(key, value));
      if (n != kResampleShort && n != kResampleLong) {
        throw ConfigError(
            "config key 'resample_steps' must be 200, 350, or auto");
      }
      config.resample_steps = n;
    }
  } else if (key == "eval_heart_rate_bpm") {
    config.eval_heart_rate_bpm =
        checked_range(key, numeric(key, value), 0.0, kInf, true, true);
  } else if (key == "measured_peak_velocity_m_per_s") {
    config.measured_peak_velocity_m_per_s =
        checked_range(key, numeric(key, value), 0.0, kInf, true, true);
  } else if (key == "bc_mode") {
    config.bc_mode = bc_mode_from_string(value);
  } else if (key == "models") {
    config.models = string_list(value);
  } else if (key == "bc_top_models") {
    config.bc_top_models = static_cast<int>(checked_range(
        key, static_cast<double>(unsigned_integer(key, value)), 1.0, kInf,
        false, true));
  } else if (key == "eval_case") {
    config.eval_case = case_from_string(value);
  } else if (key == "synth_noise_m_per_s") {
    config.synth_noise_m_per_s =
        checked_range(key, numeric(key, value), 0.0, kInf, false, true);
  } else if (key.rfind("grid.", 0) == 0) {
    const std::string grid_key(key.substr(5));
    if (grid_key.find('.') == std::string::npos) {
      throw ConfigError("config key '" + std::string(key) +
                        "': expected grid.<family>.<param>");
    }
    config.grid_overrides[grid_key] = numeric_list(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_config(std::string_view content) {
  PipelineConfig config;
  std::size_t line_no = 0;
  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto pos = line.find('=');
    if (pos == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    apply_config_entry(config, line.substr(0, pos), line.substr(pos + 1));
  }
  validate_config(config);
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::string content;
  try {
    content = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(content);
}

void validate_config(const PipelineConfig& config) {
  if (config.output_dir.empty()) {
    throw ConfigError("config key 'output_dir' is required");
  }
  if (config.density_kg_per_m3 <= 0.0) {
    throw ConfigError("config key 'density_kg_per_m3' must be positive");
  }
  if (config.viscosity_kg_per_m_s < 0.0) {
    throw ConfigError("config key 'viscosity_kg_per_m_s' must be >= 0");
  }
  if (config.diastole_fraction < 0.0 || config.diastole_fraction >= 1.0) {
    throw ConfigError("config key 'diastole_fraction' must lie in [0, 1)");
  }
  if (config.resample_steps != 0 && config.resample_steps != kResampleShort &&
      config.resample_steps != kResampleLong) {
    throw ConfigError(
        "config key 'resample_steps' must be 200, 350, or auto");
  }
  if (config.eval_heart_rate_bpm <= 0.0) {
    throw ConfigError("config key 'eval_heart_rate_bpm' must be positive");
  }
  if (config.measured_peak_velocity_m_per_s <= 0.0) {
    throw ConfigError(
        "config key 'measured_peak_velocity_m_per_s' must be positive");
  }
  if (config.bc_top_models < 1) {
    throw ConfigError("config key 'bc_top_models' must be >= 1");
  }
  if (config.synth_noise_m_per_s < 0.0) {
    throw ConfigError("config key 'synth_noise_m_per_s' must be >= 0");
  }
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("input_dir", config.input_dir);
  line("output_dir", config.output_dir);
  line("geometry", config.geometry_path);
  line("density_kg_per_m3", format_double(config.density_kg_per_m3));
  line("viscosity_kg_per_m_s", format_double(config.viscosity_kg_per_m_s));
  line("split_seed", std::to_string(config.split_seed));
  line("synth_seed", std::to_string(config.synth_seed));
  line("diastole_fraction", format_double(config.diastole_fraction));
  line("resample_steps", config.resample_steps == 0
                             ? std::string("auto")
                             : std::to_string(config.resample_steps));
  line("eval_heart_rate_bpm", format_double(config.eval_heart_rate_bpm));
  line("measured_peak_velocity_m_per_s",
       format_double(config.measured_peak_velocity_m_per_s));
  line("bc_mode", std::string(to_string(config.bc_mode)));
  std::string roster;
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    if (i > 0) roster += ',';
    roster += config.models[i];
  }
  if (!roster.empty()) line("models", roster);
  line("bc_top_models", std::to_string(config.bc_top_models));
  line("eval_case", std::string(to_string(config.eval_case)));
  line("synth_noise_m_per_s", format_double(config.synth_noise_m_per_s));
  for (const auto& [key, values] : config.grid_overrides) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) joined += ',';
      joined += format_double(values[i]);
    }
    line("grid." + key, joined);
  }
  return out;
}

}  // namespace coarcta
