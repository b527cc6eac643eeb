#include "coarcta.h"

#include <cstring>
#include <string>
#include <vector>

#include "config.hpp"
#include "model_io.hpp"
#include "models.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "trace.hpp"

namespace {

thread_local std::string g_last_error;

coa_status fail(coa_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the core exception taxonomy onto C status codes.
template <typename Fn>
coa_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return COA_OK;
  } catch (const coarcta::ConfigError& e) {
    return fail(COA_ERR_CONFIG, e.what());
  } catch (const coarcta::DataError& e) {
    return fail(COA_ERR_DATA, e.what());
  } catch (const coarcta::NumericError& e) {
    return fail(COA_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(COA_ERR_DATA, e.what());
  }
}

}  // namespace

struct coa_config {
  coarcta::PipelineConfig config;
};

struct coa_model {
  coarcta::ModelArtifact artifact;
};

extern "C" {

const char* coa_version(void) { return "1.0.0"; }

const char* coa_last_error(void) { return g_last_error.c_str(); }

coa_status coa_config_create(coa_config** out) {
  if (out == nullptr) return fail(COA_ERR_ARGUMENT, "out is null");
  return guarded([&] { *out = new coa_config(); });
}

coa_status coa_config_load(const char* path, coa_config** out) {
  if (path == nullptr || out == nullptr) {
    return fail(COA_ERR_ARGUMENT, "path/out is null");
  }
  return guarded([&] {
    auto config = coarcta::load_config(path);
    *out = new coa_config{std::move(config)};
  });
}

coa_status coa_config_set(coa_config* config, const char* key,
                          const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    return fail(COA_ERR_ARGUMENT, "config/key/value is null");
  }
  return guarded(
      [&] { coarcta::apply_config_entry(config->config, key, value); });
}

coa_status coa_config_dump(const coa_config* config, char* buffer,
                           size_t buffer_len, size_t* needed) {
  if (config == nullptr || needed == nullptr) {
    return fail(COA_ERR_ARGUMENT, "config/needed is null");
  }
  return guarded([&] {
    const std::string text = coarcta::dump_config(config->config);
    *needed = text.size();
    if (buffer != nullptr && buffer_len > 0) {
      const size_t n = std::min(buffer_len - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

void coa_config_free(coa_config* config) { delete config; }

coa_status coa_run_command(const coa_config* config, const char* command) {
  if (config == nullptr || command == nullptr) {
    return fail(COA_ERR_ARGUMENT, "config/command is null");
  }
  return guarded([&] { coarcta::run_command(config->config, command); });
}

coa_status coa_model_load(const char* path, coa_model** out) {
  if (path == nullptr || out == nullptr) {
    return fail(COA_ERR_ARGUMENT, "path/out is null");
  }
  return guarded([&] {
    auto artifact = coarcta::load_model(path);
    *out = new coa_model{std::move(artifact)};
  });
}

coa_status coa_model_predict_profile(const coa_model* model,
                                     const char* vessel,
                                     const char* intervention_case,
                                     double heart_rate_bpm, size_t n,
                                     double* times_s_out,
                                     double* velocities_m_per_s_out) {
  if (model == nullptr || vessel == nullptr || intervention_case == nullptr ||
      times_s_out == nullptr || velocities_m_per_s_out == nullptr) {
    return fail(COA_ERR_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const coarcta::VelocityTrace trace = coarcta::predict_velocity_profile(
        model->artifact, coarcta::vessel_from_string(vessel),
        coarcta::case_from_string(intervention_case), heart_rate_bpm,
        static_cast<int>(n));
    std::memcpy(times_s_out, trace.times_s.data(), n * sizeof(double));
    std::memcpy(velocities_m_per_s_out, trace.velocities_m_per_s.data(),
                n * sizeof(double));
  });
}

void coa_model_free(coa_model* model) { delete model; }

coa_status coa_estimate_heart_rate(const double* peak_times_s, size_t n_peaks,
                                   double* bpm_out) {
  if (peak_times_s == nullptr || bpm_out == nullptr) {
    return fail(COA_ERR_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::vector<double> peaks(peak_times_s, peak_times_s + n_peaks);
    *bpm_out = coarcta::estimate_heart_rate(peaks);
  });
}

coa_status coa_coarct_velocity(double mdot_kg_per_s, double density_kg_per_m3,
                               double throat_area_m2,
                               double* velocity_m_per_s_out) {
  if (velocity_m_per_s_out == nullptr) {
    return fail(COA_ERR_ARGUMENT, "null argument");
  }
  return guarded([&] {
    if (density_kg_per_m3 <= 0.0 || throat_area_m2 <= 0.0) {
      throw coarcta::ConfigError("density and throat area must be positive");
    }
    *velocity_m_per_s_out =
        mdot_kg_per_s / (density_kg_per_m3 * throat_area_m2);
  });
}

coa_status coa_simplified_bernoulli(double v_max_m_per_s, double* dp_mmHg_out) {
  if (dp_mmHg_out == nullptr) return fail(COA_ERR_ARGUMENT, "null argument");
  return guarded(
      [&] { *dp_mmHg_out = coarcta::simplified_bernoulli(v_max_m_per_s); });
}

coa_status coa_percent_error(double simulated, double measured,
                             double* percent_out) {
  if (percent_out == nullptr) return fail(COA_ERR_ARGUMENT, "null argument");
  return guarded(
      [&] { *percent_out = coarcta::percent_error(simulated, measured); });
}

}  // extern "C"
