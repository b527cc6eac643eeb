#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "model_io.hpp"

namespace fs = std::filesystem;

namespace coarcta {

std::vector<RosterEntry> default_roster() {
  std::vector<RosterEntry> roster;
  roster.push_back({"linear_regression", ModelFamily::linear, {}});
  roster.push_back({"svr",
                    ModelFamily::svr,
                    {{"c", {1.0}},
                     {"epsilon", {0.01}},
                     {"iterations", {2000}},
                     {"step", {0.1}}}});
  roster.push_back({"gradient_boosted",
                    ModelFamily::gradient_boosted,
                    {{"stages", {100, 300}},
                     {"learning_rate", {0.05, 0.1}},
                     {"max_depth", {2, 3}}}});
  roster.push_back({"gradient_boosted_leafwise",
                    ModelFamily::gradient_boosted_leafwise,
                    {{"stages", {100}},
                     {"learning_rate", {0.1}},
                     {"max_leaves", {15, 31}}}});
  roster.push_back({"random_forest",
                    ModelFamily::random_forest,
                    {{"trees", {100}}}});
  roster.push_back({"random_forest_optimized",
                    ModelFamily::random_forest,
                    {{"trees", {50, 100, 200}},
                     {"max_depth", {4, 8, 0}}}});
  roster.push_back({"knn",
                    ModelFamily::knn,
                    {{"k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14,
                            15}}}});
  return roster;
}

namespace {

constexpr std::array<double, 3> kSplitRatios{0.6, 0.2, 0.2};
constexpr const char* kNotAdjustedName = "not_adjusted";

std::string path_join(const std::string& a, const std::string& b) {
  return (fs::path(a) / b).string();
}

std::string dataset_path(const PipelineConfig& c) {
  return path_join(c.output_dir, "dataset.csv");
}

std::string models_dir(const PipelineConfig& c) {
  return path_join(c.output_dir, "models");
}

std::string model_path(const PipelineConfig& c, const std::string& name) {
  return path_join(models_dir(c), name + ".json");
}

// Trace descriptors for the synthetic corpus: twelve vessel/case tracings
// plus four additional coarctation measurements (one pre, three multi-cycle
// post), sized so the assembled table has the expected row count.
struct SynthSpec {
  VesselId vessel;
  CaseId intervention_case;
  double peak_velocity;
  double heart_rate_bpm;
  int cycles;
  int index;  // >0 adds a __<index> filename suffix
};

// Heart rates drift by a few BPM between sequential acquisitions within a
// session (the discrepancy the pipeline exists to absorb), so each case sits
// in a narrow band around its own resting rate.
std::vector<SynthSpec> synth_corpus() {
  using V = VesselId;
  using C = CaseId;
  return {
      {V::ascending_aorta, C::pre_intervention, 1.25, 132.0, 1, 0},
      {V::innominate_artery, C::pre_intervention, 0.95, 137.0, 1, 0},
      {V::left_common_carotid, C::pre_intervention, 0.85, 130.5, 1, 0},
      {V::left_subclavian, C::pre_intervention, 0.90, 138.5, 1, 0},
      {V::coarctation, C::pre_intervention, 3.52, 135.6, 1, 0},
      {V::descending_aorta, C::pre_intervention, 0.89, 133.5, 1, 0},
      {V::ascending_aorta, C::post_intervention, 1.15, 112.0, 1, 0},
      {V::innominate_artery, C::post_intervention, 0.90, 116.0, 1, 0},
      {V::left_common_carotid, C::post_intervention, 0.80, 109.0, 1, 0},
      {V::left_subclavian, C::post_intervention, 0.85, 120.0, 1, 0},
      {V::coarctation, C::post_intervention, 1.80, 114.0, 1, 0},
      {V::descending_aorta, C::post_intervention, 1.00, 111.0, 1, 0},
      {V::coarctation, C::pre_intervention, 3.45, 134.0, 1, 2},
      {V::coarctation, C::post_intervention, 1.75, 115.0, 3, 2},
      {V::coarctation, C::post_intervention, 1.85, 119.0, 3, 3},
      {V::coarctation, C::post_intervention, 1.70, 110.0, 3, 4},
  };
}

// Mild, deterministic heart-rate dependence so the corpus carries the signal
// the models are meant to learn.
double systole_fraction_for(double heart_rate_bpm) {
  return std::clamp(0.52 - 0.0015 * heart_rate_bpm, 0.25, 0.5);
}

double effective_peak(double base_peak, double heart_rate_bpm) {
  return base_peak * (1.0 + 0.004 * (heart_rate_bpm - 125.0));
}

std::string synth_file_stem(const SynthSpec& s) {
  std::string stem = std::string(to_string(s.vessel)) + "__" +
                     std::string(to_string(s.intervention_case));
  if (s.index > 0) stem += "__" + std::to_string(s.index);
  return stem;
}

int auto_step_count(double duration_s, double heart_rate_bpm) {
  const double cycles = duration_s * heart_rate_bpm / 60.0;
  return cycles >= 1.5 ? kResampleLong : kResampleShort;
}

std::vector<double> read_peaks_file(const std::string& path) {
  std::vector<double> peaks;
  std::size_t line_no = 0;
  const std::string content = read_text_file(path);
  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line == "peak_time_s") continue;
    auto v = parse_double(line);
    if (!v) {
      throw DataError(path + " line " + std::to_string(line_no) +
                      ": non-numeric peak time");
    }
    peaks.push_back(*v);
  }
  return peaks;
}

struct TraceFileName {
  VesselId vessel;
  CaseId intervention_case;
};

TraceFileName parse_trace_file_name(const std::string& stem,
                                    const std::string& file) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = stem.find("__", start);
    if (pos == std::string::npos) {
      parts.push_back(stem.substr(start));
      break;
    }
    parts.push_back(stem.substr(start, pos - start));
    start = pos + 2;
  }
  if (parts.size() < 2) {
    throw DataError("trace file '" + file +
                    "': expected <vessel>__<case>[__<n>].csv");
  }
  return {vessel_from_string(parts[0]), case_from_string(parts[1])};
}

}  // namespace

std::vector<IngestedTrace> ingest_traces(const PipelineConfig& config) {
  if (config.input_dir.empty()) {
    throw ConfigError("config key 'input_dir' is required for this command");
  }
  if (!fs::is_directory(config.input_dir)) {
    throw DataError("input_dir does not exist: " + config.input_dir);
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(config.input_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    if (name.size() > 10 &&
        name.substr(name.size() - 10) == ".peaks.csv") {
      continue;
    }
    files.push_back(name);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw DataError("no trace CSV files found in " + config.input_dir);
  }

  std::vector<IngestedTrace> out;
  for (const std::string& file : files) {
    const std::string stem = file.substr(0, file.size() - 4);
    const TraceFileName meta = parse_trace_file_name(stem, file);

    RawTrace raw = parse_digitizer_csv(
        read_text_file(path_join(config.input_dir, file)), meta.vessel,
        meta.intervention_case, file);
    raw = clean_trace(raw, config.diastole_fraction);

    const std::string peaks_path =
        path_join(config.input_dir, stem + ".peaks.csv");
    if (!fs::exists(peaks_path)) {
      throw DataError("no peaks sidecar for " + file + " (expected " + stem +
                      ".peaks.csv); peak times are required to estimate the "
                      "heart rate");
    }
    const double heart_rate = estimate_heart_rate(read_peaks_file(peaks_path));

    const int n = config.resample_steps != 0
                      ? config.resample_steps
                      : auto_step_count(raw.duration(), heart_rate);
    out.push_back({resample_trace(raw, n, heart_rate), file});
  }
  return out;
}

void run_synth(const PipelineConfig& config) {
  const std::string traces_dir = path_join(config.output_dir, "traces");
  fs::create_directories(traces_dir);

  const auto corpus = synth_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const SynthSpec& s = corpus[i];
    const double systole = systole_fraction_for(s.heart_rate_bpm);
    const double peak = effective_peak(s.peak_velocity, s.heart_rate_bpm);
    std::uint64_t seed_state = config.synth_seed + i;
    RawTrace trace = synth_trace(s.heart_rate_bpm, peak, systole, s.cycles,
                                 s.vessel, s.intervention_case,
                                 config.synth_noise_m_per_s,
                                 splitmix64(seed_state));
    // Doppler picks up coarctation jets heading away from the probe; the
    // digitized values come out negative and ingest flips them back.
    if (s.vessel == VesselId::coarctation) {
      for (auto& p : trace.points) p.velocity_m_per_s = -p.velocity_m_per_s;
    }

    std::string csv = "time_s,velocity_m_per_s\n";
    for (const auto& p : trace.points) {
      csv += format_double(p.time_s);
      csv += ',';
      csv += format_double(p.velocity_m_per_s);
      csv += '\n';
    }
    const std::string stem = synth_file_stem(s);
    write_text_file(path_join(traces_dir, stem + ".csv"), csv);

    // Five successive peak times, the way they would be read off the image.
    const double period = 60.0 / s.heart_rate_bpm;
    std::string peaks = "peak_time_s\n";
    for (int k = 0; k < 5; ++k) {
      peaks += format_double(0.5 * systole * period + k * period);
      peaks += '\n';
    }
    write_text_file(path_join(traces_dir, stem + ".peaks.csv"), peaks);
  }
  std::cout << "synth: wrote " << corpus.size() << " traces to " << traces_dir
            << "\n";
}

void run_ingest(const PipelineConfig& config) {
  auto ingested = ingest_traces(config);
  std::vector<VelocityTrace> traces;
  traces.reserve(ingested.size());
  for (auto& t : ingested) traces.push_back(std::move(t.trace));
  const Dataset dataset = assemble_dataset(traces);
  write_text_file(dataset_path(config), dataset_to_csv(dataset));
  std::cout << "ingest: " << traces.size() << " traces -> "
            << dataset.rows.size() << " rows at " << dataset_path(config)
            << "\n";
}

namespace {

HyperGrid apply_grid_overrides(const PipelineConfig& config,
                               const RosterEntry& entry) {
  HyperGrid grid = entry.grid;
  const std::string prefix = entry.name + ".";
  for (const auto& [key, values] : config.grid_overrides) {
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string param = key.substr(prefix.size());
    bool replaced = false;
    for (auto& [name, list] : grid) {
      if (name == param) {
        list = values;
        replaced = true;
        break;
      }
    }
    if (!replaced) grid.emplace_back(param, values);
  }
  return grid;
}

std::vector<RosterEntry> selected_roster(const PipelineConfig& config) {
  auto roster = default_roster();
  if (config.models.empty()) return roster;

  std::vector<RosterEntry> selected;
  for (const std::string& name : config.models) {
    if (name == kVotingModelName) continue;  // assembled from members below
    bool found = false;
    for (const auto& entry : roster) {
      if (entry.name == name) {
        selected.push_back(entry);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("config key 'models': unknown model '" + name + "'");
    }
  }
  return selected;
}

bool roster_has(const PipelineConfig& config, const std::string& name) {
  return config.models.empty() ||
         std::find(config.models.begin(), config.models.end(), name) !=
             config.models.end();
}

FeatureMatrix concat_matrices(const FeatureMatrix& a, const FeatureMatrix& b) {
  FeatureMatrix out;
  out.transforms = a.transforms;
  out.X = Matrix(a.X.rows + b.X.rows, a.X.cols);
  std::copy(a.X.data.begin(), a.X.data.end(), out.X.data.begin());
  std::copy(b.X.data.begin(), b.X.data.end(),
            out.X.data.begin() + static_cast<long>(a.X.data.size()));
  out.y = a.y;
  out.y.insert(out.y.end(), b.y.begin(), b.y.end());
  return out;
}

struct PreparedData {
  Dataset dataset;
  SplitIndices split;
  SplitMatrices matrices;
};

PreparedData prepare_data(const PipelineConfig& config) {
  PreparedData data;
  data.dataset = dataset_from_csv(read_text_file(dataset_path(config)));
  data.split = split_dataset(data.dataset, kSplitRatios, config.split_seed);
  auto [vessel_codes, case_codes] = fit_encodings(data.dataset);
  data.matrices =
      build_matrices(data.dataset, data.split, vessel_codes, case_codes);
  return data;
}

double test_rmse_of(const ModelArtifact& artifact,
                    const FeatureMatrix& test) {
  return compute_rmse(artifact.predict_matrix(test.X), targets_in_mps(test));
}

}  // namespace

void run_train(const PipelineConfig& config) {
  const PreparedData data = prepare_data(config);
  const FeatureMatrix train_val =
      concat_matrices(data.matrices.train, data.matrices.validation);

  std::map<std::string, std::shared_ptr<const ModelArtifact>> fitted;
  for (const RosterEntry& entry : selected_roster(config)) {
    const HyperGrid grid = apply_grid_overrides(config, entry);
    const auto started = std::chrono::steady_clock::now();

    GridSearchResult search =
        grid_search(entry.family, grid, data.matrices.train,
                    data.matrices.validation, config.split_seed);
    for (const auto& warning : search.warnings) {
      std::cerr << "train: " << entry.name << ": " << warning << "\n";
    }

    // Final refit on train+validation, evaluated on the held-out test split.
    ModelArtifact refit = fit_model(search.best, train_val);
    refit.validation_rmse_mps = search.validation_rmse_mps;
    refit.test_rmse_mps = test_rmse_of(refit, data.matrices.test);

    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;
    save_model(refit, model_path(config, entry.name));
    std::cout << "train: " << entry.name << " validation RMSE "
              << format_double(*refit.validation_rmse_mps) << " m/s, test RMSE "
              << format_double(*refit.test_rmse_mps) << " m/s ("
              << format_double(elapsed.count()) << " s)\n";
    fitted[entry.name] =
        std::make_shared<const ModelArtifact>(std::move(refit));
  }

  if (roster_has(config, kVotingModelName)) {
    auto knn_it = fitted.find("knn");
    auto forest_it = fitted.find("random_forest");
    if (knn_it == fitted.end() || forest_it == fitted.end()) {
      throw ConfigError(
          "the voting ensemble needs both 'knn' and 'random_forest' in the "
          "roster");
    }
    ModelArtifact ensemble =
        make_voting_ensemble({knn_it->second, forest_it->second});
    ensemble.validation_rmse_mps =
        compute_rmse(ensemble.predict_matrix(data.matrices.validation.X),
                     targets_in_mps(data.matrices.validation));
    ensemble.test_rmse_mps = test_rmse_of(ensemble, data.matrices.test);
    save_model(ensemble, model_path(config, kVotingModelName));
    std::cout << "train: voting validation RMSE "
              << format_double(*ensemble.validation_rmse_mps)
              << " m/s, test RMSE " << format_double(*ensemble.test_rmse_mps)
              << " m/s\n";
  }
}

namespace {

std::vector<std::string> trained_model_names(const PipelineConfig& config) {
  std::vector<std::string> names;
  for (const auto& entry : default_roster()) {
    if (roster_has(config, entry.name) &&
        fs::exists(model_path(config, entry.name))) {
      names.push_back(entry.name);
    }
  }
  if (roster_has(config, kVotingModelName) &&
      fs::exists(model_path(config, kVotingModelName))) {
    names.push_back(kVotingModelName);
  }
  if (names.empty()) {
    throw DataError("no trained model artifacts under " + models_dir(config) +
                    "; run the train command first");
  }
  return names;
}

}  // namespace

std::string evaluation_to_csv(std::vector<EvaluationRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const EvaluationRow& a, const EvaluationRow& b) {
                     return a.test_rmse_mps > b.test_rmse_mps;
                   });
  std::string out = "model,rmse_m_per_s\n";
  for (const auto& r : rows) {
    out += r.model;
    out += ',';
    out += format_double(r.test_rmse_mps);
    out += '\n';
  }
  return out;
}

void run_evaluate(const PipelineConfig& config) {
  const PreparedData data = prepare_data(config);
  std::vector<EvaluationRow> rows;
  for (const std::string& name : trained_model_names(config)) {
    const ModelArtifact artifact = load_model(model_path(config, name));
    EvaluationRow row;
    row.model = name;
    row.hyper = artifact.spec.hyper;
    // Recomputed from the artifact file, which checks that serialization
    // preserved the prediction path.
    row.test_rmse_mps = test_rmse_of(artifact, data.matrices.test);
    rows.push_back(std::move(row));
  }
  const std::string path = path_join(config.output_dir, "rmse.csv");
  write_text_file(path, evaluation_to_csv(std::move(rows)));
  std::cout << "evaluate: wrote " << path << "\n";
}

namespace {

std::vector<std::string> bc_provenances(const PipelineConfig& config) {
  std::vector<std::pair<std::string, double>> ranked;
  for (const std::string& name : trained_model_names(config)) {
    const ModelArtifact artifact = load_model(model_path(config, name));
    if (!artifact.test_rmse_mps) {
      throw DataError("model artifact " + name + " has no test RMSE metric");
    }
    ranked.emplace_back(name, *artifact.test_rmse_mps);
  }
  if (config.models.empty()) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       return a.second < b.second;
                     });
    const std::size_t keep = std::min<std::size_t>(
        ranked.size(), static_cast<std::size_t>(config.bc_top_models));
    ranked.resize(keep);
  }
  std::vector<std::string> names;
  for (auto& [name, rmse] : ranked) names.push_back(name);
  return names;
}

constexpr std::array<VesselId, 5> kBcVessels = {
    VesselId::ascending_aorta,   VesselId::innominate_artery,
    VesselId::left_common_carotid, VesselId::left_subclavian,
    VesselId::descending_aorta,
};

BcBundle bundle_from_snapshot(std::string provenance, PeakSnapshot snapshot,
                              std::vector<MassFlowProfile> profiles) {
  std::array<double, 4> outlet_values{};
  for (std::size_t i = 0; i < 4; ++i) {
    outlet_values[i] = snapshot.values_kg_per_s.at(kOutletVessels[i]);
  }
  snapshot.values_kg_per_s[kInletVessel] = enforce_continuity(outlet_values);

  BcBundle bundle;
  bundle.provenance = std::move(provenance);
  bundle.profiles = std::move(profiles);
  bundle.snapshot = snapshot;
  for (BcType type : kAllBcTypes) {
    BoundaryConditionSet set =
        assemble_bc_set(type, snapshot.values_kg_per_s, bundle.provenance);
    set.snapshot = snapshot;
    bundle.sets.push_back(std::move(set));
  }
  return bundle;
}

BcBundle model_bundle(const PipelineConfig& config, const std::string& name,
                      const VesselGeometry& geometry,
                      const FluidProperties& fluid) {
  const ModelArtifact artifact = load_model(model_path(config, name));
  const int n =
      config.resample_steps != 0 ? config.resample_steps : kResampleShort;

  std::vector<MassFlowProfile> profiles;
  for (VesselId vessel : kBcVessels) {
    const VelocityTrace profile = predict_velocity_profile(
        artifact, vessel, config.eval_case, config.eval_heart_rate_bpm, n);
    profiles.push_back(velocity_to_massflow(profile, geometry, fluid));
  }
  PeakSnapshot snapshot = peak_snapshot(profiles.front(), profiles);
  return bundle_from_snapshot(name, std::move(snapshot), std::move(profiles));
}

// The not-adjusted baseline: each vessel's measured peak value as it came off
// the tracing, with no heart-rate harmonization. Peaks are per-vessel maxima
// rather than a common-instant snapshot because the measured profiles do not
// share a time base.
BcBundle not_adjusted_bundle(const PipelineConfig& config,
                             const VesselGeometry& geometry,
                             const FluidProperties& fluid) {
  auto ingested = ingest_traces(config);

  PeakSnapshot snapshot;
  std::vector<MassFlowProfile> profiles;
  for (VesselId vessel : kBcVessels) {
    const IngestedTrace* chosen = nullptr;
    for (const auto& t : ingested) {
      if (t.trace.vessel == vessel &&
          t.trace.intervention_case == config.eval_case) {
        chosen = &t;
        break;  // files are sorted; first match wins
      }
    }
    if (chosen == nullptr) {
      throw DataError("not-adjusted BCs: no " +
                      std::string(to_string(config.eval_case)) +
                      " trace for " + std::string(to_string(vessel)));
    }
    MassFlowProfile profile =
        velocity_to_massflow(chosen->trace, geometry, fluid);
    double peak = 0.0;
    double t_peak = 0.0;
    for (std::size_t i = 0; i < profile.mass_flow_kg_per_s.size(); ++i) {
      if (profile.mass_flow_kg_per_s[i] > peak) {
        peak = profile.mass_flow_kg_per_s[i];
        t_peak = profile.times_s[i];
      }
    }
    snapshot.values_kg_per_s[vessel] = peak;
    if (vessel == kInletVessel) snapshot.t_peak_s = t_peak;
    profiles.push_back(std::move(profile));
  }
  return bundle_from_snapshot(kNotAdjustedName, std::move(snapshot),
                              std::move(profiles));
}

}  // namespace

std::vector<BcBundle> generate_bc_bundles(const PipelineConfig& config) {
  const VesselGeometry geometry = config.load_geometry();
  geometry.validate();
  const FluidProperties fluid = config.fluid();

  std::vector<BcBundle> bundles;
  for (const std::string& name : bc_provenances(config)) {
    bundles.push_back(model_bundle(config, name, geometry, fluid));
  }
  bundles.push_back(not_adjusted_bundle(config, geometry, fluid));
  return bundles;
}

void run_bcgen(const PipelineConfig& config) {
  const auto bundles = generate_bc_bundles(config);
  const std::string bc_dir = path_join(config.output_dir, "bc");
  fs::create_directories(bc_dir);

  std::size_t files = 0;
  for (const auto& bundle : bundles) {
    for (const auto& set : bundle.sets) {
      const std::string content =
          export_bc(set, config.bc_mode, &bundle.profiles);
      const std::string file = bundle.provenance + "__" +
                               std::string(to_string(set.type)) + ".bc";
      write_text_file(path_join(bc_dir, file), content);
      ++files;
    }
  }
  std::cout << "bcgen: wrote " << files << " BC files ("
            << to_string(config.bc_mode) << " mode) to " << bc_dir << "\n";
}

void run_oracle(const PipelineConfig& config) {
  const VesselGeometry geometry = config.load_geometry();
  const FluidProperties fluid = config.fluid();
  std::vector<OracleReport> reports;
  for (const auto& bundle : generate_bc_bundles(config)) {
    for (const auto& set : bundle.sets) {
      reports.push_back(evaluate_bc_set(set, geometry, fluid,
                                        config.measured_peak_velocity_m_per_s));
    }
  }
  const std::string path = path_join(config.output_dir, "oracle_report.csv");
  write_text_file(path, oracle_reports_to_csv(reports));
  std::cout << "oracle: wrote " << path << "\n";
}

namespace {

std::string svg_bar_chart(const std::vector<BcBundle>& bundles) {
  constexpr double width = 960.0, height = 440.0;
  constexpr double left = 70.0, right = 30.0, top = 40.0, bottom = 70.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  static constexpr const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b",
                                             "#e45756", "#72b7b2", "#b279a2",
                                             "#ff9da6", "#9d755d"};
  constexpr std::size_t kPaletteSize = std::size(kPalette);

  double max_value = 0.0;
  for (const auto& b : bundles) {
    for (const auto& [vessel, value] : b.snapshot.values_kg_per_s) {
      max_value = std::max(max_value, value);
    }
  }
  if (max_value <= 0.0) max_value = 1.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         format_double(width) + "\" height=\"" + format_double(height) +
         "\" viewBox=\"0 0 " + format_double(width) + " " +
         format_double(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_double(width / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">Peak mass flow per boundary</text>\n";

  // y axis with 5 ticks
  for (int i = 0; i <= 5; ++i) {
    const double frac = static_cast<double>(i) / 5.0;
    const double y = top + plot_h * (1.0 - frac);
    svg += "<line x1=\"" + format_double(left) + "\" y1=\"" +
           format_double(y) + "\" x2=\"" + format_double(width - right) +
           "\" y2=\"" + format_double(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + format_double(left - 8) + "\" y=\"" +
           format_double(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           format_double(std::round(frac * max_value * 1000.0) / 1000.0) +
           "</text>\n";
  }
  svg += "<text x=\"16\" y=\"" + format_double(top + plot_h / 2) +
         "\" transform=\"rotate(-90 16 " + format_double(top + plot_h / 2) +
         ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">mass flow [kg/s]</text>\n";

  const double group_w = plot_w / static_cast<double>(kBcVessels.size());
  const double bar_w =
      group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, bundles.size()));
  for (std::size_t g = 0; g < kBcVessels.size(); ++g) {
    const double gx = left + group_w * static_cast<double>(g);
    for (std::size_t m = 0; m < bundles.size(); ++m) {
      auto it = bundles[m].snapshot.values_kg_per_s.find(kBcVessels[g]);
      if (it == bundles[m].snapshot.values_kg_per_s.end()) continue;
      const double h = plot_h * (it->second / max_value);
      const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(m);
      svg += "<rect x=\"" + format_double(x) + "\" y=\"" +
             format_double(top + plot_h - h) + "\" width=\"" +
             format_double(bar_w) + "\" height=\"" + format_double(h) +
             "\" fill=\"" + kPalette[m % kPaletteSize] + "\"/>\n";
    }
    svg += "<text x=\"" + format_double(gx + group_w / 2) + "\" y=\"" +
           format_double(top + plot_h + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">" +
           std::string(to_string(kBcVessels[g])) + "</text>\n";
  }

  // legend
  double lx = left;
  const double ly = height - 28.0;
  for (std::size_t m = 0; m < bundles.size(); ++m) {
    svg += "<rect x=\"" + format_double(lx) + "\" y=\"" +
           format_double(ly - 10) + "\" width=\"12\" height=\"12\" fill=\"" +
           kPalette[m % kPaletteSize] + "\"/>\n";
    svg += "<text x=\"" + format_double(lx + 16) + "\" y=\"" +
           format_double(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" +
           bundles[m].provenance + "</text>\n";
    lx += 18.0 + 7.2 * static_cast<double>(bundles[m].provenance.size()) + 14.0;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

void run_report(const PipelineConfig& config) {
  const auto bundles = generate_bc_bundles(config);
  const std::string report_dir = path_join(config.output_dir, "report");
  fs::create_directories(report_dir);

  std::string values_csv = "vessel,provenance,mass_flow_kg_per_s\n";
  for (VesselId vessel : kBcVessels) {
    for (const auto& bundle : bundles) {
      auto it = bundle.snapshot.values_kg_per_s.find(vessel);
      if (it == bundle.snapshot.values_kg_per_s.end()) continue;
      values_csv += std::string(to_string(vessel)) + "," + bundle.provenance +
                    "," + format_double(it->second) + "\n";
    }
  }
  write_text_file(path_join(report_dir, "bc_values.csv"), values_csv);

  // Cross-model deviation uses the fully valued BC3 sets.
  std::vector<BoundaryConditionSet> bc3_sets;
  for (const auto& bundle : bundles) {
    bc3_sets.push_back(bundle.sets.at(2));
  }
  const auto deviations = bc_deviation_stats(bc3_sets);
  std::string dev_csv = "vessel,percent_deviation_from_mean\n";
  for (const auto& [vessel, pct] : deviations) {
    dev_csv += std::string(to_string(vessel)) + "," + format_double(pct) + "\n";
  }
  write_text_file(path_join(report_dir, "bc_deviation.csv"), dev_csv);
  write_text_file(path_join(report_dir, "bc_values.svg"),
                  svg_bar_chart(bundles));
  std::cout << "report: wrote bc_values.csv, bc_deviation.csv, bc_values.svg "
               "to "
            << report_dir << "\n";
}

void run_command(const PipelineConfig& config, std::string_view command) {
  validate_config(config);
  if (command == "synth") {
    run_synth(config);
  } else if (command == "ingest") {
    run_ingest(config);
  } else if (command == "train") {
    run_train(config);
  } else if (command == "evaluate") {
    run_evaluate(config);
  } else if (command == "bcgen") {
    run_bcgen(config);
  } else if (command == "oracle") {
    run_oracle(config);
  } else if (command == "report") {
    run_report(config);
  } else {
    throw ConfigError("unknown command '" + std::string(command) +
                      "' (expected synth, ingest, train, evaluate, bcgen, "
                      "oracle, or report)");
  }
}

}  // namespace coarcta
