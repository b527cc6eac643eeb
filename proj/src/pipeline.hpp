#pragma once

#include <map>
#include <string>
#include <vector>

#include "bc.hpp"
#include "config.hpp"
#include "models.hpp"
#include "oracle.hpp"

namespace coarcta {

// One named model in the training roster: a family plus the hyperparameter
// grid it is tuned over (single-point grids for fixed settings).
struct RosterEntry {
  std::string name;
  ModelFamily family;
  HyperGrid grid;
};

// The full roster: linear baseline, SVR, both boosting variants, default and
// tuned forests, kNN; the voting ensemble (kNN + default forest) is assembled
// after its members are fitted.
std::vector<RosterEntry> default_roster();

inline constexpr const char* kVotingModelName = "voting";

struct EvaluationRow {
  std::string model;
  double test_rmse_mps = 0.0;
  std::map<std::string, double> hyper;
  double train_seconds = 0.0;
};

// Table-style CSV (model,rmse_m_per_s), worst model first.
std::string evaluation_to_csv(std::vector<EvaluationRow> rows);

// Everything bcgen/oracle/report need for one provenance (a model name or
// "not_adjusted"): the per-vessel profiles, the continuity-corrected peak
// snapshot, and the four assembled BC sets.
struct BcBundle {
  std::string provenance;
  std::vector<MassFlowProfile> profiles;  // inlet + outlets 1-4
  PeakSnapshot snapshot;
  std::vector<BoundaryConditionSet> sets;  // BC1..BC4
};

std::vector<BcBundle> generate_bc_bundles(const PipelineConfig& config);

// Pipeline commands. Outputs land under config.output_dir only.
void run_synth(const PipelineConfig& config);
void run_ingest(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config);
void run_bcgen(const PipelineConfig& config);
void run_oracle(const PipelineConfig& config);
void run_report(const PipelineConfig& config);

// Dispatches one of: synth, ingest, train, evaluate, bcgen, oracle, report.
void run_command(const PipelineConfig& config, std::string_view command);

// Ingest helpers shared with the not-adjusted BC path.
struct IngestedTrace {
  VelocityTrace trace;
  std::string file;
};
std::vector<IngestedTrace> ingest_traces(const PipelineConfig& config);

}  // namespace coarcta
