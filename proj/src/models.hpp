#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "features.hpp"
#include "trace.hpp"
#include "trees.hpp"

namespace coarcta {

enum class ModelFamily {
  linear,
  knn,
  decision_tree,
  random_forest,
  gradient_boosted,
  gradient_boosted_leafwise,
  svr,
  voting,
};

std::string_view to_string(ModelFamily family);
ModelFamily family_from_string(std::string_view name);

struct ModelSpec {
  ModelFamily family = ModelFamily::linear;
  std::map<std::string, double> hyper;
  std::uint64_t seed = 0;

  double get(const std::string& key, double fallback) const;
};

// Throws ConfigError on out-of-range values or keys the family does not know.
void validate_spec(const ModelSpec& spec);

struct LinearState {
  std::vector<double> coef;
  double intercept = 0.0;
};

struct KnnState {
  int k = 1;
  Matrix X;               // stored training features (already standardized)
  std::vector<double> y;  // log-space targets
};

struct TreeState {
  RegressionTree tree;
};

struct ForestState {
  std::vector<RegressionTree> trees;
};

struct BoostState {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  // Training RMSE in target (log) space after 0, 1, ... stages.
  std::vector<double> stage_train_rmse;
};

struct SvrState {
  std::vector<double> weights;
  double bias = 0.0;
};

class ModelArtifact;

struct VotingState {
  std::vector<std::shared_ptr<const ModelArtifact>> members;
};

struct QueryRow {
  double time_s = 0.0;
  VesselId vessel = VesselId::ascending_aorta;
  CaseId intervention_case = CaseId::pre_intervention;
  double heart_rate_bpm = 0.0;
};

// A trained regressor together with the transforms needed to go from domain
// rows to model space and back. Immutable once fitted.
class ModelArtifact {
public:
  ModelSpec spec;
  std::shared_ptr<const TransformSet> transforms;

  LinearState linear;
  KnnState knn;
  TreeState tree;
  ForestState forest;
  BoostState boost;
  SvrState svr;
  VotingState voting;

  std::optional<double> validation_rmse_mps;
  std::optional<double> test_rmse_mps;

  // Log-space prediction for one standardized feature row. Not defined for
  // voting artifacts (their members each own the full prediction path).
  double predict_transformed(const double* xrow) const;

  // Velocity predictions in m/s for standardized feature rows: family
  // prediction in log space, inverse target transform, clamp to >= 0.
  std::vector<double> predict_matrix(const Matrix& scaled_X) const;

  // Velocity predictions in m/s for raw domain rows (applies encoding and
  // scaling first).
  std::vector<double> predict(const std::vector<QueryRow>& rows) const;
};

ModelArtifact fit_model(const ModelSpec& spec, const FeatureMatrix& train);

// sqrt(mean((p - t)^2)); lengths must match and be non-empty.
double compute_rmse(const std::vector<double>& predictions,
                    const std::vector<double>& truth);

// Ordered hyperparameter grid: first key varies slowest. Values keep their
// listed order, so enumeration-order tie-breaking is reproducible.
using HyperGrid = std::vector<std::pair<std::string, std::vector<double>>>;

struct GridSearchResult {
  ModelSpec best;
  double validation_rmse_mps = 0.0;
  std::vector<std::string> warnings;  // grid points disqualified by fit errors
};

// Exhaustive Cartesian search minimizing validation RMSE (m/s). Ties keep the
// earliest point in enumeration order.
GridSearchResult grid_search(ModelFamily family, const HyperGrid& grid,
                             const FeatureMatrix& train,
                             const FeatureMatrix& validation,
                             std::uint64_t seed);

// Uniform-mean ensemble over pre-fitted members (>= 2, same transforms).
ModelArtifact make_voting_ensemble(
    std::vector<std::shared_ptr<const ModelArtifact>> members);

// Queries the model at n uniform times over one cardiac period 60/heart_rate
// with fixed vessel/case/heart-rate features.
VelocityTrace predict_velocity_profile(const ModelArtifact& model,
                                       VesselId vessel, CaseId intervention_case,
                                       double heart_rate_bpm, int n);

// Velocities in m/s recovered from a feature matrix's log-space targets.
std::vector<double> targets_in_mps(const FeatureMatrix& matrix);

}  // namespace coarcta
