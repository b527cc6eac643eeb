#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coarcta {

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::linear: return "linear";
    case ModelFamily::knn: return "knn";
    case ModelFamily::decision_tree: return "decision_tree";
    case ModelFamily::random_forest: return "random_forest";
    case ModelFamily::gradient_boosted: return "gradient_boosted";
    case ModelFamily::gradient_boosted_leafwise:
      return "gradient_boosted_leafwise";
    case ModelFamily::svr: return "svr";
    case ModelFamily::voting: return "voting";
  }
  throw ConfigError("invalid model family");
}

ModelFamily family_from_string(std::string_view name) {
  for (ModelFamily f :
       {ModelFamily::linear, ModelFamily::knn, ModelFamily::decision_tree,
        ModelFamily::random_forest, ModelFamily::gradient_boosted,
        ModelFamily::gradient_boosted_leafwise, ModelFamily::svr,
        ModelFamily::voting}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown model family: " + std::string(name));
}

double ModelSpec::get(const std::string& key, double fallback) const {
  auto it = hyper.find(key);
  return it == hyper.end() ? fallback : it->second;
}

namespace {

bool is_integer(double v) { return std::floor(v) == v && std::isfinite(v); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_keys(const ModelSpec& spec,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : spec.hyper) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("hyperparameter '" + key + "' is not valid for family " +
                        std::string(to_string(spec.family)));
    }
    if (!std::isfinite(value)) {
      throw ConfigError("hyperparameter '" + key + "' must be finite");
    }
  }
}

}  // namespace

void validate_spec(const ModelSpec& spec) {
  switch (spec.family) {
    case ModelFamily::linear:
      check_keys(spec, {});
      break;
    case ModelFamily::knn: {
      check_keys(spec, {"k"});
      const double k = spec.get("k", 5);
      require(is_integer(k) && k >= 1, "knn: k must be an integer >= 1");
      break;
    }
    case ModelFamily::decision_tree: {
      check_keys(spec, {"max_depth", "min_samples_split", "min_samples_leaf"});
      const double d = spec.get("max_depth", 0);
      require(is_integer(d) && d >= 0,
              "decision_tree: max_depth must be an integer >= 0 (0 = unlimited)");
      const double ms = spec.get("min_samples_split", 2);
      require(is_integer(ms) && ms >= 2,
              "decision_tree: min_samples_split must be an integer >= 2");
      const double ml = spec.get("min_samples_leaf", 1);
      require(is_integer(ml) && ml >= 1,
              "decision_tree: min_samples_leaf must be an integer >= 1");
      break;
    }
    case ModelFamily::random_forest: {
      check_keys(spec, {"trees", "max_depth", "feature_subset", "bootstrap",
                        "min_samples_leaf"});
      const double t = spec.get("trees", 100);
      require(is_integer(t) && t >= 1,
              "random_forest: trees must be an integer >= 1");
      const double d = spec.get("max_depth", 0);
      require(is_integer(d) && d >= 0,
              "random_forest: max_depth must be an integer >= 0 (0 = unlimited)");
      const double fs = spec.get("feature_subset", 0);
      require(is_integer(fs) && fs >= 0,
              "random_forest: feature_subset must be an integer >= 0");
      const double b = spec.get("bootstrap", 1);
      require(b == 0.0 || b == 1.0, "random_forest: bootstrap must be 0 or 1");
      break;
    }
    case ModelFamily::gradient_boosted: {
      check_keys(spec, {"stages", "learning_rate", "max_depth"});
      const double s = spec.get("stages", 100);
      require(is_integer(s) && s >= 0,
              "gradient_boosted: stages must be an integer >= 0");
      const double lr = spec.get("learning_rate", 0.1);
      require(lr > 0.0 && lr <= 1.0,
              "gradient_boosted: learning_rate must lie in (0, 1]");
      const double d = spec.get("max_depth", 3);
      require(is_integer(d) && d >= 1,
              "gradient_boosted: max_depth must be an integer >= 1");
      break;
    }
    case ModelFamily::gradient_boosted_leafwise: {
      check_keys(spec, {"stages", "learning_rate", "max_leaves"});
      const double s = spec.get("stages", 100);
      require(is_integer(s) && s >= 0,
              "gradient_boosted_leafwise: stages must be an integer >= 0");
      const double lr = spec.get("learning_rate", 0.1);
      require(lr > 0.0 && lr <= 1.0,
              "gradient_boosted_leafwise: learning_rate must lie in (0, 1]");
      const double l = spec.get("max_leaves", 31);
      require(is_integer(l) && l >= 2,
              "gradient_boosted_leafwise: max_leaves must be an integer >= 2");
      break;
    }
    case ModelFamily::svr: {
      check_keys(spec, {"c", "epsilon", "iterations", "step"});
      require(spec.get("c", 1.0) > 0.0, "svr: c must be positive");
      require(spec.get("epsilon", 0.01) >= 0.0, "svr: epsilon must be >= 0");
      const double it = spec.get("iterations", 2000);
      require(is_integer(it) && it >= 1,
              "svr: iterations must be an integer >= 1");
      require(spec.get("step", 0.1) > 0.0, "svr: step must be positive");
      break;
    }
    case ModelFamily::voting:
      check_keys(spec, {});
      break;
  }
}

namespace {

// Least squares via Householder QR; throws NumericError on rank deficiency.
std::vector<double> qr_least_squares(Matrix A, std::vector<double> b) {
  const std::size_t n = A.rows;
  const std::size_t m = A.cols;
  if (n < m) throw NumericError("least squares: fewer rows than unknowns");

  for (std::size_t k = 0; k < m; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += A.at(i, k) * A.at(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      throw NumericError(
          "singular design matrix in linear fit; remove collinear features or "
          "add regularization");
    }
    const double alpha = A.at(k, k) >= 0.0 ? -norm : norm;
    std::vector<double> v(n - k);
    v[0] = A.at(k, k) - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i - k] = A.at(i, k);
    double vnorm_sq = 0.0;
    for (double x : v) vnorm_sq += x * x;
    if (vnorm_sq == 0.0) continue;  // column already reduced

    A.at(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) A.at(i, k) = 0.0;
    for (std::size_t j = k + 1; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i - k] * A.at(i, j);
      const double scale = 2.0 * dot / vnorm_sq;
      for (std::size_t i = k; i < n; ++i) A.at(i, j) -= scale * v[i - k];
    }
    double dot_b = 0.0;
    for (std::size_t i = k; i < n; ++i) dot_b += v[i - k] * b[i];
    const double scale_b = 2.0 * dot_b / vnorm_sq;
    for (std::size_t i = k; i < n; ++i) b[i] -= scale_b * v[i - k];
  }

  double max_diag = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    max_diag = std::max(max_diag, std::abs(A.at(k, k)));
  }
  const double tol = max_diag * 1e-12;
  std::vector<double> x(m, 0.0);
  for (std::size_t kk = m; kk-- > 0;) {
    if (std::abs(A.at(kk, kk)) <= tol) {
      throw NumericError(
          "singular design matrix in linear fit; remove collinear features or "
          "add regularization");
    }
    double acc = b[kk];
    for (std::size_t j = kk + 1; j < m; ++j) acc -= A.at(kk, j) * x[j];
    x[kk] = acc / A.at(kk, kk);
  }
  return x;
}

LinearState fit_linear(const FeatureMatrix& train) {
  const std::size_t n = train.X.rows;
  const std::size_t p = train.X.cols;
  Matrix design(n, p + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) design.at(r, c) = train.X.at(r, c);
    design.at(r, p) = 1.0;
  }
  auto coef = qr_least_squares(std::move(design), train.y);
  LinearState state;
  state.intercept = coef.back();
  coef.pop_back();
  state.coef = std::move(coef);
  return state;
}

KnnState fit_knn(const ModelSpec& spec, const FeatureMatrix& train) {
  KnnState state;
  state.k = static_cast<int>(spec.get("k", 5));
  if (static_cast<std::size_t>(state.k) > train.X.rows) {
    throw DataError("knn: k=" + std::to_string(state.k) +
                    " exceeds training rows (" + std::to_string(train.X.rows) +
                    ")");
  }
  state.X = train.X;
  state.y = train.y;
  return state;
}

TreeOptions tree_options_from(const ModelSpec& spec) {
  TreeOptions opt;
  opt.max_depth = static_cast<int>(spec.get("max_depth", 0));
  opt.min_samples_split = static_cast<int>(spec.get("min_samples_split", 2));
  opt.min_samples_leaf = static_cast<int>(spec.get("min_samples_leaf", 1));
  return opt;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

ForestState fit_forest(const ModelSpec& spec, const FeatureMatrix& train) {
  const std::size_t n = train.X.rows;
  const int n_trees = static_cast<int>(spec.get("trees", 100));
  const bool bootstrap = spec.get("bootstrap", 1) != 0.0;

  TreeOptions opt;
  opt.max_depth = static_cast<int>(spec.get("max_depth", 0));
  opt.min_samples_leaf = static_cast<int>(spec.get("min_samples_leaf", 1));
  int subset = static_cast<int>(spec.get("feature_subset", 0));
  if (subset == 0) {
    subset = static_cast<int>((train.X.cols + 2) / 3);  // ceil(p / 3)
  }
  opt.feature_subset = std::min<int>(subset, static_cast<int>(train.X.cols));

  ForestState state;
  state.trees.resize(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    // Independent stream per tree, so results do not depend on fit order.
    Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows;
    if (bootstrap) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = rng.next_index(n);
    } else {
      rows = all_rows(n);
    }
    state.trees[static_cast<std::size_t>(t)] =
        build_tree(train.X, train.y, rows, opt, &rng);
  }
  return state;
}

double tree_ensemble_mean(const std::vector<RegressionTree>& trees,
                          const double* row) {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return sum / static_cast<double>(trees.size());
}

BoostState fit_boosted(const ModelSpec& spec, const FeatureMatrix& train,
                       bool leafwise) {
  const std::size_t n = train.X.rows;
  const int stages = static_cast<int>(spec.get("stages", 100));

  TreeOptions opt;
  if (leafwise) {
    opt.max_leaves = static_cast<int>(spec.get("max_leaves", 31));
  } else {
    opt.max_depth = static_cast<int>(spec.get("max_depth", 3));
  }

  BoostState state;
  state.learning_rate = spec.get("learning_rate", 0.1);
  state.base = std::accumulate(train.y.begin(), train.y.end(), 0.0) /
               static_cast<double>(n);

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = train.y[i] - state.base;

  auto record_rmse = [&]() {
    double ss = 0.0;
    for (double r : residual) ss += r * r;
    state.stage_train_rmse.push_back(std::sqrt(ss / static_cast<double>(n)));
  };
  record_rmse();

  const auto rows = all_rows(n);
  state.trees.reserve(static_cast<std::size_t>(stages));
  for (int s = 0; s < stages; ++s) {
    RegressionTree tree = build_tree(train.X, residual, rows, opt, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] -= state.learning_rate * tree.predict(train.X.row(i));
    }
    state.trees.push_back(std::move(tree));
    record_rmse();
  }
  return state;
}

struct SvrProblem {
  const Matrix& X;
  const std::vector<double>& y;
  double lambda;   // L2 weight, 1 / c
  double epsilon;

  double objective(const std::vector<double>& w, double b) const {
    double reg = 0.0;
    for (double wi : w) reg += wi * wi;
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      double pred = b;
      for (std::size_t j = 0; j < X.cols; ++j) pred += w[j] * X.at(i, j);
      const double excess = std::abs(pred - y[i]) - epsilon;
      if (excess > 0.0) loss += excess;
    }
    return 0.5 * lambda * reg + loss / static_cast<double>(X.rows);
  }
};

SvrState fit_svr(const ModelSpec& spec, const FeatureMatrix& train) {
  const std::size_t n = train.X.rows;
  const std::size_t p = train.X.cols;
  const SvrProblem problem{train.X, train.y, 1.0 / spec.get("c", 1.0),
                           spec.get("epsilon", 0.01)};
  const int iterations = static_cast<int>(spec.get("iterations", 2000));
  const double step0 = spec.get("step", 0.1);

  std::vector<double> w(p, 0.0);
  double b = 0.0;
  SvrState best;
  best.weights = w;
  best.bias = b;
  double best_obj = problem.objective(w, b);

  std::vector<double> grad(p);
  for (int t = 0; t < iterations; ++t) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double pred = b;
      for (std::size_t j = 0; j < p; ++j) pred += w[j] * train.X.at(i, j);
      const double err = pred - train.y[i];
      if (std::abs(err) > problem.epsilon) {
        const double s = err > 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < p; ++j) grad[j] += s * train.X.at(i, j);
        grad_b += s;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const double eta =
        step0 / (1.0 + 5.0 * static_cast<double>(t) /
                           static_cast<double>(iterations));
    for (std::size_t j = 0; j < p; ++j) {
      w[j] -= eta * (problem.lambda * w[j] + grad[j] * inv_n);
    }
    b -= eta * grad_b * inv_n;

    const double obj = problem.objective(w, b);
    if (obj < best_obj) {
      best_obj = obj;
      best.weights = w;
      best.bias = b;
    }
  }
  return best;
}

}  // namespace

double ModelArtifact::predict_transformed(const double* xrow) const {
  switch (spec.family) {
    case ModelFamily::linear: {
      double acc = linear.intercept;
      for (std::size_t j = 0; j < linear.coef.size(); ++j) {
        acc += linear.coef[j] * xrow[j];
      }
      return acc;
    }
    case ModelFamily::knn: {
      const std::size_t n = knn.X.rows;
      const auto k = static_cast<std::size_t>(knn.k);
      std::vector<std::pair<double, std::size_t>> order(n);
      for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < knn.X.cols; ++j) {
          const double d = knn.X.at(i, j) - xrow[j];
          d2 += d * d;
        }
        order[i] = {d2, i};  // index is the tie-break
      }
      std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                        order.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += knn.y[order[i].second];
      return sum / static_cast<double>(k);
    }
    case ModelFamily::decision_tree:
      return tree.tree.predict(xrow);
    case ModelFamily::random_forest:
      return tree_ensemble_mean(forest.trees, xrow);
    case ModelFamily::gradient_boosted:
    case ModelFamily::gradient_boosted_leafwise: {
      double acc = boost.base;
      for (const auto& t : boost.trees) {
        acc += boost.learning_rate * t.predict(xrow);
      }
      return acc;
    }
    case ModelFamily::svr: {
      double acc = svr.bias;
      for (std::size_t j = 0; j < svr.weights.size(); ++j) {
        acc += svr.weights[j] * xrow[j];
      }
      return acc;
    }
    case ModelFamily::voting:
      throw ConfigError(
          "voting artifacts predict via their members, not in model space");
  }
  throw ConfigError("invalid model family");
}

std::vector<double> ModelArtifact::predict_matrix(const Matrix& scaled_X) const {
  std::vector<double> out(scaled_X.rows, 0.0);
  if (spec.family == ModelFamily::voting) {
    for (const auto& member : voting.members) {
      auto member_pred = member->predict_matrix(scaled_X);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += member_pred[i];
    }
    const double inv = 1.0 / static_cast<double>(voting.members.size());
    for (double& v : out) v *= inv;
    return out;
  }
  const bool log_target = transforms == nullptr || transforms->log_target;
  for (std::size_t i = 0; i < scaled_X.rows; ++i) {
    double v = predict_transformed(scaled_X.row(i));
    if (log_target) v = std::expm1(v);
    out[i] = v < 0.0 ? 0.0 : v;
  }
  return out;
}

std::vector<double> ModelArtifact::predict(
    const std::vector<QueryRow>& rows) const {
  if (transforms == nullptr) {
    throw ConfigError("artifact has no transform parameters attached");
  }
  Matrix raw(rows.size(), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    raw.at(i, 0) = rows[i].time_s;
    raw.at(i, 1) = transforms->vessel_codes.encode(to_string(rows[i].vessel));
    raw.at(i, 2) =
        transforms->case_codes.encode(to_string(rows[i].intervention_case));
    raw.at(i, 3) = rows[i].heart_rate_bpm;
  }
  auto [scaled, params] =
      standardize(raw, &transforms->scaler, ScaleMode::apply);
  return predict_matrix(scaled);
}

ModelArtifact fit_model(const ModelSpec& spec, const FeatureMatrix& train) {
  validate_spec(spec);
  if (train.X.rows == 0 || train.X.rows != train.y.size()) {
    throw DataError("fit_model: features and targets are empty or mismatched");
  }

  ModelArtifact artifact;
  artifact.spec = spec;
  artifact.transforms = train.transforms;

  switch (spec.family) {
    case ModelFamily::linear:
      artifact.linear = fit_linear(train);
      break;
    case ModelFamily::knn:
      artifact.knn = fit_knn(spec, train);
      break;
    case ModelFamily::decision_tree:
      artifact.tree.tree = build_tree(train.X, train.y, all_rows(train.X.rows),
                                      tree_options_from(spec), nullptr);
      break;
    case ModelFamily::random_forest:
      artifact.forest = fit_forest(spec, train);
      break;
    case ModelFamily::gradient_boosted:
      artifact.boost = fit_boosted(spec, train, false);
      break;
    case ModelFamily::gradient_boosted_leafwise:
      artifact.boost = fit_boosted(spec, train, true);
      break;
    case ModelFamily::svr:
      artifact.svr = fit_svr(spec, train);
      break;
    case ModelFamily::voting:
      throw ConfigError(
          "voting artifacts are assembled with make_voting_ensemble");
  }
  return artifact;
}

double compute_rmse(const std::vector<double>& predictions,
                    const std::vector<double>& truth) {
  if (predictions.empty() || predictions.size() != truth.size()) {
    throw DataError("rmse: prediction/truth lengths mismatch or empty");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truth[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predictions.size()));
}

std::vector<double> targets_in_mps(const FeatureMatrix& matrix) {
  return target_log_transform(matrix.y, TransformDirection::inverse);
}

GridSearchResult grid_search(ModelFamily family, const HyperGrid& grid,
                             const FeatureMatrix& train,
                             const FeatureMatrix& validation,
                             std::uint64_t seed) {
  for (const auto& [key, values] : grid) {
    if (values.empty()) {
      throw ConfigError("grid for '" + key + "' has no values");
    }
  }

  const std::vector<double> truth = targets_in_mps(validation);
  GridSearchResult result;
  bool have_best = false;

  std::vector<std::size_t> cursor(grid.size(), 0);
  while (true) {
    ModelSpec spec;
    spec.family = family;
    spec.seed = seed;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      spec.hyper[grid[i].first] = grid[i].second[cursor[i]];
    }

    try {
      ModelArtifact artifact = fit_model(spec, train);
      const double rmse =
          compute_rmse(artifact.predict_matrix(validation.X), truth);
      if (!have_best || rmse < result.validation_rmse_mps) {
        have_best = true;
        result.best = spec;
        result.validation_rmse_mps = rmse;
      }
    } catch (const Error& e) {
      result.warnings.push_back("grid point disqualified: " +
                                std::string(e.what()));
    }

    // Odometer increment, last key fastest.
    bool exhausted = true;
    for (std::size_t pos = grid.size(); pos-- > 0;) {
      if (++cursor[pos] < grid[pos].second.size()) {
        exhausted = false;
        break;
      }
      cursor[pos] = 0;
    }
    if (exhausted) break;
  }

  if (!have_best) {
    throw NumericError("grid search: every grid point failed to fit");
  }
  return result;
}

ModelArtifact make_voting_ensemble(
    std::vector<std::shared_ptr<const ModelArtifact>> members) {
  if (members.size() < 2) {
    throw ConfigError("voting ensemble needs at least 2 members");
  }
  for (const auto& m : members) {
    if (m == nullptr || m->transforms == nullptr) {
      throw ConfigError("voting ensemble member is missing transforms");
    }
    if (!(*m->transforms == *members.front()->transforms)) {
      throw ConfigError("voting ensemble members have mismatched transforms");
    }
    if (m->spec.family == ModelFamily::voting) {
      throw ConfigError("voting ensembles cannot nest voting members");
    }
  }
  ModelArtifact artifact;
  artifact.spec.family = ModelFamily::voting;
  artifact.transforms = members.front()->transforms;
  artifact.voting.members = std::move(members);
  return artifact;
}

VelocityTrace predict_velocity_profile(const ModelArtifact& model,
                                       VesselId vessel,
                                       CaseId intervention_case,
                                       double heart_rate_bpm, int n) {
  if (heart_rate_bpm <= 0.0) throw ConfigError("heart rate must be positive");
  if (n != kResampleShort && n != kResampleLong) {
    throw ConfigError("invalid step count " + std::to_string(n) +
                      ": must be 200 or 350");
  }
  const double period = 60.0 / heart_rate_bpm;
  std::vector<QueryRow> rows(static_cast<std::size_t>(n));
  VelocityTrace out;
  out.times_s.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = (i == n - 1)
                         ? period
                         : period * static_cast<double>(i) /
                               static_cast<double>(n - 1);
    out.times_s[static_cast<std::size_t>(i)] = t;
    rows[static_cast<std::size_t>(i)] = {t, vessel, intervention_case,
                                         heart_rate_bpm};
  }
  out.velocities_m_per_s = model.predict(rows);
  out.vessel = vessel;
  out.intervention_case = intervention_case;
  out.heart_rate_bpm = heart_rate_bpm;
  return out;
}

}  // namespace coarcta
