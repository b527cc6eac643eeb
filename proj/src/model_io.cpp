#include "model_io.hpp"

#include <json.hpp>

namespace coarcta {

namespace {

using nlohmann::json;

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
  }
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  tree.nodes.reserve(j.size());
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.value = n.at(2).get<double>();
    node.left = n.at(3).get<int>();
    node.right = n.at(4).get<int>();
    tree.nodes.push_back(node);
  }
  return tree;
}

json forest_to_json(const std::vector<RegressionTree>& trees) {
  json out = json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<RegressionTree> forest_from_json(const json& j) {
  std::vector<RegressionTree> trees;
  trees.reserve(j.size());
  for (const auto& t : j) trees.push_back(tree_from_json(t));
  return trees;
}

json transforms_to_json(const TransformSet& t) {
  return json{
      {"vessel_categories", t.vessel_codes.categories},
      {"case_categories", t.case_codes.categories},
      {"scaler",
       {{"mean", t.scaler.mean},
        {"stddev", t.scaler.stddev},
        {"scaled", t.scaler.scaled}}},
      {"log_target", t.log_target},
  };
}

std::shared_ptr<const TransformSet> transforms_from_json(const json& j) {
  auto t = std::make_shared<TransformSet>();
  t->vessel_codes.column = "vessel";
  t->vessel_codes.categories =
      j.at("vessel_categories").get<std::vector<std::string>>();
  t->case_codes.column = "case";
  t->case_codes.categories =
      j.at("case_categories").get<std::vector<std::string>>();
  const json& s = j.at("scaler");
  t->scaler.mean = s.at("mean").get<std::vector<double>>();
  t->scaler.stddev = s.at("stddev").get<std::vector<double>>();
  t->scaler.scaled = s.at("scaled").get<std::vector<bool>>();
  t->log_target = j.at("log_target").get<bool>();
  return t;
}

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols) {
    throw DataError("model file: matrix dimensions do not match data length");
  }
  return m;
}

json artifact_to_json(const ModelArtifact& a);

json state_to_json(const ModelArtifact& a) {
  switch (a.spec.family) {
    case ModelFamily::linear:
      return json{{"coef", a.linear.coef}, {"intercept", a.linear.intercept}};
    case ModelFamily::knn:
      return json{{"k", a.knn.k},
                  {"X", matrix_to_json(a.knn.X)},
                  {"y", a.knn.y}};
    case ModelFamily::decision_tree:
      return json{{"nodes", tree_to_json(a.tree.tree)}};
    case ModelFamily::random_forest:
      return json{{"trees", forest_to_json(a.forest.trees)}};
    case ModelFamily::gradient_boosted:
    case ModelFamily::gradient_boosted_leafwise:
      return json{{"base", a.boost.base},
                  {"learning_rate", a.boost.learning_rate},
                  {"trees", forest_to_json(a.boost.trees)},
                  {"stage_train_rmse", a.boost.stage_train_rmse}};
    case ModelFamily::svr:
      return json{{"weights", a.svr.weights}, {"bias", a.svr.bias}};
    case ModelFamily::voting: {
      json members = json::array();
      for (const auto& m : a.voting.members) {
        members.push_back(artifact_to_json(*m));
      }
      return json{{"members", members}};
    }
  }
  throw ConfigError("invalid model family");
}

json artifact_to_json(const ModelArtifact& a) {
  json hyper = json::object();
  for (const auto& [k, v] : a.spec.hyper) hyper[k] = v;

  json out{
      {"format", "coarcta-model"},
      {"version", 1},
      {"spec",
       {{"family", std::string(to_string(a.spec.family))},
        {"seed", a.spec.seed},
        {"hyper", hyper}}},
      {"state", state_to_json(a)},
  };
  if (a.transforms != nullptr) {
    out["transforms"] = transforms_to_json(*a.transforms);
  }
  json metrics = json::object();
  if (a.validation_rmse_mps) metrics["validation_rmse_mps"] = *a.validation_rmse_mps;
  if (a.test_rmse_mps) metrics["test_rmse_mps"] = *a.test_rmse_mps;
  if (!metrics.empty()) out["metrics"] = metrics;
  return out;
}

ModelArtifact artifact_from_json(const json& j) {
  if (j.value("format", "") != "coarcta-model") {
    throw DataError("not a model artifact file");
  }
  if (j.value("version", 0) != 1) {
    throw DataError("unsupported model artifact version");
  }

  ModelArtifact a;
  const json& spec = j.at("spec");
  a.spec.family = family_from_string(spec.at("family").get<std::string>());
  a.spec.seed = spec.at("seed").get<std::uint64_t>();
  for (const auto& [k, v] : spec.at("hyper").items()) {
    a.spec.hyper[k] = v.get<double>();
  }
  if (j.contains("transforms")) {
    a.transforms = transforms_from_json(j.at("transforms"));
  }

  const json& state = j.at("state");
  switch (a.spec.family) {
    case ModelFamily::linear:
      a.linear.coef = state.at("coef").get<std::vector<double>>();
      a.linear.intercept = state.at("intercept").get<double>();
      break;
    case ModelFamily::knn:
      a.knn.k = state.at("k").get<int>();
      a.knn.X = matrix_from_json(state.at("X"));
      a.knn.y = state.at("y").get<std::vector<double>>();
      break;
    case ModelFamily::decision_tree:
      a.tree.tree = tree_from_json(state.at("nodes"));
      break;
    case ModelFamily::random_forest:
      a.forest.trees = forest_from_json(state.at("trees"));
      break;
    case ModelFamily::gradient_boosted:
    case ModelFamily::gradient_boosted_leafwise:
      a.boost.base = state.at("base").get<double>();
      a.boost.learning_rate = state.at("learning_rate").get<double>();
      a.boost.trees = forest_from_json(state.at("trees"));
      a.boost.stage_train_rmse =
          state.at("stage_train_rmse").get<std::vector<double>>();
      break;
    case ModelFamily::svr:
      a.svr.weights = state.at("weights").get<std::vector<double>>();
      a.svr.bias = state.at("bias").get<double>();
      break;
    case ModelFamily::voting: {
      std::vector<std::shared_ptr<const ModelArtifact>> members;
      for (const auto& m : state.at("members")) {
        members.push_back(
            std::make_shared<const ModelArtifact>(artifact_from_json(m)));
      }
      a.voting.members = std::move(members);
      break;
    }
  }
  if (j.contains("metrics")) {
    const json& metrics = j.at("metrics");
    if (metrics.contains("validation_rmse_mps")) {
      a.validation_rmse_mps = metrics.at("validation_rmse_mps").get<double>();
    }
    if (metrics.contains("test_rmse_mps")) {
      a.test_rmse_mps = metrics.at("test_rmse_mps").get<double>();
    }
  }
  return a;
}

}  // namespace

std::string model_to_json(const ModelArtifact& artifact) {
  return artifact_to_json(artifact).dump(2) + "\n";
}

ModelArtifact model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    return artifact_from_json(j);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ModelArtifact& artifact, const std::string& path) {
  write_text_file(path, model_to_json(artifact));
}

ModelArtifact load_model(const std::string& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace coarcta
