#include "features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace coarcta {

int EncodingMap::encode(std::string_view name) const {
  auto it = std::lower_bound(categories.begin(), categories.end(), name);
  if (it == categories.end() || *it != name) {
    throw DataError("unseen category '" + std::string(name) + "' in column '" +
                    column + "'");
  }
  return static_cast<int>(it - categories.begin());
}

const std::string& EncodingMap::decode(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= categories.size()) {
    throw DataError("invalid code " + std::to_string(code) + " for column '" +
                    column + "'");
  }
  return categories[static_cast<std::size_t>(code)];
}

EncodingMap make_encoding_map(const std::vector<std::string>& values,
                              std::string column) {
  if (values.empty()) throw DataError("label_encode: empty value list");
  std::set<std::string> distinct(values.begin(), values.end());
  EncodingMap map;
  map.column = std::move(column);
  map.categories.assign(distinct.begin(), distinct.end());
  return map;
}

std::vector<int> apply_encoding(const EncodingMap& map,
                                const std::vector<std::string>& values) {
  std::vector<int> codes;
  codes.reserve(values.size());
  for (const auto& v : values) codes.push_back(map.encode(v));
  return codes;
}

std::pair<Matrix, ScalerParams> standardize(const Matrix& matrix,
                                            const ScalerParams* params,
                                            ScaleMode mode) {
  if (matrix.rows == 0) throw DataError("standardize: empty matrix");

  ScalerParams fitted;
  if (mode == ScaleMode::fit_apply) {
    fitted.mean.resize(matrix.cols);
    fitted.stddev.resize(matrix.cols);
    fitted.scaled.resize(matrix.cols);
    const double n = static_cast<double>(matrix.rows);
    for (std::size_t c = 0; c < matrix.cols; ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < matrix.rows; ++r) sum += matrix.at(r, c);
      const double mean = sum / n;
      double ss = 0.0;
      for (std::size_t r = 0; r < matrix.rows; ++r) {
        const double d = matrix.at(r, c) - mean;
        ss += d * d;
      }
      const double var = ss / n;  // population variance
      fitted.mean[c] = mean;
      fitted.stddev[c] = std::sqrt(var);
      fitted.scaled[c] = fitted.stddev[c] > 0.0;
    }
  } else {
    if (params == nullptr) {
      throw ConfigError("standardize: apply/inverse modes require params");
    }
    if (params->mean.size() != matrix.cols) {
      throw DataError("standardize: params fitted for " +
                      std::to_string(params->mean.size()) + " columns, got " +
                      std::to_string(matrix.cols));
    }
    fitted = *params;
  }

  Matrix out(matrix.rows, matrix.cols);
  for (std::size_t c = 0; c < matrix.cols; ++c) {
    if (!fitted.scaled[c]) {
      for (std::size_t r = 0; r < matrix.rows; ++r) {
        out.at(r, c) = matrix.at(r, c);
      }
      continue;
    }
    if (mode == ScaleMode::inverse) {
      for (std::size_t r = 0; r < matrix.rows; ++r) {
        out.at(r, c) = matrix.at(r, c) * fitted.stddev[c] + fitted.mean[c];
      }
    } else {
      for (std::size_t r = 0; r < matrix.rows; ++r) {
        out.at(r, c) = (matrix.at(r, c) - fitted.mean[c]) / fitted.stddev[c];
      }
    }
  }
  return {std::move(out), std::move(fitted)};
}

double target_log_transform(double value, TransformDirection direction) {
  if (direction == TransformDirection::forward) {
    if (value <= -1.0) {
      throw DataError("log transform domain error: value " +
                      format_double(value) + " <= -1");
    }
    return std::log1p(value);
  }
  return std::expm1(value);
}

std::vector<double> target_log_transform(const std::vector<double>& values,
                                         TransformDirection direction) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(target_log_transform(v, direction));
  return out;
}

SplitIndices split_dataset(const Dataset& dataset,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed) {
  const std::size_t n = dataset.rows.size();
  if (n < 3) throw DataError("split needs at least 3 rows");
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle_indices(order, rng);

  // llround keeps the boundaries stable against rounding in the products.
  const auto nd = static_cast<double>(n);
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(ratios[0] * nd));
  const std::size_t n_train_val =
      static_cast<std::size_t>(std::llround((ratios[0] + ratios[1]) * nd));

  SplitIndices split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train,
                          order.begin() + n_train_val);
  split.test.assign(order.begin() + n_train_val, order.end());
  if (split.train.empty() || split.validation.empty() || split.test.empty()) {
    throw DataError("split produced an empty partition");
  }
  return split;
}

std::pair<EncodingMap, EncodingMap> fit_encodings(const Dataset& dataset) {
  std::vector<std::string> vessels;
  std::vector<std::string> cases;
  vessels.reserve(dataset.rows.size());
  cases.reserve(dataset.rows.size());
  for (const auto& r : dataset.rows) {
    vessels.emplace_back(to_string(r.vessel));
    cases.emplace_back(to_string(r.intervention_case));
  }
  return {make_encoding_map(vessels, "vessel"),
          make_encoding_map(cases, "case")};
}

Matrix raw_feature_matrix(const Dataset& dataset,
                          const std::vector<std::size_t>& indices,
                          const EncodingMap& vessel_codes,
                          const EncodingMap& case_codes) {
  Matrix X(indices.size(), kFeatureCount);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const DatasetRow& row = dataset.rows.at(indices[i]);
    X.at(i, 0) = row.time_s;
    X.at(i, 1) = vessel_codes.encode(to_string(row.vessel));
    X.at(i, 2) = case_codes.encode(to_string(row.intervention_case));
    X.at(i, 3) = row.heart_rate_bpm;
  }
  return X;
}

namespace {

std::vector<double> targets_for(const Dataset& dataset,
                                const std::vector<std::size_t>& indices) {
  std::vector<double> y;
  y.reserve(indices.size());
  for (std::size_t idx : indices) {
    y.push_back(dataset.rows.at(idx).velocity_m_per_s);
  }
  return y;
}

}  // namespace

SplitMatrices build_matrices(const Dataset& dataset, const SplitIndices& split,
                             const EncodingMap& vessel_codes,
                             const EncodingMap& case_codes,
                             const ScalerParams* scaler) {
  Matrix raw_train =
      raw_feature_matrix(dataset, split.train, vessel_codes, case_codes);

  auto transforms = std::make_shared<TransformSet>();
  transforms->vessel_codes = vessel_codes;
  transforms->case_codes = case_codes;
  transforms->log_target = true;

  Matrix train_X;
  if (scaler != nullptr) {
    auto [scaled, params] = standardize(raw_train, scaler, ScaleMode::apply);
    train_X = std::move(scaled);
    transforms->scaler = params;
  } else {
    auto [scaled, params] =
        standardize(raw_train, nullptr, ScaleMode::fit_apply);
    train_X = std::move(scaled);
    transforms->scaler = params;
  }

  SplitMatrices out;
  out.train.X = std::move(train_X);
  out.train.y = target_log_transform(targets_for(dataset, split.train),
                                     TransformDirection::forward);
  out.train.transforms = transforms;

  for (auto [part, indices] :
       {std::pair{&out.validation, &split.validation},
        std::pair{&out.test, &split.test}}) {
    Matrix raw = raw_feature_matrix(dataset, *indices, vessel_codes, case_codes);
    auto [scaled, params] =
        standardize(raw, &transforms->scaler, ScaleMode::apply);
    part->X = std::move(scaled);
    part->y = target_log_transform(targets_for(dataset, *indices),
                                   TransformDirection::forward);
    part->transforms = transforms;
  }
  return out;
}

}  // namespace coarcta
