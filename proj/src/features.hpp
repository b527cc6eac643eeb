#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "trace.hpp"

namespace coarcta {

// Deterministic label encoding: codes are assigned by lexicographic order of
// the distinct category names, independent of row order.
struct EncodingMap {
  std::string column;
  std::vector<std::string> categories;  // sorted; code == index

  int encode(std::string_view name) const;
  const std::string& decode(int code) const;
  bool operator==(const EncodingMap&) const = default;
};

EncodingMap make_encoding_map(const std::vector<std::string>& values,
                              std::string column);
std::vector<int> apply_encoding(const EncodingMap& map,
                                const std::vector<std::string>& values);

// Per-column mean and population standard deviation. Constant columns are
// flagged and passed through unscaled.
struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> scaled;  // false for flagged constant columns

  bool operator==(const ScalerParams&) const = default;
};

enum class ScaleMode { fit_apply, apply, inverse };

// fit_apply ignores `params` and fits on `matrix`; apply/inverse require it.
// Returns the transformed matrix and the parameters used.
std::pair<Matrix, ScalerParams> standardize(const Matrix& matrix,
                                            const ScalerParams* params,
                                            ScaleMode mode);

enum class TransformDirection { forward, inverse };

// forward: log(1+v) elementwise; inverse: exp(u)-1.
std::vector<double> target_log_transform(const std::vector<double>& values,
                                         TransformDirection direction);
double target_log_transform(double value, TransformDirection direction);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

// Seeded uniform shuffle partitioned 60/20/20 (or any ratios summing to 1).
SplitIndices split_dataset(const Dataset& dataset,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed);

// Everything needed to map raw rows into model space and back. Immutable
// after fitting; shared across the artifacts of one training run.
struct TransformSet {
  EncodingMap vessel_codes;
  EncodingMap case_codes;
  ScalerParams scaler;
  bool log_target = true;

  bool operator==(const TransformSet&) const = default;
};

// Feature columns are (time, vessel code, case code, heart rate), all
// standardized; targets are log-transformed velocities.
struct FeatureMatrix {
  Matrix X;
  std::vector<double> y;
  std::shared_ptr<const TransformSet> transforms;
};

inline constexpr std::size_t kFeatureCount = 4;

struct SplitMatrices {
  FeatureMatrix train;
  FeatureMatrix validation;
  FeatureMatrix test;
};

// Builds encoding maps from the dataset's distinct categories (lexicographic).
std::pair<EncodingMap, EncodingMap> fit_encodings(const Dataset& dataset);

// Encodes and standardizes per split; the scaler is fitted on the training
// split only unless explicit params are supplied. Targets are log(1+v).
SplitMatrices build_matrices(const Dataset& dataset, const SplitIndices& split,
                             const EncodingMap& vessel_codes,
                             const EncodingMap& case_codes,
                             const ScalerParams* scaler = nullptr);

// Raw (untransformed) feature arrays for a row subset, used by prediction
// paths that start from domain values rather than matrices.
Matrix raw_feature_matrix(const Dataset& dataset,
                          const std::vector<std::size_t>& indices,
                          const EncodingMap& vessel_codes,
                          const EncodingMap& case_codes);

}  // namespace coarcta
