#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coarcta {

// Error taxonomy. The CLI maps these onto exit codes
// (config -> 1, data -> 2, numeric -> 3), the C API onto coa_status values.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration, unknown keys, out-of-range settings, bad model specs.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Malformed or insufficient input data: parse failures, degenerate traces,
// unseen categories, mismatched grids.
class DataError : public Error {
public:
  using Error::Error;
};

// Numeric failures: singular systems, undefined statistics.
class NumericError : public Error {
public:
  using Error::Error;
};

enum class VesselId {
  ascending_aorta,
  innominate_artery,
  left_common_carotid,
  left_subclavian,
  coarctation,
  descending_aorta,
};

enum class CaseId {
  pre_intervention,
  post_intervention,
};

inline constexpr VesselId kAllVessels[] = {
    VesselId::ascending_aorta,  VesselId::innominate_artery,
    VesselId::left_common_carotid, VesselId::left_subclavian,
    VesselId::coarctation,      VesselId::descending_aorta,
};

// Outlets 1-4 in the order they are reported: innominate artery, left common
// carotid, left subclavian, descending aorta. Mass-flow sums always fold in
// this order so continuity checks are reproducible bit for bit.
inline constexpr VesselId kOutletVessels[] = {
    VesselId::innominate_artery,
    VesselId::left_common_carotid,
    VesselId::left_subclavian,
    VesselId::descending_aorta,
};

inline constexpr VesselId kInletVessel = VesselId::ascending_aorta;

std::string_view to_string(VesselId v);
std::string_view to_string(CaseId c);
VesselId vessel_from_string(std::string_view name);
CaseId case_from_string(std::string_view name);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
// Strict full-string parse; returns nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

// splitmix64; used to derive independent per-unit RNG streams from one seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Small deterministic RNG (xoshiro-free, engine-pinned): all randomness in the
// project flows through this so results do not depend on the standard
// library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double next_double();
  // Uniform integer in [0, bound).
  std::size_t next_index(std::size_t bound);

  // Derives an independent stream; stream i of a given parent is stable
  // regardless of how many draws the parent has made before.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_index);

private:
  std::uint64_t state_;
};

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng);

// Dense row-major matrix; the feature tables here are tiny (n x 4).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace coarcta
