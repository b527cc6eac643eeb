#include "common.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coarcta {

std::string_view to_string(VesselId v) {
  switch (v) {
    case VesselId::ascending_aorta: return "ascending_aorta";
    case VesselId::innominate_artery: return "innominate_artery";
    case VesselId::left_common_carotid: return "left_common_carotid";
    case VesselId::left_subclavian: return "left_subclavian";
    case VesselId::coarctation: return "coarctation";
    case VesselId::descending_aorta: return "descending_aorta";
  }
  throw DataError("invalid vessel id");
}

std::string_view to_string(CaseId c) {
  switch (c) {
    case CaseId::pre_intervention: return "pre_intervention";
    case CaseId::post_intervention: return "post_intervention";
  }
  throw DataError("invalid case id");
}

VesselId vessel_from_string(std::string_view name) {
  for (VesselId v : kAllVessels) {
    if (to_string(v) == name) return v;
  }
  throw DataError("unknown vessel name: " + std::string(name));
}

CaseId case_from_string(std::string_view name) {
  if (name == "pre_intervention") return CaseId::pre_intervention;
  if (name == "post_intervention") return CaseId::post_intervention;
  throw DataError("unknown case name: " + std::string(name));
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : state_(seed) {
  // Warm up so nearby seeds decorrelate.
  splitmix64(state_);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t Rng::next_index(std::size_t bound) {
  if (bound == 0) throw NumericError("next_index: zero bound");
  // Rejection sampling for an unbiased bounded draw.
  const std::uint64_t b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_index) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64(s) ^ (0xA0761D6478BD642Full * (stream_index + 1));
  return Rng(mixed);
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  // Fisher-Yates, fixed traversal order.
  for (std::size_t i = indices.size(); i > 1; --i) {
    std::size_t j = rng.next_index(i);
    std::swap(indices[i - 1], indices[j]);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace coarcta
