#include "trace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coarcta {

namespace {

void validate_raw(const RawTrace& raw) {
  if (raw.points.size() < 2) throw DataError("trace needs at least 2 points");
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    if (!std::isfinite(raw.points[i].time_s) ||
        !std::isfinite(raw.points[i].velocity_m_per_s)) {
      throw DataError("trace contains non-finite values");
    }
    if (i > 0 && raw.points[i].time_s <= raw.points[i - 1].time_s) {
      throw DataError("trace times must be strictly increasing");
    }
  }
}

}  // namespace

RawTrace parse_digitizer_csv(std::string_view content, VesselId vessel,
                             CaseId intervention_case, std::string source) {
  RawTrace trace;
  trace.vessel = vessel;
  trace.intervention_case = intervention_case;
  trace.source = std::move(source);

  std::size_t row_number = 0;
  for (std::string_view line : split(content, '\n')) {
    ++row_number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    auto cells = split(line, ',');
    if (cells.size() < 2) {
      throw DataError("row " + std::to_string(row_number) +
                      ": expected two columns (time, velocity)");
    }
    auto t = parse_double(cells[0]);
    auto v = parse_double(cells[1]);
    if (!t || !v) {
      // A fully non-numeric first row is a header; anything else is an error.
      if (row_number == 1 && !t && !v) continue;
      throw DataError("row " + std::to_string(row_number) +
                      ": non-numeric cell");
    }
    if (!std::isfinite(*t) || !std::isfinite(*v)) {
      throw DataError("row " + std::to_string(row_number) +
                      ": non-finite value");
    }
    trace.points.push_back({*t, *v});
  }

  if (trace.points.size() < 2) {
    throw DataError("insufficient data: fewer than 2 valid rows");
  }

  std::stable_sort(trace.points.begin(), trace.points.end(),
                   [](const TracePoint& a, const TracePoint& b) {
                     return a.time_s < b.time_s;
                   });
  // Duplicate timestamps: keep the first occurrence.
  trace.points.erase(
      std::unique(trace.points.begin(), trace.points.end(),
                  [](const TracePoint& a, const TracePoint& b) {
                    return a.time_s == b.time_s;
                  }),
      trace.points.end());
  if (trace.points.size() < 2) {
    throw DataError("insufficient data: fewer than 2 distinct timestamps");
  }
  return trace;
}

RawTrace clean_trace(const RawTrace& raw, double diastole_fraction) {
  validate_raw(raw);
  if (diastole_fraction < 0.0 || diastole_fraction >= 1.0) {
    throw ConfigError("diastole_fraction must lie in [0, 1)");
  }

  RawTrace out = raw;
  const double t0 = out.points.front().time_s;
  for (auto& p : out.points) p.time_s -= t0;

  double mean = 0.0;
  double peak = 0.0;
  for (const auto& p : out.points) {
    mean += p.velocity_m_per_s;
    peak = std::max(peak, std::abs(p.velocity_m_per_s));
  }
  mean /= static_cast<double>(out.points.size());
  if (peak == 0.0) throw DataError("degenerate trace: all velocities are zero");

  // Flow recorded away from the probe shows up negative; bring it back to the
  // positive axis.
  if (mean < 0.0) {
    for (auto& p : out.points) p.velocity_m_per_s = -p.velocity_m_per_s;
  }

  const double threshold = diastole_fraction * peak;
  for (auto& p : out.points) {
    if (std::abs(p.velocity_m_per_s) < threshold) {
      p.velocity_m_per_s = 0.0;
    } else if (p.velocity_m_per_s < 0.0) {
      p.velocity_m_per_s = 0.0;
    }
  }
  return out;
}

double estimate_heart_rate(const std::vector<double>& peak_times_s) {
  if (peak_times_s.size() < 2) {
    throw DataError("insufficient peaks: need at least 2 peak times");
  }
  for (std::size_t i = 1; i < peak_times_s.size(); ++i) {
    if (peak_times_s[i] <= peak_times_s[i - 1]) {
      throw DataError("peak times must be strictly increasing");
    }
  }
  const double span = peak_times_s.back() - peak_times_s.front();
  const double mean_interval =
      span / static_cast<double>(peak_times_s.size() - 1);
  return 60.0 / mean_interval;
}

std::vector<double> interpolate_uniform(const RawTrace& raw, int n) {
  validate_raw(raw);
  if (n < 2) throw ConfigError("interpolation needs at least 2 samples");
  const double t_end = raw.end_time();
  if (t_end <= 0.0) {
    throw DataError("trace must cover a positive time interval from 0");
  }

  std::vector<double> values(static_cast<std::size_t>(n));
  const double step = t_end / static_cast<double>(n - 1);
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i == n - 1) ? t_end : step * static_cast<double>(i);
    if (t <= raw.points.front().time_s) {
      values[static_cast<std::size_t>(i)] = raw.points.front().velocity_m_per_s;
      continue;
    }
    if (t >= raw.points.back().time_s) {
      values[static_cast<std::size_t>(i)] = raw.points.back().velocity_m_per_s;
      continue;
    }
    while (raw.points[seg + 1].time_s < t) ++seg;
    const TracePoint& a = raw.points[seg];
    const TracePoint& b = raw.points[seg + 1];
    const double w = (t - a.time_s) / (b.time_s - a.time_s);
    values[static_cast<std::size_t>(i)] =
        a.velocity_m_per_s + w * (b.velocity_m_per_s - a.velocity_m_per_s);
  }
  return values;
}

VelocityTrace resample_trace(const RawTrace& raw, int n, double heart_rate_bpm) {
  if (n != kResampleShort && n != kResampleLong) {
    throw ConfigError("invalid step count " + std::to_string(n) +
                      ": must be 200 or 350");
  }
  if (heart_rate_bpm <= 0.0) throw DataError("heart rate must be positive");

  VelocityTrace out;
  out.velocities_m_per_s = interpolate_uniform(raw, n);
  out.times_s.resize(static_cast<std::size_t>(n));
  const double t_end = raw.end_time();
  const double step = t_end / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    out.times_s[static_cast<std::size_t>(i)] =
        (i == n - 1) ? t_end : step * static_cast<double>(i);
  }
  out.vessel = raw.vessel;
  out.intervention_case = raw.intervention_case;
  out.heart_rate_bpm = heart_rate_bpm;
  return out;
}

Dataset assemble_dataset(const std::vector<VelocityTrace>& traces) {
  if (traces.empty()) throw DataError("cannot assemble dataset: no traces");
  Dataset dataset;
  std::size_t total = 0;
  for (const auto& t : traces) total += t.size();
  dataset.rows.reserve(total);
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      dataset.rows.push_back({t.times_s[i], t.velocities_m_per_s[i],
                              t.intervention_case, t.vessel,
                              t.heart_rate_bpm});
    }
  }
  return dataset;
}

RawTrace synth_trace(double heart_rate_bpm, double peak_velocity_m_per_s,
                     double systole_fraction, int n_cycles, VesselId vessel,
                     CaseId intervention_case, double noise_amplitude,
                     std::uint64_t seed) {
  if (heart_rate_bpm <= 0.0) throw ConfigError("heart rate must be positive");
  if (systole_fraction <= 0.0 || systole_fraction >= 1.0) {
    throw ConfigError("systole_fraction must lie in (0, 1)");
  }
  if (peak_velocity_m_per_s <= 0.0) {
    throw ConfigError("peak velocity must be positive");
  }
  if (n_cycles < 1) throw ConfigError("need at least one cycle");
  if (noise_amplitude < 0.0) throw ConfigError("noise amplitude must be >= 0");

  constexpr int kSamplesPerCycle = 160;
  const double period = 60.0 / heart_rate_bpm;
  const double systole = systole_fraction * period;
  const int total = n_cycles * kSamplesPerCycle + 1;

  Rng rng(seed);
  RawTrace trace;
  trace.vessel = vessel;
  trace.intervention_case = intervention_case;
  trace.source = "synthetic";
  trace.points.reserve(static_cast<std::size_t>(total));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < total; ++i) {
    const double t =
        period * static_cast<double>(i) / static_cast<double>(kSamplesPerCycle);
    const double phase = t - period * std::floor(t / period + 1e-12);
    double v = 0.0;
    if (phase < systole) {
      v = peak_velocity_m_per_s * std::sin(pi * phase / systole);
    }
    if (noise_amplitude > 0.0) {
      v += noise_amplitude * (rng.next_double() - 0.5);
    }
    trace.points.push_back({t, v});
  }
  return trace;
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out = "time_s,velocity_m_per_s,case,vessel,heart_rate_bpm\n";
  for (const auto& r : dataset.rows) {
    out += format_double(r.time_s);
    out += ',';
    out += format_double(r.velocity_m_per_s);
    out += ',';
    out += to_string(r.intervention_case);
    out += ',';
    out += to_string(r.vessel);
    out += ',';
    out += format_double(r.heart_rate_bpm);
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(std::string_view content) {
  Dataset dataset;
  std::size_t row_number = 0;
  bool saw_header = false;
  for (std::string_view line : split(content, '\n')) {
    ++row_number;
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (!saw_header) {
      saw_header = true;
      if (line.rfind("time_s", 0) == 0) continue;
    }
    if (cells.size() != 5) {
      throw DataError("dataset row " + std::to_string(row_number) +
                      ": expected 5 columns");
    }
    auto t = parse_double(cells[0]);
    auto v = parse_double(cells[1]);
    auto hr = parse_double(cells[4]);
    if (!t || !v || !hr) {
      throw DataError("dataset row " + std::to_string(row_number) +
                      ": non-numeric cell");
    }
    DatasetRow row;
    row.time_s = *t;
    row.velocity_m_per_s = *v;
    row.intervention_case = case_from_string(trim(cells[2]));
    row.vessel = vessel_from_string(trim(cells[3]));
    row.heart_rate_bpm = *hr;
    dataset.rows.push_back(row);
  }
  if (dataset.rows.empty()) throw DataError("dataset CSV has no rows");
  return dataset;
}

}  // namespace coarcta
