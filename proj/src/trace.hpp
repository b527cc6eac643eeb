#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace coarcta {

struct TracePoint {
  double time_s = 0.0;
  double velocity_m_per_s = 0.0;
};

// A digitized velocity tracing as it comes off the plot digitizer: arbitrary
// sample spacing, possibly negative velocities (Doppler flow away from the
// probe), times not anchored at zero.
struct RawTrace {
  std::vector<TracePoint> points;
  VesselId vessel = VesselId::ascending_aorta;
  CaseId intervention_case = CaseId::pre_intervention;
  std::string source;

  double start_time() const { return points.front().time_s; }
  double end_time() const { return points.back().time_s; }
  double duration() const { return end_time() - start_time(); }
};

// Cleaned, uniformly resampled waveform ready for dataset assembly.
// times[0] == 0, spacing uniform, velocities non-negative, n in {200, 350}.
struct VelocityTrace {
  std::vector<double> times_s;
  std::vector<double> velocities_m_per_s;
  VesselId vessel = VesselId::ascending_aorta;
  CaseId intervention_case = CaseId::pre_intervention;
  double heart_rate_bpm = 0.0;

  std::size_t size() const { return times_s.size(); }
};

struct DatasetRow {
  double time_s = 0.0;
  double velocity_m_per_s = 0.0;
  CaseId intervention_case = CaseId::pre_intervention;
  VesselId vessel = VesselId::ascending_aorta;
  double heart_rate_bpm = 0.0;
};

// The flat training table: columns (time, velocity, case, vessel, heart rate).
struct Dataset {
  std::vector<DatasetRow> rows;
};

inline constexpr int kResampleShort = 200;
inline constexpr int kResampleLong = 350;
inline constexpr double kDefaultDiastoleFraction = 0.05;

// Parses digitizer CSV output (columns time_s,velocity_m_per_s, optional
// header line). Points are sorted by time; duplicate timestamps keep the
// first occurrence. Throws DataError with the offending row number on
// non-numeric cells, or when fewer than 2 valid rows remain.
RawTrace parse_digitizer_csv(std::string_view content, VesselId vessel,
                             CaseId intervention_case,
                             std::string source = {});

// Shifts times so the trace starts at 0; negates the whole trace when the
// mean velocity is negative (flow recorded away from the probe); zeroes
// samples whose magnitude is below diastole_fraction * max|velocity|; clamps
// any remaining negatives to 0. Throws DataError on an all-zero trace.
RawTrace clean_trace(const RawTrace& raw, double diastole_fraction);

// 60 / mean(successive peak intervals). Needs >= 2 strictly increasing peak
// times.
double estimate_heart_rate(const std::vector<double>& peak_times_s);

// Piecewise-linear interpolation of the trace at n uniform query times over
// [0, end time]; queries outside the sampled range clamp to the endpoint
// values. Exposed separately so the kernel can be checked at small n; the
// production entry point below restricts n to {200, 350}.
std::vector<double> interpolate_uniform(const RawTrace& raw, int n);

VelocityTrace resample_trace(const RawTrace& raw, int n, double heart_rate_bpm);

// One row per sample per trace. Throws DataError on empty input.
Dataset assemble_dataset(const std::vector<VelocityTrace>& traces);

// Synthetic stand-in for undistributed patient tracings: per cardiac cycle a
// half-sine pulse over the systolic fraction and zero during diastole, plus
// optional seeded noise (uniform, bounded by +/- noise_amplitude/2).
// Deterministic for a fixed seed.
RawTrace synth_trace(double heart_rate_bpm, double peak_velocity_m_per_s,
                     double systole_fraction, int n_cycles, VesselId vessel,
                     CaseId intervention_case, double noise_amplitude,
                     std::uint64_t seed);

// Dataset CSV with header time_s,velocity_m_per_s,case,vessel,heart_rate_bpm.
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(std::string_view content);

}  // namespace coarcta
