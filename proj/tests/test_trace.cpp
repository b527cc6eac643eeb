#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "trace.hpp"

using namespace coarcta;

namespace {

RawTrace make_trace(std::vector<TracePoint> points,
                    VesselId vessel = VesselId::ascending_aorta,
                    CaseId c = CaseId::pre_intervention) {
  RawTrace t;
  t.points = std::move(points);
  t.vessel = vessel;
  t.intervention_case = c;
  return t;
}

// Independent interpolation check: full linear scan per query, same endpoint
// clamping convention.
double interp_reference(const RawTrace& raw, double t) {
  if (t <= raw.points.front().time_s) return raw.points.front().velocity_m_per_s;
  if (t >= raw.points.back().time_s) return raw.points.back().velocity_m_per_s;
  for (std::size_t i = 0; i + 1 < raw.points.size(); ++i) {
    const auto& a = raw.points[i];
    const auto& b = raw.points[i + 1];
    if (t >= a.time_s && t <= b.time_s) {
      return a.velocity_m_per_s + (t - a.time_s) / (b.time_s - a.time_s) *
                                      (b.velocity_m_per_s - a.velocity_m_per_s);
    }
  }
  return raw.points.back().velocity_m_per_s;
}

}  // namespace

TEST_CASE("digitizer csv: direct parse") {
  const RawTrace t = parse_digitizer_csv("0.0,0.0\n0.1,1.2",
                                         VesselId::coarctation,
                                         CaseId::pre_intervention);
  REQUIRE(t.points.size() == 2);
  CHECK(t.points[0].time_s == 0.0);
  CHECK(t.points[1].velocity_m_per_s == 1.2);
  CHECK(t.vessel == VesselId::coarctation);
}

TEST_CASE("digitizer csv: header line is skipped") {
  const RawTrace t = parse_digitizer_csv("t,v\n0.0,0.0\n0.05,0.8\n0.1,0.0",
                                         VesselId::ascending_aorta,
                                         CaseId::post_intervention);
  CHECK(t.points.size() == 3);
  CHECK(t.points[1].velocity_m_per_s == 0.8);
}

TEST_CASE("digitizer csv: non-numeric cell reports the row") {
  CHECK_THROWS_WITH_AS(parse_digitizer_csv("0.0,abc", VesselId::coarctation,
                                           CaseId::pre_intervention),
                       doctest::Contains("row 1"), DataError);
  CHECK_THROWS_WITH_AS(
      parse_digitizer_csv("0,0\n0.1,0.5\noops,1", VesselId::coarctation,
                          CaseId::pre_intervention),
      doctest::Contains("row 3"), DataError);
}

TEST_CASE("digitizer csv: rows sorted by time, duplicates keep first") {
  const RawTrace t = parse_digitizer_csv("0.2,5\n0.0,1\n0.2,9\n0.1,3",
                                         VesselId::ascending_aorta,
                                         CaseId::pre_intervention);
  REQUIRE(t.points.size() == 3);
  CHECK(t.points[0].velocity_m_per_s == 1.0);
  CHECK(t.points[1].velocity_m_per_s == 3.0);
  CHECK(t.points[2].velocity_m_per_s == 5.0);  // first 0.2 entry wins
}

TEST_CASE("digitizer csv: fewer than two rows") {
  CHECK_THROWS_AS(parse_digitizer_csv("0.0,1.0", VesselId::ascending_aorta,
                                      CaseId::pre_intervention),
                  DataError);
  CHECK_THROWS_AS(parse_digitizer_csv("t,v\n", VesselId::ascending_aorta,
                                      CaseId::pre_intervention),
                  DataError);
}

TEST_CASE("clean_trace shifts times to zero") {
  const RawTrace t = clean_trace(make_trace({{1.0, 0.0}, {1.2, 2.0}}), 0.05);
  CHECK(t.points[0].time_s == 0.0);
  CHECK(t.points[1].time_s == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("clean_trace inverts away-from-probe traces") {
  const RawTrace t = clean_trace(
      make_trace({{0.0, 0.0}, {0.1, -3.4}, {0.2, 0.0}}, VesselId::coarctation),
      0.05);
  CHECK(t.points[0].velocity_m_per_s == 0.0);
  CHECK(t.points[1].velocity_m_per_s == 3.4);
  CHECK(t.points[2].velocity_m_per_s == 0.0);
}

TEST_CASE("clean_trace clamps sub-threshold samples to zero") {
  const RawTrace t = clean_trace(
      make_trace({{0.0, 0.0}, {0.1, 0.02}, {0.2, 1.0}, {0.3, 0.01}}), 0.05);
  CHECK(t.points[0].velocity_m_per_s == 0.0);
  CHECK(t.points[1].velocity_m_per_s == 0.0);
  CHECK(t.points[2].velocity_m_per_s == 1.0);
  CHECK(t.points[3].velocity_m_per_s == 0.0);
}

TEST_CASE("clean_trace rejects an all-zero trace") {
  CHECK_THROWS_AS(clean_trace(make_trace({{0.0, 0.0}, {0.1, 0.0}}), 0.05),
                  DataError);
}

TEST_CASE("clean_trace output is non-negative and zero-anchored") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(-1.0, 2.5);
  std::uniform_real_distribution<double> frac(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    RawTrace raw;
    double t = static_cast<double>(rng() % 100) * 0.01;
    for (int i = 0; i < 20; ++i) {
      raw.points.push_back({t, v(rng)});
      t += 0.01 + 0.001 * static_cast<double>(rng() % 5);
    }
    const RawTrace cleaned = clean_trace(raw, frac(rng));
    CHECK(cleaned.points.front().time_s == 0.0);
    for (const auto& p : cleaned.points) CHECK(p.velocity_m_per_s >= 0.0);
  }
}

TEST_CASE("heart rate from uniformly spaced peaks") {
  CHECK(estimate_heart_rate({0.0, 0.5, 1.0, 1.5, 2.0}) ==
        doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("heart rate from irregular peaks") {
  // mean interval (0.45 + 0.43 + 0.44) / 3 = 0.44 s -> 60 / 0.44
  CHECK(estimate_heart_rate({0.0, 0.45, 0.88, 1.32}) ==
        doctest::Approx(60.0 / 0.44).epsilon(1e-12));
  CHECK(estimate_heart_rate({0.0, 0.45, 0.88, 1.32}) ==
        doctest::Approx(136.36).epsilon(1e-4));
}

TEST_CASE("heart rate: 0.4425 s cycle pairs with 135.6 BPM") {
  std::vector<double> peaks;
  for (int i = 0; i < 5; ++i) peaks.push_back(0.4425 * i);
  const double bpm = estimate_heart_rate(peaks);
  CHECK(std::abs(bpm - 135.6) < 0.01);
  CHECK(std::abs(60.0 / bpm - 0.4425) < 1e-9);
}

TEST_CASE("heart rate is invariant under a global time shift") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gap(0.3, 0.7);
  std::uniform_real_distribution<double> shift_d(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> peaks{0.0};
    for (int i = 0; i < 4; ++i) peaks.push_back(peaks.back() + gap(rng));
    const double shift = shift_d(rng);
    std::vector<double> shifted = peaks;
    for (double& p : shifted) p += shift;
    CHECK(estimate_heart_rate(peaks) ==
          doctest::Approx(estimate_heart_rate(shifted)).epsilon(1e-9));
  }
}

TEST_CASE("heart rate needs two increasing peaks") {
  CHECK_THROWS_AS(estimate_heart_rate({0.5}), DataError);
  CHECK_THROWS_AS(estimate_heart_rate({0.5, 0.5}), DataError);
  CHECK_THROWS_AS(estimate_heart_rate({0.5, 0.2}), DataError);
}

TEST_CASE("interpolation kernel at a reduced step count") {
  const RawTrace raw = make_trace({{0.0, 0.0}, {0.2, 2.0}, {0.4, 0.0}});
  const auto v = interpolate_uniform(raw, 5);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(2.0));
  CHECK(v[3] == doctest::Approx(1.0));
  CHECK(v[4] == doctest::Approx(0.0));
}

TEST_CASE("resampling preserves endpoints and stays inside the input range") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> vel(0.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    RawTrace raw;
    double t = 0.0;
    for (int i = 0; i < 15; ++i) {
      raw.points.push_back({t, vel(rng)});
      t += 0.01 + 0.005 * static_cast<double>(rng() % 4);
    }
    const VelocityTrace out = resample_trace(raw, 200, 120.0);
    REQUIRE(out.size() == 200);
    CHECK(out.times_s.front() == 0.0);
    CHECK(out.times_s.back() == doctest::Approx(raw.end_time()).epsilon(1e-12));
    CHECK(out.velocities_m_per_s.front() ==
          doctest::Approx(raw.points.front().velocity_m_per_s));
    CHECK(out.velocities_m_per_s.back() ==
          doctest::Approx(raw.points.back().velocity_m_per_s));

    double lo = raw.points[0].velocity_m_per_s, hi = lo;
    for (const auto& p : raw.points) {
      lo = std::min(lo, p.velocity_m_per_s);
      hi = std::max(hi, p.velocity_m_per_s);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.velocities_m_per_s[i] >= lo - 1e-12);
      CHECK(out.velocities_m_per_s[i] <= hi + 1e-12);
      CHECK(out.velocities_m_per_s[i] ==
            doctest::Approx(interp_reference(raw, out.times_s[i]))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("resample_trace validates the step count") {
  const RawTrace raw = make_trace({{0.0, 0.0}, {0.2, 2.0}, {0.4, 0.0}});
  CHECK_THROWS_AS(resample_trace(raw, 100, 120.0), ConfigError);
  CHECK_THROWS_AS(resample_trace(raw, 0, 120.0), ConfigError);
  CHECK_NOTHROW(resample_trace(raw, 200, 120.0));
  CHECK_NOTHROW(resample_trace(raw, 350, 120.0));
}

TEST_CASE("dataset assembly row counts") {
  const RawTrace raw = make_trace({{0.0, 0.0}, {0.2, 2.0}, {0.4, 0.0}});
  const VelocityTrace t200 = resample_trace(raw, 200, 120.0);
  const VelocityTrace t350 = resample_trace(raw, 350, 110.0);

  CHECK(assemble_dataset({t200}).rows.size() == 200);
  CHECK(assemble_dataset({t200, t350}).rows.size() == 550);

  std::vector<VelocityTrace> corpus;
  for (int i = 0; i < 13; ++i) corpus.push_back(t200);
  for (int i = 0; i < 3; ++i) corpus.push_back(t350);
  CHECK(assemble_dataset(corpus).rows.size() == 3650);

  CHECK_THROWS_AS(assemble_dataset({}), DataError);
}

TEST_CASE("dataset rows carry every field") {
  const RawTrace raw = make_trace({{0.0, 0.1}, {0.2, 2.0}, {0.4, 0.1}},
                                  VesselId::left_subclavian,
                                  CaseId::post_intervention);
  const Dataset d = assemble_dataset({resample_trace(raw, 200, 111.5)});
  for (const auto& row : d.rows) {
    CHECK(row.vessel == VesselId::left_subclavian);
    CHECK(row.intervention_case == CaseId::post_intervention);
    CHECK(row.heart_rate_bpm == 111.5);
    CHECK(std::isfinite(row.time_s));
    CHECK(std::isfinite(row.velocity_m_per_s));
  }
}

TEST_CASE("synthetic pulse peaks at mid-systole") {
  const RawTrace t = synth_trace(120.0, 1.0, 0.35, 1, VesselId::ascending_aorta,
                                 CaseId::pre_intervention, 0.0, 1);
  bool found = false;
  for (const auto& p : t.points) {
    if (std::abs(p.time_s - 0.0875) < 1e-9) {
      CHECK(p.velocity_m_per_s == doctest::Approx(1.0).epsilon(1e-9));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("synthetic diastole is exactly zero without noise") {
  const RawTrace t = synth_trace(120.0, 1.0, 0.35, 2, VesselId::ascending_aorta,
                                 CaseId::pre_intervention, 0.0, 1);
  const double period = 0.5, systole = 0.175;
  int diastole_samples = 0;
  for (const auto& p : t.points) {
    const double phase =
        p.time_s - period * std::floor(p.time_s / period + 1e-9);
    if (phase > systole + 1e-9) {
      CHECK(p.velocity_m_per_s == 0.0);
      ++diastole_samples;
    }
  }
  CHECK(diastole_samples > 100);
}

TEST_CASE("synthetic traces are deterministic per seed") {
  const auto a = synth_trace(130.0, 1.5, 0.4, 2, VesselId::coarctation,
                             CaseId::pre_intervention, 0.05, 42);
  const auto b = synth_trace(130.0, 1.5, 0.4, 2, VesselId::coarctation,
                             CaseId::pre_intervention, 0.05, 42);
  const auto c = synth_trace(130.0, 1.5, 0.4, 2, VesselId::coarctation,
                             CaseId::pre_intervention, 0.05, 43);
  REQUIRE(a.points.size() == b.points.size());
  bool all_equal = true, any_diff_c = false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    all_equal = all_equal &&
                a.points[i].velocity_m_per_s == b.points[i].velocity_m_per_s;
    any_diff_c = any_diff_c ||
                 a.points[i].velocity_m_per_s != c.points[i].velocity_m_per_s;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("synthetic traces repeat cycle to cycle within the noise bound") {
  const double noise = 0.04;
  const auto t = synth_trace(125.0, 1.2, 0.38, 3, VesselId::descending_aorta,
                             CaseId::pre_intervention, noise, 9);
  const std::size_t per_cycle = 160;  // sampling resolution of synth_trace
  for (std::size_t i = 0; i + per_cycle < t.points.size(); ++i) {
    CHECK(std::abs(t.points[i].velocity_m_per_s -
                   t.points[i + per_cycle].velocity_m_per_s) <= noise + 1e-9);
  }
}

TEST_CASE("dataset csv round trip") {
  const RawTrace raw = make_trace({{0.0, 0.1}, {0.2, 2.0}, {0.4, 0.1}},
                                  VesselId::coarctation,
                                  CaseId::pre_intervention);
  const Dataset d = assemble_dataset({resample_trace(raw, 200, 135.6)});
  const Dataset back = dataset_from_csv(dataset_to_csv(d));
  REQUIRE(back.rows.size() == d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    CHECK(back.rows[i].time_s == d.rows[i].time_s);
    CHECK(back.rows[i].velocity_m_per_s == d.rows[i].velocity_m_per_s);
    CHECK(back.rows[i].vessel == d.rows[i].vessel);
    CHECK(back.rows[i].intervention_case == d.rows[i].intervention_case);
    CHECK(back.rows[i].heart_rate_bpm == d.rows[i].heart_rate_bpm);
  }
}
