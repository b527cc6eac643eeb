#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "bc.hpp"

using namespace coarcta;

namespace {

VelocityTrace flat_trace(VesselId vessel, std::vector<double> velocities) {
  VelocityTrace t;
  t.vessel = vessel;
  t.velocities_m_per_s = std::move(velocities);
  t.times_s.resize(t.velocities_m_per_s.size());
  for (std::size_t i = 0; i < t.times_s.size(); ++i) {
    t.times_s[i] = 0.01 * static_cast<double>(i);
  }
  t.heart_rate_bpm = 120.0;
  t.intervention_case = CaseId::pre_intervention;
  return t;
}

MassFlowProfile profile_of(VesselId vessel, std::vector<double> times,
                           std::vector<double> flows) {
  return {std::move(times), std::move(flows), vessel};
}

// Continuity-corrected peak map; values chosen exactly representable so sums
// are order-independent in the tests that need it.
std::map<VesselId, double> sample_peaks() {
  std::map<VesselId, double> peaks;
  peaks[VesselId::innominate_artery] = 0.125;
  peaks[VesselId::left_common_carotid] = 0.0625;
  peaks[VesselId::left_subclavian] = 0.0625;
  peaks[VesselId::descending_aorta] = 0.25;
  peaks[VesselId::ascending_aorta] =
      enforce_continuity({0.125, 0.0625, 0.0625, 0.25});
  return peaks;
}

}  // namespace

TEST_CASE("plug-flow mass conversion") {
  const auto geometry = [] {
    VesselGeometry g = VesselGeometry::synthetic_default();
    g.area_m2[VesselId::ascending_aorta] = 2e-4;
    return g;
  }();
  const FluidProperties fluid{1060.0, 0.004};

  const auto p = velocity_to_massflow(
      flat_trace(VesselId::ascending_aorta, {1.0, 0.0, 2.0}), geometry, fluid);
  CHECK(p.mass_flow_kg_per_s[0] == doctest::Approx(0.212).epsilon(1e-12));
  CHECK(p.mass_flow_kg_per_s[1] == 0.0);
  CHECK(p.mass_flow_kg_per_s[2] == doctest::Approx(0.424).epsilon(1e-12));
  CHECK(p.vessel == VesselId::ascending_aorta);
  CHECK(p.times_s.size() == 3);
}

TEST_CASE("mass conversion is linear in area, density, and velocity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    VesselGeometry g = VesselGeometry::synthetic_default();
    const double area = val(rng) * 1e-4;
    g.area_m2[VesselId::descending_aorta] = area;
    VesselGeometry g2 = g;
    g2.area_m2[VesselId::descending_aorta] = 2.0 * area;
    const FluidProperties fluid{val(rng) * 1000.0, 0.004};
    const auto trace = flat_trace(VesselId::descending_aorta,
                                  {val(rng), val(rng), val(rng)});

    const auto p1 = velocity_to_massflow(trace, g, fluid);
    const auto p2 = velocity_to_massflow(trace, g2, fluid);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(p2.mass_flow_kg_per_s[i] ==
            doctest::Approx(2.0 * p1.mass_flow_kg_per_s[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mass conversion requires a configured vessel area") {
  VesselGeometry g = VesselGeometry::synthetic_default();
  g.area_m2.erase(VesselId::coarctation);
  CHECK_THROWS_AS(velocity_to_massflow(flat_trace(VesselId::coarctation, {1.0}),
                                       g, FluidProperties{}),
                  ConfigError);
}

TEST_CASE("peak snapshot picks the inlet argmax") {
  const auto inlet = profile_of(VesselId::ascending_aorta, {0.0, 0.1, 0.2},
                                {0.0, 2.0, 1.0});
  const auto outlet = profile_of(VesselId::descending_aorta, {0.0, 0.1, 0.2},
                                 {0.0, 0.5, 0.4});
  const PeakSnapshot snap = peak_snapshot(inlet, {inlet, outlet});
  CHECK(snap.t_peak_s == 0.1);
  CHECK(snap.values_kg_per_s.at(VesselId::descending_aorta) == 0.5);
  CHECK(snap.values_kg_per_s.at(VesselId::ascending_aorta) == 2.0);
}

TEST_CASE("peak snapshot tie-breaks to the earliest index") {
  const auto inlet =
      profile_of(VesselId::ascending_aorta, {0.0, 0.1, 0.2}, {1.0, 1.0, 1.0});
  CHECK(peak_snapshot(inlet, {inlet}).t_peak_s == 0.0);
}

TEST_CASE("peak snapshot time is invariant under positive rescaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 2.0);
  std::uniform_real_distribution<double> scale_d(0.1, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> times, flows;
    for (int i = 0; i < 40; ++i) {
      times.push_back(0.01 * i);
      flows.push_back(val(rng));
    }
    const auto inlet = profile_of(VesselId::ascending_aorta, times, flows);
    auto scaled_flows = flows;
    const double k = scale_d(rng);
    for (double& f : scaled_flows) f *= k;
    const auto scaled = profile_of(VesselId::ascending_aorta, times,
                                   scaled_flows);
    CHECK(peak_snapshot(inlet, {inlet}).t_peak_s ==
          peak_snapshot(scaled, {scaled}).t_peak_s);
  }
}

TEST_CASE("peak snapshot rejects mismatched time grids") {
  const auto inlet =
      profile_of(VesselId::ascending_aorta, {0.0, 0.1}, {1.0, 2.0});
  const auto outlet =
      profile_of(VesselId::descending_aorta, {0.0, 0.2}, {1.0, 2.0});
  CHECK_THROWS_AS(peak_snapshot(inlet, {inlet, outlet}), DataError);
}

TEST_CASE("continuity correction sums the outlets") {
  CHECK(enforce_continuity({0.1, 0.05, 0.05, 0.2}) ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(enforce_continuity({0.0, 0.0, 0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(enforce_continuity({0.1, -0.01, 0.05, 0.2}), DataError);
}

TEST_CASE("continuity correction is permutation invariant") {
  // Binary-exact values keep the fold independent of order.
  const std::array<double, 4> base{0.25, 0.5, 0.125, 0.0625};
  const double expected = enforce_continuity(base);
  std::array<double, 4> perm = base;
  std::sort(perm.begin(), perm.end());
  do {
    CHECK(enforce_continuity(perm) == expected);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("assembled kinds match the four BC layouts") {
  const auto peaks = sample_peaks();

  const auto bc1 = assemble_bc_set(BcType::bc1, peaks, "knn");
  CHECK(bc1.inlet.kind == BoundaryKind::mass_flow);
  CHECK(bc1.inlet.mass_flow_kg_per_s.has_value());
  for (const auto& o : bc1.outlets) {
    CHECK(o.kind == BoundaryKind::zero_pressure);
    CHECK_FALSE(o.mass_flow_kg_per_s.has_value());
  }

  const auto bc2 = assemble_bc_set(BcType::bc2, peaks, "knn");
  for (const auto& o : bc2.outlets) {
    if (o.vessel == VesselId::descending_aorta) {
      CHECK(o.kind == BoundaryKind::zero_pressure);
      CHECK_FALSE(o.mass_flow_kg_per_s.has_value());
    } else {
      CHECK(o.kind == BoundaryKind::mass_flow);
      CHECK(o.mass_flow_kg_per_s.has_value());
    }
  }

  const auto bc3 = assemble_bc_set(BcType::bc3, peaks, "knn");
  for (const auto& o : bc3.outlets) {
    CHECK(o.kind == BoundaryKind::zero_pressure_target_mass_flow);
    CHECK(o.mass_flow_kg_per_s.has_value());
  }

  const auto bc4 = assemble_bc_set(BcType::bc4, peaks, "knn");
  for (const auto& o : bc4.outlets) {
    if (o.vessel == VesselId::descending_aorta) {
      CHECK(o.kind == BoundaryKind::zero_pressure_target_mass_flow);
    } else {
      CHECK(o.kind == BoundaryKind::mass_flow);
    }
    CHECK(o.mass_flow_kg_per_s.has_value());
  }

  // Inlet is always a mass-flow boundary at the ascending aorta.
  for (const auto& set : {bc1, bc2, bc3, bc4}) {
    CHECK(set.inlet.vessel == VesselId::ascending_aorta);
    CHECK(set.inlet.kind == BoundaryKind::mass_flow);
    CHECK(*set.inlet.mass_flow_kg_per_s ==
          enforce_continuity({0.125, 0.0625, 0.0625, 0.25}));
  }
}

TEST_CASE("assembly requires every boundary vessel and continuity") {
  auto peaks = sample_peaks();
  peaks.erase(VesselId::left_subclavian);
  CHECK_THROWS_AS(assemble_bc_set(BcType::bc1, peaks, "x"), DataError);

  auto bad = sample_peaks();
  bad[VesselId::ascending_aorta] += 0.1;
  CHECK_THROWS_WITH_AS(assemble_bc_set(BcType::bc1, bad, "x"),
                       doctest::Contains("continuity"), DataError);
}

TEST_CASE("deviation stats") {
  auto peaks_a = sample_peaks();
  auto peaks_b = sample_peaks();
  peaks_a[VesselId::descending_aorta] = 0.9;
  peaks_b[VesselId::descending_aorta] = 1.1;
  peaks_a[VesselId::ascending_aorta] = enforce_continuity(
      {peaks_a[VesselId::innominate_artery],
       peaks_a[VesselId::left_common_carotid],
       peaks_a[VesselId::left_subclavian], 0.9});
  peaks_b[VesselId::ascending_aorta] = enforce_continuity(
      {peaks_b[VesselId::innominate_artery],
       peaks_b[VesselId::left_common_carotid],
       peaks_b[VesselId::left_subclavian], 1.1});

  const auto set_a = assemble_bc_set(BcType::bc3, peaks_a, "a");
  const auto set_b = assemble_bc_set(BcType::bc3, peaks_b, "b");
  const auto stats = bc_deviation_stats({set_a, set_b});
  CHECK(stats.at(VesselId::descending_aorta) ==
        doctest::Approx(10.0).epsilon(1e-9));
  CHECK(stats.at(VesselId::innominate_artery) == 0.0);

  const auto identical = bc_deviation_stats({set_a, set_a});
  for (const auto& [vessel, pct] : identical) CHECK(pct == 0.0);
}

TEST_CASE("deviation stats reject a zero mean") {
  auto zero = sample_peaks();
  for (auto& [vessel, v] : zero) v = 0.0;
  const auto set_a = assemble_bc_set(BcType::bc3, zero, "a");
  CHECK_THROWS_AS(bc_deviation_stats({set_a, set_a}), NumericError);
}

TEST_CASE("snapshot export of BC1 carries exactly one numeric value") {
  const auto set = assemble_bc_set(BcType::bc1, sample_peaks(), "knn");
  const std::string text = export_bc(set, BcExportMode::snapshot, nullptr);
  std::size_t boundary_lines = 0, value_lines = 0, point_lines = 0;
  for (auto line : split(text, '\n')) {
    if (line.rfind("boundary,", 0) == 0) ++boundary_lines;
    if (line.rfind("value,", 0) == 0) ++value_lines;
    if (line.rfind("point,", 0) == 0) ++point_lines;
  }
  CHECK(boundary_lines == 5);
  CHECK(value_lines == 1);
  CHECK(point_lines == 0);
  CHECK(text.rfind("#coarcta-bc v1 BC1 knn\n", 0) == 0);
}

TEST_CASE("transient export writes one point row per sample per boundary") {
  const auto set = assemble_bc_set(BcType::bc2, sample_peaks(), "knn");
  std::vector<MassFlowProfile> profiles;
  std::vector<double> times(200), flows(200);
  for (std::size_t i = 0; i < 200; ++i) {
    times[i] = 0.002 * static_cast<double>(i);
    flows[i] = 0.1 + 0.001 * static_cast<double>(i);
  }
  for (VesselId v : {VesselId::ascending_aorta, VesselId::innominate_artery,
                     VesselId::left_common_carotid, VesselId::left_subclavian,
                     VesselId::descending_aorta}) {
    profiles.push_back(profile_of(v, times, flows));
  }
  const std::string text = export_bc(set, BcExportMode::transient, &profiles);
  std::size_t point_lines = 0;
  for (auto line : split(text, '\n')) {
    if (line.rfind("point,", 0) == 0) ++point_lines;
  }
  // BC2 has four mass-flow boundaries (inlet + three arch branches).
  CHECK(point_lines == 4 * 200);

  CHECK_THROWS_AS(export_bc(set, BcExportMode::transient, nullptr), DataError);
}

TEST_CASE("export/parse round trip is lossless for all types and modes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(0.01, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    std::map<VesselId, double> peaks;
    std::array<double, 4> outlets{};
    for (std::size_t i = 0; i < 4; ++i) {
      outlets[i] = val(rng);
      peaks[kOutletVessels[i]] = outlets[i];
    }
    peaks[VesselId::ascending_aorta] = enforce_continuity(outlets);

    std::vector<MassFlowProfile> profiles;
    std::vector<double> times(37);
    for (std::size_t i = 0; i < times.size(); ++i) {
      times[i] = 0.003 * static_cast<double>(i);
    }
    for (VesselId v :
         {VesselId::ascending_aorta, VesselId::innominate_artery,
          VesselId::left_common_carotid, VesselId::left_subclavian,
          VesselId::descending_aorta}) {
      std::vector<double> flows(times.size());
      for (double& f : flows) f = val(rng);
      profiles.push_back(profile_of(v, times, flows));
    }

    for (BcType type : kAllBcTypes) {
      const auto set = assemble_bc_set(type, peaks, "model_x");
      for (BcExportMode mode :
           {BcExportMode::snapshot, BcExportMode::transient}) {
        const ParsedBcFile parsed =
            parse_bc(export_bc(set, mode, &profiles));
        CHECK(parsed.set.equals(set));
        if (mode == BcExportMode::snapshot) {
          CHECK(parsed.profiles.empty());
        } else {
          // Every valued boundary's profile must survive exactly.
          for (const auto& record : parsed.set.outlets) {
            if (!record.mass_flow_kg_per_s) continue;
            bool found = false;
            for (const auto& p : parsed.profiles) {
              if (p.vessel != record.vessel) continue;
              found = true;
              for (const auto& orig : profiles) {
                if (orig.vessel != record.vessel) continue;
                CHECK(p.times_s == orig.times_s);
                CHECK(p.mass_flow_kg_per_s == orig.mass_flow_kg_per_s);
              }
            }
            CHECK(found);
          }
        }
      }
    }
  }
}

TEST_CASE("geometry config parses, validates, and round trips") {
  const VesselGeometry g = VesselGeometry::synthetic_default();
  const VesselGeometry back = VesselGeometry::from_text(g.to_text());
  for (VesselId v : kAllVessels) CHECK(back.area_of(v) == g.area_of(v));
  CHECK(back.coarctation_throat_area_m2 == g.coarctation_throat_area_m2);

  CHECK_THROWS_AS(VesselGeometry::from_text("ascending_aorta = 2e-4\n"),
                  ConfigError);  // everything else missing
  CHECK_THROWS_AS(VesselGeometry::from_text("nonsense line\n"), ConfigError);

  VesselGeometry bad = g;
  bad.coarctation_throat_area_m2 = bad.area_of(VesselId::ascending_aorta) * 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = g;
  bad.area_m2[VesselId::coarctation] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
