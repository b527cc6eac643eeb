#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"

using namespace coarcta;

namespace {

// A continuity-corrected set whose DAo flow is `dao`, split arbitrarily
// across the arch branches.
BoundaryConditionSet set_with_dao(BcType type, double dao,
                                  double arch_each = 0.05) {
  std::map<VesselId, double> peaks;
  peaks[VesselId::innominate_artery] = arch_each;
  peaks[VesselId::left_common_carotid] = arch_each;
  peaks[VesselId::left_subclavian] = arch_each;
  peaks[VesselId::descending_aorta] = dao;
  peaks[VesselId::ascending_aorta] =
      enforce_continuity({arch_each, arch_each, arch_each, dao});
  BoundaryConditionSet set = assemble_bc_set(type, peaks, "test");
  PeakSnapshot snap;
  snap.t_peak_s = 0.1;
  snap.values_kg_per_s = peaks;
  set.snapshot = snap;
  return set;
}

VesselGeometry geometry_with_throat(double throat) {
  VesselGeometry g = VesselGeometry::synthetic_default();
  g.coarctation_throat_area_m2 = throat;
  return g;
}

}  // namespace

TEST_CASE("coarct velocity from the reduced-order continuity relation") {
  const auto set = set_with_dao(BcType::bc3, 0.2);
  const FluidProperties fluid{1060.0, 0.004};
  const double v = coarct_velocity(set, geometry_with_throat(5e-5), fluid);
  CHECK(v == doctest::Approx(0.2 / (1060.0 * 5e-5)).epsilon(1e-12));
  CHECK(std::abs(v - 3.7736) < 1e-4);

  // Degree -1 in throat area, degree 1 in flow.
  CHECK(coarct_velocity(set, geometry_with_throat(1e-4), fluid) ==
        doctest::Approx(v / 2.0).epsilon(1e-12));
  const auto doubled = set_with_dao(BcType::bc3, 0.4);
  CHECK(coarct_velocity(doubled, geometry_with_throat(5e-5), fluid) ==
        doctest::Approx(2.0 * v).epsilon(1e-12));

  const auto zero = set_with_dao(BcType::bc3, 0.0);
  CHECK(coarct_velocity(zero, geometry_with_throat(5e-5), fluid) == 0.0);
}

TEST_CASE("descending-aorta flow resolution per BC type") {
  // BC3/BC4 carry the DAo value formally.
  CHECK(descending_aorta_flow(set_with_dao(BcType::bc3, 0.2)) == 0.2);
  CHECK(descending_aorta_flow(set_with_dao(BcType::bc4, 0.2)) == 0.2);

  // BC2 derives it from inlet minus the arch branches.
  auto bc2 = set_with_dao(BcType::bc2, 0.2);
  bc2.snapshot.reset();
  CHECK(descending_aorta_flow(bc2) ==
        doctest::Approx(0.2).epsilon(1e-12));

  // BC1 needs the generation snapshot; without it the flow is unavailable.
  auto bc1 = set_with_dao(BcType::bc1, 0.2);
  CHECK(descending_aorta_flow(bc1) == 0.2);
  bc1.snapshot.reset();
  CHECK_THROWS_AS(descending_aorta_flow(bc1), DataError);
}

TEST_CASE("simplified Bernoulli pressure drop") {
  CHECK(simplified_bernoulli(3.49) ==
        doctest::Approx(4.0 * 3.49 * 3.49).epsilon(1e-12));
  CHECK(std::abs(simplified_bernoulli(3.49) - 48.72) < 0.01);
  CHECK(simplified_bernoulli(0.0) == 0.0);
  CHECK_THROWS_AS(simplified_bernoulli(-1.0), DataError);

  CHECK(warrants_intervention(simplified_bernoulli(3.49)));
  CHECK_FALSE(warrants_intervention(19.9));

  // Strictly increasing for v > 0.
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double dp = simplified_bernoulli(0.05 * i);
    CHECK(dp > prev);
    prev = dp;
  }
}

TEST_CASE("percent error") {
  CHECK(std::abs(percent_error(3.32, 3.49) - 4.87) < 0.01);
  CHECK(percent_error(3.49, 3.49) == 0.0);
  CHECK(percent_error(1.2345, 1.2345) == 0.0);
  CHECK_THROWS_AS(percent_error(1.0, 0.0), DataError);
  CHECK_THROWS_AS(percent_error(1.0, -2.0), DataError);
}

TEST_CASE("percent error is scale invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = val(rng), b = val(rng), k = val(rng);
    CHECK(percent_error(k * a, k * b) ==
          doctest::Approx(percent_error(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("evaluate_bc_set composes its member operations") {
  const auto set = set_with_dao(BcType::bc2, 0.185);
  const VesselGeometry geometry = geometry_with_throat(5e-5);
  const FluidProperties fluid{1060.0, 0.004};
  const OracleReport report = evaluate_bc_set(set, geometry, fluid, 3.49);

  CHECK(report.peak_coarct_velocity_m_per_s ==
        coarct_velocity(set, geometry, fluid));
  CHECK(report.pressure_drop_mmHg ==
        simplified_bernoulli(report.peak_coarct_velocity_m_per_s));
  CHECK(report.percent_error_vs_measured ==
        percent_error(report.peak_coarct_velocity_m_per_s, 3.49));
  CHECK(report.provenance == "test");
  CHECK(report.bc_type == BcType::bc2);

  // Continuity-corrected sets have a bitwise-zero residual.
  CHECK(report.continuity_residual_kg_per_s == 0.0);
}

TEST_CASE("continuity residual is exactly zero for every corrected set") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> val(0.001, 0.7);
  const VesselGeometry geometry = geometry_with_throat(5e-5);
  const FluidProperties fluid{1060.0, 0.004};
  for (int trial = 0; trial < 200; ++trial) {
    std::map<VesselId, double> peaks;
    std::array<double, 4> outlets{};
    for (std::size_t i = 0; i < 4; ++i) {
      outlets[i] = val(rng);
      peaks[kOutletVessels[i]] = outlets[i];
    }
    peaks[VesselId::ascending_aorta] = enforce_continuity(outlets);
    for (BcType type : kAllBcTypes) {
      BoundaryConditionSet set = assemble_bc_set(type, peaks, "p");
      PeakSnapshot snap;
      snap.values_kg_per_s = peaks;
      set.snapshot = snap;
      const OracleReport report = evaluate_bc_set(set, geometry, fluid, 3.49);
      CHECK(report.continuity_residual_kg_per_s == 0.0);
    }
  }
}

TEST_CASE("a known flow reproduces the headline error figure") {
  // DAo flow tuned so v = 3.3197 m/s, the simulated value whose error
  // against the measured 3.49 m/s is 4.88%.
  const double mdot = 3.3197 * 1060.0 * 5e-5;
  const auto set = set_with_dao(BcType::bc2, mdot);
  const OracleReport report = evaluate_bc_set(
      set, geometry_with_throat(5e-5), FluidProperties{1060.0, 0.004}, 3.49);
  CHECK(std::abs(report.percent_error_vs_measured - 4.88) <= 0.01);
}

TEST_CASE("oracle report csv layout") {
  const auto set = set_with_dao(BcType::bc4, 0.2);
  const OracleReport report = evaluate_bc_set(
      set, geometry_with_throat(5e-5), FluidProperties{1060.0, 0.004}, 3.49);
  const std::string csv = oracle_reports_to_csv({report});
  CHECK(csv.rfind("provenance,bc_type,v_max_m_per_s,dp_mmHg,percent_error,"
                  "continuity_residual_kg_per_s\n",
                  0) == 0);
  CHECK(csv.find("test,BC4,") != std::string::npos);
}
