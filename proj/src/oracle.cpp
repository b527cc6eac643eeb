#include "oracle.hpp"

#include <cmath>

namespace coarcta {

namespace {

// Outlet value in canonical order, preferring the generation snapshot so the
// residual of a generated set reproduces the exact sum it was built from.
std::optional<double> outlet_value(const BoundaryConditionSet& bc,
                                   VesselId vessel) {
  if (bc.snapshot) {
    auto it = bc.snapshot->values_kg_per_s.find(vessel);
    if (it != bc.snapshot->values_kg_per_s.end()) return it->second;
  }
  if (const BoundaryRecord* r = bc.record_for(vessel)) {
    if (r->mass_flow_kg_per_s) return r->mass_flow_kg_per_s;
  }
  return std::nullopt;
}

double inlet_value(const BoundaryConditionSet& bc) {
  if (!bc.inlet.mass_flow_kg_per_s) {
    throw DataError("BC set has no inlet mass flow value");
  }
  return *bc.inlet.mass_flow_kg_per_s;
}

}  // namespace

double descending_aorta_flow(const BoundaryConditionSet& bc) {
  if (auto direct = outlet_value(bc, VesselId::descending_aorta)) {
    return *direct;
  }
  double arch_sum = 0.0;
  for (VesselId vessel : kOutletVessels) {
    if (vessel == VesselId::descending_aorta) continue;
    auto v = outlet_value(bc, vessel);
    if (!v) {
      throw DataError(
          "descending-aorta flow unavailable: " + std::string(to_string(bc.type)) +
          " set carries neither a DAo value nor the arch-branch values needed "
          "to derive it");
    }
    arch_sum += *v;
  }
  return inlet_value(bc) - arch_sum;
}

double coarct_velocity(const BoundaryConditionSet& bc,
                       const VesselGeometry& geometry,
                       const FluidProperties& fluid) {
  if (geometry.coarctation_throat_area_m2 <= 0.0) {
    throw ConfigError("coarctation throat area must be positive");
  }
  if (fluid.density_kg_per_m3 <= 0.0) {
    throw ConfigError("fluid density must be positive");
  }
  return descending_aorta_flow(bc) /
         (fluid.density_kg_per_m3 * geometry.coarctation_throat_area_m2);
}

double simplified_bernoulli(double v_max_m_per_s) {
  if (v_max_m_per_s < 0.0) {
    throw DataError("simplified Bernoulli needs a non-negative velocity");
  }
  return 4.0 * v_max_m_per_s * v_max_m_per_s;
}

double percent_error(double simulated, double measured) {
  if (measured <= 0.0) {
    throw DataError("percent error needs a positive measured value");
  }
  return 100.0 * std::abs(simulated - measured) / measured;
}

OracleReport evaluate_bc_set(const BoundaryConditionSet& bc,
                             const VesselGeometry& geometry,
                             const FluidProperties& fluid,
                             double measured_velocity_m_per_s) {
  OracleReport report;
  report.provenance = bc.provenance;
  report.bc_type = bc.type;
  report.peak_coarct_velocity_m_per_s = coarct_velocity(bc, geometry, fluid);
  report.pressure_drop_mmHg =
      simplified_bernoulli(report.peak_coarct_velocity_m_per_s);
  report.percent_error_vs_measured = percent_error(
      report.peak_coarct_velocity_m_per_s, measured_velocity_m_per_s);

  double outlet_sum = 0.0;
  for (VesselId vessel : kOutletVessels) {
    auto v = outlet_value(bc, vessel);
    if (v) {
      outlet_sum += *v;
    } else if (vessel == VesselId::descending_aorta) {
      outlet_sum += descending_aorta_flow(bc);
    } else {
      throw DataError("continuity residual unavailable: missing outlet value");
    }
  }
  report.continuity_residual_kg_per_s = inlet_value(bc) - outlet_sum;
  return report;
}

std::string oracle_reports_to_csv(const std::vector<OracleReport>& reports) {
  std::string out =
      "provenance,bc_type,v_max_m_per_s,dp_mmHg,percent_error,"
      "continuity_residual_kg_per_s\n";
  for (const auto& r : reports) {
    out += r.provenance;
    out += ',';
    out += to_string(r.bc_type);
    out += ',';
    out += format_double(r.peak_coarct_velocity_m_per_s);
    out += ',';
    out += format_double(r.pressure_drop_mmHg);
    out += ',';
    out += format_double(r.percent_error_vs_measured);
    out += ',';
    out += format_double(r.continuity_residual_kg_per_s);
    out += '\n';
  }
  return out;
}

}  // namespace coarcta
