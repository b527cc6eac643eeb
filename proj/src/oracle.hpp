#pragma once

#include <string>
#include <vector>

#include "bc.hpp"
#include "common.hpp"

namespace coarcta {

// Reduced-order evaluation of a BC set. This is a continuity-based,
// inviscid, quasi-steady surrogate for a full 3D solve: it recovers the peak
// coarctation jet velocity implied by the descending-aorta mass flow and the
// throat area, nothing more.
struct OracleReport {
  double peak_coarct_velocity_m_per_s = 0.0;
  double pressure_drop_mmHg = 0.0;
  double percent_error_vs_measured = 0.0;
  double continuity_residual_kg_per_s = 0.0;
  std::string provenance;
  BcType bc_type = BcType::bc1;
};

// Peak systolic pressure difference above which intervention is indicated.
inline constexpr double kInterventionThresholdMmHg = 20.0;

// Descending-aorta mass flow for a BC set: the formal DAo record when the
// type carries one (BC3/BC4), otherwise inlet minus the arch-branch values
// (formal records or the generation snapshot). Throws DataError when neither
// is available (a BC1 file parsed without its snapshot).
double descending_aorta_flow(const BoundaryConditionSet& bc);

// v = mdot / (density * throat area).
double coarct_velocity(const BoundaryConditionSet& bc,
                       const VesselGeometry& geometry,
                       const FluidProperties& fluid);

// Clinical simplified Bernoulli relation: dP[mmHg] = 4 * v^2 with v in m/s.
double simplified_bernoulli(double v_max_m_per_s);

inline bool warrants_intervention(double pressure_drop_mmHg) {
  return pressure_drop_mmHg > kInterventionThresholdMmHg;
}

// 100 * |simulated - measured| / measured; measured must be positive.
double percent_error(double simulated, double measured);

OracleReport evaluate_bc_set(const BoundaryConditionSet& bc,
                             const VesselGeometry& geometry,
                             const FluidProperties& fluid,
                             double measured_velocity_m_per_s);

// CSV with header
// provenance,bc_type,v_max_m_per_s,dp_mmHg,percent_error,continuity_residual_kg_per_s
std::string oracle_reports_to_csv(const std::vector<OracleReport>& reports);

}  // namespace coarcta
