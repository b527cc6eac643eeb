#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "trace.hpp"

namespace coarcta {

struct FluidProperties {
  double density_kg_per_m3 = 1060.0;
  // Carried for export metadata; the reduced-order evaluation is inviscid.
  double viscosity_kg_per_m_s = 0.004;
};

struct VesselGeometry {
  std::map<VesselId, double> area_m2;
  double coarctation_throat_area_m2 = 0.0;

  double area_of(VesselId vessel) const;
  void validate() const;

  // Placeholder areas for tests and demos only; not patient measurements.
  static VesselGeometry synthetic_default();

  static VesselGeometry from_text(std::string_view content);
  std::string to_text() const;
};

struct MassFlowProfile {
  std::vector<double> times_s;
  std::vector<double> mass_flow_kg_per_s;
  VesselId vessel = VesselId::ascending_aorta;
};

enum class BcType { bc1, bc2, bc3, bc4 };

std::string_view to_string(BcType type);  // "BC1".."BC4"
BcType bc_type_from_string(std::string_view name);

inline constexpr BcType kAllBcTypes[] = {BcType::bc1, BcType::bc2, BcType::bc3,
                                         BcType::bc4};

enum class BoundaryKind {
  mass_flow,
  zero_pressure,
  zero_pressure_target_mass_flow,
};

std::string_view to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(std::string_view name);

struct BoundaryRecord {
  VesselId vessel = VesselId::ascending_aorta;
  BoundaryKind kind = BoundaryKind::zero_pressure;
  std::optional<double> mass_flow_kg_per_s;  // present iff the kind carries one

  bool operator==(const BoundaryRecord&) const = default;
};

// Mass flow at every boundary at the instant of peak inlet flow. Kept on
// generated sets as provenance so the reduced-order evaluation can recover
// flows that the formal records of a BC type do not carry (BC1's outlets).
// Not part of the exported file format, so sets parsed back from files carry
// none.
struct PeakSnapshot {
  double t_peak_s = 0.0;
  std::map<VesselId, double> values_kg_per_s;
};

struct BoundaryConditionSet {
  BcType type = BcType::bc1;
  std::string provenance;  // model name or "not_adjusted"
  BoundaryRecord inlet;    // ascending aorta
  std::array<BoundaryRecord, 4> outlets;  // outlets 1-4 (see kOutletVessels)
  std::optional<PeakSnapshot> snapshot;

  // Equality covers the formal content only (type, provenance, records);
  // the snapshot is auxiliary.
  bool equals(const BoundaryConditionSet& other) const;

  const BoundaryRecord* record_for(VesselId vessel) const;
};

// Plug-flow conversion: mass_flow[i] = density * area(vessel) * velocity[i].
MassFlowProfile velocity_to_massflow(const VelocityTrace& trace,
                                     const VesselGeometry& geometry,
                                     const FluidProperties& fluid);

// t_peak = argmax of inlet mass flow (earliest index on ties); returns every
// profile's value at that instant. All profiles must share the inlet's grid.
PeakSnapshot peak_snapshot(const MassFlowProfile& inlet,
                           const std::vector<MassFlowProfile>& all_profiles);

// Inlet value that conserves mass: the exact sum of the four outlet values,
// folded in outlet order 1 to 4.
double enforce_continuity(const std::array<double, 4>& outlet_values_kg_per_s);

// Builds the formal record set for one BC type from continuity-corrected peak
// values (all five boundary vessels required).
BoundaryConditionSet assemble_bc_set(
    BcType type, const std::map<VesselId, double>& peak_values_kg_per_s,
    std::string provenance);

// For each vessel with >= 2 numeric values across the sets: mean absolute
// deviation from the cross-set mean, as a percentage of that mean.
std::map<VesselId, double> bc_deviation_stats(
    const std::vector<BoundaryConditionSet>& sets);

// Numeric value for a vessel, from the formal record or the snapshot.
std::optional<double> bc_value_for(const BoundaryConditionSet& set,
                                   VesselId vessel);

enum class BcExportMode { snapshot, transient };

std::string_view to_string(BcExportMode mode);
BcExportMode bc_mode_from_string(std::string_view name);

// Writes the text BC format: header line `#coarcta-bc v1 <type> <provenance>`,
// one `boundary,<vessel>,<kind>,<units>` record per boundary, `value` lines
// for every boundary whose kind carries a mass flow, and in transient mode
// additional `point,<vessel>,<time_s>,<kg_per_s>` rows from the profiles.
std::string export_bc(const BoundaryConditionSet& set, BcExportMode mode,
                      const std::vector<MassFlowProfile>* profiles);

struct ParsedBcFile {
  BoundaryConditionSet set;
  std::vector<MassFlowProfile> profiles;  // empty for snapshot files
};

ParsedBcFile parse_bc(std::string_view content);

}  // namespace coarcta
