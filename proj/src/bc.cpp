#include "bc.hpp"

#include <algorithm>
#include <cmath>

namespace coarcta {

double VesselGeometry::area_of(VesselId vessel) const {
  auto it = area_m2.find(vessel);
  if (it == area_m2.end()) {
    throw ConfigError("geometry is missing an area for vessel " +
                      std::string(to_string(vessel)));
  }
  return it->second;
}

void VesselGeometry::validate() const {
  for (VesselId v : kAllVessels) {
    if (area_of(v) <= 0.0) {
      throw ConfigError("geometry: area for " + std::string(to_string(v)) +
                        " must be positive");
    }
  }
  if (coarctation_throat_area_m2 <= 0.0) {
    throw ConfigError("geometry: coarctation_throat_area_m2 must be positive");
  }
  if (coarctation_throat_area_m2 >= area_of(VesselId::ascending_aorta)) {
    throw ConfigError(
        "geometry: coarctation throat area must be smaller than the ascending "
        "aorta area");
  }
}

VesselGeometry VesselGeometry::synthetic_default() {
  VesselGeometry g;
  g.area_m2[VesselId::ascending_aorta] = 2.54e-4;
  g.area_m2[VesselId::innominate_artery] = 6.2e-5;
  g.area_m2[VesselId::left_common_carotid] = 2.8e-5;
  g.area_m2[VesselId::left_subclavian] = 3.1e-5;
  g.area_m2[VesselId::coarctation] = 6.0e-5;
  g.area_m2[VesselId::descending_aorta] = 1.9e-4;
  g.coarctation_throat_area_m2 = 5.0e-5;
  return g;
}

VesselGeometry VesselGeometry::from_text(std::string_view content) {
  VesselGeometry g;
  std::size_t line_no = 0;
  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto pos = line.find('=');
    if (pos == std::string_view::npos) {
      throw ConfigError("geometry line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key(trim(line.substr(0, pos)));
    auto value = parse_double(line.substr(pos + 1));
    if (!value) {
      throw ConfigError("geometry line " + std::to_string(line_no) +
                        ": non-numeric value");
    }
    if (key == "coarctation_throat_area_m2") {
      g.coarctation_throat_area_m2 = *value;
    } else {
      g.area_m2[vessel_from_string(key)] = *value;
    }
  }
  g.validate();
  return g;
}

std::string VesselGeometry::to_text() const {
  std::string out = "# vessel cross-sectional areas [m^2]\n";
  for (VesselId v : kAllVessels) {
    out += std::string(to_string(v)) + " = " + format_double(area_of(v)) + "\n";
  }
  out += "coarctation_throat_area_m2 = " +
         format_double(coarctation_throat_area_m2) + "\n";
  return out;
}

std::string_view to_string(BcType type) {
  switch (type) {
    case BcType::bc1: return "BC1";
    case BcType::bc2: return "BC2";
    case BcType::bc3: return "BC3";
    case BcType::bc4: return "BC4";
  }
  throw ConfigError("invalid BC type");
}

BcType bc_type_from_string(std::string_view name) {
  for (BcType t : kAllBcTypes) {
    if (to_string(t) == name) return t;
  }
  throw DataError("unknown BC type: " + std::string(name));
}

std::string_view to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::mass_flow: return "mass_flow";
    case BoundaryKind::zero_pressure: return "zero_pressure";
    case BoundaryKind::zero_pressure_target_mass_flow:
      return "zero_pressure_target_mass_flow";
  }
  throw ConfigError("invalid boundary kind");
}

BoundaryKind boundary_kind_from_string(std::string_view name) {
  for (BoundaryKind k :
       {BoundaryKind::mass_flow, BoundaryKind::zero_pressure,
        BoundaryKind::zero_pressure_target_mass_flow}) {
    if (to_string(k) == name) return k;
  }
  throw DataError("unknown boundary kind: " + std::string(name));
}

bool BoundaryConditionSet::equals(const BoundaryConditionSet& other) const {
  return type == other.type && provenance == other.provenance &&
         inlet == other.inlet && outlets == other.outlets;
}

const BoundaryRecord* BoundaryConditionSet::record_for(VesselId vessel) const {
  if (inlet.vessel == vessel) return &inlet;
  for (const auto& r : outlets) {
    if (r.vessel == vessel) return &r;
  }
  return nullptr;
}

MassFlowProfile velocity_to_massflow(const VelocityTrace& trace,
                                     const VesselGeometry& geometry,
                                     const FluidProperties& fluid) {
  if (fluid.density_kg_per_m3 <= 0.0) {
    throw ConfigError("fluid density must be positive");
  }
  const double rho_a = fluid.density_kg_per_m3 * geometry.area_of(trace.vessel);
  MassFlowProfile profile;
  profile.vessel = trace.vessel;
  profile.times_s = trace.times_s;
  profile.mass_flow_kg_per_s.reserve(trace.size());
  for (double v : trace.velocities_m_per_s) {
    profile.mass_flow_kg_per_s.push_back(rho_a * v);
  }
  return profile;
}

PeakSnapshot peak_snapshot(const MassFlowProfile& inlet,
                           const std::vector<MassFlowProfile>& all_profiles) {
  if (inlet.times_s.empty()) throw DataError("peak_snapshot: empty inlet");
  for (const auto& p : all_profiles) {
    if (p.times_s != inlet.times_s) {
      throw DataError("peak_snapshot: profile for " +
                      std::string(to_string(p.vessel)) +
                      " is not on the inlet time grid");
    }
    if (p.times_s.size() != p.mass_flow_kg_per_s.size()) {
      throw DataError("peak_snapshot: profile lengths mismatch");
    }
  }

  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < inlet.mass_flow_kg_per_s.size(); ++i) {
    if (inlet.mass_flow_kg_per_s[i] > inlet.mass_flow_kg_per_s[peak_idx]) {
      peak_idx = i;  // strictly greater keeps the earliest index on ties
    }
  }

  PeakSnapshot snapshot;
  snapshot.t_peak_s = inlet.times_s[peak_idx];
  for (const auto& p : all_profiles) {
    snapshot.values_kg_per_s[p.vessel] = p.mass_flow_kg_per_s[peak_idx];
  }
  snapshot.values_kg_per_s[inlet.vessel] = inlet.mass_flow_kg_per_s[peak_idx];
  return snapshot;
}

double enforce_continuity(const std::array<double, 4>& outlet_values_kg_per_s) {
  double sum = 0.0;
  for (double v : outlet_values_kg_per_s) {
    if (v < 0.0) {
      throw DataError("continuity: outlet mass flow must be non-negative");
    }
    sum += v;
  }
  return sum;
}

namespace {

double value_or_throw(const std::map<VesselId, double>& values,
                      VesselId vessel) {
  auto it = values.find(vessel);
  if (it == values.end()) {
    throw DataError("BC assembly: missing peak value for " +
                    std::string(to_string(vessel)));
  }
  return it->second;
}

BoundaryKind outlet_kind(BcType type, bool is_descending_aorta) {
  switch (type) {
    case BcType::bc1:
      return BoundaryKind::zero_pressure;
    case BcType::bc2:
      return is_descending_aorta ? BoundaryKind::zero_pressure
                                 : BoundaryKind::mass_flow;
    case BcType::bc3:
      return BoundaryKind::zero_pressure_target_mass_flow;
    case BcType::bc4:
      return is_descending_aorta
                 ? BoundaryKind::zero_pressure_target_mass_flow
                 : BoundaryKind::mass_flow;
  }
  throw ConfigError("invalid BC type");
}

}  // namespace

BoundaryConditionSet assemble_bc_set(
    BcType type, const std::map<VesselId, double>& peak_values_kg_per_s,
    std::string provenance) {
  std::array<double, 4> outlet_values{};
  for (std::size_t i = 0; i < 4; ++i) {
    outlet_values[i] = value_or_throw(peak_values_kg_per_s, kOutletVessels[i]);
  }
  const double inlet_value = value_or_throw(peak_values_kg_per_s, kInletVessel);
  if (inlet_value != enforce_continuity(outlet_values)) {
    throw DataError(
        "BC assembly: inlet value does not equal the outlet sum; apply the "
        "continuity correction first");
  }

  BoundaryConditionSet set;
  set.type = type;
  set.provenance = std::move(provenance);
  set.inlet = {kInletVessel, BoundaryKind::mass_flow, inlet_value};
  for (std::size_t i = 0; i < 4; ++i) {
    const VesselId vessel = kOutletVessels[i];
    const BoundaryKind kind =
        outlet_kind(type, vessel == VesselId::descending_aorta);
    BoundaryRecord record;
    record.vessel = vessel;
    record.kind = kind;
    if (kind != BoundaryKind::zero_pressure) {
      record.mass_flow_kg_per_s = outlet_values[i];
    }
    set.outlets[i] = record;
  }
  return set;
}

std::optional<double> bc_value_for(const BoundaryConditionSet& set,
                                   VesselId vessel) {
  if (const BoundaryRecord* r = set.record_for(vessel)) {
    if (r->mass_flow_kg_per_s) return r->mass_flow_kg_per_s;
  }
  if (set.snapshot) {
    auto it = set.snapshot->values_kg_per_s.find(vessel);
    if (it != set.snapshot->values_kg_per_s.end()) return it->second;
  }
  return std::nullopt;
}

std::map<VesselId, double> bc_deviation_stats(
    const std::vector<BoundaryConditionSet>& sets) {
  std::map<VesselId, double> out;
  for (VesselId vessel : kAllVessels) {
    std::vector<double> values;
    for (const auto& set : sets) {
      if (auto v = bc_value_for(set, vessel)) values.push_back(*v);
    }
    if (values.size() < 2) continue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) {
      throw NumericError("deviation undefined: cross-model mean for " +
                         std::string(to_string(vessel)) + " is zero");
    }
    double mad = 0.0;
    for (double v : values) mad += std::abs(v - mean);
    mad /= static_cast<double>(values.size());
    out[vessel] = 100.0 * mad / mean;
  }
  if (out.empty()) {
    throw DataError(
        "deviation stats need at least 2 sets with numeric values per vessel");
  }
  return out;
}

std::string_view to_string(BcExportMode mode) {
  return mode == BcExportMode::snapshot ? "snapshot" : "transient";
}

BcExportMode bc_mode_from_string(std::string_view name) {
  if (name == "snapshot") return BcExportMode::snapshot;
  if (name == "transient") return BcExportMode::transient;
  throw ConfigError("unknown bc mode: " + std::string(name) +
                    " (expected snapshot or transient)");
}

namespace {

std::string_view units_for(BoundaryKind kind) {
  return kind == BoundaryKind::zero_pressure ? "pa" : "kg_per_s";
}

void append_record(std::string& out, const BoundaryRecord& r) {
  out += "boundary,";
  out += to_string(r.vessel);
  out += ',';
  out += to_string(r.kind);
  out += ',';
  out += units_for(r.kind);
  out += '\n';
}

const MassFlowProfile* profile_for(const std::vector<MassFlowProfile>& profiles,
                                   VesselId vessel) {
  for (const auto& p : profiles) {
    if (p.vessel == vessel) return &p;
  }
  return nullptr;
}

}  // namespace

std::string export_bc(const BoundaryConditionSet& set, BcExportMode mode,
                      const std::vector<MassFlowProfile>* profiles) {
  if (mode == BcExportMode::transient && profiles == nullptr) {
    throw DataError("transient BC export requires mass-flow profiles");
  }

  std::string out = "#coarcta-bc v1 ";
  out += to_string(set.type);
  out += ' ';
  out += set.provenance;
  out += '\n';

  std::vector<const BoundaryRecord*> records;
  records.push_back(&set.inlet);
  for (const auto& r : set.outlets) records.push_back(&r);

  for (const auto* r : records) append_record(out, *r);
  for (const auto* r : records) {
    if (!r->mass_flow_kg_per_s) continue;
    out += "value,";
    out += to_string(r->vessel);
    out += ',';
    out += format_double(*r->mass_flow_kg_per_s);
    out += '\n';
  }

  if (mode == BcExportMode::transient) {
    for (const auto* r : records) {
      if (!r->mass_flow_kg_per_s) continue;
      const MassFlowProfile* p = profile_for(*profiles, r->vessel);
      if (p == nullptr) {
        throw DataError("transient BC export: no profile for " +
                        std::string(to_string(r->vessel)));
      }
      for (std::size_t i = 0; i < p->times_s.size(); ++i) {
        out += "point,";
        out += to_string(r->vessel);
        out += ',';
        out += format_double(p->times_s[i]);
        out += ',';
        out += format_double(p->mass_flow_kg_per_s[i]);
        out += '\n';
      }
    }
  }
  return out;
}

ParsedBcFile parse_bc(std::string_view content) {
  ParsedBcFile parsed;
  std::vector<BoundaryRecord> records;
  std::map<VesselId, std::optional<double>> values;
  std::size_t line_no = 0;
  bool saw_header = false;

  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    if (!saw_header) {
      auto parts = split(line, ' ');
      if (parts.size() != 4 || parts[0] != "#coarcta-bc" || parts[1] != "v1") {
        throw DataError("BC file: bad header line");
      }
      parsed.set.type = bc_type_from_string(parts[2]);
      parsed.set.provenance = std::string(parts[3]);
      saw_header = true;
      continue;
    }

    auto cells = split(line, ',');
    if (cells[0] == "boundary") {
      if (cells.size() != 4) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": boundary record needs 4 fields");
      }
      BoundaryRecord r;
      r.vessel = vessel_from_string(cells[1]);
      r.kind = boundary_kind_from_string(cells[2]);
      if (units_for(r.kind) != cells[3]) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": units do not match kind");
      }
      records.push_back(r);
    } else if (cells[0] == "value") {
      if (cells.size() != 3) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": value record needs 3 fields");
      }
      auto v = parse_double(cells[2]);
      if (!v) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": non-numeric value");
      }
      values[vessel_from_string(cells[1])] = *v;
    } else if (cells[0] == "point") {
      if (cells.size() != 4) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": point record needs 4 fields");
      }
      const VesselId vessel = vessel_from_string(cells[1]);
      auto t = parse_double(cells[2]);
      auto m = parse_double(cells[3]);
      if (!t || !m) {
        throw DataError("BC file line " + std::to_string(line_no) +
                        ": non-numeric point");
      }
      MassFlowProfile* p = nullptr;
      for (auto& existing : parsed.profiles) {
        if (existing.vessel == vessel) {
          p = &existing;
          break;
        }
      }
      if (p == nullptr) {
        parsed.profiles.push_back({{}, {}, vessel});
        p = &parsed.profiles.back();
      }
      p->times_s.push_back(*t);
      p->mass_flow_kg_per_s.push_back(*m);
    } else {
      throw DataError("BC file line " + std::to_string(line_no) +
                      ": unknown record type");
    }
  }

  if (!saw_header) throw DataError("BC file: missing header");
  if (records.size() != 5) {
    throw DataError("BC file: expected 5 boundary records, found " +
                    std::to_string(records.size()));
  }

  bool inlet_seen = false;
  std::size_t outlet_idx = 0;
  for (auto& r : records) {
    auto it = values.find(r.vessel);
    if (it != values.end()) r.mass_flow_kg_per_s = it->second;
    if (r.vessel == kInletVessel) {
      parsed.set.inlet = r;
      inlet_seen = true;
    } else {
      if (outlet_idx >= 4) throw DataError("BC file: too many outlets");
      parsed.set.outlets[outlet_idx++] = r;
    }
  }
  if (!inlet_seen || outlet_idx != 4) {
    throw DataError("BC file: need an inlet and four outlet records");
  }
  return parsed;
}

}  // namespace coarcta
