#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nls/blowup.hpp"
#include "nls/diagnostics.hpp"
#include "nls/evolution.hpp"

namespace nls {

using json = nlohmann::json;

// Strict schema check: every required key present, every present key known
// and of the declared type. Unknown keys are rejected (config_error).
struct SchemaField {
  std::string key;
  std::string type;  // "number" | "integer" | "string" | "boolean" | "array" | "object"
  bool required = false;
};
void validate_schema(const json& j, const std::vector<SchemaField>& fields,
                     const std::string& where);

// FNV-1a over the canonical (sorted-key) dump; stable content fingerprint.
std::string content_hash(const json& j);

void write_text(const std::string& path, const std::string& text);

// scalars.csv: t,mass,linf,boundary_fraction - one row per step. Formatting
// uses shortest round-trip representation so identical runs give identical
// bytes.
void write_scalars_csv(const Trajectory& traj, const std::string& path);
std::string format_double(double x);

void write_diagnostics_csv(const std::vector<double>& t,
                           const std::vector<double>& l2,
                           const std::vector<double>& tail,
                           const std::vector<cplx>& key1,
                           const std::vector<double>& key2,
                           const std::vector<double>& key3,
                           const std::vector<double>& barab,
                           const std::string& path);

void write_sweep_csv(const SweepResult& r, const std::string& path);

// Simulation config from validated JSON (throws config_error on any
// violation). The "initial" block selects a built-in datum family.
struct ParsedSim {
  SimulationConfig cfg;
  Field u0;
};
ParsedSim parse_simulation_config(const json& j);

json manifest_for(const json& config, const Trajectory& traj);

}  // namespace nls
