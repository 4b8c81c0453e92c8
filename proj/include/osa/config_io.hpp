#pragma once

#include "osa/checks.hpp"
#include "osa/monotone.hpp"
#include "osa/sim.hpp"
#include "osa/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace osa {

// Parses a scenario JSON file. Schema (values in slots-and-units of the
// model; see README for a commented example):
//   {
//     "M": 3, "V": 30, "D": 15, "zeta": 1,
//     "channels": [{"occupancy": [[..],[..]], "quality": [[..],[..]]}, ...],
//     "rates": {"good": 2, "bad": 1},
//     "costs": {"silent": 0.01, "transmit": 40.0, "switch": 5.0},
//     "penalty": {"type": "quadratic", "L": 5.0}
//              | {"type": "table", "values": [0.0, ...]},        // size V+1
//     "initial": {"v": 30, "occupancy": [1,1,1], "quality": [0,1,0],
//                 "channel": 3}
//   }
// Defaults: zeta = 1; initial.v = V; initial.channel = min(3, M). Throws
// std::runtime_error with a field path on malformed input; the parsed config
// is additionally passed through validate_config and rejected if invalid.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical serialization (sorted keys, defaults filled in) and its 64-bit
// FNV-1a hash, used to stamp run manifests.
std::string canonical_config_dump(const ScenarioConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash_hex(const ScenarioConfig& cfg);

// RFC 4180 quoting: fields containing commas, quotes, or newlines are quoted
// and embedded quotes doubled.
std::string csv_quote(const std::string& field);

// 17-significant-digit decimal (%g, trailing zeros trimmed); round-trips
// bit-exactly through strtod.
std::string fmt_double(double x);

// Mask rendered as a bit string with channel 1 first: mask 0b011 with M = 3
// prints "110".
std::string mask_to_bits(unsigned mask, int M);
unsigned bits_to_mask(const std::string& bits);

// Table writers. Each CSV has a header row; the JSON mirror holds the same
// rows under {"columns": [...], "rows": [[...], ...]}.
//   values:     t,v,o,q,c,value            (t = 1..D+1)
//   policy:     t,v,o,q,c,b,n              (t = 1..D)
//   thresholds: t,o,q,c,case,target,th1,th2,th3,th4   (blank = unused)
//   surface:    t,v,code,target
//   sweep:      sweep_var,policy,mean,stderr,exact_value,n
void write_value_table_csv(const ValueTable& values, const std::string& path);
void write_value_table_json(const ValueTable& values, const std::string& path);
void write_policy_csv(const PolicyTable& policy, const std::string& path);
void write_policy_json(const PolicyTable& policy, const std::string& path);
void write_thresholds_csv(const ThresholdTable& thresholds, const std::string& path);
void write_thresholds_json(const ThresholdTable& thresholds, const std::string& path);
void write_surface_csv(const std::vector<SurfaceCell>& cells, const std::string& path);
void write_surface_json(const std::vector<SurfaceCell>& cells, const std::string& path);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_sweep_json(const SweepResult& sweep, const std::string& path);
void write_check_reports_json(const std::vector<CheckReport>& reports, const std::string& path);

// Readers for the CSV table formats above (used for round-trip verification
// and by downstream tooling). The config supplies dimensions.
ValueTable read_value_table_csv(const ScenarioConfig& cfg, const std::string& path);
PolicyTable read_policy_csv(const ScenarioConfig& cfg, const std::string& path);

// Provenance stamp written next to every CLI output set.
struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::string config_hash;  // hex FNV-1a of the canonical config dump
  std::uint64_t seed = 0;
  std::string tool_version;
  double wall_ms = 0.0;  // excluded from reproducibility comparisons
  std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

inline const char* kToolVersion = "osa 1.0.0";

}  // namespace osa
