#pragma once
// Config and dataset serialization.
//
// Configs are human-editable JSON: scalar fields accept unit-annotated
// strings ("50 kHz", "400 us", "1 mW", "90 deg", "auto", "z") or plain
// numbers in base units (rad/s, s, rad).  Results serialize to a structured
// JSON document with a mandatory provenance block and to CSV (one row per
// scan point, units in the header).  The JSON result format round-trips
// bit-exactly and its rendering is byte-deterministic.

#include <string>

#include "sqz/experiments.hpp"

namespace sqz {

// ------------------------------- quantities ---------------------------------
// Each parser accepts a plain double (base units) or a "value unit" string;
// `path` names the field in error messages ("interaction.delta: ...").

// "50 kHz" → 2π·50e3 rad/s; units: Hz, kHz, MHz, rad/s.  Sign allowed.
double parse_frequency(const std::string& text, const std::string& path);
// "400 us" → 4e-4 s; units: s, ms, us, ns.
double parse_time(const std::string& text, const std::string& path);
// "90 deg" → π/2; units: rad, deg.
double parse_angle(const std::string& text, const std::string& path);
// "300 /s" → 300.0; units: /s, 1/s.
double parse_rate(const std::string& text, const std::string& path);

// Rabi rate of one force leg for a given drive power, from the measured
// 1 mW calibration: 6.5 kHz·√(P/mW) for equatorial geometry, 1.3 kHz·√(P/mW)
// for the axial (σ_z) geometry.  Returns rad/s.
double leg_rabi_for_power(double power_mw, bool axial);

// ------------------------------- configs ------------------------------------

// Parses a scenario config.  Unknown fields and malformed values raise
// std::invalid_argument with the offending field path in the message.
Scenario scenario_from_json_text(const std::string& text);
Scenario scenario_from_file(const std::string& path);

// Serializes a scenario with human-friendly units (kHz, us, rad).  Parsing
// the output reproduces the scenario up to floating-point unit conversion
// (a few ulp per field).
std::string scenario_to_json_text(const Scenario& scenario);

// ------------------------------- results ------------------------------------

// Deterministic structured rendering: fixed key order, shortest
// round-trip number formatting.  result_from_json_text inverts it exactly
// (finite values bit-for-bit; non-finite values canonicalized).
std::string result_to_json_text(const ScenarioResult& result);
ScenarioResult result_from_json_text(const std::string& text);
ScenarioResult result_from_file(const std::string& path);

// CSV with a "name (unit)" header; one row per table row.
std::string table_to_csv(const ResultTable& table);

// Shortest-round-trip decimal rendering of a double ("0.1", not
// "0.10000000000000001").
std::string format_double(double value);

// Writes content to path via a temporary file in the same directory and an
// atomic rename, so no partially-written file is ever visible.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sqz
