#pragma once

#include <string>

#include "sliceattrib/core.hpp"
#include "sliceattrib/inference.hpp"
#include "sliceattrib/simulator.hpp"

namespace sliceattrib {

// Window directory format: telemetry.csv (t,slice,coord,value),
// allocation.csv (t,slice,resource,value), utilization.csv (t,resource,value)
// and meta.json (N, K, T, d, sample_period).  Headers mandatory, '.' decimal
// separator, newline-terminated rows.
void save_window(const std::string& dir, const TelemetryWindow& w);
TelemetryWindow load_window(const std::string& dir);

// Scenario = window directory + truth.json (path hops, changepoints) +
// config.json (the generating configuration).
void save_scenario(const std::string& dir, const Scenario& sc);
Scenario load_scenario(const std::string& dir);

std::string scenario_config_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_config_from_json(const std::string& text);

std::string report_to_json(const AttributionReport& rep);
void save_report(const std::string& path, const AttributionReport& rep);

}  // namespace sliceattrib
