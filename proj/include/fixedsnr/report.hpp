#pragma once

#include "json.hpp"
#include <string>

#include "fixedsnr/scaling.hpp"

namespace fixedsnr {

using Json = nlohmann::ordered_json;

Json to_json(const NetworkParams& p);
Json to_json(const SimulationParams& p);
Json to_json(const ChannelUseLedger& l);
Json to_json(const PowerFit& f);
Json topology_json(const Network& net);
Json simulation_json(const SimulationResult& r, const SimulationParams& sim);
Json trace_json(const SimulationResult& r);
Json sweep_json(const ScalingReport& rep, const SweepConfig& config);

extern const char* const kSweepCsvHeader;
std::string sweep_csv(const ScalingReport& rep);
// One CSV row for a simulate run, same columns as the sweep.
std::string simulation_csv(const SimulationResult& r);

// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace fixedsnr
