#pragma once

#include "harvest/screening.hpp"
#include "harvest/simulate.hpp"

#include <string>
#include <string_view>

namespace harvest {

/// Library version string embedded in every report.
std::string_view version();

/// Report documents are JSON. Serialization is deterministic: the same report
/// always produces the same bytes. Round wall times are not written.
std::string config_to_json(const HarvestConfig& cfg, int indent = 2);
HarvestConfig config_from_json(std::string_view text);

std::string report_to_json(const HarvestReport& report, int indent = 2);
HarvestReport report_from_json(std::string_view text);

std::string sim_spec_to_json(const SimSpec& spec, int indent = 2);
std::string summary_to_json(const SimSummary& summary, int indent = 2);
SimSummary summary_from_json(std::string_view text);

}  // namespace harvest
