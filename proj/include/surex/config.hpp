#pragma once

#include "surex/campaign.hpp"

#include <json.hpp>

#include <string>

namespace surex {

/// Parse a campaign config document. Unknown keys are rejected so typos fail
/// loudly instead of silently falling back to defaults.
CampaignConfig parse_config(const nlohmann::json& doc);

CampaignConfig load_config(const std::string& path);

/// Policy shorthand used by the CLI: shannon | bayesian | ei | eps-ei[:x] | explore.
PolicySpec parse_policy(const std::string& text);

/// Echo of a fully resolved config, defaults included, for metadata and
/// validate-config output.
nlohmann::json config_summary(const CampaignConfig& config);

}  // namespace surex
