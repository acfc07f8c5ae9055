#pragma once

#include "surex/campaign.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace surex {

/// Per-observation trace table; one row per physical experiment.
void write_trace_csv(const std::string& path, const RunResult& result);

/// Per-replication RMSE table for one policy.
void write_replications_csv(const std::string& path, const ReplicationSummary& summary);

/// Combined per-replication table for several policies (aligned seeds).
void write_compare_csv(const std::string& path, const std::vector<ReplicationSummary>& summaries);

/// Epsilon-sweep tables: one aggregate row per epsilon plus the long format.
void write_epsilon_csv(const std::string& path, const std::vector<EpsilonRow>& rows);
void write_epsilon_long_csv(const std::string& path, const std::vector<EpsilonRow>& rows);

nlohmann::json run_json(const RunResult& result);
nlohmann::json summary_json(const ReplicationSummary& summary);

void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace surex
