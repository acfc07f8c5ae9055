#pragma once

#include "surex/design.hpp"
#include "surex/gp.hpp"
#include "surex/objectives.hpp"
#include "surex/policies.hpp"
#include "surex/surprise.hpp"
#include "surex/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace surex {

/// Full description of one campaign. Fields left at their sentinel defaults
/// (-1 where a real value is required) are filled by resolved(): canonical
/// bounds, the scale-aware noise default, per-objective direction, and the
/// model noise matching the oracle.
struct CampaignConfig {
    // objective
    ObjectiveKind objective = ObjectiveKind::SixHumpCamelback;
    int direction = 0;              // +1 maximize, -1 minimize, 0 = per-objective default
    double oracle_noise_sd = -1.0;  // synthetic only; -1 = auto (2% of range)
    std::string pool_table;         // nonempty switches to pool mode
    TableSchema schema;

    // candidate pool (synthetic mode)
    Index pool_size = 280;
    BoxBounds bounds;  // empty = canonical bounds of the objective

    // initial design and sequential budget
    Index n_initial = 20;
    InitialDesign initial_design = InitialDesign::RandomSubset;
    int budget = 50;
    Index pool_test = 38;  // pool mode: held-out test rows

    // policy
    PolicySpec policy;

    // surrogate model
    KernelKind kernel = KernelKind::SquaredExponential;
    double smoothness = 2.5;
    int refit_every = 1;
    int fit_noise = -1;                  // -1 auto: fit in pool mode, fixed otherwise
    double model_noise_variance = -1.0;  // -1 auto: oracle sigma^2 (synthetic)
    double fixed_lengthscale = -1.0;     // required when refit_every == 0
    double fixed_signal_variance = 1.0;  // used when refit_every == 0
    int fit_multistarts = 5;
    double fit_tol = 1e-6;
    int fit_max_evaluations = 200;

    // surprise thresholds (kind is taken from the policy)
    SurpriseConfig surprise;

    // held-out test set (synthetic mode); fixed per study, not per replication
    Index test_size = 50;
    std::uint64_t test_seed = 20260815;

    bool pool_mode() const { return !pool_table.empty(); }
    bool maximize() const;

    /// Copy with every auto field made concrete. Throws on contradictions.
    CampaignConfig resolved() const;
    void validate() const;
};

struct TraceRecord {
    int experiment = 0;  // physical observation count, 1-based
    int iteration = 0;   // policy round; initial design rows are 0
    std::string mode;    // state when the observation was adjudicated
    std::string action;  // what chose this location
    Index pool_index = -1;
    Vector location;        // original coordinates
    double response = 0.0;  // original units as observed
    bool has_verdict = false;
    double score = 0.0;
    double threshold = 0.0;
    bool surprised = false;
    std::string status;  // accepted / provisional / discarded / accepted_unconfirmed
    bool refit = false;
    double lengthscale = 0.0;
    double signal_variance = 0.0;
    double noise_variance = 0.0;
    bool in_domain = true;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    double rmse_value = 0.0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    bool exhausted_early = false;
    bool unconfirmed_at_end = false;
    int accepted = 0;
    int discarded = 0;
    int iterations = 0;
    double direction_sign = 1.0;  // -1 when responses were negated at ingestion
    std::optional<GpModel> final_model;
    Matrix test_inputs;
    Vector test_truth;

    /// Final-model posterior mean in original response units.
    Vector predict(const Matrix& queries) const;
};

/// Root mean squared error between aligned vectors.
double rmse(const Vector& predictions, const Vector& truth);

/// One full campaign: initial design, sequential loop, final model, RMSE on
/// the held-out test set. Deterministic given (config, seed).
RunResult run_campaign(const CampaignConfig& config, std::uint64_t seed);

struct ReplicationSummary {
    std::string policy_label;
    std::vector<std::uint64_t> seeds;   // completed replications
    std::vector<double> rmse_values;    // aligned with seeds
    std::vector<RunResult> results;     // aligned with seeds
    std::vector<std::string> failures;  // diagnostics of skipped replications
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation
};

/// R campaigns with seeds derived from the master seed. Numerical failures are
/// recorded and skipped; throws only when every replication fails.
ReplicationSummary run_replications(const CampaignConfig& config, int replications,
                                    std::uint64_t master_seed);

struct EpsilonRow {
    double epsilon = 0.0;
    ReplicationSummary summary;
};

/// Replication summaries across an epsilon grid. Replication i shares its
/// campaign seed across every epsilon, isolating the effect of epsilon.
std::vector<EpsilonRow> sweep_epsilon(const CampaignConfig& base, const std::vector<double>& grid,
                                      int replications, std::uint64_t master_seed);

/// Replication summaries for several policies with aligned seeds: replication
/// i consumes the same pool, initial design, and oracle noise under each.
std::vector<ReplicationSummary> compare_policies(const CampaignConfig& base,
                                                 const std::vector<PolicySpec>& policies,
                                                 int replications, std::uint64_t master_seed);

std::string policy_label(const PolicySpec& policy);

}  // namespace surex
