#include "surex/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace surex {

bool CampaignConfig::maximize() const {
    if (direction != 0) return direction > 0;
    switch (objective) {
        case ObjectiveKind::Demo1D:
            return true;  // the 1-D demo chases its peak
        case ObjectiveKind::SixHumpCamelback:
        case ObjectiveKind::Branin:
            return false;  // the classic minimization benchmarks
        case ObjectiveKind::TableLookup:
            return true;
    }
    return true;
}

CampaignConfig CampaignConfig::resolved() const {
    CampaignConfig out = *this;
    if (out.pool_mode()) out.objective = ObjectiveKind::TableLookup;
    if (!out.pool_mode()) {
        if (out.bounds.lower.size() == 0) out.bounds = canonical_bounds(out.objective);
        if (out.oracle_noise_sd < 0.0) out.oracle_noise_sd = auto_noise_sd(out.objective);
    }
    if (out.fit_noise == -1) out.fit_noise = out.pool_mode() ? 1 : 0;
    if (out.model_noise_variance < 0.0) {
        if (!out.pool_mode())
            out.model_noise_variance = out.oracle_noise_sd * out.oracle_noise_sd;
        else
            out.model_noise_variance = 0.0;  // fitted in pool mode by default
    }
    out.direction = out.maximize() ? 1 : -1;
    out.surprise.kind = (out.policy.kind == PolicyKind::SurpriseBayesian) ? SurpriseKind::Bayesian
                                                                          : SurpriseKind::Shannon;
    return out;
}

void CampaignConfig::validate() const {
    policy.validate();
    if (budget < 1) throw std::invalid_argument("config: sequential budget must be >= 1");
    if (n_initial < 1) throw std::invalid_argument("config: n_initial must be >= 1");
    if (refit_every < 0) throw std::invalid_argument("config: refit_every must be >= 0");
    if (refit_every == 0 && !(fixed_lengthscale > 0.0))
        throw std::invalid_argument("config: frozen hyperparameters need an explicit lengthscale");
    if (refit_every == 0 && !(fixed_signal_variance > 0.0))
        throw std::invalid_argument("config: frozen hyperparameters need a positive signal variance");
    if (kernel == KernelKind::Matern && smoothness != 1.5 && smoothness != 2.5)
        throw std::invalid_argument("config: Matern smoothness must be 1.5 or 2.5");
    if (fit_multistarts < 1 || fit_max_evaluations < 10 || !(fit_tol > 0.0))
        throw std::invalid_argument("config: bad fit settings");
    if (!(surprise.shannon_k > 0.0) || !(surprise.bayesian_threshold > 0.0))
        throw std::invalid_argument("config: surprise thresholds must be positive");
    if (surprise.max_reference_points < 1)
        throw std::invalid_argument("config: max reference points must be >= 1");
    if (fit_noise == 0 && !(model_noise_variance >= 0.0))
        throw std::invalid_argument("config: fixed model noise variance must be >= 0");
    if (pool_mode()) {
        if (schema.input_columns.empty() || schema.response_column.empty())
            throw std::invalid_argument("config: pool mode needs input and response column names");
        if (pool_test < 1) throw std::invalid_argument("config: pool mode needs a test split");
    } else {
        if (pool_size < n_initial)
            throw std::invalid_argument("config: pool smaller than the initial design");
        if (!(oracle_noise_sd >= 0.0))
            throw std::invalid_argument("config: oracle noise sd must be >= 0");
        if (test_size < 1) throw std::invalid_argument("config: test set must be nonempty");
        if (bounds.lower.size() > 0) bounds.validate();
    }
}

double rmse(const Vector& predictions, const Vector& truth) {
    if (predictions.size() == 0 || predictions.size() != truth.size())
        throw std::invalid_argument("rmse: vectors must be nonempty and equal length");
    return std::sqrt((predictions - truth).squaredNorm() /
                     static_cast<double>(predictions.size()));
}

Vector RunResult::predict(const Matrix& queries) const {
    if (!final_model) throw std::logic_error("RunResult::predict: no final model");
    return direction_sign * final_model->predict_mean(queries);
}

namespace {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Exploring:
            return "exploring";
        case Mode::Confirming:
            return "confirming";
        case Mode::PostSurpriseExploit:
            return "post_surprise";
    }
    return "?";
}

void stamp_hyperparameters(TraceRecord& row, const GpModel& model) {
    row.lengthscale = model.kernel().lengthscale;
    row.signal_variance = model.kernel().signal_variance;
    row.noise_variance = model.noise_variance();
}

KernelSpec frozen_kernel(const CampaignConfig& cfg) {
    KernelSpec spec;
    spec.kind = cfg.kernel;
    spec.smoothness = cfg.smoothness;
    spec.lengthscale = cfg.fixed_lengthscale;
    spec.signal_variance = cfg.fixed_signal_variance;
    return spec;
}

}  // namespace

RunResult run_campaign(const CampaignConfig& raw, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignConfig cfg = raw.resolved();
    cfg.validate();

    Rng campaign_rng(seed);
    Rng pool_rng = campaign_rng.derive(1);
    Rng init_rng = campaign_rng.derive(2);
    Rng oracle_rng = campaign_rng.derive(3);
    Rng policy_rng = campaign_rng.derive(4);

    RunResult res;
    res.seed = seed;
    const double sign = cfg.maximize() ? 1.0 : -1.0;
    res.direction_sign = sign;

    std::shared_ptr<CandidatePool> pool;
    std::vector<Index> initial;  // campaign-pool indices, observation order
    std::vector<Index> row_map;  // campaign-pool index -> source row

    if (!cfg.pool_mode()) {
        pool = std::make_shared<CandidatePool>(
            generate_lhd(cfg.pool_size, cfg.bounds, pool_rng.seed()));
        initial = select_initial(*pool, cfg.n_initial, cfg.initial_design, init_rng,
                                 cfg.n_initial + cfg.budget);
        row_map.resize(static_cast<std::size_t>(pool->size()));
        for (Index i = 0; i < pool->size(); ++i) row_map[static_cast<std::size_t>(i)] = i;

        const CandidatePool test_pool = generate_lhd(cfg.test_size, cfg.bounds, cfg.test_seed);
        res.test_inputs = test_pool.locations;
        res.test_truth.resize(cfg.test_size);
        for (Index i = 0; i < cfg.test_size; ++i)
            res.test_truth[i] = eval_true(cfg.objective, test_pool.locations.row(i).transpose());
    } else {
        const CandidatePool full = ingest_pool_table(cfg.pool_table, cfg.schema);
        PoolSplit split = split_pool(full, cfg.n_initial, cfg.pool_test, pool_rng);
        if (static_cast<Index>(split.sequential.size()) < cfg.budget)
            std::fprintf(stderr,
                         "warning: budget %d exceeds the %zu sequential candidates; the campaign "
                         "will exhaust early\n",
                         cfg.budget, split.sequential.size());

        // The campaign's candidate set is everything except held-out test rows.
        std::vector<char> is_test(static_cast<std::size_t>(full.size()), 0);
        for (Index t : split.test) is_test[static_cast<std::size_t>(t)] = 1;
        std::vector<Index> inverse(static_cast<std::size_t>(full.size()), -1);
        for (Index r = 0; r < full.size(); ++r) {
            if (is_test[static_cast<std::size_t>(r)]) continue;
            inverse[static_cast<std::size_t>(r)] = static_cast<Index>(row_map.size());
            row_map.push_back(r);
        }
        auto sub = std::make_shared<CandidatePool>();
        sub->locations.resize(static_cast<Index>(row_map.size()), full.dim());
        sub->responses.resize(static_cast<Index>(row_map.size()));
        for (std::size_t k = 0; k < row_map.size(); ++k) {
            sub->locations.row(static_cast<Index>(k)) = full.locations.row(row_map[k]);
            sub->responses[static_cast<Index>(k)] = full.responses[row_map[k]];
        }
        sub->normalized = minmax_normalize(sub->locations);
        sub->provenance = PoolProvenance::IngestedTable;
        sub->source = full.source;
        sub->has_responses = true;
        pool = std::move(sub);

        for (Index r : split.initial) initial.push_back(inverse[static_cast<std::size_t>(r)]);

        res.test_inputs.resize(static_cast<Index>(split.test.size()), full.dim());
        res.test_truth.resize(static_cast<Index>(split.test.size()));
        for (std::size_t k = 0; k < split.test.size(); ++k) {
            res.test_inputs.row(static_cast<Index>(k)) = full.locations.row(split.test[k]);
            res.test_truth[static_cast<Index>(k)] = full.responses[split.test[k]];
        }
    }

    Oracle oracle = cfg.pool_mode()
                        ? Oracle::table(pool)
                        : Oracle::synthetic(cfg.objective, cfg.oracle_noise_sd, oracle_rng);

    CampaignState state = make_state(pool, cfg.budget);

    ModelSettings settings;
    settings.refit_every = cfg.refit_every;
    settings.fit.kind = cfg.kernel;
    settings.fit.smoothness = cfg.smoothness;
    settings.fit.fit_noise = cfg.fit_noise == 1;
    settings.fit.noise_variance = cfg.model_noise_variance;
    settings.fit.multistarts = cfg.fit_multistarts;
    settings.fit.tol = cfg.fit_tol;
    settings.fit.max_evaluations = cfg.fit_max_evaluations;

    int experiment = 0;
    auto record = [&](Index s_idx, double y_orig, int iteration, const char* mode,
                      const char* action) -> std::size_t {
        TraceRecord r;
        r.experiment = ++experiment;
        r.iteration = iteration;
        r.mode = mode;
        r.action = action;
        r.pool_index = row_map[static_cast<std::size_t>(s_idx)];
        r.location = pool->locations.row(s_idx).transpose();
        r.response = y_orig;
        r.status = "accepted";
        r.in_domain =
            cfg.pool_mode() ? true : in_canonical_domain(cfg.objective, r.location);
        res.trace.push_back(std::move(r));
        return res.trace.size() - 1;
    };

    for (Index idx : initial) {
        state.mark_experimented(idx);
        const double y = oracle.observe_row(*pool, idx);
        state.training.append(pool->locations.row(idx).transpose(), sign * y);
        record(idx, y, 0, "initial", "initial");
    }

    GpModel model = (cfg.refit_every > 0)
                        ? fit_hyperparameters(state.training, settings.fit)
                        : GpModel(frozen_kernel(cfg), cfg.model_noise_variance, state.training);
    for (std::size_t i = 0; i < res.trace.size(); ++i) stamp_hyperparameters(res.trace[i], model);
    res.trace.back().refit = cfg.refit_every > 0;

    const bool is_surprise = cfg.policy.kind == PolicyKind::SurpriseShannon ||
                             cfg.policy.kind == PolicyKind::SurpriseBayesian;
    int iteration = 0;

    if (is_surprise) {
        std::size_t pending_row = 0;
        Index next_idx = -1;
        const char* action_label = "start";
        try {
            next_idx = select_random_unexperimented(state, policy_rng);
        } catch (const PoolExhausted&) {
            res.exhausted_early = true;
        }
        iteration = 1;
        while (state.budget_remaining > 0 && next_idx >= 0) {
            state.mark_experimented(next_idx);
            --state.budget_remaining;
            const double y = oracle.observe_row(*pool, next_idx);
            const std::size_t row =
                record(next_idx, y, iteration, mode_name(state.mode), action_label);

            const StepOutcome out = surprise_step(state, model, next_idx, sign * y, cfg.surprise,
                                                  settings, iteration);
            res.trace[row].has_verdict = true;
            res.trace[row].score = out.assessment.score;
            res.trace[row].threshold = out.assessment.threshold;
            res.trace[row].surprised = out.assessment.surprised;
            res.trace[row].refit = out.refit;
            stamp_hyperparameters(res.trace[row], model);
            if (out.observation_pending) {
                res.trace[row].status = "provisional";
                pending_row = row;
            } else if (out.anchor_resolution == AnchorResolution::Kept) {
                res.trace[pending_row].status = "accepted";
            } else if (out.anchor_resolution == AnchorResolution::Discarded) {
                res.trace[pending_row].status = "discarded";
            }

            if (state.budget_remaining == 0) break;
            switch (out.next) {
                case NextAction::Explore:
                    action_label = "explore";
                    ++iteration;
                    break;
                case NextAction::ConfirmNear:
                    action_label = "confirm";
                    break;
                case NextAction::ExploitNear:
                    action_label = "exploit";
                    break;
            }
            try {
                next_idx = (out.next == NextAction::Explore) ? select_exploration(state)
                                                             : select_exploitation(state);
            } catch (const PoolExhausted&) {
                res.exhausted_early = true;
                next_idx = -1;
            }
        }
        if (state.has_pending) {
            // Budget (or pool) ran out before the confirmation could run; keep
            // the provisional observation rather than silently dropping data.
            state.training.append(
                pool->locations.row(state.pending_index).transpose(), state.pending_response);
            state.has_pending = false;
            res.trace[pending_row].status = "accepted_unconfirmed";
            res.unconfirmed_at_end = true;
            std::fprintf(stderr,
                         "warning: campaign ended awaiting confirmation; the provisional "
                         "observation was kept\n");
        }
    } else {
        while (state.budget_remaining > 0) {
            Index idx = -1;
            const char* label = "";
            try {
                switch (cfg.policy.kind) {
                    case PolicyKind::ExpectedImprovement:
                        idx = select_ei(state, model);
                        label = "ei";
                        break;
                    case PolicyKind::EpsilonEI: {
                        bool random_branch = false;
                        idx = select_epsilon_ei(state, model, cfg.policy.epsilon, policy_rng,
                                                &random_branch);
                        label = random_branch ? "random" : "ei";
                        break;
                    }
                    case PolicyKind::PureExploration:
                        idx = select_exploration(state);
                        label = "explore";
                        break;
                    default:
                        throw std::logic_error("run_campaign: unexpected policy");
                }
            } catch (const PoolExhausted&) {
                res.exhausted_early = true;
                break;
            }
            state.mark_experimented(idx);
            --state.budget_remaining;
            const double y = oracle.observe_row(*pool, idx);
            ++iteration;
            state.training.append(pool->locations.row(idx).transpose(), sign * y);
            ++state.accepted_since_refit;
            const bool refit_due =
                cfg.refit_every > 0 && state.accepted_since_refit >= cfg.refit_every;
            model = rebuild_model(state.training, model, settings, refit_due);
            if (refit_due) state.accepted_since_refit = 0;
            const std::size_t row = record(idx, y, iteration, "exploring", label);
            res.trace[row].refit = refit_due;
            stamp_hyperparameters(res.trace[row], model);
        }
    }

    if (model.size() != state.training.size())
        model = rebuild_model(state.training, model, settings, cfg.refit_every > 0);

    res.accepted = static_cast<int>(state.training.size());
    res.discarded = static_cast<int>(state.discards.size());
    res.iterations = iteration;

    const Vector predictions = sign * model.predict_mean(res.test_inputs);
    res.rmse_value = rmse(predictions, res.test_truth);
    res.final_model = std::move(model);

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ReplicationSummary run_replications(const CampaignConfig& config, int replications,
                                    std::uint64_t master_seed) {
    if (replications < 1) throw std::invalid_argument("run_replications: need at least one");
    config.resolved().validate();  // surface usage errors before the loop

    ReplicationSummary summary;
    summary.policy_label = policy_label(config.policy);
    const Rng master(master_seed);
    for (int i = 0; i < replications; ++i) {
        const std::uint64_t seed = master.derive(static_cast<std::uint64_t>(i)).seed();
        try {
            RunResult run = run_campaign(config, seed);
            summary.seeds.push_back(seed);
            summary.rmse_values.push_back(run.rmse_value);
            summary.results.push_back(std::move(run));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "replication " << i << " (seed " << seed << "): " << e.what();
            summary.failures.push_back(msg.str());
            std::fprintf(stderr, "warning: %s\n", summary.failures.back().c_str());
        }
    }
    if (summary.rmse_values.empty())
        throw std::runtime_error("run_replications: every replication failed");

    const double n = static_cast<double>(summary.rmse_values.size());
    double mean = 0.0;
    for (double v : summary.rmse_values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : summary.rmse_values) ss += (v - mean) * (v - mean);
    summary.mean = mean;
    summary.sd = (summary.rmse_values.size() > 1) ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return summary;
}

std::vector<EpsilonRow> sweep_epsilon(const CampaignConfig& base, const std::vector<double>& grid,
                                      int replications, std::uint64_t master_seed) {
    if (grid.empty()) throw std::invalid_argument("sweep_epsilon: empty grid");
    std::vector<EpsilonRow> rows;
    for (double eps : grid) {
        CampaignConfig cfg = base;
        cfg.policy.kind = PolicyKind::EpsilonEI;
        cfg.policy.epsilon = eps;
        EpsilonRow row;
        row.epsilon = eps;
        row.summary = run_replications(cfg, replications, master_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReplicationSummary> compare_policies(const CampaignConfig& base,
                                                 const std::vector<PolicySpec>& policies,
                                                 int replications, std::uint64_t master_seed) {
    if (policies.empty()) throw std::invalid_argument("compare_policies: no policies given");
    std::vector<ReplicationSummary> out;
    for (const PolicySpec& p : policies) {
        CampaignConfig cfg = base;
        cfg.policy = p;
        out.push_back(run_replications(cfg, replications, master_seed));
    }
    return out;
}

std::string policy_label(const PolicySpec& policy) {
    switch (policy.kind) {
        case PolicyKind::SurpriseShannon:
            return "shannon";
        case PolicyKind::SurpriseBayesian:
            return "bayesian";
        case PolicyKind::ExpectedImprovement:
            return "ei";
        case PolicyKind::EpsilonEI: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "eps-ei:%.2f", policy.epsilon);
            return buf;
        }
        case PolicyKind::PureExploration:
            return "explore";
    }
    return "?";
}

}  // namespace surex
