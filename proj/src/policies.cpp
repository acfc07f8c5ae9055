#include "surex/policies.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace surex {

CampaignState make_state(std::shared_ptr<const CandidatePool> pool, int budget) {
    if (!pool || pool->size() == 0) throw std::invalid_argument("make_state: empty pool");
    if (budget < 0) throw std::invalid_argument("make_state: negative budget");
    CampaignState s;
    s.pool = std::move(pool);
    s.experimented.assign(static_cast<std::size_t>(s.pool->size()), 0);
    s.budget_remaining = budget;
    return s;
}

// Distances equal up to round-off are ties; the lower index must win them, so
// displacing the incumbent requires clearing this margin. Normalized
// coordinates keep every distance in [0, sqrt(P)], far above this scale.
constexpr double kTieTolerance = 1e-12;

Index select_exploration(const CampaignState& state) {
    if (state.experimented_count == 0)
        throw std::invalid_argument("select_exploration: no experimented locations yet");
    if (state.unexperimented_count() == 0) throw PoolExhausted();
    const Matrix& z = state.pool->normalized;
    Index best = -1;
    double best_gap = -1.0;
    for (Index i = 0; i < state.size(); ++i) {
        if (state.experimented[static_cast<std::size_t>(i)]) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (Index e = 0; e < state.size(); ++e) {
            if (!state.experimented[static_cast<std::size_t>(e)]) continue;
            const double d = (z.row(i) - z.row(e)).norm();
            if (d < nearest) nearest = d;
        }
        if (nearest > best_gap + kTieTolerance) {
            best_gap = nearest;
            best = i;
        }
    }
    return best;
}

Index select_exploitation(const CampaignState& state) {
    if (state.anchor < 0 || state.anchor >= state.size())
        throw std::invalid_argument("select_exploitation: anchor not set");
    if (state.unexperimented_count() == 0) throw PoolExhausted();
    const Matrix& z = state.pool->normalized;
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < state.size(); ++i) {
        if (state.experimented[static_cast<std::size_t>(i)]) continue;
        const double d = (z.row(i) - z.row(state.anchor)).norm();
        if (d < best_d - kTieTolerance) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

namespace {

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

Vector ei_acquisition(const PredictiveDistribution& pred, double f_best) {
    const Index n = pred.mean.size();
    if (n == 0 || pred.variance.size() != n)
        throw std::invalid_argument("ei_acquisition: malformed predictive distribution");
    Vector ei(n);
    for (Index i = 0; i < n; ++i) {
        const double delta = pred.mean[i] - f_best;
        const double s = std::sqrt(std::max(pred.variance[i], 0.0));
        double v;
        if (s > 1e-12)
            v = delta * normal_cdf(delta / s) + s * normal_pdf(delta / s);
        else
            v = std::max(delta, 0.0);
        ei[i] = std::max(v, 0.0);
    }
    return ei;
}

Index select_ei(const CampaignState& state, const GpModel& model) {
    if (state.unexperimented_count() == 0) throw PoolExhausted();
    if (state.training.size() == 0) throw std::invalid_argument("select_ei: empty training data");

    std::vector<Index> open;
    open.reserve(static_cast<std::size_t>(state.unexperimented_count()));
    for (Index i = 0; i < state.size(); ++i)
        if (!state.experimented[static_cast<std::size_t>(i)]) open.push_back(i);
    Matrix queries(static_cast<Index>(open.size()), state.pool->dim());
    for (std::size_t k = 0; k < open.size(); ++k)
        queries.row(static_cast<Index>(k)) = state.pool->locations.row(open[k]);

    const double f_best = state.training.responses.maxCoeff();
    const Vector ei = ei_acquisition(model.predict(queries, false), f_best);
    Index best = 0;
    for (Index k = 1; k < ei.size(); ++k)
        if (ei[k] > ei[best]) best = k;
    return open[static_cast<std::size_t>(best)];
}

Index select_random_unexperimented(const CampaignState& state, Rng& rng) {
    const Index open = state.unexperimented_count();
    if (open == 0) throw PoolExhausted();
    Index pick = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(open)));
    for (Index i = 0; i < state.size(); ++i) {
        if (state.experimented[static_cast<std::size_t>(i)]) continue;
        if (pick == 0) return i;
        --pick;
    }
    throw std::logic_error("select_random_unexperimented: unreachable");
}

Index select_epsilon_ei(const CampaignState& state, const GpModel& model, double epsilon, Rng& rng,
                        bool* chose_random) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("select_epsilon_ei: epsilon must lie in [0,1]");
    const double u = rng.uniform();  // consumed on every call by design
    const bool random_branch = u < epsilon;
    if (chose_random) *chose_random = random_branch;
    if (random_branch) return select_random_unexperimented(state, rng);
    return select_ei(state, model);
}

GpModel rebuild_model(const Dataset& training, const GpModel& current, const ModelSettings& settings,
                      bool refit) {
    if (refit && settings.refit_every > 0) return fit_hyperparameters(training, settings.fit);
    return GpModel(current.kernel(), current.noise_variance(), training, current.mean_offset());
}

namespace {

/// Candidate model for a verdict: current training plus the one new
/// observation. Hyperparameters are re-estimated whenever the campaign fits
/// them at all; in frozen mode only the factorization is updated.
GpModel verdict_candidate(const GpModel& model, const Vector& x, double y,
                          const ModelSettings& settings) {
    if (settings.refit_every > 0) {
        Dataset extended = model.data();
        extended.append(x, y);
        return fit_hyperparameters(extended, settings.fit);
    }
    return model.with_observation(x, y);
}

}  // namespace

StepOutcome surprise_step(CampaignState& state, GpModel& model, Index obs_index, double response,
                          const SurpriseConfig& surprise, const ModelSettings& settings,
                          int iteration) {
    if (obs_index < 0 || obs_index >= state.size())
        throw std::invalid_argument("surprise_step: observation index out of range");

    StepOutcome out;
    const Vector x = state.pool->locations.row(obs_index).transpose();

    std::optional<GpModel> candidate;
    if (surprise.kind == SurpriseKind::Shannon) {
        out.assessment = assess_shannon(model, x, response, surprise);
    } else {
        candidate = verdict_candidate(model, x, response, settings);
        out.assessment = assess_bayesian(model, *candidate, state.pool->locations, surprise);
    }

    // What changed in the training set this step, and whether the candidate
    // model (training + this observation, already fitted) matches it.
    int accepted = 0;
    bool candidate_matches = false;

    switch (state.mode) {
        case Mode::Exploring:
            if (out.assessment.surprised) {
                state.has_pending = true;
                state.pending_index = obs_index;
                state.pending_response = response;
                state.pending_iteration = iteration;
                state.anchor = obs_index;
                state.mode = Mode::Confirming;
                out.observation_pending = true;
                out.next = NextAction::ConfirmNear;
            } else {
                state.training.append(x, response);
                accepted = 1;
                candidate_matches = true;
                out.next = NextAction::Explore;
            }
            break;

        case Mode::Confirming: {
            if (!state.has_pending)
                throw std::logic_error("surprise_step: confirming without a pending observation");
            const Vector anchor_x =
                state.pool->locations.row(state.pending_index).transpose();
            if (out.assessment.surprised) {
                state.training.append(anchor_x, state.pending_response);
                state.training.append(x, response);
                accepted = 2;
                state.mode = Mode::PostSurpriseExploit;
                out.anchor_resolution = AnchorResolution::Kept;
                out.next = NextAction::ExploitNear;
            } else {
                state.discards.push_back(
                    {state.pending_index, state.pending_response, state.pending_iteration});
                state.training.append(x, response);
                accepted = 1;
                candidate_matches = true;
                state.mode = Mode::Exploring;
                state.anchor = -1;
                out.anchor_resolution = AnchorResolution::Discarded;
                out.next = NextAction::Explore;
            }
            state.has_pending = false;
            state.pending_index = -1;
            break;
        }

        case Mode::PostSurpriseExploit:
            state.training.append(x, response);
            accepted = 1;
            candidate_matches = true;
            if (out.assessment.surprised) {
                out.next = NextAction::ExploitNear;
            } else {
                state.mode = Mode::Exploring;
                state.anchor = -1;
                out.next = NextAction::Explore;
            }
            break;
    }

    if (accepted > 0) {
        state.accepted_since_refit += accepted;
        const bool refit_due =
            settings.refit_every > 0 && state.accepted_since_refit >= settings.refit_every;
        if (refit_due && candidate_matches && candidate) {
            model = std::move(*candidate);  // same training set and a fresh fit: reuse
        } else {
            model = rebuild_model(state.training, model, settings, refit_due);
        }
        if (refit_due) {
            state.accepted_since_refit = 0;
            out.refit = true;
        }
    }
    return out;
}

}  // namespace surex
