#pragma once

#include "surex/design.hpp"
#include "surex/gp.hpp"
#include "surex/rng.hpp"
#include "surex/surprise.hpp"
#include "surex/types.hpp"

#include <memory>
#include <stdexcept>
#include <vector>

namespace surex {

/// Raised when a selection rule has no unexperimented candidate left. Campaigns
/// catch it and end early rather than treating it as failure.
class PoolExhausted : public std::runtime_error {
public:
    PoolExhausted() : std::runtime_error("candidate pool exhausted") {}
};

enum class PolicyKind {
    SurpriseShannon,
    SurpriseBayesian,
    ExpectedImprovement,
    EpsilonEI,
    PureExploration,
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::SurpriseShannon;
    double epsilon = 0.0;  // EpsilonEI only

    void validate() const {
        if (kind == PolicyKind::EpsilonEI && !(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("PolicySpec: epsilon must lie in [0,1]");
    }
};

enum class Mode { Exploring, Confirming, PostSurpriseExploit };

/// Everything a policy may read or write while a campaign runs. Training data
/// holds accepted observations only; a provisional surprise observation is
/// parked in the pending slot until its confirmation adjudicates it, so the
/// live model always equals the pre-surprise belief during confirmation.
struct CampaignState {
    std::shared_ptr<const CandidatePool> pool;
    std::vector<char> experimented;  // flag per pool row
    Index experimented_count = 0;
    Dataset training;  // responses in the internal (maximization) direction

    struct Discard {
        Index pool_index = -1;
        double response = 0.0;
        int iteration = 0;
    };
    std::vector<Discard> discards;

    Mode mode = Mode::Exploring;
    Index anchor = -1;  // pool row of the latest surprise; valid outside Exploring
    bool has_pending = false;
    Index pending_index = -1;
    double pending_response = 0.0;
    int pending_iteration = 0;

    int budget_remaining = 0;
    int accepted_since_refit = 0;

    Index size() const { return pool ? pool->size() : 0; }
    Index unexperimented_count() const { return size() - experimented_count; }

    void mark_experimented(Index i) {
        if (i < 0 || i >= size()) throw std::invalid_argument("CampaignState: index out of range");
        if (experimented[static_cast<std::size_t>(i)])
            throw std::logic_error("CampaignState: pool row observed twice");
        experimented[static_cast<std::size_t>(i)] = 1;
        ++experimented_count;
    }
};

CampaignState make_state(std::shared_ptr<const CandidatePool> pool, int budget);

/// Maximin space filling: the unexperimented candidate whose nearest
/// experimented neighbour (normalized coordinates) is farthest. Lowest index
/// wins ties. Requires at least one experimented point.
Index select_exploration(const CampaignState& state);

/// Nearest unexperimented candidate to the anchor, normalized coordinates.
Index select_exploitation(const CampaignState& state);

/// Expected improvement of each query over the incumbent, maximization
/// convention. Degenerate (near-zero spread) points fall back to max(mean
/// difference, 0); values are clamped to be nonnegative.
Vector ei_acquisition(const PredictiveDistribution& pred, double f_best);

/// Argmax of expected improvement over unexperimented candidates, incumbent =
/// best training response. Lowest index wins ties.
Index select_ei(const CampaignState& state, const GpModel& model);

/// One uniform draw decides the branch: random candidate with probability
/// epsilon, otherwise the EI choice. The draw is consumed even when epsilon
/// is 0, so epsilon only ever changes branch outcomes, never the stream.
/// chose_random, when given, reports which branch fired.
Index select_epsilon_ei(const CampaignState& state, const GpModel& model, double epsilon, Rng& rng,
                        bool* chose_random = nullptr);

/// Uniform random unexperimented candidate; also the surprise policy's first
/// sequential location.
Index select_random_unexperimented(const CampaignState& state, Rng& rng);

/// Model maintenance cadence. refit_every = 0 freezes hyperparameters for the
/// whole campaign (factorizations still track the data); k >= 1 re-estimates
/// them once every k accepted observations.
struct ModelSettings {
    int refit_every = 1;
    FitConfig fit;
};

enum class NextAction { Explore, ConfirmNear, ExploitNear };
enum class AnchorResolution { None, Kept, Discarded };

struct StepOutcome {
    NextAction next = NextAction::Explore;
    SurpriseAssessment assessment;
    AnchorResolution anchor_resolution = AnchorResolution::None;
    bool observation_pending = false;  // the new observation awaits confirmation
    bool refit = false;                // hyperparameters re-estimated this step
};

/// Rebuild the committed model after training data changed: hyperparameter
/// re-estimation when refit is requested, otherwise a factorization-only
/// update that keeps the current hyperparameters.
GpModel rebuild_model(const Dataset& training, const GpModel& current, const ModelSettings& settings,
                      bool refit);

/// Advance the surprise-reacting state machine with the observation just taken
/// at pool row obs_index. Handles verdicts, the confirm/discard bookkeeping,
/// training-set updates, and model maintenance; the caller has already marked
/// the row experimented and spent the budget. Returns what to do next.
StepOutcome surprise_step(CampaignState& state, GpModel& model, Index obs_index, double response,
                          const SurpriseConfig& surprise, const ModelSettings& settings,
                          int iteration);

}  // namespace surex
