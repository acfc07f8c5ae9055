#include "surex/policies.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

using namespace surex;

namespace {

std::shared_ptr<CandidatePool> pool_from(const Matrix& locations) {
    auto p = std::make_shared<CandidatePool>();
    p->locations = locations;
    p->normalized = minmax_normalize(locations);
    return p;
}

std::shared_ptr<CandidatePool> line_pool(std::initializer_list<double> xs) {
    Matrix loc(static_cast<Index>(xs.size()), 1);
    Index i = 0;
    for (double x : xs) loc(i++, 0) = x;
    return pool_from(loc);
}

/// State with the given rows already observed and in training.
CampaignState seeded_state(std::shared_ptr<const CandidatePool> pool,
                           const std::vector<std::pair<Index, double>>& observed, int budget = 100) {
    CampaignState s = make_state(pool, budget);
    for (const auto& [row, y] : observed) {
        s.mark_experimented(row);
        s.training.append(s.pool->locations.row(row).transpose(), y);
    }
    return s;
}

double ref_ei(double mean, double sd, double f_best) {
    if (sd <= 1e-12) return std::max(mean - f_best, 0.0);
    const double z = (mean - f_best) / sd;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return std::max((mean - f_best) * cdf + sd * pdf, 0.0);
}

const KernelSpec kUnitSe{KernelKind::SquaredExponential, 1.0, 1.0, 2.5};

}  // namespace

TEST_CASE("state bookkeeping guards against reuse and bad indices") {
    auto pool = line_pool({0.0, 1.0, 2.0});
    CampaignState s = make_state(pool, 5);
    CHECK(s.budget_remaining == 5);
    CHECK(s.unexperimented_count() == 3);
    s.mark_experimented(1);
    CHECK(s.experimented_count == 1);
    CHECK_THROWS_AS(s.mark_experimented(1), std::logic_error);
    CHECK_THROWS_AS(s.mark_experimented(3), std::invalid_argument);
    CHECK_THROWS_AS(s.mark_experimented(-1), std::invalid_argument);
    CHECK_THROWS_AS((void)make_state(nullptr, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)make_state(pool, -1), std::invalid_argument);
}

TEST_CASE("maximin exploration on a line pool") {
    auto pool = line_pool({0.0, 1.0, 2.0, 3.0});

    // Only the origin observed: the far end is the maximin choice.
    CampaignState s1 = seeded_state(pool, {{0, 0.0}});
    CHECK(select_exploration(s1) == 3);

    // Both ends observed: the two interior points tie, lowest index wins.
    CampaignState s2 = seeded_state(pool, {{0, 0.0}, {3, 0.0}});
    CHECK(select_exploration(s2) == 1);

    CampaignState none = make_state(pool, 10);
    CHECK_THROWS_AS((void)select_exploration(none), std::invalid_argument);

    CampaignState all = seeded_state(pool, {{0, 0.0}, {1, 0.0}, {2, 0.0}, {3, 0.0}});
    CHECK_THROWS_AS((void)select_exploration(all), PoolExhausted);
}

TEST_CASE("maximin exploration matches an exhaustive scan on random pools") {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 5 + static_cast<Index>(rng.uniform_int(36));
        const Index d = 1 + static_cast<Index>(rng.uniform_int(3));
        auto pool = pool_from(testutil::random_points(n, d, -4.0, 9.0, rng));
        CampaignState s = make_state(pool, 100);
        const Index k = 1 + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        for (std::size_t j : rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                            static_cast<std::size_t>(k)))
            s.mark_experimented(static_cast<Index>(j));
        CHECK(select_exploration(s) == testutil::brute_force_exploration(pool->normalized, s.experimented));
    }
}

TEST_CASE("exploitation picks the nearest open candidate to the anchor") {
    auto pool = line_pool({0.0, 1.0, 2.0, 3.0});
    CampaignState s = seeded_state(pool, {{0, 0.0}});
    s.anchor = 0;
    CHECK(select_exploitation(s) == 1);

    s.mark_experimented(1);
    CHECK(select_exploitation(s) == 2);

    CampaignState unset = seeded_state(pool, {{0, 0.0}});
    CHECK_THROWS_AS((void)select_exploitation(unset), std::invalid_argument);
}

TEST_CASE("exploitation matches an exhaustive nearest-neighbour scan") {
    Rng rng(102);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 5 + static_cast<Index>(rng.uniform_int(36));
        const Index d = 1 + static_cast<Index>(rng.uniform_int(3));
        auto pool = pool_from(testutil::random_points(n, d, 0.0, 5.0, rng));
        CampaignState s = make_state(pool, 100);
        const Index k = 1 + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        for (std::size_t j : rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                            static_cast<std::size_t>(k)))
            s.mark_experimented(static_cast<Index>(j));
        s.anchor = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        CHECK(select_exploitation(s) ==
              testutil::brute_force_nearest(pool->normalized, s.experimented, s.anchor));
    }
}

TEST_CASE("expected improvement closed form") {
    PredictiveDistribution pred;
    pred.mean = Vector::Zero(1);
    pred.variance = Vector::Ones(1);
    const Vector at_incumbent = ei_acquisition(pred, 0.0);
    CHECK(at_incumbent[0] == doctest::Approx(0.398942).epsilon(1e-6));

    // Degenerate spread falls back to the positive part of the mean gap.
    pred.variance[0] = 0.0;
    pred.mean[0] = -1.0;
    CHECK(ei_acquisition(pred, 0.0)[0] == 0.0);
    pred.mean[0] = 2.0;
    CHECK(ei_acquisition(pred, 0.0)[0] == doctest::Approx(2.0));

    // A decent mean with spread beats a hopeless mean with tiny spread.
    PredictiveDistribution two;
    two.mean = Vector(2);
    two.variance = Vector(2);
    two.mean << 1.0, -3.0;
    two.variance << 1.0, 0.01;
    const Vector ei = ei_acquisition(two, 0.0);
    CHECK(ei[0] == doctest::Approx(1.083315).epsilon(1e-5));
    CHECK(ei[0] > ei[1]);
    CHECK(ei.minCoeff() >= 0.0);

    PredictiveDistribution bad;
    CHECK_THROWS_AS((void)ei_acquisition(bad, 0.0), std::invalid_argument);
}

TEST_CASE("expected improvement matches a monte-carlo estimate") {
    Rng rng(103);
    for (int t = 0; t < 12; ++t) {
        const double mean = rng.uniform(-2.0, 2.0);
        const double sd = rng.uniform(0.05, 2.0);
        const double f_best = rng.uniform(-2.0, 2.0);
        PredictiveDistribution pred;
        pred.mean = Vector::Constant(1, mean);
        pred.variance = Vector::Constant(1, sd * sd);
        const double exact = ei_acquisition(pred, f_best)[0];
        const double mc = testutil::mc_expected_improvement(mean, sd, f_best, 400000, rng);
        CHECK(exact == doctest::Approx(mc).scale(1.0).epsilon(0.01));
    }
}

TEST_CASE("ei selection scans open candidates and breaks ties low") {
    // Training at the centre; two open candidates symmetric about it have
    // identical predictive laws, so EI ties and the lower index wins.
    auto pool = line_pool({-1.0, 1.0, 0.0});
    CampaignState s = seeded_state(pool, {{2, 1.0}});
    GpModel model(kUnitSe, 0.01, s.training);
    CHECK(select_ei(s, model) == 0);

    CampaignState empty = make_state(pool, 10);
    CHECK_THROWS_AS((void)select_ei(empty, model), std::invalid_argument);
}

TEST_CASE("ei selection matches a per-candidate argmax on random pools") {
    Rng rng(104);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = 8 + static_cast<Index>(rng.uniform_int(25));
        auto pool = pool_from(testutil::random_points(n, 2, -2.0, 2.0, rng));
        CampaignState s = make_state(pool, 100);
        const Index k = 2 + static_cast<Index>(rng.uniform_int(4));
        for (std::size_t j : rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                            static_cast<std::size_t>(k))) {
            const Index row = static_cast<Index>(j);
            s.mark_experimented(row);
            s.training.append(pool->locations.row(row).transpose(), rng.normal());
        }
        GpModel model(KernelSpec{KernelKind::Matern, 1.2, 1.0, 2.5}, 0.05, s.training);

        const double f_best = s.training.responses.maxCoeff();
        Index expect = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (Index i = 0; i < n; ++i) {
            if (s.experimented[static_cast<std::size_t>(i)]) continue;
            const auto pt = model.predict_point(pool->locations.row(i).transpose(), false);
            const double v = ref_ei(pt.mean, std::sqrt(std::max(pt.variance, 0.0)), f_best);
            if (v > best) {
                best = v;
                expect = i;
            }
        }
        CHECK(select_ei(s, model) == expect);
    }
}

TEST_CASE("epsilon-greedy with epsilon zero is ei with one extra consumed draw") {
    auto pool = line_pool({0.0, 0.5, 1.0, 1.5, 2.0});
    CampaignState s = seeded_state(pool, {{0, 0.3}, {4, -0.1}});
    GpModel model(kUnitSe, 0.01, s.training);

    Rng rng(200);
    bool chose_random = true;
    const Index picked = select_epsilon_ei(s, model, 0.0, rng, &chose_random);
    CHECK_FALSE(chose_random);
    CHECK(picked == select_ei(s, model));

    // Exactly one uniform was consumed, independent of the branch outcome.
    Rng mirror(200);
    (void)mirror.uniform();
    CHECK(rng.raw() == mirror.raw());

    CHECK_THROWS_AS((void)select_epsilon_ei(s, model, -0.1, rng, nullptr), std::invalid_argument);
    CHECK_THROWS_AS((void)select_epsilon_ei(s, model, 1.5, rng, nullptr), std::invalid_argument);
}

TEST_CASE("epsilon one never touches the model") {
    auto pool = line_pool({0.0, 1.0, 2.0});
    // Empty training data: the EI branch would throw, the random branch works.
    CampaignState s = make_state(pool, 10);
    GpModel model(kUnitSe, 0.01, Dataset{Matrix::Zero(1, 1), Vector::Zero(1)});

    Rng rng(300);
    for (int i = 0; i < 20; ++i) {
        bool chose_random = false;
        const Index picked = select_epsilon_ei(s, model, 1.0, rng, &chose_random);
        CHECK(chose_random);
        CHECK(picked >= 0);
        CHECK(picked < 3);
    }
}

TEST_CASE("epsilon one half fires the random branch about half the time") {
    auto pool = line_pool({0.0, 0.5, 1.0, 1.5, 2.0});
    CampaignState s = seeded_state(pool, {{0, 0.3}});
    GpModel model(kUnitSe, 0.01, s.training);

    int random_picks = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Rng rng(static_cast<std::uint64_t>(i) + 1);
        bool chose_random = false;
        (void)select_epsilon_ei(s, model, 0.5, rng, &chose_random);
        if (chose_random) ++random_picks;
    }
    CHECK(std::abs(random_picks / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("random selection is uniform over open candidates") {
    Matrix loc(12, 1);
    for (Index i = 0; i < 12; ++i) loc(i, 0) = static_cast<double>(i);
    auto pool = pool_from(loc);
    CampaignState s = make_state(pool, 100);
    s.mark_experimented(3);
    s.mark_experimented(8);  // 10 open candidates remain

    std::vector<int> counts(12, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Rng rng(static_cast<std::uint64_t>(i) + 1000);
        ++counts[static_cast<std::size_t>(select_random_unexperimented(s, rng))];
    }
    CHECK(counts[3] == 0);
    CHECK(counts[8] == 0);
    for (Index i = 0; i < 12; ++i) {
        if (i == 3 || i == 8) continue;
        CHECK(std::abs(counts[static_cast<std::size_t>(i)] / static_cast<double>(n) - 0.1) < 0.01);
    }

    // A single open row is forced; an empty pool is an exhaustion signal.
    CampaignState one = make_state(pool, 100);
    for (Index i = 0; i < 11; ++i) one.mark_experimented(i);
    Rng rng(1);
    CHECK(select_random_unexperimented(one, rng) == 11);
    one.mark_experimented(11);
    CHECK_THROWS_AS((void)select_random_unexperimented(one, rng), PoolExhausted);
}

// ---------------------------------------------------------------------------
// Surprise-reacting state machine. Frozen hyperparameters (refit_every = 0)
// keep every verdict analytically predictable: one training point at the
// origin, unit SE kernel, so a far-away observation is judged against the
// prior band mean 0, variance 1 + noise.

namespace {

struct Scenario {
    std::shared_ptr<CandidatePool> pool = line_pool({0.0, 10.0, 10.5, 11.0, 20.0, 0.5});
    CampaignState state;
    GpModel model;
    SurpriseConfig surprise;
    ModelSettings settings;

    Scenario()
        : state(seeded_state(pool, {{0, 0.0}})),
          model(kUnitSe, 0.01, state.training) {
        settings.refit_every = 0;  // frozen hyperparameters
    }

    StepOutcome observe(Index row, double y, int iteration = 1) {
        state.mark_experimented(row);
        return surprise_step(state, model, row, y, surprise, settings, iteration);
    }
};

}  // namespace

TEST_CASE("calm exploring observation is accepted and exploration continues") {
    Scenario sc;
    const auto out = sc.observe(5, 0.05);
    CHECK_FALSE(out.assessment.surprised);
    CHECK(out.next == NextAction::Explore);
    CHECK(out.anchor_resolution == AnchorResolution::None);
    CHECK_FALSE(out.observation_pending);
    CHECK_FALSE(out.refit);
    CHECK(sc.state.mode == Mode::Exploring);
    CHECK(sc.state.training.size() == 2);
    CHECK(sc.model.size() == 2);
    CHECK(sc.state.discards.empty());
    CHECK_FALSE(sc.state.has_pending);
}

TEST_CASE("surprising observation is parked, not trained on, until confirmed") {
    Scenario sc;
    const auto out = sc.observe(1, 5.0, 3);
    CHECK(out.assessment.surprised);
    CHECK(out.assessment.score > out.assessment.threshold);
    CHECK(out.observation_pending);
    CHECK(out.next == NextAction::ConfirmNear);
    CHECK(sc.state.mode == Mode::Confirming);
    CHECK(sc.state.anchor == 1);
    CHECK(sc.state.has_pending);
    CHECK(sc.state.pending_index == 1);
    CHECK(sc.state.pending_response == 5.0);
    CHECK(sc.state.pending_iteration == 3);

    // The pre-surprise belief stays live: nothing was added to the training
    // set, so the next verdict is judged against the old model.
    CHECK(sc.state.training.size() == 1);
    CHECK(sc.model.size() == 1);

    // The confirmation target is the open candidate nearest the anchor.
    CHECK(select_exploitation(sc.state) == 2);
}

TEST_CASE("confirmed surprise keeps both observations and switches to exploitation") {
    Scenario sc;
    (void)sc.observe(1, 5.0, 3);
    const auto out = sc.observe(2, 5.2, 3);
    CHECK(out.assessment.surprised);
    CHECK(out.anchor_resolution == AnchorResolution::Kept);
    CHECK(out.next == NextAction::ExploitNear);
    CHECK(sc.state.mode == Mode::PostSurpriseExploit);
    CHECK(sc.state.anchor == 1);
    CHECK_FALSE(sc.state.has_pending);

    // Anchor first, then the confirming observation, in order.
    REQUIRE(sc.state.training.size() == 3);
    CHECK(sc.state.training.inputs(1, 0) == 10.0);
    CHECK(sc.state.training.responses[1] == 5.0);
    CHECK(sc.state.training.inputs(2, 0) == 10.5);
    CHECK(sc.state.training.responses[2] == 5.2);
    CHECK(sc.model.size() == 3);
    CHECK(sc.state.discards.empty());
}

TEST_CASE("failed confirmation discards the anchor and resumes exploring") {
    Scenario sc;
    (void)sc.observe(1, 5.0, 3);
    const auto out = sc.observe(2, 0.1, 3);
    CHECK_FALSE(out.assessment.surprised);
    CHECK(out.anchor_resolution == AnchorResolution::Discarded);
    CHECK(out.next == NextAction::Explore);
    CHECK(sc.state.mode == Mode::Exploring);
    CHECK(sc.state.anchor == -1);
    CHECK_FALSE(sc.state.has_pending);

    // The anchor went to the discard ledger; the confirmation was accepted.
    REQUIRE(sc.state.discards.size() == 1);
    CHECK(sc.state.discards[0].pool_index == 1);
    CHECK(sc.state.discards[0].response == 5.0);
    CHECK(sc.state.discards[0].iteration == 3);
    REQUIRE(sc.state.training.size() == 2);
    CHECK(sc.state.training.inputs(1, 0) == 10.5);
    CHECK(sc.state.training.responses[1] == 0.1);

    // The discarded response must never re-enter the model.
    for (Index i = 0; i < sc.model.size(); ++i) CHECK(sc.model.data().inputs(i, 0) != 10.0);
}

TEST_CASE("post-surprise exploitation continues while observations stay surprising") {
    Scenario sc;
    (void)sc.observe(1, 5.0);
    (void)sc.observe(2, 5.2);
    REQUIRE(sc.state.mode == Mode::PostSurpriseExploit);

    // Feed a wildly bandwidth-breaking response at the next exploit target.
    const auto pt = sc.model.predict_point(sc.pool->locations.row(3).transpose(), true);
    const auto loud = sc.observe(3, pt.mean + 10.0 * std::sqrt(pt.variance));
    CHECK(loud.assessment.surprised);
    CHECK(loud.next == NextAction::ExploitNear);
    CHECK(sc.state.mode == Mode::PostSurpriseExploit);
    CHECK(sc.state.training.size() == 4);

    // A spot-on response ends the episode and hands control back to exploration.
    const auto pt4 = sc.model.predict_point(sc.pool->locations.row(4).transpose(), true);
    const auto calm = sc.observe(4, pt4.mean);
    CHECK_FALSE(calm.assessment.surprised);
    CHECK(calm.next == NextAction::Explore);
    CHECK(sc.state.mode == Mode::Exploring);
    CHECK(sc.state.anchor == -1);
    CHECK(sc.state.training.size() == 5);
}

TEST_CASE("refit cadence re-estimates hyperparameters on accepted observations") {
    Scenario sc;
    sc.settings.refit_every = 1;
    sc.settings.fit.fit_noise = false;
    sc.settings.fit.noise_variance = 0.01;
    sc.settings.fit.multistarts = 2;
    sc.settings.fit.max_evaluations = 120;

    const auto out = sc.observe(5, 0.05);
    CHECK_FALSE(out.assessment.surprised);
    CHECK(out.refit);
    // The fitting path centres the model on the response mean; the frozen
    // direct-construction path would have kept the offset at zero.
    CHECK(sc.model.mean_offset() == doctest::Approx(sc.state.training.responses.mean()).epsilon(1e-12));
    CHECK(sc.model.noise_variance() == 0.01);
    CHECK(sc.state.accepted_since_refit == 0);

    // A parked surprise does not trigger a refit: nothing was accepted.
    const auto parked = sc.observe(1, 50.0);
    CHECK(parked.observation_pending);
    CHECK_FALSE(parked.refit);
}

TEST_CASE("refit cadence spaced every two accepted observations") {
    Scenario sc;
    sc.settings.refit_every = 2;
    sc.settings.fit.fit_noise = false;
    sc.settings.fit.noise_variance = 0.01;
    sc.settings.fit.multistarts = 2;
    sc.settings.fit.max_evaluations = 120;

    const auto first = sc.observe(5, 0.05);
    CHECK_FALSE(first.refit);
    CHECK(sc.state.accepted_since_refit == 1);
    const auto second = sc.observe(2, 0.0);
    CHECK_FALSE(second.assessment.surprised);
    CHECK(second.refit);
    CHECK(sc.state.accepted_since_refit == 0);
}

TEST_CASE("bayesian verdicts park contradictions and accept redundancy") {
    Matrix x(5, 1);
    x << 0.0, 0.5, 1.0, 1.5, 2.0;
    Vector y = x.col(0).array().sin();
    Matrix poolloc(7, 1);
    poolloc << 0.0, 0.5, 1.0, 1.5, 2.0, 0.75, 1.25;
    auto pool = pool_from(poolloc);

    CampaignState state = make_state(pool, 100);
    for (Index i = 0; i < 5; ++i) state.mark_experimented(i);
    state.training = Dataset{x, y};

    ModelSettings settings;
    settings.refit_every = 1;
    settings.fit.fit_noise = false;
    settings.fit.noise_variance = 1e-4;
    settings.fit.multistarts = 3;
    SurpriseConfig surprise;
    surprise.kind = SurpriseKind::Bayesian;

    GpModel model = fit_hyperparameters(state.training, settings.fit);

    // A response on the fitted curve barely moves the belief: accepted.
    state.mark_experimented(5);
    const double tame = model.predict_point(Vector::Constant(1, 0.75)).mean;
    const auto calm = surprise_step(state, model, 5, tame, surprise, settings, 1);
    CHECK_FALSE(calm.assessment.surprised);
    CHECK(calm.assessment.score < 0.5);
    CHECK(calm.assessment.threshold == 0.5);
    CHECK(calm.refit);
    CHECK(state.training.size() == 6);
    CHECK(model.size() == 6);
    // The committed model is a genuine fit of the new training set.
    const GpModel refit = fit_hyperparameters(state.training, settings.fit);
    CHECK(model.kernel().lengthscale == refit.kernel().lengthscale);
    CHECK(model.kernel().signal_variance == refit.kernel().signal_variance);
    CHECK(model.log_marginal_likelihood() == refit.log_marginal_likelihood());

    // A flat contradiction of a tightly believed region is parked instead.
    state.mark_experimented(6);
    const auto loud = surprise_step(state, model, 6, 5.0, surprise, settings, 2);
    CHECK(loud.assessment.surprised);
    CHECK(loud.assessment.score > 0.5);
    CHECK(loud.observation_pending);
    CHECK(state.mode == Mode::Confirming);
    CHECK(state.training.size() == 6);  // unchanged
    CHECK(model.size() == 6);
}

TEST_CASE("rebuild_model honours the frozen and refit paths") {
    Rng rng(105);
    Matrix x = testutil::random_points(10, 1, 0.0, 4.0, rng);
    Vector y(10);
    for (Index i = 0; i < 10; ++i) y[i] = std::cos(x(i, 0)) + 0.05 * rng.normal();
    Dataset data{x, y};
    GpModel current(KernelSpec{KernelKind::SquaredExponential, 0.77, 1.3, 2.5}, 0.02, data, 0.4);

    Dataset extended = data;
    extended.append(Vector::Constant(1, 2.2), 0.1);

    ModelSettings settings;
    settings.refit_every = 3;
    settings.fit.fit_noise = false;
    settings.fit.noise_variance = 0.02;
    settings.fit.multistarts = 2;

    const GpModel frozen = rebuild_model(extended, current, settings, false);
    CHECK(frozen.kernel().lengthscale == 0.77);
    CHECK(frozen.kernel().signal_variance == 1.3);
    CHECK(frozen.mean_offset() == 0.4);
    CHECK(frozen.size() == 11);

    const GpModel refitted = rebuild_model(extended, current, settings, true);
    CHECK(refitted.size() == 11);
    CHECK(refitted.mean_offset() == doctest::Approx(extended.responses.mean()).epsilon(1e-12));

    // refit_every = 0 freezes hyperparameters even when a refit is requested.
    settings.refit_every = 0;
    const GpModel still_frozen = rebuild_model(extended, current, settings, true);
    CHECK(still_frozen.kernel().lengthscale == 0.77);
    CHECK(still_frozen.mean_offset() == 0.4);
}
