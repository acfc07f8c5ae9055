#pragma once

#include "surex/design.hpp"
#include "surex/rng.hpp"
#include "surex/types.hpp"

#include <memory>

namespace surex {

enum class ObjectiveKind { Demo1D, SixHumpCamelback, Branin, TableLookup };

/// Noise-free benchmark value. TableLookup has no formula and is rejected.
double eval_true(ObjectiveKind kind, const Vector& x);

/// The domain each benchmark is conventionally studied on. Advisory only:
/// eval_true accepts any input, but out-of-domain points get flagged in traces.
BoxBounds canonical_bounds(ObjectiveKind kind);

bool in_canonical_domain(ObjectiveKind kind, const Vector& x);

/// Default observation noise for a benchmark study: 2% of the function's range
/// over a fixed ~1e4-point grid on the canonical domain. Benchmarks disagree
/// wildly in scale, so the default is deliberately scale-aware and is echoed
/// into run metadata.
double auto_noise_sd(ObjectiveKind kind);

/// Ground-truth response source for one campaign. Synthetic kinds add one
/// Gaussian noise draw per observation, in call order, so campaigns that share
/// an oracle seed see identical noise at equal experiment indices. Table
/// oracles replay stored responses; their measurements are already noisy.
class Oracle {
public:
    static Oracle synthetic(ObjectiveKind kind, double noise_sd, Rng rng);
    static Oracle table(std::shared_ptr<const CandidatePool> pool);

    ObjectiveKind kind() const { return kind_; }
    double noise_sd() const { return noise_sd_; }

    /// Observe the pool row (the only way campaigns sample).
    double observe_row(const CandidatePool& pool, Index row);

    /// Observe an arbitrary location. Table oracles require an exact row match.
    double observe(const Vector& x);

    /// Noise-free truth at a pool row; table oracles return the stored response.
    double true_value(const CandidatePool& pool, Index row) const;

private:
    Oracle(ObjectiveKind kind, double noise_sd, Rng rng,
           std::shared_ptr<const CandidatePool> pool)
        : kind_(kind), noise_sd_(noise_sd), rng_(rng), pool_(std::move(pool)) {}

    ObjectiveKind kind_;
    double noise_sd_;
    Rng rng_;
    std::shared_ptr<const CandidatePool> pool_;  // TableLookup only
};

}  // namespace surex
