#pragma once

#include "surex/rng.hpp"
#include "surex/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace surex {

struct BoxBounds {
    Vector lower;
    Vector upper;

    Index dim() const { return lower.size(); }

    void validate() const {
        if (lower.size() != upper.size()) throw std::invalid_argument("BoxBounds: size mismatch");
        if (lower.size() == 0) throw std::invalid_argument("BoxBounds: empty");
        if ((lower.array() >= upper.array()).any())
            throw std::invalid_argument("BoxBounds: lower must be < upper in every dimension");
    }

    double diagonal() const { return (upper - lower).norm(); }
};

enum class PoolProvenance { GeneratedLhd, IngestedTable };

/// The finite set of locations a campaign may experiment at. Carries both the
/// original coordinates (reporting, modelling) and per-dimension min-max
/// normalized ones (all pool distance computations). Immutable once built.
struct CandidatePool {
    Matrix locations;   // |S| x P, original units
    Matrix normalized;  // |S| x P, each dimension mapped to [0,1] by the pool's bounding box
    PoolProvenance provenance = PoolProvenance::GeneratedLhd;
    std::uint64_t seed = 0;  // generated pools
    std::string source;      // ingested pools
    bool has_responses = false;
    Vector responses;  // ingested pools only, aligned with rows

    Index size() const { return locations.rows(); }
    Index dim() const { return locations.cols(); }
};

/// Per-dimension [0,1] mapping by column min/max; constant columns map to 0.
Matrix minmax_normalize(const Matrix& locations);

/// Latin hypercube: each dimension is split into n equal strata, each stratum
/// holding exactly one point at a uniform offset strictly inside it.
CandidatePool generate_lhd(Index n, const BoxBounds& bounds, std::uint64_t seed);

enum class InitialDesign { RandomSubset, BoundaryCorners };

/// Pick the initial experiment rows. RandomSubset draws uniformly without
/// replacement; BoundaryCorners picks the two pool points nearest the lower
/// and upper corners of the pool's bounding box (n_init must be 2). Warns on
/// stderr when the initial share exceeds 30% of the total observation budget.
std::vector<Index> select_initial(const CandidatePool& pool, Index n_init, InitialDesign strategy,
                                  Rng& rng, Index total_observations);

struct TableSchema {
    std::vector<std::string> input_columns;
    std::string response_column;
};

/// Build a pool from a CSV experiment table (header row + numeric cells).
/// Row order is preserved; bad cells raise errors naming row and column;
/// duplicated input rows are kept but warned about.
CandidatePool ingest_pool_table(const std::string& path, const TableSchema& schema);

/// Same, from already-loaded text (used by tests and remote tables).
CandidatePool ingest_pool_text(const std::string& text, const TableSchema& schema,
                               const std::string& source_name);

struct PoolSplit {
    std::vector<Index> initial;
    std::vector<Index> test;
    std::vector<Index> sequential;
};

/// Disjoint uniform split of pool rows into initial-training, held-out test,
/// and the sequential candidate remainder.
PoolSplit split_pool(const CandidatePool& pool, Index n_train, Index n_test, Rng& rng);

}  // namespace surex
