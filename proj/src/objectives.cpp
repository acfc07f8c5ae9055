#include "surex/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace surex {

namespace {

void require_dim(const Vector& x, Index d, const char* name) {
    if (x.size() != d) throw std::invalid_argument(std::string(name) + ": wrong input dimension");
}

double demo1d(double x) { return -std::sin(3.0 * x) - x * x + 0.7 * x; }

double camelback(double x1, double x2) {
    return (4.0 - 2.1 * x1 * x1 + x1 * x1 * x1 * x1 / 3.0) * x1 * x1 + x1 * x2 +
           (-4.0 + 4.0 * x2 * x2) * x2 * x2;
}

double branin(double x1, double x2) {
    constexpr double pi = std::numbers::pi;
    const double a = 1.0;
    const double b = 5.1 / (4.0 * pi * pi);
    const double c = 5.0 / pi;
    const double r = 6.0;
    const double s = 10.0;
    const double t = 1.0 / (8.0 * pi);
    const double u = x2 - b * x1 * x1 + c * x1 - r;
    return a * u * u + s * (1.0 - t) * std::cos(x1) + s;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

double eval_true(ObjectiveKind kind, const Vector& x) {
    switch (kind) {
        case ObjectiveKind::Demo1D:
            require_dim(x, 1, "eval_true(Demo1D)");
            return demo1d(x[0]);
        case ObjectiveKind::SixHumpCamelback:
            require_dim(x, 2, "eval_true(SixHumpCamelback)");
            return camelback(x[0], x[1]);
        case ObjectiveKind::Branin:
            require_dim(x, 2, "eval_true(Branin)");
            return branin(x[0], x[1]);
        case ObjectiveKind::TableLookup:
            break;
    }
    throw std::invalid_argument("eval_true: table oracles have no formula");
}

BoxBounds canonical_bounds(ObjectiveKind kind) {
    BoxBounds b;
    switch (kind) {
        case ObjectiveKind::Demo1D:
            b.lower = Vector::Constant(1, -1.0);
            b.upper = Vector::Constant(1, 2.0);
            return b;
        case ObjectiveKind::SixHumpCamelback:
            b.lower = vec2(-3.0, -2.0);
            b.upper = vec2(3.0, 2.0);
            return b;
        case ObjectiveKind::Branin:
            b.lower = vec2(-5.0, 0.0);
            b.upper = vec2(10.0, 15.0);
            return b;
        case ObjectiveKind::TableLookup:
            break;
    }
    throw std::invalid_argument("canonical_bounds: table pools carry their own bounds");
}

bool in_canonical_domain(ObjectiveKind kind, const Vector& x) {
    if (kind == ObjectiveKind::TableLookup) return true;
    const BoxBounds b = canonical_bounds(kind);
    if (x.size() != b.dim()) return false;
    return (x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all();
}

double auto_noise_sd(ObjectiveKind kind) {
    const BoxBounds b = canonical_bounds(kind);
    const Index p = b.dim();
    const Index per_axis = (p == 1) ? 10000 : (p == 2 ? 100 : 22);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    Vector x(p);
    std::vector<Index> idx(static_cast<std::size_t>(p), 0);
    while (true) {
        for (Index d = 0; d < p; ++d) {
            const double f = static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                             static_cast<double>(per_axis - 1);
            x[d] = b.lower[d] + f * (b.upper[d] - b.lower[d]);
        }
        const double v = eval_true(kind, x);
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
        first = false;
        Index d = 0;
        while (d < p && ++idx[static_cast<std::size_t>(d)] == per_axis) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == p) break;
    }
    return 0.02 * (hi - lo);
}

Oracle Oracle::synthetic(ObjectiveKind kind, double noise_sd, Rng rng) {
    if (kind == ObjectiveKind::TableLookup)
        throw std::invalid_argument("Oracle::synthetic: use Oracle::table for lookup oracles");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("Oracle: noise sd must be >= 0");
    return Oracle(kind, noise_sd, rng, nullptr);
}

Oracle Oracle::table(std::shared_ptr<const CandidatePool> pool) {
    if (!pool || !pool->has_responses)
        throw std::invalid_argument("Oracle::table: pool with responses required");
    return Oracle(ObjectiveKind::TableLookup, 0.0, Rng(0), std::move(pool));
}

double Oracle::observe_row(const CandidatePool& pool, Index row) {
    if (row < 0 || row >= pool.size()) throw std::out_of_range("Oracle: row out of range");
    if (kind_ == ObjectiveKind::TableLookup) return pool.responses[row];
    return eval_true(kind_, pool.locations.row(row).transpose()) + noise_sd_ * rng_.normal();
}

double Oracle::observe(const Vector& x) {
    if (kind_ != ObjectiveKind::TableLookup) return eval_true(kind_, x) + noise_sd_ * rng_.normal();
    for (Index i = 0; i < pool_->size(); ++i)
        if ((pool_->locations.row(i).transpose() - x).norm() == 0.0) return pool_->responses[i];
    throw std::invalid_argument("Oracle: location not present in the lookup table");
}

double Oracle::true_value(const CandidatePool& pool, Index row) const {
    if (row < 0 || row >= pool.size()) throw std::out_of_range("Oracle: row out of range");
    if (kind_ == ObjectiveKind::TableLookup) return pool.responses[row];
    return eval_true(kind_, pool.locations.row(row).transpose());
}

}  // namespace surex
