#include "surex/design.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace surex {

Matrix minmax_normalize(const Matrix& locations) {
    Matrix out(locations.rows(), locations.cols());
    for (Index d = 0; d < locations.cols(); ++d) {
        const double lo = locations.col(d).minCoeff();
        const double hi = locations.col(d).maxCoeff();
        const double span = hi - lo;
        if (span > 0.0)
            out.col(d) = (locations.col(d).array() - lo) / span;
        else
            out.col(d).setZero();
    }
    return out;
}

CandidatePool generate_lhd(Index n, const BoxBounds& bounds, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_lhd: n must be >= 1");
    bounds.validate();
    const Index p = bounds.dim();
    Rng rng(seed);
    CandidatePool pool;
    pool.locations.resize(n, p);
    for (Index d = 0; d < p; ++d) {
        const std::vector<std::size_t> strata = rng.permutation(static_cast<std::size_t>(n));
        const double width = (bounds.upper[d] - bounds.lower[d]) / static_cast<double>(n);
        for (Index i = 0; i < n; ++i) {
            // uniform() is open on (0,1), so points stay strictly inside their stratum.
            const double offset = rng.uniform();
            pool.locations(i, d) =
                bounds.lower[d] + (static_cast<double>(strata[static_cast<size_t>(i)]) + offset) * width;
        }
    }
    pool.normalized = minmax_normalize(pool.locations);
    pool.provenance = PoolProvenance::GeneratedLhd;
    pool.seed = seed;
    return pool;
}

std::vector<Index> select_initial(const CandidatePool& pool, Index n_init, InitialDesign strategy,
                                  Rng& rng, Index total_observations) {
    if (n_init < 1) throw std::invalid_argument("select_initial: n_init must be >= 1");
    if (n_init > pool.size())
        throw std::invalid_argument("select_initial: n_init exceeds pool size");
    if (total_observations > 0 && 10 * n_init > 3 * total_observations)
        std::fprintf(stderr,
                     "warning: initial design (%lld points) exceeds 30%% of the total budget (%lld)\n",
                     static_cast<long long>(n_init), static_cast<long long>(total_observations));

    std::vector<Index> out;
    if (strategy == InitialDesign::RandomSubset) {
        for (std::size_t i : rng.sample_without_replacement(static_cast<std::size_t>(pool.size()),
                                                            static_cast<std::size_t>(n_init)))
            out.push_back(static_cast<Index>(i));
        return out;
    }

    if (n_init != 2)
        throw std::invalid_argument("select_initial: boundary strategy selects exactly 2 points");
    const Vector lo = pool.locations.colwise().minCoeff();
    const Vector hi = pool.locations.colwise().maxCoeff();
    auto nearest = [&](const Vector& corner, Index skip) {
        Index best = -1;
        double best_d = 0.0;
        for (Index i = 0; i < pool.size(); ++i) {
            if (i == skip) continue;
            const double d = (pool.locations.row(i).transpose() - corner).norm();
            if (best < 0 || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        return best;
    };
    const Index low_idx = nearest(lo, -1);
    out.push_back(low_idx);
    out.push_back(nearest(hi, low_idx));
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto a = cell.find_first_not_of(" \t\r");
        const auto b = cell.find_last_not_of(" \t\r");
        cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& column,
                  const std::string& source) {
    if (cell.empty())
        throw std::runtime_error(source + ": missing value at line " + std::to_string(line) +
                                 ", column '" + column + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != cell.size())
        throw std::runtime_error(source + ": non-numeric value '" + cell + "' at line " +
                                 std::to_string(line) + ", column '" + column + "'");
    return v;
}

}  // namespace

CandidatePool ingest_pool_text(const std::string& text, const TableSchema& schema,
                               const std::string& source_name) {
    if (schema.input_columns.empty())
        throw std::invalid_argument("ingest_pool_table: schema needs at least one input column");
    if (schema.response_column.empty())
        throw std::invalid_argument("ingest_pool_table: schema needs a response column");

    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line))
        throw std::runtime_error(source_name + ": empty table");
    const std::vector<std::string> header = split_csv_line(line);

    auto column_index = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw std::runtime_error(source_name + ": column '" + name + "' not found in header");
    };
    std::vector<std::size_t> input_idx;
    for (const auto& name : schema.input_columns) input_idx.push_back(column_index(name));
    const std::size_t response_idx = column_index(schema.response_column);

    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    std::size_t line_number = 2;  // file line, header is line 1
    while (std::getline(ss, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            ++line_number;
            continue;
        }
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(source_name + ": line " + std::to_string(line_number) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(header.size()));
        std::vector<double> x;
        for (std::size_t k = 0; k < input_idx.size(); ++k)
            x.push_back(parse_cell(cells[input_idx[k]], line_number, schema.input_columns[k],
                                   source_name));
        ys.push_back(parse_cell(cells[response_idx], line_number, schema.response_column, source_name));
        rows.push_back(std::move(x));
        ++line_number;
    }
    if (rows.empty()) throw std::runtime_error(source_name + ": table has no data rows");

    CandidatePool pool;
    pool.locations.resize(static_cast<Index>(rows.size()), static_cast<Index>(input_idx.size()));
    pool.responses.resize(static_cast<Index>(ys.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            pool.locations(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        pool.responses[static_cast<Index>(i)] = ys[i];
    }
    pool.normalized = minmax_normalize(pool.locations);
    pool.provenance = PoolProvenance::IngestedTable;
    pool.source = source_name;
    pool.has_responses = true;

    std::map<std::vector<double>, Index> seen;
    for (Index i = 0; i < pool.size(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(pool.dim()));
        for (Index j = 0; j < pool.dim(); ++j) key[static_cast<std::size_t>(j)] = pool.locations(i, j);
        auto [it, inserted] = seen.emplace(std::move(key), i);
        if (!inserted)
            std::fprintf(stderr, "warning: %s: rows %lld and %lld have identical inputs\n",
                         source_name.c_str(), static_cast<long long>(it->second),
                         static_cast<long long>(i));
    }
    return pool;
}

CandidatePool ingest_pool_table(const std::string& path, const TableSchema& schema) {
    std::ifstream in(path);
    // A missing table is a configuration mistake, reported as a usage error.
    if (!in) throw std::invalid_argument("ingest_pool_table: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return ingest_pool_text(buffer.str(), schema, path);
}

PoolSplit split_pool(const CandidatePool& pool, Index n_train, Index n_test, Rng& rng) {
    if (n_train < 1 || n_test < 0)
        throw std::invalid_argument("split_pool: sizes must be n_train >= 1, n_test >= 0");
    if (n_train + n_test > pool.size())
        throw std::invalid_argument("split_pool: n_train + n_test exceeds pool size");
    const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(pool.size()));
    PoolSplit split;
    for (Index i = 0; i < pool.size(); ++i) {
        const Index row = static_cast<Index>(perm[static_cast<std::size_t>(i)]);
        if (i < n_train)
            split.initial.push_back(row);
        else if (i < n_train + n_test)
            split.test.push_back(row);
        else
            split.sequential.push_back(row);
    }
    return split;
}

}  // namespace surex
