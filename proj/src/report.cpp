#include "surex/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace surex {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

// Shortest round-trippable decimal, so repeated runs diff byte-identically.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

}  // namespace

void write_trace_csv(const std::string& path, const RunResult& result) {
    std::ofstream out = open_out(path);
    const Index p = result.trace.empty() ? 0 : result.trace.front().location.size();
    out << "experiment,iteration,mode,action,pool_index";
    for (Index d = 0; d < p; ++d) out << ",x" << d;
    out << ",response,score,threshold,surprised,status,refit,lengthscale,signal_variance,"
           "noise_variance,in_domain\n";
    for (const TraceRecord& r : result.trace) {
        out << r.experiment << ',' << r.iteration << ',' << r.mode << ',' << r.action << ','
            << r.pool_index;
        for (Index d = 0; d < p; ++d) out << ',' << num(r.location[d]);
        out << ',' << num(r.response) << ',';
        if (r.has_verdict) out << num(r.score);
        out << ',';
        if (r.has_verdict) out << num(r.threshold);
        out << ',' << (r.has_verdict ? (r.surprised ? "1" : "0") : "") << ',' << r.status << ','
            << (r.refit ? 1 : 0) << ',' << num(r.lengthscale) << ',' << num(r.signal_variance)
            << ',' << num(r.noise_variance) << ',' << (r.in_domain ? 1 : 0) << '\n';
    }
}

void write_replications_csv(const std::string& path, const ReplicationSummary& summary) {
    std::ofstream out = open_out(path);
    out << "replication,seed,rmse,accepted,discarded,iterations,exhausted_early,wall_seconds\n";
    for (std::size_t i = 0; i < summary.rmse_values.size(); ++i) {
        const RunResult& r = summary.results[i];
        out << i << ',' << summary.seeds[i] << ',' << num(summary.rmse_values[i]) << ','
            << r.accepted << ',' << r.discarded << ',' << r.iterations << ','
            << (r.exhausted_early ? 1 : 0) << ',' << num(r.wall_seconds) << '\n';
    }
}

void write_compare_csv(const std::string& path, const std::vector<ReplicationSummary>& summaries) {
    std::ofstream out = open_out(path);
    out << "policy,replication,seed,rmse\n";
    for (const ReplicationSummary& s : summaries)
        for (std::size_t i = 0; i < s.rmse_values.size(); ++i)
            out << s.policy_label << ',' << i << ',' << s.seeds[i] << ',' << num(s.rmse_values[i])
                << '\n';
}

void write_epsilon_csv(const std::string& path, const std::vector<EpsilonRow>& rows) {
    std::ofstream out = open_out(path);
    out << "epsilon,mean_rmse,sd_rmse,replications,failures\n";
    for (const EpsilonRow& r : rows)
        out << num(r.epsilon) << ',' << num(r.summary.mean) << ',' << num(r.summary.sd) << ','
            << r.summary.rmse_values.size() << ',' << r.summary.failures.size() << '\n';
}

void write_epsilon_long_csv(const std::string& path, const std::vector<EpsilonRow>& rows) {
    std::ofstream out = open_out(path);
    out << "epsilon,replication,seed,rmse\n";
    for (const EpsilonRow& r : rows)
        for (std::size_t i = 0; i < r.summary.rmse_values.size(); ++i)
            out << num(r.epsilon) << ',' << i << ',' << r.summary.seeds[i] << ','
                << num(r.summary.rmse_values[i]) << '\n';
}

nlohmann::json run_json(const RunResult& result) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["rmse"] = result.rmse_value;
    j["accepted"] = result.accepted;
    j["discarded"] = result.discarded;
    j["iterations"] = result.iterations;
    j["observations"] = result.trace.size();
    j["exhausted_early"] = result.exhausted_early;
    j["unconfirmed_at_end"] = result.unconfirmed_at_end;
    j["wall_seconds"] = result.wall_seconds;
    if (result.final_model) {
        j["model"]["lengthscale"] = result.final_model->kernel().lengthscale;
        j["model"]["signal_variance"] = result.final_model->kernel().signal_variance;
        j["model"]["noise_variance"] = result.final_model->noise_variance();
    }
    return j;
}

nlohmann::json summary_json(const ReplicationSummary& summary) {
    nlohmann::json j;
    j["policy"] = summary.policy_label;
    j["replications"] = summary.rmse_values.size();
    j["mean_rmse"] = summary.mean;
    j["sd_rmse"] = summary.sd;
    j["failures"] = summary.failures;
    j["rmse"] = summary.rmse_values;
    std::vector<std::uint64_t> seeds(summary.seeds.begin(), summary.seeds.end());
    j["seeds"] = seeds;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
}

}  // namespace surex
