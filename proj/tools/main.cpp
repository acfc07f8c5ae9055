#include "surex/campaign.hpp"
#include "surex/config.hpp"
#include "surex/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

int run_one(const surex::CampaignConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    const surex::RunResult result = surex::run_campaign(cfg, seed);
    surex::write_trace_csv(out_path(out_dir, "trace.csv"), result);
    nlohmann::json doc;
    doc["command"] = "run";
    doc["config"] = surex::config_summary(cfg);
    doc["result"] = surex::run_json(result);
    surex::write_json(out_path(out_dir, "run.json"), doc);
    std::printf("rmse %.6f over %zu observations (%d accepted, %d discarded)\n", result.rmse_value,
                result.trace.size(), result.accepted, result.discarded);
    return 0;
}

int run_replicate(const surex::CampaignConfig& cfg, int reps, std::uint64_t seed,
                  const std::string& out_dir) {
    const surex::ReplicationSummary summary = surex::run_replications(cfg, reps, seed);
    surex::write_replications_csv(out_path(out_dir, "replications.csv"), summary);
    nlohmann::json doc;
    doc["command"] = "replicate";
    doc["config"] = surex::config_summary(cfg);
    doc["summary"] = surex::summary_json(summary);
    surex::write_json(out_path(out_dir, "summary.json"), doc);
    std::printf("%s: mean rmse %.6f (sd %.6f) over %zu replications\n",
                summary.policy_label.c_str(), summary.mean, summary.sd,
                summary.rmse_values.size());
    return 0;
}

int run_sweep(const surex::CampaignConfig& cfg, const std::vector<double>& grid, int reps,
              std::uint64_t seed, const std::string& out_dir) {
    const std::vector<surex::EpsilonRow> rows = surex::sweep_epsilon(cfg, grid, reps, seed);
    surex::write_epsilon_csv(out_path(out_dir, "epsilon_summary.csv"), rows);
    surex::write_epsilon_long_csv(out_path(out_dir, "epsilon_replications.csv"), rows);
    nlohmann::json doc;
    doc["command"] = "sweep-epsilon";
    doc["config"] = surex::config_summary(cfg);
    for (const surex::EpsilonRow& r : rows) {
        nlohmann::json row = surex::summary_json(r.summary);
        row["epsilon"] = r.epsilon;
        doc["rows"].push_back(row);
        std::printf("eps %.2f: mean rmse %.6f (sd %.6f)\n", r.epsilon, r.summary.mean,
                    r.summary.sd);
    }
    surex::write_json(out_path(out_dir, "sweep.json"), doc);
    return 0;
}

int run_compare(const surex::CampaignConfig& cfg, const std::vector<std::string>& names, int reps,
                std::uint64_t seed, const std::string& out_dir) {
    std::vector<surex::PolicySpec> policies;
    for (const std::string& n : names) policies.push_back(surex::parse_policy(n));
    const std::vector<surex::ReplicationSummary> summaries =
        surex::compare_policies(cfg, policies, reps, seed);
    surex::write_compare_csv(out_path(out_dir, "compare_replications.csv"), summaries);

    std::ofstream table(out_path(out_dir, "compare_summary.csv"));
    table << "policy,mean_rmse,sd_rmse,replications,failures\n";
    nlohmann::json doc;
    doc["command"] = "compare";
    doc["config"] = surex::config_summary(cfg);
    for (const surex::ReplicationSummary& s : summaries) {
        table << s.policy_label << ',' << s.mean << ',' << s.sd << ',' << s.rmse_values.size()
              << ',' << s.failures.size() << '\n';
        doc["rows"].push_back(surex::summary_json(s));
        std::printf("%s: mean rmse %.6f (sd %.6f)\n", s.policy_label.c_str(), s.mean, s.sd);
    }
    surex::write_json(out_path(out_dir, "compare.json"), doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential experimentation campaigns over GP surrogates"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string policy_override;
    std::uint64_t seed = 1;
    int reps = 50;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "campaign config file (JSON)");
        if (needs_config) opt->required();
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--policy", policy_override,
                        "policy override: shannon|bayesian|ei|eps-ei[:x]|explore");
        cmd->add_option("--jobs", jobs, "reserved for parallel execution; must be 1")
            ->check(CLI::Range(1, 1));
    };

    CLI::App* cmd_run = app.add_subcommand("run", "single campaign, write trace + result");
    add_common(cmd_run, true);

    CLI::App* cmd_rep = app.add_subcommand("replicate", "R replications, write summary");
    add_common(cmd_rep, true);
    cmd_rep->add_option("--reps", reps, "replication count");

    CLI::App* cmd_sweep = app.add_subcommand("sweep-epsilon", "replications across an epsilon grid");
    add_common(cmd_sweep, true);
    cmd_sweep->add_option("--reps", reps, "replication count");
    std::vector<double> grid;
    cmd_sweep->add_option("--grid", grid, "epsilon values (default 0.0..1.0 step 0.1)");

    CLI::App* cmd_cmp = app.add_subcommand("compare", "aligned-seed comparison of several policies");
    add_common(cmd_cmp, true);
    cmd_cmp->add_option("--reps", reps, "replication count");
    std::vector<std::string> policy_names{"shannon", "bayesian", "ei", "explore"};
    cmd_cmp->add_option("--policies", policy_names, "policies to compare");

    CLI::App* cmd_val = app.add_subcommand("validate-config", "parse, resolve, and echo a config");
    add_common(cmd_val, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        surex::CampaignConfig cfg = surex::load_config(config_path);
        if (!policy_override.empty()) cfg.policy = surex::parse_policy(policy_override);
        cfg.resolved().validate();

        if (cmd_val->parsed()) {
            std::cout << surex::config_summary(cfg).dump(2) << '\n';
            return 0;
        }
        if (cmd_run->parsed()) return run_one(cfg, seed, out_dir);
        if (cmd_rep->parsed()) return run_replicate(cfg, reps, seed, out_dir);
        if (cmd_sweep->parsed()) {
            if (grid.empty())
                for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
            return run_sweep(cfg, grid, reps, seed, out_dir);
        }
        if (cmd_cmp->parsed()) return run_compare(cfg, policy_names, reps, seed, out_dir);
        std::fprintf(stderr, "error: no subcommand\n");
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
}
