#include "surex/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace surex {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

ObjectiveKind parse_objective(const std::string& name) {
    if (name == "demo1d") return ObjectiveKind::Demo1D;
    if (name == "camelback") return ObjectiveKind::SixHumpCamelback;
    if (name == "branin") return ObjectiveKind::Branin;
    bad("unknown objective '" + name + "' (demo1d, camelback, branin, or a pool table)");
}

Vector parse_vector(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) bad(where + " must be a nonempty array");
    Vector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) bad(where + " must contain numbers");
        v[static_cast<Index>(i)] = arr[i].get<double>();
    }
    return v;
}

}  // namespace

PolicySpec parse_policy(const std::string& text) {
    PolicySpec spec;
    std::string name = text;
    std::string param;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        param = text.substr(colon + 1);
    }
    if (name == "shannon")
        spec.kind = PolicyKind::SurpriseShannon;
    else if (name == "bayesian")
        spec.kind = PolicyKind::SurpriseBayesian;
    else if (name == "ei")
        spec.kind = PolicyKind::ExpectedImprovement;
    else if (name == "explore")
        spec.kind = PolicyKind::PureExploration;
    else if (name == "eps-ei") {
        spec.kind = PolicyKind::EpsilonEI;
        if (!param.empty()) {
            try {
                spec.epsilon = std::stod(param);
            } catch (const std::exception&) {
                bad("bad epsilon '" + param + "' in policy '" + text + "'");
            }
        }
    } else {
        bad("unknown policy '" + text + "' (shannon, bayesian, ei, eps-ei[:x], explore)");
    }
    spec.validate();
    return spec;
}

CampaignConfig parse_config(const json& doc) {
    if (!doc.is_object()) bad("document must be a JSON object");
    check_keys(doc, "top level", {"objective", "pool", "design", "policy", "model", "surprise", "test"});
    CampaignConfig cfg;

    if (doc.contains("objective")) {
        const json& o = doc["objective"];
        check_keys(o, "objective", {"kind", "direction", "noise_sd", "table", "inputs", "response"});
        if (o.contains("table")) {
            cfg.pool_table = o["table"].get<std::string>();
            if (!o.contains("inputs") || !o.contains("response"))
                bad("pool-table objective needs 'inputs' and 'response' column names");
            for (const auto& c : o["inputs"]) cfg.schema.input_columns.push_back(c.get<std::string>());
            cfg.schema.response_column = o["response"].get<std::string>();
        } else if (o.contains("kind")) {
            cfg.objective = parse_objective(o["kind"].get<std::string>());
        } else {
            bad("objective needs either 'kind' or 'table'");
        }
        if (o.contains("direction")) {
            const std::string d = o["direction"].get<std::string>();
            if (d == "maximize")
                cfg.direction = 1;
            else if (d == "minimize")
                cfg.direction = -1;
            else
                bad("direction must be 'maximize' or 'minimize'");
        }
        if (o.contains("noise_sd")) cfg.oracle_noise_sd = o["noise_sd"].get<double>();
    } else {
        bad("missing 'objective' section");
    }

    if (doc.contains("pool")) {
        const json& p = doc["pool"];
        check_keys(p, "pool", {"size", "lower", "upper"});
        if (p.contains("size")) cfg.pool_size = p["size"].get<Index>();
        if (p.contains("lower") != p.contains("upper"))
            bad("pool bounds need both 'lower' and 'upper'");
        if (p.contains("lower")) {
            cfg.bounds.lower = parse_vector(p["lower"], "pool.lower");
            cfg.bounds.upper = parse_vector(p["upper"], "pool.upper");
        }
    }

    if (doc.contains("design")) {
        const json& d = doc["design"];
        check_keys(d, "design", {"n_initial", "strategy", "budget", "test_rows"});
        if (d.contains("n_initial")) cfg.n_initial = d["n_initial"].get<Index>();
        if (d.contains("budget")) cfg.budget = d["budget"].get<int>();
        if (d.contains("test_rows")) cfg.pool_test = d["test_rows"].get<Index>();
        if (d.contains("strategy")) {
            const std::string s = d["strategy"].get<std::string>();
            if (s == "random")
                cfg.initial_design = InitialDesign::RandomSubset;
            else if (s == "boundary")
                cfg.initial_design = InitialDesign::BoundaryCorners;
            else
                bad("design.strategy must be 'random' or 'boundary'");
        }
    }

    if (doc.contains("policy")) {
        const json& p = doc["policy"];
        if (p.is_string()) {
            cfg.policy = parse_policy(p.get<std::string>());
        } else {
            check_keys(p, "policy", {"kind", "epsilon"});
            if (!p.contains("kind")) bad("policy needs a 'kind'");
            cfg.policy = parse_policy(p["kind"].get<std::string>());
            if (p.contains("epsilon")) {
                cfg.policy.epsilon = p["epsilon"].get<double>();
                cfg.policy.validate();
            }
        }
    }

    if (doc.contains("model")) {
        const json& m = doc["model"];
        check_keys(m, "model",
                   {"kernel", "smoothness", "refit_every", "fit_noise", "noise_variance",
                    "lengthscale", "signal_variance", "multistarts", "tol", "max_evaluations"});
        if (m.contains("kernel")) {
            const std::string k = m["kernel"].get<std::string>();
            if (k == "se")
                cfg.kernel = KernelKind::SquaredExponential;
            else if (k == "matern")
                cfg.kernel = KernelKind::Matern;
            else
                bad("model.kernel must be 'se' or 'matern'");
        }
        if (m.contains("smoothness")) cfg.smoothness = m["smoothness"].get<double>();
        if (m.contains("refit_every")) cfg.refit_every = m["refit_every"].get<int>();
        if (m.contains("fit_noise")) cfg.fit_noise = m["fit_noise"].get<bool>() ? 1 : 0;
        if (m.contains("noise_variance")) cfg.model_noise_variance = m["noise_variance"].get<double>();
        if (m.contains("lengthscale")) cfg.fixed_lengthscale = m["lengthscale"].get<double>();
        if (m.contains("signal_variance"))
            cfg.fixed_signal_variance = m["signal_variance"].get<double>();
        if (m.contains("multistarts")) cfg.fit_multistarts = m["multistarts"].get<int>();
        if (m.contains("tol")) cfg.fit_tol = m["tol"].get<double>();
        if (m.contains("max_evaluations")) cfg.fit_max_evaluations = m["max_evaluations"].get<int>();
    }

    if (doc.contains("surprise")) {
        const json& s = doc["surprise"];
        check_keys(s, "surprise", {"k_shannon", "k_bayesian", "include_noise", "max_reference"});
        if (s.contains("k_shannon")) cfg.surprise.shannon_k = s["k_shannon"].get<double>();
        if (s.contains("k_bayesian")) cfg.surprise.bayesian_threshold = s["k_bayesian"].get<double>();
        if (s.contains("include_noise"))
            cfg.surprise.include_noise_in_band = s["include_noise"].get<bool>();
        if (s.contains("max_reference"))
            cfg.surprise.max_reference_points = s["max_reference"].get<Index>();
    }

    if (doc.contains("test")) {
        const json& t = doc["test"];
        check_keys(t, "test", {"size", "seed"});
        if (t.contains("size")) cfg.test_size = t["size"].get<Index>();
        if (t.contains("seed")) cfg.test_seed = t["seed"].get<std::uint64_t>();
    }

    return cfg;
}

CampaignConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        bad("parse failure in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

nlohmann::json config_summary(const CampaignConfig& raw) {
    const CampaignConfig cfg = raw.resolved();
    json j;
    json& o = j["objective"];
    switch (cfg.objective) {
        case ObjectiveKind::Demo1D:
            o["kind"] = "demo1d";
            break;
        case ObjectiveKind::SixHumpCamelback:
            o["kind"] = "camelback";
            break;
        case ObjectiveKind::Branin:
            o["kind"] = "branin";
            break;
        case ObjectiveKind::TableLookup:
            o["kind"] = "table";
            o["table"] = cfg.pool_table;
            o["inputs"] = cfg.schema.input_columns;
            o["response"] = cfg.schema.response_column;
            break;
    }
    o["direction"] = cfg.maximize() ? "maximize" : "minimize";
    if (!cfg.pool_mode()) o["noise_sd"] = cfg.oracle_noise_sd;

    if (!cfg.pool_mode()) {
        j["pool"]["size"] = cfg.pool_size;
        j["pool"]["lower"] = std::vector<double>(cfg.bounds.lower.data(),
                                                 cfg.bounds.lower.data() + cfg.bounds.lower.size());
        j["pool"]["upper"] = std::vector<double>(cfg.bounds.upper.data(),
                                                 cfg.bounds.upper.data() + cfg.bounds.upper.size());
    }

    j["design"]["n_initial"] = cfg.n_initial;
    j["design"]["budget"] = cfg.budget;
    j["design"]["strategy"] =
        cfg.initial_design == InitialDesign::RandomSubset ? "random" : "boundary";
    if (cfg.pool_mode()) j["design"]["test_rows"] = cfg.pool_test;

    j["policy"]["kind"] = policy_label(cfg.policy);
    if (cfg.policy.kind == PolicyKind::EpsilonEI) j["policy"]["epsilon"] = cfg.policy.epsilon;

    json& m = j["model"];
    m["kernel"] = cfg.kernel == KernelKind::SquaredExponential ? "se" : "matern";
    if (cfg.kernel == KernelKind::Matern) m["smoothness"] = cfg.smoothness;
    m["refit_every"] = cfg.refit_every;
    m["fit_noise"] = cfg.fit_noise == 1;
    m["noise_variance"] = cfg.model_noise_variance;
    if (cfg.refit_every == 0) {
        m["lengthscale"] = cfg.fixed_lengthscale;
        m["signal_variance"] = cfg.fixed_signal_variance;
    } else {
        m["multistarts"] = cfg.fit_multistarts;
        m["tol"] = cfg.fit_tol;
        m["max_evaluations"] = cfg.fit_max_evaluations;
    }

    if (cfg.policy.kind == PolicyKind::SurpriseShannon ||
        cfg.policy.kind == PolicyKind::SurpriseBayesian) {
        j["surprise"]["k_shannon"] = cfg.surprise.shannon_k;
        j["surprise"]["k_bayesian"] = cfg.surprise.bayesian_threshold;
        j["surprise"]["include_noise"] = cfg.surprise.include_noise_in_band;
        j["surprise"]["max_reference"] = cfg.surprise.max_reference_points;
    }

    if (!cfg.pool_mode()) {
        j["test"]["size"] = cfg.test_size;
        j["test"]["seed"] = cfg.test_seed;
    }
    return j;
}

}  // namespace surex
