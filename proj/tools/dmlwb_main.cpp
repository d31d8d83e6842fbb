// dmlwb -- command-line front end for the DML workbench.
//
// Subcommands:
//   estimate   cross-fitted DML1/DML2 (and oracle) estimates on a CSV dataset
//   simulate   Monte Carlo study on the built-in ATT-DID / LATE designs
//   curves     closed-form higher-order bias / variance / MSE curves
//   advise-k   fold-count advisory based on the relative-loss formulas
//   gen-data   write a simulated design dataset (with truth columns) to CSV
//
// Exit codes: 0 success, 2 validation/schema/argument errors,
// 3 estimation degeneracy, 4 strict-mode Monte Carlo failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmlwb/dataset.hpp"
#include "dmlwb/errors.hpp"
#include "dmlwb/estimators.hpp"
#include "dmlwb/moments.hpp"
#include "dmlwb/simlab.hpp"
#include "dmlwb/theory.hpp"

namespace {

std::string fmt_g(double v, int prec = 12) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw dmlwb::SchemaError("cannot open output file: " + path);
    out << text;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    if (out.empty()) throw dmlwb::ArgumentError("empty integer list: " + csv);
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw dmlwb::ArgumentError("empty numeric list: " + csv);
    return out;
}

// ---------------------------------------------------------------------------
// Flat key=value config files. Keys mirror the long flag names without the
// leading dashes; command-line flags win on conflict. '#' starts a comment.
// ---------------------------------------------------------------------------

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    std::string out = s.substr(b, e - b + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dmlwb::SchemaError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw dmlwb::ArgumentError("config line is not key=value: " + trimmed);
        entries.emplace_back(strip(trimmed.substr(0, eq)), strip(trimmed.substr(eq + 1)));
    }
    return entries;
}

// Expands `--config file` into synthetic argv tokens. A config key is applied
// only when the user did not pass the same flag explicitly.
std::vector<std::string> expand_argv(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!args.empty() && args.back().rfind("--config=", 0) == 0)
        config_path = args.back().substr(9);
    if (config_path.empty()) return args;

    auto user_has = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : read_config_file(config_path)) {
        if (key == "config" || key == "out" || user_has(key)) continue;
        if (key == "strict") {
            if (value == "1" || value == "true") args.push_back("--strict");
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

using KvList = std::vector<std::pair<std::string, std::string>>;

void dump_config(const std::string& path, const KvList& entries) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw dmlwb::SchemaError("cannot open config dump file: " + path);
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string data_path;
    std::vector<std::string> role_specs;  // "role=column"
    std::string model = "ate";
    std::string method = "both";
    bool oracle = false;
    dmlwb::EstimationConfig config;
    double propensity_floor = -1.0;  // negative means absent
    std::string out;
    std::string dump_eta;
    std::string dump_config;
};

int run_estimate(const EstimateArgs& a) {
    dmlwb::Dataset::RoleMap roles;
    for (const auto& spec : a.role_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw dmlwb::ArgumentError("--role expects role=column, got '" + spec + "'");
        roles[spec.substr(0, eq)] = spec.substr(eq + 1);
    }
    const dmlwb::Dataset data = dmlwb::load_csv(a.data_path, roles);
    const dmlwb::MomentModel model = dmlwb::catalog_model(a.model);
    {
        auto errors = dmlwb::validate_for_model(data, model);
        if (!errors.empty()) {
            for (const auto& e : errors) std::cerr << "error: " << e << '\n';
            return 2;
        }
    }
    dmlwb::EstimationConfig cfg = a.config;
    if (a.propensity_floor >= 0.0) cfg.propensity_floor = a.propensity_floor;

    dmlwb::EstimateRequest req;
    req.run_dml1 = (a.method == "dml1" || a.method == "both");
    req.run_dml2 = (a.method == "dml2" || a.method == "both");
    req.run_oracle = a.oracle;
    if (!req.run_dml1 && !req.run_dml2 && !req.run_oracle)
        throw dmlwb::ArgumentError("--method must be dml1, dml2 or both");

    const auto estimates = dmlwb::estimate(data, model, cfg, req);

    if (!a.dump_eta.empty()) {
        const dmlwb::FoldPartition p =
            dmlwb::partition_folds(data.n_rows(), cfg.K, cfg.seed);
        const dmlwb::CrossFitEvaluations eta =
            dmlwb::crossfit_nuisance(data, model, p, cfg.kernel());
        dmlwb::write_eta_csv(eta, p, a.dump_eta);
    }

    nlohmann::json out;
    nlohmann::json jcfg;
    jcfg["data"] = a.data_path;
    jcfg["model"] = a.model;
    jcfg["method"] = a.method;
    jcfg["oracle"] = a.oracle;
    jcfg["k"] = cfg.K;
    jcfg["alpha"] = cfg.alpha;
    jcfg["seed"] = cfg.seed;
    jcfg["kernel-order"] = cfg.kernel_order;
    jcfg["c"] = cfg.bandwidth_constant;
    jcfg["phi0"] = cfg.bandwidth_exponent;
    if (cfg.propensity_floor) jcfg["propensity-floor"] = *cfg.propensity_floor;
    nlohmann::json jroles;
    for (const auto& [role, col] : data.roles()) jroles[role] = col;
    jcfg["roles"] = jroles;
    out["config"] = jcfg;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& est : estimates) recs.push_back(nlohmann::json::parse(est.to_json()));
    out["estimates"] = recs;
    write_text(a.out, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string design = "late";
    std::size_t n = 1000;
    int reps = 500;
    std::string k_grid = "2,5,10,20";
    std::string c_grid = "0.53";
    int kernel_order = 2;
    double phi0 = 0.2;
    std::string methods = "dml1,dml2";
    std::uint64_t seed = 1;
    double alpha = 0.05;
    int threads = 0;
    double propensity_floor = -1.0;
    bool strict = false;
    std::string out;
    std::string json_out;
    std::string dump_config;
};

int run_simulate(const SimulateArgs& a) {
    dmlwb::McDesign d;
    d.name = dmlwb::design_from_string(a.design);
    d.n = a.n;
    d.reps = a.reps;
    d.k_grid = parse_int_list(a.k_grid);
    d.c_grid = parse_double_list(a.c_grid);
    d.kernel_order = a.kernel_order;
    d.phi0 = a.phi0;
    d.seed = a.seed;
    d.alpha = a.alpha;
    d.strict = a.strict;
    if (a.propensity_floor >= 0.0) d.propensity_floor = a.propensity_floor;
    d.methods.clear();
    {
        std::stringstream ss(a.methods);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) d.methods.push_back(dmlwb::method_from_string(item));
    }
    if (d.methods.empty()) throw dmlwb::ArgumentError("--methods must name at least one method");

    int threads = a.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("DMLWB_THREADS")) threads = std::atoi(env);
    }
    if (threads <= 0) threads = 1;

    const dmlwb::McSummary summary = dmlwb::run_monte_carlo(d, threads);
    write_text(a.out, dmlwb::mc_summary_csv(summary));
    if (!a.json_out.empty()) write_text(a.json_out, dmlwb::mc_summary_json(summary) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

struct CurvesArgs {
    std::string what = "ho-bias";
    std::size_t n = 1000;
    std::string k_grid = "2,5,10,15,20,25,30";
    double f_delta = 1.0;
    double f_b = 0.0;
    double g_delta = 0.0;
    double g_b = 1.0;
    double sigma2 = 1.0;
    double phi = -1.0;   // shorthand: sets phi1 = phi2
    double phi1 = 0.4;
    double phi2 = 0.4;
    std::string out;
    std::string dump_config;
};

int run_curves(const CurvesArgs& a) {
    dmlwb::TheoryParams p;
    p.F_delta = a.f_delta;
    p.F_b = a.f_b;
    p.G_delta = a.g_delta;
    p.G_b = a.g_b;
    p.sigma2 = a.sigma2;
    p.phi1 = (a.phi > 0.0) ? a.phi : a.phi1;
    p.phi2 = (a.phi > 0.0) ? a.phi : a.phi2;

    auto value_at = [&](int K) {
        if (a.what == "ho-bias") return dmlwb::ho_bias_leading(p, K, a.n);
        if (a.what == "so-mse")
            return static_cast<double>(a.n) * dmlwb::so_mse(p, K, a.n);
        if (a.what == "ho-var") return dmlwb::ho_variance_second_term(p, K, a.n);
        throw dmlwb::ArgumentError("--what must be ho-bias, so-mse or ho-var");
    };

    std::ostringstream out;
    out << "# what=" << a.what << '\n';
    out << "# n=" << a.n << '\n';
    out << "# f-delta=" << fmt_g(p.F_delta) << " f-b=" << fmt_g(p.F_b)
        << " g-delta=" << fmt_g(p.G_delta) << " g-b=" << fmt_g(p.G_b)
        << " sigma2=" << fmt_g(p.sigma2) << '\n';
    out << "# phi1=" << fmt_g(p.phi1) << " phi2=" << fmt_g(p.phi2) << '\n';
    out << "# scale=" << (a.what == "ho-bias"   ? "sqrt(n) x leading bias"
                          : a.what == "so-mse" ? "n x SO-MSE"
                                               : "Omega_K / n^zeta")
        << '\n';
    out << "K,value\n";
    for (int K : parse_int_list(a.k_grid))
        out << K << ',' << fmt_g(value_at(K)) << '\n';
    const int kn = static_cast<int>(a.n);
    out << kn << ',' << fmt_g(value_at(kn)) << '\n';
    write_text(a.out, out.str());
    return 0;
}

// ---------------------------------------------------------------------------
// advise-k
// ---------------------------------------------------------------------------

struct AdviseArgs {
    std::size_t n = 1000;
    double phi = -1.0;
    std::size_t dx = 0;
    int s = 0;
    double phi0 = -1.0;
    std::string k_candidates = "5,10,20";
    double upsilon = std::numeric_limits<double>::quiet_NaN();
    std::string out;
    std::string dump_config;
};

int run_advise(const AdviseArgs& a) {
    std::optional<double> phi;
    if (a.phi > 0.0) {
        phi = a.phi;
    } else if (a.dx > 0 && a.s > 0 && a.phi0 > 0.0) {
        const dmlwb::NwRates rates = dmlwb::nw_rates(a.dx, a.s, a.phi0);
        if (std::abs(rates.phi1 - rates.phi2) > 1e-12)
            throw dmlwb::ArgumentError(
                "the (dx, s, phi0) configuration gives phi1 != phi2 (" +
                fmt_g(rates.phi1) + " vs " + fmt_g(rates.phi2) +
                "); the relative-loss table needs phi1 = phi2 -- pass --phi explicitly");
        phi = rates.phi1;
    }
    std::optional<double> upsilon;
    if (!std::isnan(a.upsilon)) upsilon = a.upsilon;

    const dmlwb::AdviceResult res =
        dmlwb::advise_k(a.n, phi, parse_int_list(a.k_candidates), upsilon);

    std::ostringstream out;
    out << "# n=" << a.n;
    if (phi) out << " phi=" << fmt_g(*phi);
    if (upsilon) out << " upsilon=" << fmt_g(*upsilon);
    out << '\n';
    if (phi) {
        out << "K,bias_loss_pct,mse_bound_loss_pct";
        if (upsilon) out << ",mse_exact_loss_pct";
        out << '\n';
        for (const auto& row : res.rows) {
            out << row.K << ',' << fmt_g(100.0 * row.bias_loss_hi, 6) << ','
                << fmt_g(100.0 * row.mse_bound_loss_hi, 6);
            if (row.mse_exact_loss) out << ',' << fmt_g(100.0 * *row.mse_exact_loss, 6);
            out << '\n';
        }
    } else {
        out << "K,bias_loss_pct_min,bias_loss_pct_max,mse_bound_loss_pct_min,"
               "mse_bound_loss_pct_max\n";
        for (const auto& row : res.rows) {
            out << row.K << ',' << fmt_g(100.0 * row.bias_loss_lo, 6) << ','
                << fmt_g(100.0 * row.bias_loss_hi, 6) << ','
                << fmt_g(100.0 * row.mse_bound_loss_lo, 6) << ','
                << fmt_g(100.0 * row.mse_bound_loss_hi, 6) << '\n';
        }
        out << "# losses reported as [phi=1/4, phi=1/2] range\n";
    }
    out << "# recommendation: K = n (= " << res.recommended_K << ")\n";
    out << "# " << res.caveat << '\n';
    write_text(a.out, out.str());
    return 0;
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

struct GenDataArgs {
    std::string design = "late";
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string out = "data.csv";
    std::string dump_config;
};

int run_gen_data(const GenDataArgs& a) {
    const dmlwb::DesignName name = dmlwb::design_from_string(a.design);
    const dmlwb::Dataset data = (name == dmlwb::DesignName::LATE)
                                    ? dmlwb::gen_late(a.n, a.seed)
                                    : dmlwb::gen_att_did(a.n, a.seed);
    dmlwb::write_csv(data, a.out);
    // The dataset file itself carries no comment lines (strict schema), so
    // the resolved-config echo goes to stdout.
    std::cout << "# design=" << a.design << " n=" << a.n << " seed=" << a.seed
              << " out=" << a.out << '\n';
    std::cout << "# roles:";
    for (const auto& [role, col] : data.roles()) std::cout << ' ' << role << '=' << col;
    std::cout << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dmlwb -- debiased machine learning workbench"};
    app.require_subcommand(1);

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate", "Cross-fitted DML estimates on a CSV dataset");
    est->add_option("--data", ea.data_path, "Input CSV path")->required();
    est->add_option("--role", ea.role_specs,
                    "Role binding role=column (repeatable), e.g. --role outcome=Y");
    est->add_option("--model", ea.model, "Catalog model id")
        ->default_val("ate");
    est->add_option("--method", ea.method, "dml1 | dml2 | both")->default_val("both");
    est->add_flag("--oracle", ea.oracle, "Also compute ORACLE1/ORACLE2 from truth columns");
    est->add_option("--k", ea.config.K, "Fold count")->default_val(5);
    est->add_option("--alpha", ea.config.alpha, "CI miscoverage level")->default_val(0.05);
    est->add_option("--seed", ea.config.seed, "Fold-partition seed")->default_val(1);
    est->add_option("--kernel-order", ea.config.kernel_order, "Kernel order in {2,4,6}")
        ->default_val(2);
    est->add_option("--c", ea.config.bandwidth_constant, "Bandwidth constant")
        ->default_val(1.0);
    est->add_option("--phi0", ea.config.bandwidth_exponent, "Bandwidth exponent")
        ->default_val(0.2);
    est->add_option("--propensity-floor", ea.propensity_floor,
                    "Floor for inverse-probability denominators (off when negative)")
        ->default_val(-1.0);
    est->add_option("--out", ea.out, "Output JSON path (stdout when omitted)");
    est->add_option("--dump-eta", ea.dump_eta,
                    "Write the cross-fitted eta matrix (eta_1..eta_p, fold_id) to CSV");
    est->add_option("--dump-config", ea.dump_config, "Write the resolved config to a file");
    std::string est_config;
    est->add_option("--config", est_config,
                    "Flat key=value config file (flags win on conflict)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study on a built-in design");
    sim->add_option("--design", sa.design, "att-did | late")->default_val("late");
    sim->add_option("--n", sa.n, "Sample size per replication")->default_val(1000);
    sim->add_option("--reps", sa.reps, "Replication count")->default_val(500);
    sim->add_option("--k-grid", sa.k_grid, "Comma list of fold counts")
        ->default_val("2,5,10,20");
    sim->add_option("--c-grid", sa.c_grid, "Comma list of bandwidth constants")
        ->default_val("0.53");
    sim->add_option("--kernel-order", sa.kernel_order, "Kernel order in {2,4,6}")
        ->default_val(2);
    sim->add_option("--phi0", sa.phi0, "Bandwidth exponent")->default_val(0.2);
    sim->add_option("--methods", sa.methods, "Comma list: dml1,dml2,oracle1,oracle2")
        ->default_val("dml1,dml2");
    sim->add_option("--seed", sa.seed, "Master seed")->default_val(1);
    sim->add_option("--alpha", sa.alpha, "CI miscoverage level")->default_val(0.05);
    sim->add_option("--threads", sa.threads,
                    "Worker count (DMLWB_THREADS env as fallback, else 1)")
        ->default_val(0);
    sim->add_option("--propensity-floor", sa.propensity_floor,
                    "Floor for inverse-probability denominators (off when negative)")
        ->default_val(-1.0);
    sim->add_flag("--strict", sa.strict, "Abort on any replication failure (exit 4)");
    sim->add_option("--out", sa.out, "Output CSV path (stdout when omitted)");
    sim->add_option("--json-out", sa.json_out, "Optional JSON summary path");
    sim->add_option("--dump-config", sa.dump_config, "Write the resolved config to a file");
    std::string sim_config;
    sim->add_option("--config", sim_config,
                    "Flat key=value config file (flags win on conflict)");

    CurvesArgs ca;
    auto* cur = app.add_subcommand("curves", "Closed-form higher-order curves");
    cur->add_option("--what", ca.what, "ho-bias | so-mse | ho-var")->default_val("ho-bias");
    cur->add_option("--n", ca.n, "Sample size")->default_val(1000);
    cur->add_option("--k-grid", ca.k_grid, "Comma list of fold counts")
        ->default_val("2,5,10,15,20,25,30");
    cur->add_option("--f-delta", ca.f_delta, "F_delta")->default_val(1.0);
    cur->add_option("--f-b", ca.f_b, "F_b")->default_val(0.0);
    cur->add_option("--g-delta", ca.g_delta, "G_delta")->default_val(0.0);
    cur->add_option("--g-b", ca.g_b, "G_b")->default_val(1.0);
    cur->add_option("--sigma2", ca.sigma2, "sigma^2")->default_val(1.0);
    cur->add_option("--phi", ca.phi, "Shorthand: sets phi1 = phi2")->default_val(-1.0);
    cur->add_option("--phi1", ca.phi1, "Variance rate exponent")->default_val(0.4);
    cur->add_option("--phi2", ca.phi2, "Bias rate exponent")->default_val(0.4);
    cur->add_option("--out", ca.out, "Output CSV path (stdout when omitted)");
    cur->add_option("--dump-config", ca.dump_config, "Write the resolved config to a file");
    std::string cur_config;
    cur->add_option("--config", cur_config,
                    "Flat key=value config file (flags win on conflict)");

    AdviseArgs aa;
    auto* adv = app.add_subcommand("advise-k", "Fold-count advisory table");
    adv->add_option("--n", aa.n, "Sample size")->default_val(1000);
    adv->add_option("--phi", aa.phi, "Rate exponent phi = phi1 = phi2")->default_val(-1.0);
    adv->add_option("--dx", aa.dx, "Covariate dimension (with --s, --phi0)")->default_val(0);
    adv->add_option("--s", aa.s, "Kernel order (with --dx, --phi0)")->default_val(0);
    adv->add_option("--phi0", aa.phi0, "Bandwidth exponent (with --dx, --s)")
        ->default_val(-1.0);
    adv->add_option("--k-candidates", aa.k_candidates, "Comma list of candidate K")
        ->default_val("5,10,20");
    adv->add_option("--upsilon", aa.upsilon, "G_b / sigma^2 for the exact MSE loss");
    adv->add_option("--out", aa.out, "Output path (stdout when omitted)");
    adv->add_option("--dump-config", aa.dump_config, "Write the resolved config to a file");
    std::string adv_config;
    adv->add_option("--config", adv_config,
                    "Flat key=value config file (flags win on conflict)");

    std::string info_model = "ate";
    auto* info = app.add_subcommand("model-info", "Print catalog model metadata as JSON");
    info->add_option("--model", info_model, "Catalog model id")->default_val("ate");

    GenDataArgs ga;
    auto* gen = app.add_subcommand("gen-data", "Write a simulated design dataset to CSV");
    gen->add_option("--design", ga.design, "att-did | late")->default_val("late");
    gen->add_option("--n", ga.n, "Sample size")->default_val(1000);
    gen->add_option("--seed", ga.seed, "Seed")->default_val(1);
    gen->add_option("--out", ga.out, "Output CSV path")->default_val("data.csv");
    gen->add_option("--dump-config", ga.dump_config, "Write the resolved config to a file");
    std::string gen_config;
    gen->add_option("--config", gen_config,
                    "Flat key=value config file (flags win on conflict)");

    try {
        std::vector<std::string> args = expand_argv(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 wants reversed tokens
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const dmlwb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    auto fmt_u = [](std::uint64_t v) { return std::to_string(v); };
    auto fmt_i = [](long long v) { return std::to_string(v); };

    try {
        if (est->parsed()) {
            KvList kv{{"data", ea.data_path},
                      {"model", ea.model},
                      {"method", ea.method},
                      {"oracle", ea.oracle ? "1" : "0"},
                      {"k", fmt_i(ea.config.K)},
                      {"alpha", fmt_g(ea.config.alpha, 15)},
                      {"seed", fmt_u(ea.config.seed)},
                      {"kernel-order", fmt_i(ea.config.kernel_order)},
                      {"c", fmt_g(ea.config.bandwidth_constant, 15)},
                      {"phi0", fmt_g(ea.config.bandwidth_exponent, 15)},
                      {"propensity-floor", fmt_g(ea.propensity_floor, 15)}};
            for (const auto& r : ea.role_specs) kv.emplace_back("role", r);
            dump_config(ea.dump_config, kv);
            return run_estimate(ea);
        }
        if (sim->parsed()) {
            dump_config(sa.dump_config,
                        {{"design", sa.design},
                         {"n", fmt_u(sa.n)},
                         {"reps", fmt_i(sa.reps)},
                         {"k-grid", sa.k_grid},
                         {"c-grid", sa.c_grid},
                         {"kernel-order", fmt_i(sa.kernel_order)},
                         {"phi0", fmt_g(sa.phi0, 15)},
                         {"methods", sa.methods},
                         {"seed", fmt_u(sa.seed)},
                         {"alpha", fmt_g(sa.alpha, 15)},
                         {"threads", fmt_i(sa.threads)},
                         {"propensity-floor", fmt_g(sa.propensity_floor, 15)},
                         {"strict", sa.strict ? "1" : "0"}});
            return run_simulate(sa);
        }
        if (cur->parsed()) {
            dump_config(ca.dump_config,
                        {{"what", ca.what},
                         {"n", fmt_u(ca.n)},
                         {"k-grid", ca.k_grid},
                         {"f-delta", fmt_g(ca.f_delta, 15)},
                         {"f-b", fmt_g(ca.f_b, 15)},
                         {"g-delta", fmt_g(ca.g_delta, 15)},
                         {"g-b", fmt_g(ca.g_b, 15)},
                         {"sigma2", fmt_g(ca.sigma2, 15)},
                         {"phi", fmt_g(ca.phi, 15)},
                         {"phi1", fmt_g(ca.phi1, 15)},
                         {"phi2", fmt_g(ca.phi2, 15)}});
            return run_curves(ca);
        }
        if (adv->parsed()) {
            KvList kv{{"n", fmt_u(aa.n)},
                      {"phi", fmt_g(aa.phi, 15)},
                      {"dx", fmt_u(aa.dx)},
                      {"s", fmt_i(aa.s)},
                      {"phi0", fmt_g(aa.phi0, 15)},
                      {"k-candidates", aa.k_candidates}};
            if (!std::isnan(aa.upsilon)) kv.emplace_back("upsilon", fmt_g(aa.upsilon, 15));
            dump_config(aa.dump_config, kv);
            return run_advise(aa);
        }
        if (info->parsed()) {
            std::cout << dmlwb::model_metadata_json(dmlwb::catalog_model(info_model))
                      << '\n';
            return 0;
        }
        if (gen->parsed()) {
            dump_config(ga.dump_config, {{"design", ga.design},
                                         {"n", fmt_u(ga.n)},
                                         {"seed", fmt_u(ga.seed)}});
            return run_gen_data(ga);
        }
    } catch (const dmlwb::StrictModeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const dmlwb::DegeneracyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const dmlwb::EmptyNeighborhoodError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const dmlwb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
