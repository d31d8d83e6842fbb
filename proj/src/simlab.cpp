#include "dmlwb/simlab.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dmlwb/errors.hpp"
#include "dmlwb/stats.hpp"
#include "json.hpp"

namespace dmlwb {

std::string to_string(DesignName d) {
    return d == DesignName::ATT_DID ? "att-did" : "late";
}

DesignName design_from_string(const std::string& name) {
    std::string s;
    for (char ch : name) s += (ch == '_') ? '-' : static_cast<char>(std::tolower(ch));
    if (s == "att-did" || s == "attdid") return DesignName::ATT_DID;
    if (s == "late") return DesignName::LATE;
    throw ArgumentError("unknown design: " + name);
}

// ---------------------------------------------------------------------------
// ATT-DID design
// ---------------------------------------------------------------------------

double att_did_freg(const double* x) {
    return 210.0 + 6.85 * x[0] + 3.425 * (x[1] + x[2] + x[3]);
}

double att_did_fps(const double* x) {
    return 0.25 * (-x[0] + 0.5 * x[1] - 0.25 * x[2] - 0.1 * x[3]);
}

double att_did_pscore(const double* x) {
    const double e = std::exp(att_did_fps(x));
    return e / (1.0 + e);
}

namespace {

struct AttDidRow {
    double x[4];
    double a;
    double y0;
    double y1;
};

// Draw order per row: X1..X4 uniforms, the A-coin uniform, then the four
// normals eps0, eps1(0), eps1(1), eps_v.
AttDidRow draw_att_did_row(Rng& rng) {
    AttDidRow r;
    for (double& xc : r.x) xc = rng.uniform01();
    const double p = att_did_pscore(r.x);
    r.a = rng.uniform01() < p ? 1.0 : 0.0;
    const double eps0 = rng.normal();
    const double eps10 = rng.normal();
    const double eps11 = rng.normal();
    const double epsv = rng.normal();
    const double freg = att_did_freg(r.x);
    const double v = r.a * freg + epsv;
    r.y0 = freg + v + eps0;
    r.y1 = 2.0 * freg + v + (r.a == 1.0 ? eps11 : eps10);
    return r;
}

}  // namespace

Dataset gen_att_did(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("gen_att_did needs n >= 2");
    std::vector<double> y1(n), y0(n), a(n), e1(n), e2(n), th(n, 0.0);
    std::vector<std::vector<double>> x(4, std::vector<double>(n));
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const AttDidRow r = draw_att_did_row(rng);
        for (int l = 0; l < 4; ++l) x[static_cast<std::size_t>(l)][i] = r.x[l];
        a[i] = r.a;
        y0[i] = r.y0;
        y1[i] = r.y1;
        e1[i] = att_did_freg(r.x);
        e2[i] = 1.0 / (1.0 - att_did_pscore(r.x));
    }
    Dataset::Columns cols;
    cols.emplace_back("Y1", std::move(y1));
    cols.emplace_back("Y0", std::move(y0));
    cols.emplace_back("A", std::move(a));
    for (int l = 0; l < 4; ++l)
        cols.emplace_back("X" + std::to_string(l + 1), std::move(x[static_cast<std::size_t>(l)]));
    cols.emplace_back("truth_eta_1", std::move(e1));
    cols.emplace_back("truth_eta_2", std::move(e2));
    cols.emplace_back("truth_theta", std::move(th));
    Dataset::RoleMap roles{{roles::outcome, "Y1"},
                           {roles::outcome_pre, "Y0"},
                           {roles::treatment, "A"},
                           {roles::truth_theta, "truth_theta"}};
    for (int l = 0; l < 4; ++l)
        roles[roles::covariate(static_cast<std::size_t>(l) + 1)] = "X" + std::to_string(l + 1);
    roles[roles::truth_eta(1)] = "truth_eta_1";
    roles[roles::truth_eta(2)] = "truth_eta_2";
    return Dataset::create(std::move(cols), std::move(roles));
}

// ---------------------------------------------------------------------------
// LATE design
// ---------------------------------------------------------------------------

double late_eta0(std::size_t j, double x) {
    const double ex = std::exp(0.5 * x);
    const double lo = norm_cdf(x - 0.5);   // P(D(0)=1 | X=x) and P(Z=1 | X=x)
    const double hi = norm_cdf(x + 0.5);   // P(D(1)=1 | X=x)
    switch (j) {
        // Potential-decision monotonicity D(0) <= D(1) makes both observed-
        // outcome regressions equal: compliers have zero conditional effect
        // (xi1 and xi2 share the Poisson(e^{x/2}) law), so
        //   E[Y | X, Z=1] = E[Y | X, Z=0] = e^{x/2} + 2 lo + (1 - hi).
        case 1: return ex + 2.0 * lo + (1.0 - hi);
        case 2: return ex + 2.0 * lo + (1.0 - hi);
        case 3: return hi;
        case 4: return lo;
        case 5: return 1.0 / lo;
        case 6: return 1.0 / (1.0 - lo);
        default: throw ArgumentError("late_eta0: component index must be in 1..6");
    }
}

double late_cond_mean_y(double x) {
    // E[Y | X=x] = P(Z=1|x) eta01(x) + P(Z=0|x) eta02(x), and the two
    // regressions coincide.
    return late_eta0(1, x);
}

namespace {

struct LateRow {
    double x;
    double z;
    double d;
    double y;
};

// Draw order per row: X uniform, V normal, the Z-coin uniform, then the four
// Poisson draws xi1, xi2, xi3, xi4.
LateRow draw_late_row(Rng& rng) {
    LateRow r;
    r.x = rng.uniform01();
    const double v = rng.normal();
    r.z = rng.uniform01() < norm_cdf(r.x - 0.5) ? 1.0 : 0.0;
    const double lambda = std::exp(0.5 * r.x);
    const long xi1 = rng.poisson(lambda);
    const long xi2 = rng.poisson(lambda);
    const long xi3 = rng.poisson(2.0);
    const long xi4 = rng.poisson(1.0);
    const int d1 = (r.x + 0.5 >= v) ? 1 : 0;
    const int d0 = (r.x - 0.5 >= v) ? 1 : 0;
    const int at = (d1 == 1 && d0 == 1) ? 1 : 0;
    const int nt = (d1 == 0 && d0 == 0) ? 1 : 0;
    const double y1 = static_cast<double>(xi1 + xi3 * at + xi4 * nt);
    const double y0 = static_cast<double>(xi2 + xi3 * at + xi4 * nt);
    const int d = (r.z == 1.0) ? d1 : d0;
    r.d = static_cast<double>(d);
    r.y = d ? y1 : y0;
    return r;
}

}  // namespace

Dataset gen_late(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("gen_late needs n >= 2");
    std::vector<double> y(n), d(n), z(n), x(n), th(n, 0.0);
    std::vector<std::vector<double>> eta(6, std::vector<double>(n));
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const LateRow r = draw_late_row(rng);
        x[i] = r.x;
        z[i] = r.z;
        d[i] = r.d;
        y[i] = r.y;
        for (std::size_t j = 0; j < 6; ++j) eta[j][i] = late_eta0(j + 1, r.x);
    }
    Dataset::Columns cols;
    cols.emplace_back("Y", std::move(y));
    cols.emplace_back("D", std::move(d));
    cols.emplace_back("Z", std::move(z));
    cols.emplace_back("X1", std::move(x));
    for (std::size_t j = 0; j < 6; ++j)
        cols.emplace_back("truth_eta_" + std::to_string(j + 1), std::move(eta[j]));
    cols.emplace_back("truth_theta", std::move(th));
    Dataset::RoleMap roles{{roles::outcome, "Y"},
                           {roles::treatment, "D"},
                           {roles::instrument, "Z"},
                           {roles::covariate(1), "X1"},
                           {roles::truth_theta, "truth_theta"}};
    for (std::size_t j = 1; j <= 6; ++j)
        roles[roles::truth_eta(j)] = "truth_eta_" + std::to_string(j);
    return Dataset::create(std::move(cols), std::move(roles));
}

// ---------------------------------------------------------------------------
// Design-true sigma^2
// ---------------------------------------------------------------------------

namespace {

double late_sigma2_mc(std::size_t draws, std::uint64_t seed) {
    Rng rng(seed);
    double sm2 = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const LateRow r = draw_late_row(rng);
        double e[6];
        for (std::size_t j = 0; j < 6; ++j) e[j] = late_eta0(j + 1, r.x);
        const double psi_b = e[0] - e[1] + r.z * (r.y - e[0]) * e[4] -
                             (1.0 - r.z) * (r.y - e[1]) * e[5];
        const double psi_a = e[2] - e[3] + r.z * (r.d - e[2]) * e[4] -
                             (1.0 - r.z) * (r.d - e[3]) * e[5];
        sm2 += psi_b * psi_b;  // theta0 = 0, so m = psi_b
        sa += psi_a;
    }
    const double nd = static_cast<double>(draws);
    const double abar = sa / nd;
    return (sm2 / nd) / (abar * abar);
}

double att_did_sigma2_mc(std::size_t draws, std::uint64_t seed) {
    Rng rng(seed);
    double sm2 = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const AttDidRow r = draw_att_did_row(rng);
        const double e1 = att_did_freg(r.x);
        const double e2 = 1.0 / (1.0 - att_did_pscore(r.x));
        const double dy = r.y1 - r.y0;
        const double psi_b =
            r.a * (dy - e1) + (1.0 - r.a) * (1.0 - e2) * (dy - e1);
        sm2 += psi_b * psi_b;
        sa += r.a;
    }
    const double nd = static_cast<double>(draws);
    const double abar = sa / nd;
    return (sm2 / nd) / (abar * abar);
}

}  // namespace

double design_true_sigma2(DesignName design, std::size_t draws) {
    // Fixed internal seeds keep this value a pure function of (design, draws).
    static std::mutex mu;
    static std::map<std::pair<int, std::size_t>, double> cache;
    const auto key = std::make_pair(static_cast<int>(design), draws);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = (design == DesignName::LATE)
                             ? late_sigma2_mc(draws, mix_seed(0xD0C0FFEEull, 2))
                             : att_did_sigma2_mc(draws, mix_seed(0xD0C0FFEEull, 1));
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = value;
    return value;
}

// ---------------------------------------------------------------------------
// Monte Carlo runner
// ---------------------------------------------------------------------------

McCell summarize(const std::vector<double>& theta_hats,
                 const std::vector<int>& covers, double theta0, std::size_t n) {
    if (theta_hats.size() < 2)
        throw ArgumentError("summarize needs at least 2 replications");
    const std::size_t R = theta_hats.size();
    const double Rd = static_cast<double>(R);
    const double sqn = std::sqrt(static_cast<double>(n));

    double mean = 0.0;
    for (double t : theta_hats) mean += t;
    mean /= Rd;
    double var = 0.0, msq = 0.0;
    for (double t : theta_hats) {
        var += (t - mean) * (t - mean);
        msq += (t - theta0) * (t - theta0);
    }
    var /= (Rd - 1.0);
    msq /= Rd;
    double var_sq = 0.0;
    for (double t : theta_hats) {
        const double sq = (t - theta0) * (t - theta0);
        var_sq += (sq - msq) * (sq - msq);
    }
    var_sq /= (Rd - 1.0);

    double phat = 0.0;
    for (int cv : covers) phat += cv;
    phat /= static_cast<double>(covers.size());

    McCell cell;
    cell.reps_used = static_cast<int>(R);
    cell.raw_bias = mean - theta0;
    cell.raw_mse = msq;
    cell.scaled_bias = sqn * (mean - theta0);
    cell.scaled_bias_se = sqn * std::sqrt(var / Rd);
    cell.scaled_mse = static_cast<double>(n) * msq;
    cell.scaled_mse_se = static_cast<double>(n) * std::sqrt(var_sq / Rd);
    cell.coverage_pct = 100.0 * phat;
    cell.coverage_se =
        100.0 * std::sqrt(phat * (1.0 - phat) / static_cast<double>(covers.size()));
    return cell;
}

namespace {

struct CellKey {
    Method method;
    int K;
    double c;
};

struct RepResult {
    double theta = 0.0;
    std::uint8_t cover = 0;
    std::uint8_t failed = 0;
};

// Canonical cell order: method, then K ascending, then c ascending. The
// order fixes both aggregation and output layout.
std::vector<CellKey> make_cells(const McDesign& d) {
    static const Method order[4] = {Method::DML1, Method::DML2, Method::ORACLE1,
                                    Method::ORACLE2};
    std::vector<CellKey> cells;
    for (Method m : order) {
        bool wanted = false;
        for (Method q : d.methods) wanted |= (q == m);
        if (!wanted) continue;
        for (int K : d.k_grid)
            for (double c : d.c_grid) cells.push_back({m, K, c});
    }
    return cells;
}

bool wants(const McDesign& d, Method m) {
    for (Method q : d.methods)
        if (q == m) return true;
    return false;
}

void run_parallel(int reps, int workers, const std::function<void(int)>& body) {
    if (workers <= 1) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= reps) break;
                body(r);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

McSummary run_monte_carlo(const McDesign& design, int worker_count) {
    if (design.reps < 2) throw ArgumentError("run_monte_carlo needs reps >= 2");
    if (design.k_grid.empty() || design.c_grid.empty())
        throw ArgumentError("run_monte_carlo needs non-empty K and c grids");
    for (int K : design.k_grid)
        if (K < 2 || static_cast<std::size_t>(K) > design.n)
            throw ArgumentError("K grid entry outside [2, n]");

    const MomentModel model = catalog_model(
        design.name == DesignName::LATE ? ModelId::LATE : ModelId::ATT_DID);
    const bool feasible = wants(design, Method::DML1) || wants(design, Method::DML2);
    const bool oracle = wants(design, Method::ORACLE1) || wants(design, Method::ORACLE2);

    std::optional<double> sigma2_true;
    if (oracle) sigma2_true = design_true_sigma2(design.name);

    const std::vector<CellKey> cells = make_cells(design);
    const std::size_t n_cells = cells.size();
    std::map<std::string, std::size_t> cell_index;
    for (std::size_t idx = 0; idx < n_cells; ++idx) {
        char key[64];
        std::snprintf(key, sizeof(key), "%d|%d|%.17g", static_cast<int>(cells[idx].method),
                      cells[idx].K, cells[idx].c);
        cell_index[key] = idx;
    }
    auto index_of = [&](Method m, int K, double c) {
        char key[64];
        std::snprintf(key, sizeof(key), "%d|%d|%.17g", static_cast<int>(m), K, c);
        return cell_index.at(key);
    };

    std::vector<std::vector<RepResult>> results(
        static_cast<std::size_t>(design.reps), std::vector<RepResult>(n_cells));
    std::vector<std::string> failures(static_cast<std::size_t>(design.reps));

    auto body = [&](int r) {
        auto& slot = results[static_cast<std::size_t>(r)];
        const std::uint64_t rep_seed = mix_seed(design.seed, static_cast<std::uint64_t>(r));
        const Dataset data = (design.name == DesignName::LATE)
                                 ? gen_late(design.n, rep_seed)
                                 : gen_att_did(design.n, rep_seed);
        const double theta0 = design.theta0;

        auto record = [&](std::size_t idx, const DmlEstimate& est) {
            slot[idx].theta = est.theta_hat;
            slot[idx].cover =
                (est.ci_lower <= theta0 && theta0 <= est.ci_upper) ? 1 : 0;
        };
        auto mark_failed = [&](std::size_t idx, const std::string& what) {
            slot[idx].failed = 1;
            if (failures[static_cast<std::size_t>(r)].empty())
                failures[static_cast<std::size_t>(r)] = what;
        };

        for (int K : design.k_grid) {
            const FoldPartition partition = partition_folds(
                design.n, K, mix_seed(rep_seed, 1000 + static_cast<std::uint64_t>(K)));

            if (oracle) {
                try {
                    auto [o1, o2] =
                        oracle_estimates(data, model, partition, design.alpha, sigma2_true);
                    for (double c : design.c_grid) {
                        if (wants(design, Method::ORACLE1))
                            record(index_of(Method::ORACLE1, K, c), o1);
                        if (wants(design, Method::ORACLE2))
                            record(index_of(Method::ORACLE2, K, c), o2);
                    }
                } catch (const Error& e) {
                    for (double c : design.c_grid) {
                        if (wants(design, Method::ORACLE1))
                            mark_failed(index_of(Method::ORACLE1, K, c),
                                        "oracle K=" + std::to_string(K) + ": " + e.what());
                        if (wants(design, Method::ORACLE2))
                            mark_failed(index_of(Method::ORACLE2, K, c),
                                        "oracle K=" + std::to_string(K) + ": " + e.what());
                    }
                }
            }

            if (!feasible) continue;
            for (double c : design.c_grid) {
                const KernelConfig kc{design.kernel_order, c, design.phi0,
                                      design.propensity_floor};
                char cellname[96];
                std::snprintf(cellname, sizeof(cellname), "K=%d c=%.17g", K, c);
                try {
                    const CrossFitEvaluations eta =
                        crossfit_nuisance(data, model, partition, kc);
                    if (wants(design, Method::DML1)) {
                        const std::size_t idx = index_of(Method::DML1, K, c);
                        try {
                            record(idx, dml1(data, model, eta, partition, design.alpha));
                        } catch (const Error& e) {
                            mark_failed(idx, std::string(cellname) + " dml1: " + e.what());
                        }
                    }
                    if (wants(design, Method::DML2)) {
                        const std::size_t idx = index_of(Method::DML2, K, c);
                        try {
                            record(idx, dml2(data, model, eta, design.alpha));
                        } catch (const Error& e) {
                            mark_failed(idx, std::string(cellname) + " dml2: " + e.what());
                        }
                    }
                } catch (const Error& e) {
                    if (wants(design, Method::DML1))
                        mark_failed(index_of(Method::DML1, K, c),
                                    std::string(cellname) + " crossfit: " + e.what());
                    if (wants(design, Method::DML2))
                        mark_failed(index_of(Method::DML2, K, c),
                                    std::string(cellname) + " crossfit: " + e.what());
                }
            }
        }
    };

    run_parallel(design.reps, worker_count, body);

    if (design.strict) {
        for (int r = 0; r < design.reps; ++r) {
            if (!failures[static_cast<std::size_t>(r)].empty())
                throw StrictModeError("replication " + std::to_string(r) + ": " +
                                      failures[static_cast<std::size_t>(r)]);
        }
    }

    McSummary summary;
    summary.design = design;
    summary.sigma2_true = sigma2_true;
    summary.cells.reserve(n_cells);
    for (std::size_t idx = 0; idx < n_cells; ++idx) {
        std::vector<double> thetas;
        std::vector<int> covers;
        int failed = 0;
        thetas.reserve(static_cast<std::size_t>(design.reps));
        covers.reserve(static_cast<std::size_t>(design.reps));
        for (int r = 0; r < design.reps; ++r) {
            const RepResult& rr = results[static_cast<std::size_t>(r)][idx];
            if (rr.failed) {
                ++failed;
                continue;
            }
            thetas.push_back(rr.theta);
            covers.push_back(rr.cover);
        }
        McCell cell;
        if (thetas.size() >= 2) {
            cell = summarize(thetas, covers, design.theta0, design.n);
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            cell.scaled_bias = cell.scaled_mse = cell.coverage_pct = nan;
            cell.scaled_bias_se = cell.scaled_mse_se = cell.coverage_se = nan;
            cell.raw_bias = cell.raw_mse = nan;
            cell.reps_used = static_cast<int>(thetas.size());
        }
        cell.method = to_string(cells[idx].method);
        cell.K = cells[idx].K;
        cell.c = cells[idx].c;
        cell.flag_rate = static_cast<double>(failed) / static_cast<double>(design.reps);
        summary.cells.push_back(cell);
    }
    return summary;
}

const McCell& McSummary::cell(Method m, int K, double c) const {
    const std::string name = dmlwb::to_string(m);
    for (const auto& cell : cells) {
        if (cell.method == name && cell.K == K && cell.c == c) return cell;
    }
    throw ArgumentError("no such cell: " + name + " K=" + std::to_string(K));
}

namespace {

std::string fmt_g(double v, int prec = 12) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

std::string echo_config(const McDesign& d, const std::optional<double>& sigma2_true) {
    std::ostringstream out;
    out << "# design=" << to_string(d.name) << '\n';
    out << "# n=" << d.n << '\n';
    out << "# reps=" << d.reps << '\n';
    out << "# seed=" << d.seed << '\n';
    out << "# alpha=" << fmt_g(d.alpha) << '\n';
    out << "# kernel-order=" << d.kernel_order << '\n';
    out << "# phi0=" << fmt_g(d.phi0) << '\n';
    out << "# k-grid=";
    for (std::size_t i = 0; i < d.k_grid.size(); ++i)
        out << (i ? "," : "") << d.k_grid[i];
    out << '\n';
    out << "# c-grid=";
    for (std::size_t i = 0; i < d.c_grid.size(); ++i)
        out << (i ? "," : "") << fmt_g(d.c_grid[i]);
    out << '\n';
    out << "# methods=";
    for (std::size_t i = 0; i < d.methods.size(); ++i)
        out << (i ? "," : "") << to_string(d.methods[i]);
    out << '\n';
    if (d.propensity_floor) out << "# propensity-floor=" << fmt_g(*d.propensity_floor) << '\n';
    out << "# strict=" << (d.strict ? 1 : 0) << '\n';
    out << "# theta0=" << fmt_g(d.theta0) << '\n';
    out << "# rep-seed-rule=mix_seed(seed,r); partition-seed-rule=mix_seed(rep_seed,1000+K)\n";
    if (sigma2_true) out << "# sigma2-true=" << fmt_g(*sigma2_true, 15) << '\n';
    return out.str();
}

}  // namespace

std::string mc_summary_csv(const McSummary& s) {
    std::ostringstream out;
    out << echo_config(s.design, s.sigma2_true);
    out << "design,method,K,c,metric,value,mc_se,flag_rate,reps_used\n";
    const std::string dn = to_string(s.design.name);
    for (const auto& cell : s.cells) {
        auto row = [&](const char* metric, double value, double se) {
            out << dn << ',' << cell.method << ',' << cell.K << ',' << fmt_g(cell.c)
                << ',' << metric << ',' << fmt_g(value) << ',' << fmt_g(se) << ','
                << fmt_g(cell.flag_rate, 6) << ',' << cell.reps_used << '\n';
        };
        row("scaled_bias", cell.scaled_bias, cell.scaled_bias_se);
        row("scaled_mse", cell.scaled_mse, cell.scaled_mse_se);
        row("coverage_pct", cell.coverage_pct, cell.coverage_se);
        row("raw_bias", cell.raw_bias, 0.0);
        row("raw_mse", cell.raw_mse, 0.0);
    }
    return out.str();
}

std::string mc_summary_json(const McSummary& s) {
    nlohmann::json j;
    j["design"] = to_string(s.design.name);
    j["n"] = s.design.n;
    j["reps"] = s.design.reps;
    j["seed"] = s.design.seed;
    j["alpha"] = s.design.alpha;
    j["theta0"] = s.design.theta0;
    if (s.sigma2_true) j["sigma2_true"] = *s.sigma2_true;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : s.cells) {
        nlohmann::json e;
        e["method"] = cell.method;
        e["K"] = cell.K;
        e["c"] = cell.c;
        e["scaled_bias"] = cell.scaled_bias;
        e["scaled_bias_se"] = cell.scaled_bias_se;
        e["scaled_mse"] = cell.scaled_mse;
        e["scaled_mse_se"] = cell.scaled_mse_se;
        e["coverage_pct"] = cell.coverage_pct;
        e["coverage_se"] = cell.coverage_se;
        e["raw_bias"] = cell.raw_bias;
        e["raw_mse"] = cell.raw_mse;
        e["flag_rate"] = cell.flag_rate;
        e["reps_used"] = cell.reps_used;
        cells.push_back(e);
    }
    j["cells"] = cells;
    return j.dump(2);
}

}  // namespace dmlwb
