#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmlwb/dataset.hpp"
#include "dmlwb/estimators.hpp"

namespace dmlwb {

enum class DesignName { ATT_DID, LATE };
std::string to_string(DesignName d);
DesignName design_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Data-generating processes with analytic truths.
//
// ATT-DID:
//   X ~ U[0,1]^4, A ~ Bernoulli(logistic(f_ps(X))),
//   (eps0, eps1(0), eps1(1), eps_v) ~ N(0, I4), v(X,A) = A f_reg(X) + eps_v,
//   Y0 = f_reg(X) + v + eps0, Y1(a) = 2 f_reg(X) + v + eps1(a),
//   truths eta01 = f_reg, eta02 = 1/(1 - p), theta0 = 0.
//
// LATE:
//   X ~ U[0,1], V ~ N(0,1), Z ~ Bernoulli(Phi(X - 0.5)),
//   D(1) = 1{X + 0.5 >= V}, D(0) = 1{X - 0.5 >= V},
//   xi1, xi2 ~ Poisson(e^{X/2}), xi3 ~ Poisson(2), xi4 ~ Poisson(1),
//   Y(d) = xi_{1+ (1-d)} + xi3 1{always-taker} + xi4 1{never-taker},
//   theta0 = 0 and the six conditional-moment truths below.
//
// RNG consumption order per row is fixed and documented in the sources; it is
// part of the reproducibility contract.
// ---------------------------------------------------------------------------
Dataset gen_att_did(std::size_t n, std::uint64_t seed);
Dataset gen_late(std::size_t n, std::uint64_t seed);

// Closed-form design truths, exposed for tests and diagnostics.
double att_did_freg(const double* x4);
double att_did_fps(const double* x4);
double att_did_pscore(const double* x4);
double late_eta0(std::size_t j, double x);        // j in 1..6
double late_cond_mean_y(double x);                // E[Y | X = x]

// Population sigma^2 = E[m(W, theta0, eta0)^2] / E[psi_a(W, eta0)]^2 of a
// design, computed by a large fixed-seed Monte Carlo pass (deterministic).
double design_true_sigma2(DesignName design, std::size_t draws = 4'000'000);

// ---------------------------------------------------------------------------
// Monte Carlo experiment grid and summaries.
// ---------------------------------------------------------------------------
struct McDesign {
    DesignName name = DesignName::LATE;
    std::size_t n = 1000;
    std::vector<int> k_grid = {2, 5, 10, 20};
    std::vector<double> c_grid = {0.53};
    int kernel_order = 2;
    double phi0 = 0.2;
    int reps = 500;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::vector<Method> methods = {Method::DML1, Method::DML2};
    std::optional<double> propensity_floor;
    bool strict = false;
    double theta0 = 0.0;  // analytic truth of both shipped designs
};

struct McCell {
    std::string method;
    int K = 0;
    double c = 0.0;
    double scaled_bias = 0.0;   // sqrt(n) * (mean theta_hat - theta0)
    double scaled_bias_se = 0.0;
    double scaled_mse = 0.0;    // n * mean (theta_hat - theta0)^2
    double scaled_mse_se = 0.0;
    double coverage_pct = 0.0;
    double coverage_se = 0.0;
    double raw_bias = 0.0;
    double raw_mse = 0.0;
    double flag_rate = 0.0;     // share of replications excluded by guards
    int reps_used = 0;
};

struct McSummary {
    McDesign design;
    std::optional<double> sigma2_true;  // set when oracle methods ran
    std::vector<McCell> cells;          // fixed canonical order

    const McCell& cell(Method m, int K, double c) const;
};

// Aggregates one cell. theta_hats and covers hold only the non-failed
// replications.
McCell summarize(const std::vector<double>& theta_hats,
                 const std::vector<int>& covers, double theta0, std::size_t n);

// Runs the grid. Replications are distributed over worker_count threads;
// each replication is a pure function of its derived seed
// (mix_seed(design.seed, r)), and aggregation order is fixed, so the result
// is bit-identical for any worker_count. Throws StrictModeError carrying the
// (replication, cell) identifier when strict is set and a replication fails.
McSummary run_monte_carlo(const McDesign& design, int worker_count);

// Long-format CSV: config echo lines prefixed '#', then
// design,method,K,c,metric,value,mc_se,flag_rate,reps_used.
// Execution-only settings (worker count, file paths) are not part of the
// echo, so output bytes do not depend on them.
std::string mc_summary_csv(const McSummary& summary);
std::string mc_summary_json(const McSummary& summary);

}  // namespace dmlwb
