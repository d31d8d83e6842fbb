#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmlwb/crossfit.hpp"
#include "dmlwb/dataset.hpp"
#include "dmlwb/moments.hpp"

namespace dmlwb {

// Inputs of the closed-form higher-order curves. F_delta/F_b drive the bias
// curve, G_delta/G_b the variance/MSE curves; none of them is estimated from
// data -- they are design knowledge supplied by the caller.
struct TheoryParams {
    double F_delta = 0.0;
    double F_b = 0.0;
    double G_delta = 0.0;
    double G_b = 0.0;
    double sigma2 = 1.0;
    double phi1 = 0.4;
    double phi2 = 0.4;
};

// Convergence-rate calculus of the Nadaraya-Watson nuisance estimators:
//   phi1 = (1 - d_x*phi0)/2, phi2 = s*phi0,
//   zeta = min{4*phi1 - 1, phi1 + phi2 - 1/2}.
struct NwRates {
    double phi1;
    double phi2;
    double zeta;
};
NwRates nw_rates(std::size_t d_x, int s, double phi0);  // throws ArgumentError

double zeta_of(double phi1, double phi2);

// sqrt(n)-scaled leading bias term: F_K * n^{1/2 - 2*phi1} with
//   F_K = (F_delta + F_b) (1 + 1/(K-1))^{2 phi1}   when phi1 == phi2,
//   F_K =  F_delta       (1 + 1/(K-1))^{2 phi1}    when phi1 <  phi2.
double ho_bias_leading(const TheoryParams& params, int K, std::size_t n);

// Second term of the higher-order variance, Omega_K / n^zeta, with Omega_K
// branching on the sign of 3*phi1 - 1/2 - phi2.
double ho_variance_second_term(const TheoryParams& params, int K, std::size_t n);

// Second-order MSE sigma2/n + OmegaTilde_K / n^{zeta+1}.
double so_mse(const TheoryParams& params, int K, std::size_t n);

// Relative losses against the K = n optimum:
//   bias:      ((1 + 1/(K-1)) / (1 + 1/(n-1)))^{2 phi} - 1
//   MSE bound: ((1 + 1/(K-1)) / (1 + 1/(n-1)))^{2 phi - 1/2} - 1
double relative_loss_bias(int K, std::size_t n, double phi);
double relative_loss_mse_bound(int K, std::size_t n, double phi);

// Exact (non-bound) MSE relative loss for a known upsilon = G_b / sigma2.
double relative_loss_mse_exact(int K, std::size_t n, double phi, double upsilon);

// Sample analog of the DML1/DML2 discrepancy measure, with both variables
// demeaned:
//   Lambda_hat = - [n^{-1} sum (m_i - mbar)(psi_a_i - abar)] / abar^2,
// where m_i = psi_b_i - psi_a_i * theta_hat.
double lambda_hat(const Dataset& data, const MomentModel& model,
                  const CrossFitEvaluations& eta, double theta_hat);

// Second higher-order MSE coefficient of the fold-wise oracle estimator:
//   Lambda_1 = 5 Lambda^2 + sigma2 (3 r_a - 1) - 2 r_m,
// with r_a = E[psi_a^2]/E[psi_a]^2 and r_m = E[m^2 psi_a]/E[psi_a]^3.
double lambda1(double sigma2, double Lambda, double ratio_a2, double ratio_m2a);

// Fold-count advisory: per-candidate relative losses plus a recommendation.
struct AdviceRow {
    int K;
    double bias_loss_lo;   // at phi -> 1/4 (or the supplied phi)
    double bias_loss_hi;   // at phi = 1/2  (or the supplied phi)
    double mse_bound_loss_lo;
    double mse_bound_loss_hi;
    std::optional<double> mse_exact_loss;  // when upsilon is supplied
};
struct AdviceResult {
    std::vector<AdviceRow> rows;
    int recommended_K;   // = n
    std::string caveat;  // G_b > 0 requirement and cost note
    std::optional<double> phi;
};
AdviceResult advise_k(std::size_t n, std::optional<double> phi,
                      const std::vector<int>& candidates,
                      std::optional<double> upsilon = std::nullopt);

}  // namespace dmlwb
