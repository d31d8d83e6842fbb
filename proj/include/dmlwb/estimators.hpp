#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmlwb/crossfit.hpp"
#include "dmlwb/dataset.hpp"
#include "dmlwb/moments.hpp"

namespace dmlwb {

enum class Method { DML1, DML2, ORACLE1, ORACLE2 };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct DmlEstimate {
    Method method = Method::DML2;
    double theta_hat = 0.0;
    double sigma2_hat = 0.0;
    int K = 0;
    std::vector<double> per_fold_theta;  // DML1 / ORACLE1 only
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double alpha = 0.05;
    std::size_t n = 0;
    std::size_t flags = 0;  // propensity-floor triggers inherited from eta

    double se() const;
    std::string to_json() const;
};

struct EstimationConfig {
    int K = 5;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int kernel_order = 2;
    double bandwidth_constant = 1.0;
    double bandwidth_exponent = 0.2;  // phi0
    std::optional<double> propensity_floor;

    KernelConfig kernel() const {
        return {kernel_order, bandwidth_constant, bandwidth_exponent, propensity_floor};
    }
    void validate(std::size_t n_rows) const;  // throws ArgumentError
};

// psi values evaluated at the cross-fitted (or oracle) eta; shared by the
// estimators, the variance formula, and the Lambda diagnostic.
struct PsiArrays {
    std::vector<double> a;
    std::vector<double> b;
};
PsiArrays compute_psi(const Dataset& data, const MomentModel& model,
                      const CrossFitEvaluations& eta);

// Fold-wise solve then average:
//   theta_k = sum_{i in I_k} psi_b_i / sum_{i in I_k} psi_a_i,
//   theta_hat = K^{-1} sum_k theta_k  (unweighted, also when K does not
//   divide n; size-weighting is available behind a flag).
// Throws DegeneracyError naming the fold when |sum psi_a| < 1e-10 * n_k.
DmlEstimate dml1(const Dataset& data, const MomentModel& model,
                 const CrossFitEvaluations& eta, const FoldPartition& partition,
                 double alpha = 0.05, bool size_weighted = false);

// Average the moment conditions, then solve: one global ratio.
DmlEstimate dml2(const Dataset& data, const MomentModel& model,
                 const CrossFitEvaluations& eta, double alpha = 0.05);

// Same formulas with eta_i = eta0(X_i) taken from truth_eta columns. ORACLE2
// does not depend on the partition at all. sigma2_override replaces the
// estimated variance in both confidence intervals (used by simulation runs
// that build oracle intervals from the design-true variance).
std::pair<DmlEstimate, DmlEstimate> oracle_estimates(
    const Dataset& data, const MomentModel& model, const FoldPartition& partition,
    double alpha = 0.05, std::optional<double> sigma2_override = std::nullopt);

// sigma2_hat = n^{-1} sum m(W_i, theta, eta_i)^2 / (n^{-1} sum psi_a_i)^2.
double sigma2_hat(const Dataset& data, const MomentModel& model,
                  const CrossFitEvaluations& eta, double theta_hat);

// theta_hat -/+ z_{1-alpha/2} sqrt(sigma2 / n).
std::pair<double, double> confidence_interval(double theta_hat, double sigma2,
                                              std::size_t n, double alpha);

// One-call convenience used by the CLI: cross-fits and runs the requested
// methods.
struct EstimateRequest {
    bool run_dml1 = true;
    bool run_dml2 = true;
    bool run_oracle = false;
};
std::vector<DmlEstimate> estimate(const Dataset& data, const MomentModel& model,
                                  const EstimationConfig& config,
                                  const EstimateRequest& request);

}  // namespace dmlwb
