#include "dmlwb/estimators.hpp"

#include <cctype>
#include <cmath>

#include "dmlwb/errors.hpp"
#include "dmlwb/stats.hpp"
#include "json.hpp"

namespace dmlwb {

std::string to_string(Method m) {
    switch (m) {
        case Method::DML1: return "DML1";
        case Method::DML2: return "DML2";
        case Method::ORACLE1: return "ORACLE1";
        case Method::ORACLE2: return "ORACLE2";
    }
    return "DML2";
}

Method method_from_string(const std::string& name) {
    std::string s;
    for (char ch : name) s += static_cast<char>(std::tolower(ch));
    if (s == "dml1") return Method::DML1;
    if (s == "dml2") return Method::DML2;
    if (s == "oracle1") return Method::ORACLE1;
    if (s == "oracle2") return Method::ORACLE2;
    throw ArgumentError("unknown method: " + name);
}

double DmlEstimate::se() const {
    return std::sqrt(sigma2_hat / static_cast<double>(n));
}

std::string DmlEstimate::to_json() const {
    nlohmann::json j;
    j["method"] = to_string(method);
    j["theta_hat"] = theta_hat;
    j["se"] = se();
    j["ci_lower"] = ci_lower;
    j["ci_upper"] = ci_upper;
    j["K"] = K;
    j["n"] = n;
    j["alpha"] = alpha;
    j["flags"] = flags;
    return j.dump();
}

void EstimationConfig::validate(std::size_t n_rows) const {
    if (K < 2 || static_cast<std::size_t>(K) > n_rows)
        throw ArgumentError("K must satisfy 2 <= K <= n");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0,1)");
    if (bandwidth_constant <= 0.0) throw ArgumentError("bandwidth constant must be positive");
    if (!(bandwidth_exponent > 0.0 && bandwidth_exponent < 0.5))
        throw ArgumentError("bandwidth exponent must lie in (0, 1/2)");
    if (kernel_order != 2 && kernel_order != 4 && kernel_order != 6)
        throw ArgumentError("kernel order must be one of {2, 4, 6}");
    if (propensity_floor && *propensity_floor < 0.0)
        throw ArgumentError("propensity floor must be nonnegative");
}

PsiArrays compute_psi(const Dataset& data, const MomentModel& model,
                      const CrossFitEvaluations& eta) {
    if (eta.n != data.n_rows())
        throw ArgumentError("eta rows do not align with the dataset");
    if (eta.p != model.p)
        throw ArgumentError("eta arity does not match the model");
    const ModelBinding bind = bind_model(data, model);
    const std::size_t n = data.n_rows();
    PsiArrays out;
    out.a.resize(n);
    out.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = eta.row(i);
        out.a[i] = model.psi_a(bind, i, e);
        out.b[i] = model.psi_b(bind, i, e);
    }
    return out;
}

namespace {

constexpr double kFoldGuard = 1e-10;

double sigma2_from_psi(const PsiArrays& psi, double theta_hat) {
    const std::size_t n = psi.a.size();
    double sm2 = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = psi.b[i] - psi.a[i] * theta_hat;
        sm2 += m * m;
        sa += psi.a[i];
    }
    const double nd = static_cast<double>(n);
    const double abar = sa / nd;
    if (std::abs(sa) < kFoldGuard * nd)
        throw DegeneracyError("variance denominator degenerate: |sum psi_a| < 1e-10 * n");
    return (sm2 / nd) / (abar * abar);
}

void attach_inference(DmlEstimate& est, const PsiArrays& psi,
                      std::optional<double> sigma2_override) {
    est.sigma2_hat = sigma2_from_psi(psi, est.theta_hat);
    const double s2 = sigma2_override.value_or(est.sigma2_hat);
    auto [lo, hi] = confidence_interval(est.theta_hat, s2, est.n, est.alpha);
    est.ci_lower = lo;
    est.ci_upper = hi;
}

DmlEstimate dml1_from_psi(const PsiArrays& psi, const FoldPartition& partition,
                          double alpha, bool size_weighted, Method tag,
                          std::optional<double> sigma2_override) {
    const std::size_t n = psi.a.size();
    const int K = partition.K();
    std::vector<double> sum_a(static_cast<std::size_t>(K), 0.0);
    std::vector<double> sum_b(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(partition.fold_of(i) - 1);
        sum_a[k] += psi.a[i];
        sum_b[k] += psi.b[i];
    }
    DmlEstimate est;
    est.method = tag;
    est.K = K;
    est.n = n;
    est.alpha = alpha;
    est.per_fold_theta.resize(static_cast<std::size_t>(K));
    double acc = 0.0;
    for (int k = 1; k <= K; ++k) {
        const std::size_t idx = static_cast<std::size_t>(k - 1);
        const double nk = static_cast<double>(partition.fold_size(k));
        if (std::abs(sum_a[idx]) < kFoldGuard * nk)
            throw DegeneracyError("fold " + std::to_string(k) +
                                  ": |sum psi_a| < 1e-10 * n_k signals a non-identified fold");
        const double tk = sum_b[idx] / sum_a[idx];
        est.per_fold_theta[idx] = tk;
        acc += size_weighted ? tk * nk : tk;
    }
    est.theta_hat = size_weighted ? acc / static_cast<double>(n)
                                  : acc / static_cast<double>(K);
    attach_inference(est, psi, sigma2_override);
    return est;
}

DmlEstimate dml2_from_psi(const PsiArrays& psi, int K, double alpha, Method tag,
                          std::optional<double> sigma2_override) {
    const std::size_t n = psi.a.size();
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += psi.a[i];
        sb += psi.b[i];
    }
    if (std::abs(sa) < kFoldGuard * static_cast<double>(n))
        throw DegeneracyError("|sum psi_a| < 1e-10 * n: the sample moment is degenerate");
    DmlEstimate est;
    est.method = tag;
    est.K = K;
    est.n = n;
    est.alpha = alpha;
    est.theta_hat = sb / sa;
    attach_inference(est, psi, sigma2_override);
    return est;
}

}  // namespace

DmlEstimate dml1(const Dataset& data, const MomentModel& model,
                 const CrossFitEvaluations& eta, const FoldPartition& partition,
                 double alpha, bool size_weighted) {
    const PsiArrays psi = compute_psi(data, model, eta);
    DmlEstimate est = dml1_from_psi(psi, partition, alpha, size_weighted, Method::DML1,
                                    std::nullopt);
    est.flags = eta.flag_count();
    return est;
}

DmlEstimate dml2(const Dataset& data, const MomentModel& model,
                 const CrossFitEvaluations& eta, double alpha) {
    const PsiArrays psi = compute_psi(data, model, eta);
    DmlEstimate est = dml2_from_psi(psi, eta.K, alpha, Method::DML2, std::nullopt);
    est.flags = eta.flag_count();
    return est;
}

std::pair<DmlEstimate, DmlEstimate> oracle_estimates(
    const Dataset& data, const MomentModel& model, const FoldPartition& partition,
    double alpha, std::optional<double> sigma2_override) {
    const CrossFitEvaluations truth =
        oracle_passthrough(data, model.p, partition.K());
    const PsiArrays psi = compute_psi(data, model, truth);
    DmlEstimate o1 = dml1_from_psi(psi, partition, alpha, false, Method::ORACLE1,
                                   sigma2_override);
    DmlEstimate o2 = dml2_from_psi(psi, partition.K(), alpha, Method::ORACLE2,
                                   sigma2_override);
    return {o1, o2};
}

double sigma2_hat(const Dataset& data, const MomentModel& model,
                  const CrossFitEvaluations& eta, double theta_hat) {
    return sigma2_from_psi(compute_psi(data, model, eta), theta_hat);
}

std::pair<double, double> confidence_interval(double theta_hat, double sigma2,
                                              std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0,1)");
    if (sigma2 < 0.0) throw ArgumentError("sigma2 must be nonnegative");
    const double z = norm_quantile(1.0 - alpha / 2.0);
    const double half = z * std::sqrt(sigma2 / static_cast<double>(n));
    return {theta_hat - half, theta_hat + half};
}

std::vector<DmlEstimate> estimate(const Dataset& data, const MomentModel& model,
                                  const EstimationConfig& config,
                                  const EstimateRequest& request) {
    config.validate(data.n_rows());
    {
        auto errors = validate_for_model(data, model);
        if (!errors.empty()) {
            std::string joined;
            for (const auto& e : errors) {
                if (!joined.empty()) joined += "; ";
                joined += e;
            }
            throw SchemaError(joined);
        }
    }
    const FoldPartition partition = partition_folds(data.n_rows(), config.K, config.seed);
    std::vector<DmlEstimate> out;
    if (request.run_dml1 || request.run_dml2) {
        const CrossFitEvaluations eta =
            crossfit_nuisance(data, model, partition, config.kernel());
        if (request.run_dml1)
            out.push_back(dml1(data, model, eta, partition, config.alpha));
        if (request.run_dml2) out.push_back(dml2(data, model, eta, config.alpha));
    }
    if (request.run_oracle) {
        auto [o1, o2] = oracle_estimates(data, model, partition, config.alpha);
        out.push_back(o1);
        out.push_back(o2);
    }
    return out;
}

}  // namespace dmlwb
