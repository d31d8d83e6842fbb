#include "dmlwb/theory.hpp"

#include <algorithm>
#include <cmath>

#include "dmlwb/errors.hpp"
#include "dmlwb/estimators.hpp"

namespace dmlwb {

namespace {

double fold_factor(int K) {
    if (K < 2) throw DomainError("K must be at least 2");
    return 1.0 + 1.0 / static_cast<double>(K - 1);
}

void check_curve_domain(const TheoryParams& p, int K, std::size_t n, bool need_phi2) {
    if (K < 2 || static_cast<std::size_t>(K) > n)
        throw DomainError("curve calculators need 2 <= K <= n");
    if (!(p.phi1 > 0.25 && p.phi1 < 0.5))
        throw DomainError("phi1 must lie in (1/4, 1/2)");
    if (p.phi2 < p.phi1)
        throw DomainError("the curves cover the regime phi1 <= phi2");
    if (need_phi2 && !(p.phi2 < 1.0)) throw DomainError("phi2 must be below 1");
}

}  // namespace

double zeta_of(double phi1, double phi2) {
    return std::min(4.0 * phi1 - 1.0, phi1 + phi2 - 0.5);
}

NwRates nw_rates(std::size_t d_x, int s, double phi0) {
    if (s < 1) throw ArgumentError("kernel order must be positive");
    if (phi0 <= 0.0) throw ArgumentError("phi0 must be positive");
    const double phi1 = (1.0 - static_cast<double>(d_x) * phi0) / 2.0;
    if (phi1 <= 0.0)
        throw ArgumentError("unusable rate: 1 - d_x*phi0 must be positive");
    const double phi2 = static_cast<double>(s) * phi0;
    return {phi1, phi2, zeta_of(phi1, phi2)};
}

double ho_bias_leading(const TheoryParams& p, int K, std::size_t n) {
    check_curve_domain(p, K, n, false);
    const double f = (p.phi1 == p.phi2) ? (p.F_delta + p.F_b) : p.F_delta;
    const double fk = f * std::pow(fold_factor(K), 2.0 * p.phi1);
    return fk * std::pow(static_cast<double>(n), 0.5 - 2.0 * p.phi1);
}

namespace {

// Omega_K and OmegaTilde_K share the branch structure on 3*phi1 - 1/2 vs phi2;
// the MSE version adds F_delta^2 K/(K-1) to the two lower branches.
double omega_k(const TheoryParams& p, int K, bool mse_version) {
    const double zeta = zeta_of(p.phi1, p.phi2);
    const double Kd = static_cast<double>(K);
    const double ratio = Kd / (Kd - 1.0);
    const double edge = 3.0 * p.phi1 - 0.5;
    double core;
    if (edge > p.phi2) {
        core = p.G_b;
    } else if (edge == p.phi2) {
        core = p.G_delta * (Kd * Kd - 3.0 * Kd + 3.0) / ((Kd - 1.0) * (Kd - 1.0)) + p.G_b;
        if (mse_version) core += p.F_delta * p.F_delta * ratio;
    } else {
        if (mse_version) {
            core = p.G_delta * (Kd * Kd - 3.0 * Kd + 3.0) / ((Kd - 1.0) * (Kd - 1.0)) +
                   p.F_delta * p.F_delta * ratio;
        } else {
            core = p.G_delta * (Kd * Kd - Kd + 3.0) / ((Kd - 1.0) * (Kd - 1.0));
        }
    }
    return core * std::pow(ratio, zeta);
}

}  // namespace

double ho_variance_second_term(const TheoryParams& p, int K, std::size_t n) {
    check_curve_domain(p, K, n, true);
    const double zeta = zeta_of(p.phi1, p.phi2);
    return omega_k(p, K, false) * std::pow(static_cast<double>(n), -zeta);
}

double so_mse(const TheoryParams& p, int K, std::size_t n) {
    check_curve_domain(p, K, n, true);
    const double zeta = zeta_of(p.phi1, p.phi2);
    const double nd = static_cast<double>(n);
    return p.sigma2 / nd + omega_k(p, K, true) * std::pow(nd, -(zeta + 1.0));
}

namespace {

void check_loss_domain(int K, std::size_t n, double phi) {
    if (K < 2 || static_cast<std::size_t>(K) > n)
        throw DomainError("relative losses need 2 <= K <= n");
    // phi = 1/4 is admitted as the boundary value (the MSE-bound exponent is
    // then exactly zero).
    if (!(phi >= 0.25 && phi <= 0.5))
        throw DomainError("phi must lie in [1/4, 1/2]");
}

double loss_ratio(int K, std::size_t n, double exponent) {
    const double num = 1.0 + 1.0 / static_cast<double>(K - 1);
    const double den = 1.0 + 1.0 / (static_cast<double>(n) - 1.0);
    return std::pow(num / den, exponent) - 1.0;
}

}  // namespace

double relative_loss_bias(int K, std::size_t n, double phi) {
    check_loss_domain(K, n, phi);
    return loss_ratio(K, n, 2.0 * phi);
}

double relative_loss_mse_bound(int K, std::size_t n, double phi) {
    check_loss_domain(K, n, phi);
    return loss_ratio(K, n, 2.0 * phi - 0.5);
}

double relative_loss_mse_exact(int K, std::size_t n, double phi, double upsilon) {
    check_loss_domain(K, n, phi);
    const double zeta = 2.0 * phi - 0.5;
    const double nz = std::pow(static_cast<double>(n), zeta);
    const double num = 1.0 + upsilon * std::pow(fold_factor(K), zeta) / nz;
    const double den =
        1.0 + upsilon * std::pow(1.0 + 1.0 / (static_cast<double>(n) - 1.0), zeta) / nz;
    return num / den - 1.0;
}

double lambda_hat(const Dataset& data, const MomentModel& model,
                  const CrossFitEvaluations& eta, double theta_hat) {
    const PsiArrays psi = compute_psi(data, model, eta);
    const std::size_t n = psi.a.size();
    const double nd = static_cast<double>(n);
    double abar = 0.0, mbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        abar += psi.a[i];
        mbar += psi.b[i] - psi.a[i] * theta_hat;
    }
    abar /= nd;
    mbar /= nd;
    if (abar == 0.0)
        throw DegeneracyError("lambda_hat: sample mean of psi_a is zero");
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = psi.b[i] - psi.a[i] * theta_hat;
        cov += (m - mbar) * (psi.a[i] - abar);
    }
    cov /= nd;
    return -cov / (abar * abar);
}

double lambda1(double sigma2, double Lambda, double ratio_a2, double ratio_m2a) {
    return 5.0 * Lambda * Lambda + sigma2 * (3.0 * ratio_a2 - 1.0) - 2.0 * ratio_m2a;
}

AdviceResult advise_k(std::size_t n, std::optional<double> phi,
                      const std::vector<int>& candidates,
                      std::optional<double> upsilon) {
    if (n < 2) throw ArgumentError("advise_k needs n >= 2");
    if (upsilon && !phi)
        throw ArgumentError("the exact MSE relative loss needs phi alongside upsilon");
    AdviceResult out;
    out.phi = phi;
    out.recommended_K = static_cast<int>(n);
    out.caveat =
        "K = n minimizes the higher-order bias unconditionally; it also minimizes "
        "the second-order MSE only if G_b > 0, which is untestable from data. "
        "Note the cost: K = n means n nuisance fits.";
    // The losses are increasing in phi over (1/4, 1/2]; with no phi supplied,
    // report the range over that interval (lower endpoint evaluated at 1/4,
    // where the MSE bound is exactly 0).
    const double lo = phi.value_or(0.25);
    const double hi = phi.value_or(0.5);
    for (int K : candidates) {
        if (K < 2 || static_cast<std::size_t>(K) > n)
            throw ArgumentError("candidate K = " + std::to_string(K) +
                                " outside [2, n]");
        AdviceRow row;
        row.K = K;
        row.bias_loss_lo = loss_ratio(K, n, 2.0 * lo);
        row.bias_loss_hi = loss_ratio(K, n, 2.0 * hi);
        row.mse_bound_loss_lo = loss_ratio(K, n, 2.0 * lo - 0.5);
        row.mse_bound_loss_hi = loss_ratio(K, n, 2.0 * hi - 0.5);
        if (upsilon) row.mse_exact_loss = relative_loss_mse_exact(K, n, *phi, *upsilon);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace dmlwb
