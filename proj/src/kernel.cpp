#include "dmlwb/kernel.hpp"

#include <cmath>
#include <string>

#include "dmlwb/errors.hpp"
#include "dmlwb/stats.hpp"

namespace dmlwb {

namespace {

constexpr double kDenominatorGuard = 1e-12;

// Polynomial factor of the Hermite construction, K_s(u) = P_s(u) * phi(u).
inline double kernel_poly(int order, double u2) {
    switch (order) {
        case 2: return 1.0;
        case 4: return 0.5 * (3.0 - u2);
        case 6: return 0.125 * (15.0 - (10.0 - u2) * u2);
        default:
            throw ArgumentError("kernel order must be one of {2, 4, 6}, got " +
                                std::to_string(order));
    }
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

}  // namespace

double univariate_kernel(int order, double u) {
    const double u2 = u * u;
    return kernel_poly(order, u2) * kInvSqrt2Pi * std::exp(-0.5 * u2);
}

double product_kernel(const KernelSpec& spec, std::span<const double> dx) {
    const double inv_h = 1.0 / spec.bandwidth;
    double poly = 1.0;
    double ss = 0.0;
    double scale = 1.0;
    for (std::size_t l = 0; l < spec.dim; ++l) {
        const double u = dx[l] * inv_h;
        const double u2 = u * u;
        poly *= kernel_poly(spec.order, u2);
        ss += u2;
        scale *= kInvSqrt2Pi * inv_h;
    }
    return poly * scale * std::exp(-0.5 * ss);
}

double bandwidth(double c, std::size_t n0, double phi0) {
    if (c <= 0.0) throw ArgumentError("bandwidth constant must be positive");
    if (n0 < 1) throw ArgumentError("bandwidth needs n0 >= 1");
    return c * std::pow(static_cast<double>(n0), -phi0);
}

double eval_response(const ResponseExpr& expr, const Dataset& data, std::size_t i) {
    double v = 0.0;
    for (const auto& [role, coef] : expr.terms) v += coef * data.by_role(role)[i];
    return v;
}

NwFit::NwFit(const NuisanceComponentSpec& spec, const Dataset& data,
             std::span<const std::size_t> train_idx, const KernelSpec& kernel,
             std::optional<double> propensity_floor)
    : kind_(spec.kind), kernel_(kernel), floor_(propensity_floor) {
    if (train_idx.empty()) throw ArgumentError("nw_fit: empty training set");
    if (kernel.bandwidth <= 0.0) throw ArgumentError("nw_fit: bandwidth must be positive");
    kernel_poly(kernel.order, 0.0);  // validates the order eagerly

    const std::size_t d = kernel.dim;
    x_train_.resize(train_idx.size() * d);
    for (std::size_t t = 0; t < train_idx.size(); ++t)
        for (std::size_t l = 0; l < d; ++l)
            x_train_[t * d + l] = data.by_role(roles::covariate(l + 1))[train_idx[t]];

    if (kind_ != NuisanceKind::InvGroupProb) {
        response_.resize(train_idx.size());
        for (std::size_t t = 0; t < train_idx.size(); ++t)
            response_[t] = eval_response(spec.response, data, train_idx[t]);
    }
    if (kind_ != NuisanceKind::CondMean) {
        const auto& g = data.by_role(*spec.group_role);
        indicator_.resize(train_idx.size());
        for (std::size_t t = 0; t < train_idx.size(); ++t)
            indicator_[t] = (g[train_idx[t]] == static_cast<double>(spec.group_value))
                                ? 1.0 : 0.0;
    }
}

NwFit::Eval NwFit::evaluate_ex(std::span<const double> x) const {
    const std::size_t d = kernel_.dim;
    const std::size_t nt = n_train();
    double num = 0.0, den = 0.0, sum_k = 0.0;
    double dx[16];
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t l = 0; l < d; ++l) dx[l] = x[l] - x_train_[t * d + l];
        const double w = product_kernel(kernel_, std::span<const double>(dx, d));
        switch (kind_) {
            case NuisanceKind::CondMean:
                num += response_[t] * w;
                den += w;
                break;
            case NuisanceKind::GroupCondMean:
                num += response_[t] * indicator_[t] * w;
                den += indicator_[t] * w;
                break;
            case NuisanceKind::InvGroupProb:
                num += w;
                den += indicator_[t] * w;
                sum_k += w;
                break;
        }
    }
    bool floored = false;
    if (kind_ == NuisanceKind::InvGroupProb && floor_ && sum_k > 0.0 &&
        den < *floor_ * sum_k) {
        den = *floor_ * sum_k;
        floored = true;
    }
    if (std::abs(den) < kDenominatorGuard) {
        throw EmptyNeighborhoodError(
            "empty neighborhood / bandwidth too small at x = " + std::to_string(x[0]),
            x[0]);
    }
    return {num / den, floored};
}

NwFit nw_fit(const NuisanceComponentSpec& spec, const Dataset& data,
             std::span<const std::size_t> train_idx, const KernelSpec& kernel,
             std::optional<double> propensity_floor) {
    return NwFit(spec, data, train_idx, kernel, propensity_floor);
}

InfluenceTerms influence_terms(const NuisanceComponentSpec& spec, int order,
                               double kernel_constant, double phi0,
                               std::size_t n0, std::size_t d_x,
                               const TruthFunctions& truth) {
    if (kernel_constant <= 0.0)
        throw ArgumentError("influence_terms: kernel constant must be positive");
    const double dd = static_cast<double>(d_x);
    const double phi1 = (1.0 - dd * phi0) / 2.0;
    const double phi2 = static_cast<double>(order) * phi0;
    if (phi1 <= 0.0)
        throw ArgumentError("influence_terms: unusable rate, 1 - d_x*phi0 must be positive");

    const double h = bandwidth(kernel_constant, n0, phi0);
    KernelSpec ks{order, h, d_x};
    // Scale factors from the decomposition displays:
    //   delta: C_h^{-d/2} h^{d/2},  bias: h^{-s}.
    const double delta_scale =
        std::pow(kernel_constant, -dd / 2.0) * std::pow(h, dd / 2.0);
    const double bias_scale = std::pow(h, -static_cast<double>(order));

    auto density_at = [truth](std::span<const double> x) {
        const double f = truth.density(x);
        if (f <= 0.0)
            throw DomainError("influence_terms: density is not positive at x = " +
                              std::to_string(x[0]));
        return f;
    };

    auto kern = [ks](std::span<const double> xw, std::span<const double> x) {
        double dx[16];
        for (std::size_t l = 0; l < ks.dim; ++l) dx[l] = x[l] - xw[l];
        return product_kernel(ks, std::span<const double>(dx, ks.dim));
    };

    InfluenceTerms out;
    out.phi1 = phi1;
    out.phi2 = phi2;

    const TruthFunctions tf = truth;  // copy to own the closures
    switch (spec.kind) {
        case NuisanceKind::CondMean:
            out.delta = [delta_scale, kern, tf, density_at](
                            double y, double, std::span<const double> xw,
                            std::span<const double> x) {
                return delta_scale * (y - tf.eta0(xw)) * kern(xw, x) / density_at(x);
            };
            out.bias = [bias_scale, kern, tf, density_at](
                           double, double, std::span<const double> xw,
                           std::span<const double> x) {
                return bias_scale * (tf.eta0(xw) - tf.eta0(x)) * kern(xw, x) /
                       density_at(x);
            };
            break;
        case NuisanceKind::GroupCondMean:
            out.delta = [delta_scale, kern, tf, density_at](
                            double y, double a, std::span<const double> xw,
                            std::span<const double> x) {
                return delta_scale *
                       ((y * a - tf.g1(xw)) - tf.eta0(x) * (a - tf.g2(xw))) *
                       kern(xw, x) / density_at(x);
            };
            out.bias = [bias_scale, kern, tf, density_at](
                           double, double, std::span<const double> xw,
                           std::span<const double> x) {
                return bias_scale *
                       ((tf.g1(xw) - tf.g1(x)) - tf.eta0(x) * (tf.g2(xw) - tf.g2(x))) *
                       kern(xw, x) / density_at(x);
            };
            break;
        case NuisanceKind::InvGroupProb:
            out.delta = [delta_scale, kern, tf, density_at](
                            double, double a, std::span<const double> xw,
                            std::span<const double> x) {
                const double e = tf.eta0(x);
                return -delta_scale * e * e * (a - tf.g2(xw)) * kern(xw, x) /
                       density_at(x);
            };
            out.bias = [bias_scale, kern, tf, density_at](
                           double, double, std::span<const double> xw,
                           std::span<const double> x) {
                const double e = tf.eta0(x);
                return -bias_scale * e * e * (tf.g2(xw) - tf.g2(x)) * kern(xw, x) /
                       density_at(x);
            };
            break;
    }
    return out;
}

}  // namespace dmlwb
