#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dmlwb/dataset.hpp"
#include "dmlwb/moments.hpp"

namespace dmlwb {

// ---------------------------------------------------------------------------
// Higher-order Gaussian kernels (Hermite construction):
//   K2(u) = phi(u)
//   K4(u) = (3 - u^2)/2 * phi(u)
//   K6(u) = (15 - 10 u^2 + u^4)/8 * phi(u)
// Orders 4 and 6 integrate to one with vanishing moments below their order,
// at the price of negative side lobes.
// ---------------------------------------------------------------------------
double univariate_kernel(int order, double u);  // throws ArgumentError

struct KernelSpec {
    int order = 2;       // s in {2, 4, 6}
    double bandwidth = 1.0;
    std::size_t dim = 1;  // d_x
};

// Product kernel K_h(x) = h^{-d} prod_l K(x_l / h), evaluated at the
// difference vector dx = x - X_l. The Gaussian factor is pooled into a
// single exponential; this matches the per-coordinate product to rounding.
double product_kernel(const KernelSpec& spec, std::span<const double> dx);

// Bandwidth rule h = c * n0^{-phi0}.
double bandwidth(double c, std::size_t n0, double phi0);

// ---------------------------------------------------------------------------
// Nadaraya-Watson fit of one nuisance component on a fixed training set.
// Evaluation is a fresh O(n_train) pass per point; no trees, no binning.
// ---------------------------------------------------------------------------
class NwFit {
public:
    NwFit(const NuisanceComponentSpec& spec, const Dataset& data,
          std::span<const std::size_t> train_idx, const KernelSpec& kernel,
          std::optional<double> propensity_floor = std::nullopt);

    struct Eval {
        double value;
        bool floored;  // set when the propensity floor clipped the denominator
    };

    // Throws EmptyNeighborhoodError when |denominator| < 1e-12 and the floor
    // (Type 3 only) does not apply.
    Eval evaluate_ex(std::span<const double> x) const;
    double evaluate(std::span<const double> x) const { return evaluate_ex(x).value; }

    std::size_t n_train() const { return x_train_.size() / kernel_.dim; }
    const KernelSpec& kernel() const { return kernel_; }

private:
    NuisanceKind kind_;
    KernelSpec kernel_;
    std::optional<double> floor_;
    // Training data copied in evaluation-friendly layout (row-major X).
    std::vector<double> x_train_;
    std::vector<double> response_;   // r_l, empty for InvGroupProb
    std::vector<double> indicator_;  // 1{group}, empty for CondMean
};

NwFit nw_fit(const NuisanceComponentSpec& spec, const Dataset& data,
             std::span<const std::size_t> train_idx, const KernelSpec& kernel,
             std::optional<double> propensity_floor = std::nullopt);

// Evaluates a response expression at one row.
double eval_response(const ResponseExpr& expr, const Dataset& data, std::size_t i);

// ---------------------------------------------------------------------------
// Influence decomposition of the NW estimation error at a point x:
//   etahat(x) - eta0(x) =  n0^{-1/2} sum_l n0^{-phi1} delta(W_l, x)
//                        + n0^{-1}   sum_l n0^{-phi2} bias(X_l, x) + remainder
// with rates phi1 = (1 - d_x*phi0)/2 and phi2 = s*phi0. The closures need the
// design truths (density f, group moments g1/g2, the component eta0), which
// only simulation designs can supply.
// ---------------------------------------------------------------------------
struct TruthFunctions {
    std::function<double(std::span<const double>)> density;  // f(x) > 0
    std::function<double(std::span<const double>)> g1;       // E[resp * ind | X=x]
    std::function<double(std::span<const double>)> g2;       // E[ind | X=x]
    std::function<double(std::span<const double>)> eta0;     // component truth
};

struct InfluenceTerms {
    // delta(y, a, xw, x): y = response value of W, a = group indicator of W,
    // xw = covariates of W, x = evaluation point. Unused arguments are
    // ignored depending on the component type.
    std::function<double(double y, double a, std::span<const double> xw,
                         std::span<const double> x)> delta;
    // bias(y, a, xw, x): same calling convention; depends on X (and truths).
    std::function<double(double y, double a, std::span<const double> xw,
                         std::span<const double> x)> bias;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

// kernel_constant is C_h in h = C_h * n0^{-phi0}. Throws DomainError when the
// density is not positive at an evaluation point (checked lazily inside the
// closures) and ArgumentError for unusable rates.
InfluenceTerms influence_terms(const NuisanceComponentSpec& spec, int order,
                               double kernel_constant, double phi0,
                               std::size_t n0, std::size_t d_x,
                               const TruthFunctions& truth);

}  // namespace dmlwb
