#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmlwb/dataset.hpp"
#include "dmlwb/stats.hpp"

namespace dmlwb {

enum class ModelId { ATE, ATT_DID, LATE, WATE, ATT, PLM, PLM_IV, CUSTOM };

std::string to_string(ModelId id);
ModelId model_id_from_string(const std::string& name);  // throws ArgumentError

// The three Nadaraya-Watson target forms a nuisance component can take:
// a plain conditional mean, a conditional mean within a 0/1 group, and the
// inverse of a group probability.
enum class NuisanceKind { CondMean, GroupCondMean, InvGroupProb };

// Response expressions support signed sums of role columns; the only
// transformed response needed by the catalog is outcome - outcome_pre.
struct ResponseExpr {
    std::vector<std::pair<std::string, double>> terms;  // (role, coefficient)
};

struct NuisanceComponentSpec {
    NuisanceKind kind;
    ResponseExpr response;                   // empty for InvGroupProb
    std::optional<std::string> group_role;   // present for Group*/InvGroupProb
    int group_value = 1;                     // required indicator value, 0 or 1
};

// Column pointers resolved once per (dataset, model) pair so the psi
// functions can index rows without string lookups.
struct ModelBinding {
    const double* outcome = nullptr;
    const double* outcome_pre = nullptr;
    const double* treatment = nullptr;
    const double* instrument = nullptr;
    std::vector<const double*> covariates;

    double covariate(std::size_t j, std::size_t i) const { return covariates[j][i]; }
};

using PsiFn = std::function<double(const ModelBinding&, std::size_t i,
                                   std::span<const double> eta)>;
using WeightFn = std::function<double(std::span<const double> x)>;

// A moment function m(W, theta, eta) = psi_b(W, eta) - psi_a(W, eta) * theta
// together with the layout of its nuisance components. Immutable
// value object; psi evaluation is pure and reentrant.
struct MomentModel {
    ModelId id = ModelId::CUSTOM;
    std::size_t p = 0;
    PsiFn psi_a;
    PsiFn psi_b;
    std::vector<NuisanceComponentSpec> nuisance_specs;
    bool psi_a_is_constant = false;
    std::optional<WeightFn> weight_function;  // WATE only
    std::vector<std::string> required_roles;
};

// Returns a catalog entry. WATE ships with the built-in weight g(X) = X_1;
// use wate_model() to supply a custom weight through the library.
MomentModel catalog_model(ModelId id);
MomentModel catalog_model(const std::string& name);
MomentModel wate_model(WeightFn g);

ModelBinding bind_model(const Dataset& data, const MomentModel& model);

// Confirms every role the model needs is present; returns all violations
// rather than stopping at the first.
std::vector<std::string> validate_for_model(const Dataset& data,
                                            const MomentModel& model);

// m(W_i, theta, eta) = psi_b - psi_a * theta. Throws ArgumentError when the
// eta vector does not have length p.
double eval_moment(const MomentModel& model, const ModelBinding& bind,
                   std::size_t i, double theta, std::span<const double> eta);

// Monte Carlo estimate of the w-ATE discrepancy measure
//   Lambda = E[g(X)^2 {eta01(X) - eta02(X) - theta0}] / E[g(X)]^2
// for user-supplied truth functions and a covariate sampler. The standard
// error is delta-method based.
struct LambdaEstimate {
    double value;
    double se;
};
LambdaEstimate population_lambda_wate(
    const std::function<double(double)>& eta01,
    const std::function<double(double)>& eta02,
    const std::function<double(double)>& g,
    const std::function<double(Rng&)>& sampler, double theta0,
    std::size_t draws, std::uint64_t seed);

// Model metadata as JSON text (id, p, spec kinds); used by the CLI.
std::string model_metadata_json(const MomentModel& model);

}  // namespace dmlwb
