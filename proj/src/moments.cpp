#include "dmlwb/moments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>

#include "dmlwb/errors.hpp"
#include "json.hpp"

namespace dmlwb {

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::ATE: return "ate";
        case ModelId::ATT_DID: return "att-did";
        case ModelId::LATE: return "late";
        case ModelId::WATE: return "wate";
        case ModelId::ATT: return "att";
        case ModelId::PLM: return "plm";
        case ModelId::PLM_IV: return "plm-iv";
        case ModelId::CUSTOM: return "custom";
    }
    return "custom";
}

ModelId model_id_from_string(const std::string& name) {
    std::string s;
    for (char ch : name) s += (ch == '_') ? '-' : static_cast<char>(std::tolower(ch));
    if (s == "ate") return ModelId::ATE;
    if (s == "att-did" || s == "attdid") return ModelId::ATT_DID;
    if (s == "late") return ModelId::LATE;
    if (s == "wate" || s == "w-ate") return ModelId::WATE;
    if (s == "att") return ModelId::ATT;
    if (s == "plm") return ModelId::PLM;
    if (s == "plm-iv" || s == "plmiv") return ModelId::PLM_IV;
    throw ArgumentError("unknown model id: " + name);
}

namespace {

ResponseExpr resp(const std::string& role) { return ResponseExpr{{{role, 1.0}}}; }

ResponseExpr resp_diff(const std::string& plus, const std::string& minus) {
    return ResponseExpr{{{plus, 1.0}, {minus, -1.0}}};
}

NuisanceComponentSpec cond_mean(ResponseExpr r) {
    return {NuisanceKind::CondMean, std::move(r), std::nullopt, 1};
}

NuisanceComponentSpec group_mean(ResponseExpr r, const std::string& role, int value) {
    return {NuisanceKind::GroupCondMean, std::move(r), role, value};
}

NuisanceComponentSpec inv_prob(const std::string& role, int value) {
    return {NuisanceKind::InvGroupProb, ResponseExpr{}, role, value};
}

// psi pair of the AIPW moment for the ATE; reused (weighted) by the w-ATE.
double aipw_psi_b(const ModelBinding& m, std::size_t i, std::span<const double> e) {
    const double y = m.outcome[i];
    const double a = m.treatment[i];
    return e[0] - e[1] + a * (y - e[0]) * e[2] - (1.0 - a) * (y - e[1]) * e[3];
}

}  // namespace

MomentModel catalog_model(ModelId id) {
    MomentModel mm;
    mm.id = id;
    switch (id) {
        case ModelId::ATE:
            mm.p = 4;
            mm.psi_a = [](const ModelBinding&, std::size_t, std::span<const double>) {
                return 1.0;
            };
            mm.psi_b = aipw_psi_b;
            mm.psi_a_is_constant = true;
            mm.nuisance_specs = {
                group_mean(resp(roles::outcome), roles::treatment, 1),
                group_mean(resp(roles::outcome), roles::treatment, 0),
                inv_prob(roles::treatment, 1),
                inv_prob(roles::treatment, 0),
            };
            mm.required_roles = {roles::outcome, roles::treatment};
            break;

        case ModelId::ATT_DID:
            mm.p = 2;
            mm.psi_a = [](const ModelBinding& m, std::size_t i, std::span<const double>) {
                return m.treatment[i];
            };
            mm.psi_b = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                const double dy = m.outcome[i] - m.outcome_pre[i];
                const double a = m.treatment[i];
                return a * (dy - e[0]) + (1.0 - a) * (1.0 - e[1]) * (dy - e[0]);
            };
            mm.nuisance_specs = {
                group_mean(resp_diff(roles::outcome, roles::outcome_pre),
                           roles::treatment, 0),
                inv_prob(roles::treatment, 0),
            };
            mm.required_roles = {roles::outcome, roles::outcome_pre, roles::treatment};
            break;

        case ModelId::LATE:
            mm.p = 6;
            mm.psi_a = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                const double d = m.treatment[i];
                const double z = m.instrument[i];
                return e[2] - e[3] + z * (d - e[2]) * e[4] - (1.0 - z) * (d - e[3]) * e[5];
            };
            mm.psi_b = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                const double y = m.outcome[i];
                const double z = m.instrument[i];
                return e[0] - e[1] + z * (y - e[0]) * e[4] - (1.0 - z) * (y - e[1]) * e[5];
            };
            mm.nuisance_specs = {
                group_mean(resp(roles::outcome), roles::instrument, 1),
                group_mean(resp(roles::outcome), roles::instrument, 0),
                group_mean(resp(roles::treatment), roles::instrument, 1),
                group_mean(resp(roles::treatment), roles::instrument, 0),
                inv_prob(roles::instrument, 1),
                inv_prob(roles::instrument, 0),
            };
            mm.required_roles = {roles::outcome, roles::treatment, roles::instrument};
            break;

        case ModelId::WATE:
            return wate_model([](std::span<const double> x) { return x[0]; });

        case ModelId::ATT:
            mm.p = 2;
            mm.psi_a = [](const ModelBinding& m, std::size_t i, std::span<const double>) {
                return m.treatment[i];
            };
            mm.psi_b = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                const double y = m.outcome[i];
                const double a = m.treatment[i];
                return a * (y - e[0]) + (1.0 - a) * (1.0 - e[1]) * (y - e[0]);
            };
            mm.nuisance_specs = {
                group_mean(resp(roles::outcome), roles::treatment, 0),
                inv_prob(roles::treatment, 0),
            };
            mm.required_roles = {roles::outcome, roles::treatment};
            break;

        case ModelId::PLM:
            mm.p = 2;
            mm.psi_a = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                const double d = m.treatment[i] - e[1];
                return d * d;
            };
            mm.psi_b = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                return (m.outcome[i] - e[0]) * (m.treatment[i] - e[1]);
            };
            mm.nuisance_specs = {
                cond_mean(resp(roles::outcome)),
                cond_mean(resp(roles::treatment)),
            };
            mm.required_roles = {roles::outcome, roles::treatment};
            break;

        case ModelId::PLM_IV:
            mm.p = 3;
            mm.psi_a = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                return (m.treatment[i] - e[1]) * (m.instrument[i] - e[2]);
            };
            mm.psi_b = [](const ModelBinding& m, std::size_t i, std::span<const double> e) {
                return (m.outcome[i] - e[0]) * (m.instrument[i] - e[2]);
            };
            mm.nuisance_specs = {
                cond_mean(resp(roles::outcome)),
                cond_mean(resp(roles::treatment)),
                cond_mean(resp(roles::instrument)),
            };
            mm.required_roles = {roles::outcome, roles::treatment, roles::instrument};
            break;

        case ModelId::CUSTOM:
            throw ArgumentError("custom models must be constructed directly");
    }
    return mm;
}

MomentModel catalog_model(const std::string& name) {
    return catalog_model(model_id_from_string(name));
}

MomentModel wate_model(WeightFn g) {
    MomentModel mm = catalog_model(ModelId::ATE);
    mm.id = ModelId::WATE;
    mm.psi_a_is_constant = false;
    auto weight = std::make_shared<WeightFn>(std::move(g));
    auto eval_weight = [weight](const ModelBinding& m, std::size_t i) {
        double buf[16];
        const std::size_t d = m.covariates.size();
        for (std::size_t j = 0; j < d && j < 16; ++j) buf[j] = m.covariates[j][i];
        return (*weight)(std::span<const double>(buf, std::min<std::size_t>(d, 16)));
    };
    mm.psi_a = [eval_weight](const ModelBinding& m, std::size_t i,
                             std::span<const double>) { return eval_weight(m, i); };
    mm.psi_b = [eval_weight](const ModelBinding& m, std::size_t i,
                             std::span<const double> e) {
        return eval_weight(m, i) * aipw_psi_b(m, i, e);
    };
    mm.weight_function = *weight;
    return mm;
}

ModelBinding bind_model(const Dataset& data, const MomentModel& model) {
    auto errors = validate_for_model(data, model);
    if (!errors.empty()) throw SchemaError(errors.front());
    ModelBinding b;
    if (data.has_role(roles::outcome)) b.outcome = data.by_role(roles::outcome).data();
    if (data.has_role(roles::outcome_pre))
        b.outcome_pre = data.by_role(roles::outcome_pre).data();
    if (data.has_role(roles::treatment)) b.treatment = data.by_role(roles::treatment).data();
    if (data.has_role(roles::instrument)) b.instrument = data.by_role(roles::instrument).data();
    b.covariates.reserve(data.d_x());
    for (std::size_t j = 1; j <= data.d_x(); ++j)
        b.covariates.push_back(data.by_role(roles::covariate(j)).data());
    return b;
}

std::vector<std::string> validate_for_model(const Dataset& data,
                                            const MomentModel& model) {
    std::vector<std::string> errors;
    for (const auto& role : model.required_roles) {
        if (!data.has_role(role))
            errors.push_back("model " + to_string(model.id) +
                             " requires role '" + role + "' which is not mapped");
    }
    // Roles referenced by the nuisance specs (response terms and group
    // indicators) -- normally a subset of required_roles, but custom models
    // can reference more.
    auto need = [&](const std::string& role) {
        if (!data.has_role(role)) {
            std::string msg = "nuisance spec references unmapped role '" + role + "'";
            for (const auto& e : errors)
                if (e == msg) return;
            bool covered = false;
            for (const auto& r : model.required_roles) covered |= (r == role);
            if (!covered) errors.push_back(msg);
        }
    };
    for (const auto& spec : model.nuisance_specs) {
        for (const auto& [role, coef] : spec.response.terms) need(role);
        if (spec.group_role) need(*spec.group_role);
    }
    return errors;
}

double eval_moment(const MomentModel& model, const ModelBinding& bind,
                   std::size_t i, double theta, std::span<const double> eta) {
    if (eta.size() != model.p)
        throw ArgumentError("eta has length " + std::to_string(eta.size()) +
                            " but the model has p = " + std::to_string(model.p));
    return model.psi_b(bind, i, eta) - model.psi_a(bind, i, eta) * theta;
}

LambdaEstimate population_lambda_wate(
    const std::function<double(double)>& eta01,
    const std::function<double(double)>& eta02,
    const std::function<double(double)>& g,
    const std::function<double(Rng&)>& sampler, double theta0,
    std::size_t draws, std::uint64_t seed) {
    if (draws < 2) throw ArgumentError("population_lambda_wate: need draws >= 2");
    Rng rng(seed);
    // A_i = g(X)^2 (eta01 - eta02 - theta0), B_i = g(X); Lambda = mean(A)/mean(B)^2.
    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
    const double nd = static_cast<double>(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = sampler(rng);
        const double gx = g(x);
        const double a = gx * gx * (eta01(x) - eta02(x) - theta0);
        sa += a;
        sb += gx;
        saa += a * a;
        sbb += gx * gx;
        sab += a * gx;
    }
    const double ma = sa / nd, mb = sb / nd;
    if (mb <= 0.0)
        throw DegeneracyError("population_lambda_wate: E[g(X)] estimate is not positive");
    const double value = ma / (mb * mb);
    // Delta method: grad = (1/mb^2, -2 ma/mb^3).
    const double vaa = (saa / nd - ma * ma);
    const double vbb = (sbb / nd - mb * mb);
    const double vab = (sab / nd - ma * mb);
    const double ga = 1.0 / (mb * mb);
    const double gb = -2.0 * ma / (mb * mb * mb);
    double var = ga * ga * vaa + 2.0 * ga * gb * vab + gb * gb * vbb;
    if (var < 0.0) var = 0.0;
    return {value, std::sqrt(var / nd)};
}

std::string model_metadata_json(const MomentModel& model) {
    nlohmann::json j;
    j["id"] = to_string(model.id);
    j["p"] = model.p;
    j["psi_a_is_constant"] = model.psi_a_is_constant;
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& s : model.nuisance_specs) {
        nlohmann::json e;
        switch (s.kind) {
            case NuisanceKind::CondMean: e["kind"] = "cond_mean"; break;
            case NuisanceKind::GroupCondMean: e["kind"] = "group_cond_mean"; break;
            case NuisanceKind::InvGroupProb: e["kind"] = "inv_group_prob"; break;
        }
        if (s.group_role) {
            e["group_role"] = *s.group_role;
            e["group_value"] = s.group_value;
        }
        if (!s.response.terms.empty()) {
            std::string expr;
            for (std::size_t t = 0; t < s.response.terms.size(); ++t) {
                const auto& [role, coef] = s.response.terms[t];
                if (t == 0) {
                    expr += (coef < 0 ? "-" : "");
                } else {
                    expr += (coef < 0 ? " - " : " + ");
                }
                expr += role;
            }
            e["response"] = expr;
        }
        specs.push_back(e);
    }
    j["nuisance_specs"] = specs;
    j["required_roles"] = model.required_roles;
    return j.dump(2);
}

}  // namespace dmlwb
