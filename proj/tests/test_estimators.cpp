#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dmlwb/errors.hpp"
#include "dmlwb/estimators.hpp"
#include "dmlwb/simlab.hpp"
#include "dmlwb/stats.hpp"
#include "test_support.hpp"

using namespace dmlwb;

namespace {

// Dataset with Y = (1,2,3,4) and truth columns for the mean-style model
// psi_a = 1, psi_b = Y (an ATE model with eta pinned so psi_b reduces to Y:
// eta1 = 0, eta2 = 0, eta3 = 1/A... easier: use a custom model).
MomentModel mean_model() {
    MomentModel m;
    m.id = ModelId::CUSTOM;
    m.p = 1;
    m.psi_a = [](const ModelBinding&, std::size_t, std::span<const double>) { return 1.0; };
    m.psi_b = [](const ModelBinding& b, std::size_t i, std::span<const double>) {
        return b.outcome[i];
    };
    m.psi_a_is_constant = true;
    NuisanceComponentSpec spec;
    spec.kind = NuisanceKind::CondMean;
    spec.response.terms = {{roles::outcome, 1.0}};
    m.nuisance_specs = {spec};
    m.required_roles = {roles::outcome};
    return m;
}

Dataset mean_data() {
    return Dataset::create(
        {{"Y", {1.0, 2.0, 3.0, 4.0}},
         {"X1", {0.1, 0.2, 0.3, 0.4}},
         {"truth_eta_1", {0.0, 0.0, 0.0, 0.0}}},
        {{roles::outcome, "Y"},
         {roles::covariate(1), "X1"},
         {roles::truth_eta(1), "truth_eta_1"}});
}

}  // namespace

TEST_CASE("dml1 fold arithmetic on a pinned example") {
    const Dataset d = mean_data();
    const MomentModel m = mean_model();
    // folds {rows 0,1}, {rows 2,3}: fold means 1.5 and 3.5, average 2.5
    const FoldPartition p = FoldPartition::from_assignment({1, 1, 2, 2}, 2);
    const CrossFitEvaluations eta = oracle_passthrough(d, 1, 2);
    const DmlEstimate est = dml1(d, m, eta, p, 0.05);
    REQUIRE(est.per_fold_theta.size() == 2);
    CHECK(est.per_fold_theta[0] == doctest::Approx(1.5));
    CHECK(est.per_fold_theta[1] == doctest::Approx(3.5));
    CHECK(est.theta_hat == doctest::Approx(2.5));
    CHECK(est.method == Method::DML1);
}

TEST_CASE("dml2 is the global ratio") {
    const Dataset d = mean_data();
    const MomentModel m = mean_model();
    const CrossFitEvaluations eta = oracle_passthrough(d, 1, 2);
    const DmlEstimate est = dml2(d, m, eta, 0.05);
    CHECK(est.theta_hat == doctest::Approx(2.5));
    // sigma2 = mean((Y - 2.5)^2) / 1 = 1.25
    CHECK(est.sigma2_hat == doctest::Approx(1.25));
    // CI: 2.5 -+ 1.9599640 * sqrt(1.25/4) = 2.5 -+ 1.0956532
    CHECK(est.ci_lower == doctest::Approx(1.4043468).epsilon(1e-6));
    CHECK(est.ci_upper == doctest::Approx(3.5956532).epsilon(1e-6));
}

TEST_CASE("proportional psi_b gives the exact ratio constant") {
    // psi_b = c * psi_a for all rows -> theta = c for any data.
    MomentModel m;
    m.id = ModelId::CUSTOM;
    m.p = 1;
    const double c = -3.25;
    m.psi_a = [](const ModelBinding& b, std::size_t i, std::span<const double>) {
        return 1.0 + b.outcome[i] * b.outcome[i];
    };
    m.psi_b = [c](const ModelBinding& b, std::size_t i, std::span<const double>) {
        return c * (1.0 + b.outcome[i] * b.outcome[i]);
    };
    NuisanceComponentSpec spec;
    spec.kind = NuisanceKind::CondMean;
    spec.response.terms = {{roles::outcome, 1.0}};
    m.nuisance_specs = {spec};
    m.required_roles = {roles::outcome};
    const Dataset d = mean_data();
    const CrossFitEvaluations eta = oracle_passthrough(d, 1, 2);
    CHECK(dml2(d, m, eta, 0.05).theta_hat == doctest::Approx(c).epsilon(1e-15));
}

TEST_CASE("remark: dml1 equals dml2 when psi_a is constant and K divides n") {
    Rng rng(50);
    for (int trial = 0; trial < 10; ++trial) {
        const int K = 2 + static_cast<int>(rng.below(3));       // 2..4
        const std::size_t n = static_cast<std::size_t>(K) * (5 + rng.below(20));
        const Dataset d = testsup::make_ate_family_dataset(n, 600 + trial, "ate");
        const MomentModel m = catalog_model(ModelId::ATE);
        const FoldPartition p = partition_folds(n, K, 77 + trial);
        const CrossFitEvaluations eta = oracle_passthrough(d, 4, K);
        const double t1 = dml1(d, m, eta, p, 0.05).theta_hat;
        const double t2 = dml2(d, m, eta, 0.05).theta_hat;
        CHECK(std::abs(t1 - t2) < 1e-12);
    }
}

TEST_CASE("att-did hand-built rows match a direct ratio") {
    // n = 6 with oracle eta; the expected value is computed with the
    // independent direct-summation oracle.
    const Dataset d = Dataset::create(
        {{"Y1", {5.0, 3.0, 4.0, 2.5, 6.0, 1.0}},
         {"Y0", {1.0, 0.5, 2.0, 2.0, 3.0, 0.5}},
         {"A", {1.0, 0.0, 1.0, 0.0, 1.0, 0.0}},
         {"X1", {0.1, 0.2, 0.4, 0.5, 0.7, 0.9}},
         {"truth_eta_1", {1.2, 1.0, 1.4, 1.1, 0.9, 1.3}},
         {"truth_eta_2", {1.5, 1.4, 1.6, 1.7, 1.2, 1.3}}},
        {{roles::outcome, "Y1"},
         {roles::outcome_pre, "Y0"},
         {roles::treatment, "A"},
         {roles::covariate(1), "X1"},
         {roles::truth_eta(1), "truth_eta_1"},
         {roles::truth_eta(2), "truth_eta_2"}});
    const MomentModel m = catalog_model(ModelId::ATT_DID);
    const CrossFitEvaluations eta = oracle_passthrough(d, 2, 2);
    const auto rows = testsup::oracle_rows(d, eta);
    const auto res = testsup::brute_force_estimates("att-did", rows, {1, 1, 1, 2, 2, 2}, 2);
    REQUIRE(res.ok);
    CHECK(dml2(d, m, eta, 0.05).theta_hat == doctest::Approx(res.dml2).epsilon(1e-12));
    const FoldPartition p = FoldPartition::from_assignment({1, 1, 1, 2, 2, 2}, 2);
    CHECK(dml1(d, m, eta, p, 0.05).theta_hat == doctest::Approx(res.dml1).epsilon(1e-12));
}

TEST_CASE("size-weighted dml1 recovers the pooled mean under constant psi_a") {
    // K does not divide n, so the unweighted fold average differs from the
    // pooled mean while the size-weighted variant matches it exactly.
    const Dataset d = Dataset::create(
        {{"Y", {1.0, 2.0, 3.0, 4.0, 10.0}},
         {"X1", {0.1, 0.2, 0.3, 0.4, 0.5}},
         {"truth_eta_1", {0, 0, 0, 0, 0}}},
        {{roles::outcome, "Y"},
         {roles::covariate(1), "X1"},
         {roles::truth_eta(1), "truth_eta_1"}});
    const MomentModel m = mean_model();
    const CrossFitEvaluations eta = oracle_passthrough(d, 1, 2);
    const FoldPartition p = FoldPartition::from_assignment({1, 1, 1, 2, 2}, 2);
    const double unweighted = dml1(d, m, eta, p, 0.05, false).theta_hat;
    const double weighted = dml1(d, m, eta, p, 0.05, true).theta_hat;
    CHECK(unweighted == doctest::Approx(0.5 * (2.0 + 7.0)));
    CHECK(weighted == doctest::Approx(4.0));  // pooled mean of Y
    CHECK(weighted == doctest::Approx(dml2(d, m, eta).theta_hat).epsilon(1e-15));
}

TEST_CASE("fold degeneracy raises a named error") {
    // Second fold has no treated units: sum psi_a = 0 for the ATT model.
    const Dataset d = Dataset::create(
        {{"Y", {1.0, 2.0, 3.0, 4.0}},
         {"A", {1.0, 1.0, 0.0, 0.0}},
         {"X1", {0.1, 0.2, 0.3, 0.4}},
         {"truth_eta_1", {0.5, 0.5, 0.5, 0.5}},
         {"truth_eta_2", {1.5, 1.5, 1.5, 1.5}}},
        {{roles::outcome, "Y"},
         {roles::treatment, "A"},
         {roles::covariate(1), "X1"},
         {roles::truth_eta(1), "truth_eta_1"},
         {roles::truth_eta(2), "truth_eta_2"}});
    const MomentModel m = catalog_model(ModelId::ATT);
    const CrossFitEvaluations eta = oracle_passthrough(d, 2, 2);
    const FoldPartition p = FoldPartition::from_assignment({1, 1, 2, 2}, 2);
    try {
        dml1(d, m, eta, p, 0.05);
        FAIL("expected DegeneracyError");
    } catch (const DegeneracyError& e) {
        CHECK(std::string(e.what()).find("fold 2") != std::string::npos);
    }
    // dml2 survives: the global sum is 2.
    CHECK_NOTHROW(dml2(d, m, eta, 0.05));
}

TEST_CASE("sigma2_hat special cases") {
    const Dataset d = mean_data();
    const MomentModel m = mean_model();
    const CrossFitEvaluations eta = oracle_passthrough(d, 1, 2);
    CHECK(sigma2_hat(d, m, eta, 2.5) == doctest::Approx(1.25));
    // With theta matching every row exactly, sigma2 = 0: use constant Y.
    const Dataset dc = Dataset::create(
        {{"Y", {3.0, 3.0, 3.0}}, {"X1", {0.1, 0.2, 0.3}},
         {"truth_eta_1", {0.0, 0.0, 0.0}}},
        {{roles::outcome, "Y"}, {roles::covariate(1), "X1"},
         {roles::truth_eta(1), "truth_eta_1"}});
    const CrossFitEvaluations etac = oracle_passthrough(dc, 1, 2);
    CHECK(sigma2_hat(dc, m, etac, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("confidence interval pinned quantiles") {
    SUBCASE("degenerate variance collapses the interval") {
        const auto [lo, hi] = confidence_interval(2.0, 0.0, 10, 0.05);
        CHECK(lo == 2.0);
        CHECK(hi == 2.0);
    }
    SUBCASE("alpha = 0.05") {
        const auto [lo, hi] = confidence_interval(2.5, 1.25, 4, 0.05);
        const double half = norm_quantile(0.975) * std::sqrt(1.25 / 4.0);
        CHECK(lo == doctest::Approx(2.5 - half).epsilon(1e-12));
        CHECK(hi == doctest::Approx(2.5 + half).epsilon(1e-12));
        CHECK(lo == doctest::Approx(1.4043468).epsilon(1e-6));
        CHECK(hi == doctest::Approx(3.5956532).epsilon(1e-6));
    }
    SUBCASE("alpha = 0.32 half-width is close to the plain se") {
        const auto [lo, hi] = confidence_interval(0.0, 1.0, 1, 0.32);
        CHECK(hi == doctest::Approx(norm_quantile(0.84)).epsilon(1e-9));
        CHECK(hi == doctest::Approx(0.9945).epsilon(0.005));
    }
}

TEST_CASE("joint scaling invariance of all four methods") {
    const std::size_t n = 60;
    const Dataset d = testsup::make_plm_dataset(n, 300);
    const MomentModel base = catalog_model(ModelId::PLM);
    MomentModel scaled = base;
    const double c = -7.5;
    scaled.psi_a = [base, c](const ModelBinding& b, std::size_t i,
                             std::span<const double> e) { return c * base.psi_a(b, i, e); };
    scaled.psi_b = [base, c](const ModelBinding& b, std::size_t i,
                             std::span<const double> e) { return c * base.psi_b(b, i, e); };
    scaled.psi_a_is_constant = false;

    const FoldPartition p = partition_folds(n, 4, 12);
    const CrossFitEvaluations eta = crossfit_nuisance(d, base, p, {2, 1.0, 0.2, {}});

    const DmlEstimate a1 = dml1(d, base, eta, p), b1 = dml1(d, scaled, eta, p);
    CHECK(a1.theta_hat == doctest::Approx(b1.theta_hat).epsilon(1e-10));
    CHECK(a1.sigma2_hat == doctest::Approx(b1.sigma2_hat).epsilon(1e-10));
    CHECK(a1.ci_lower == doctest::Approx(b1.ci_lower).epsilon(1e-10));

    const DmlEstimate a2 = dml2(d, base, eta), b2 = dml2(d, scaled, eta);
    CHECK(a2.theta_hat == doctest::Approx(b2.theta_hat).epsilon(1e-10));
    CHECK(a2.sigma2_hat == doctest::Approx(b2.sigma2_hat).epsilon(1e-10));
    CHECK(a2.ci_upper == doctest::Approx(b2.ci_upper).epsilon(1e-10));

    auto [o1a, o2a] = oracle_estimates(d, base, p);
    auto [o1b, o2b] = oracle_estimates(d, scaled, p);
    CHECK(o1a.theta_hat == doctest::Approx(o1b.theta_hat).epsilon(1e-10));
    CHECK(o2a.theta_hat == doctest::Approx(o2b.theta_hat).epsilon(1e-10));
}

TEST_CASE("oracle2 ignores the partition, oracle1 does not") {
    const std::size_t n = 240;
    const Dataset d = gen_late(n, 88);
    const MomentModel m = catalog_model(ModelId::LATE);
    const FoldPartition p1 = partition_folds(n, 4, 1);
    const FoldPartition p2 = partition_folds(n, 4, 2);
    auto [a1, a2] = oracle_estimates(d, m, p1);
    auto [b1, b2] = oracle_estimates(d, m, p2);
    CHECK(a2.theta_hat == b2.theta_hat);
    CHECK(a1.theta_hat != b1.theta_hat);
}

TEST_CASE("oracle equals the plain sample ratio when psi_a is constant") {
    const std::size_t n = 40;
    const Dataset d = testsup::make_ate_family_dataset(n, 1000, "ate");
    const MomentModel m = catalog_model(ModelId::ATE);
    const FoldPartition p = partition_folds(n, 5, 3);
    auto [o1, o2] = oracle_estimates(d, m, p);
    // Direct ratio of sums.
    const CrossFitEvaluations eta = oracle_passthrough(d, 4, 5);
    const auto psi = compute_psi(d, m, eta);
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += psi.a[i];
        sb += psi.b[i];
    }
    CHECK(o1.theta_hat == doctest::Approx(sb / sa).epsilon(1e-12));
    CHECK(o2.theta_hat == doctest::Approx(sb / sa).epsilon(1e-12));
}

TEST_CASE("dml1 with oracle eta drifts more at K=20 than K=2 on the late design") {
    // 500 seeds, n = 1000. |mean theta - theta0| should be visibly larger at
    // K = 20 (fold size 50) than at K = 2.
    const std::size_t n = 1000;
    const int reps = 500;
    double sum2 = 0, sum20 = 0;
    for (int r = 0; r < reps; ++r) {
        const Dataset d = gen_late(n, mix_seed(31337, r));
        const MomentModel m = catalog_model(ModelId::LATE);
        for (int K : {2, 20}) {
            const FoldPartition p = partition_folds(n, K, mix_seed(777, r * 100 + K));
            auto [o1, o2] = oracle_estimates(d, m, p);
            (K == 2 ? sum2 : sum20) += o1.theta_hat;
        }
    }
    const double bias2 = std::abs(sum2 / reps);
    const double bias20 = std::abs(sum20 / reps);
    CHECK(bias20 > bias2);
}

TEST_CASE("estimate record serializes the documented fields") {
    const Dataset d = mean_data();
    const DmlEstimate est = dml2(d, mean_model(), oracle_passthrough(d, 1, 2), 0.05);
    const std::string j = est.to_json();
    for (const char* key : {"\"method\"", "\"theta_hat\"", "\"se\"", "\"ci_lower\"",
                            "\"ci_upper\"", "\"K\"", "\"n\"", "\"alpha\"", "\"flags\""})
        CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("estimation config validation") {
    EstimationConfig cfg;
    cfg.K = 1;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.K = 5;
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.alpha = 0.05;
    cfg.kernel_order = 5;
    CHECK_THROWS_AS(cfg.validate(100), ArgumentError);
    cfg.kernel_order = 6;
    CHECK_NOTHROW(cfg.validate(100));
}
