#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>

#include "dmlwb/crossfit.hpp"
#include "dmlwb/errors.hpp"
#include "dmlwb/simlab.hpp"
#include "dmlwb/stats.hpp"
#include "test_support.hpp"

using namespace dmlwb;

TEST_CASE("partition sizes follow the floor rule") {
    SUBCASE("n=10 K=3 gives {4,3,3}") {
        const FoldPartition p = partition_folds(10, 3, 1);
        CHECK(p.fold_size(1) == 4);
        CHECK(p.fold_size(2) == 3);
        CHECK(p.fold_size(3) == 3);
    }
    SUBCASE("n=6 K=3 gives {2,2,2}") {
        const FoldPartition p = partition_folds(6, 3, 1);
        for (int k = 1; k <= 3; ++k) CHECK(p.fold_size(k) == 2);
    }
    SUBCASE("n=103 K=5 gives {21,21,21,20,20}") {
        const FoldPartition p = partition_folds(103, 5, 9);
        CHECK(p.fold_size(1) == 21);
        CHECK(p.fold_size(2) == 21);
        CHECK(p.fold_size(3) == 21);
        CHECK(p.fold_size(4) == 20);
        CHECK(p.fold_size(5) == 20);
    }
}

TEST_CASE("partition is a partition and is seed-determined") {
    const FoldPartition a = partition_folds(57, 4, 77);
    const FoldPartition b = partition_folds(57, 4, 77);
    const FoldPartition c = partition_folds(57, 4, 78);
    CHECK(a.assignment() == b.assignment());
    CHECK(a.assignment() != c.assignment());
    std::size_t total = 0;
    for (int k = 1; k <= 4; ++k) total += a.fold_rows(k).size();
    CHECK(total == 57);
    // every row appears exactly once
    std::set<std::size_t> seen;
    for (int k = 1; k <= 4; ++k)
        for (std::size_t i : a.fold_rows(k)) CHECK(seen.insert(i).second);
}

TEST_CASE("partition argument errors") {
    CHECK_THROWS_AS(partition_folds(10, 1, 1), ArgumentError);
    CHECK_THROWS_AS(partition_folds(10, 11, 1), ArgumentError);
}

TEST_CASE("leave-one-out limit: K = n gives singleton folds") {
    const std::size_t n = 23;
    const FoldPartition p = partition_folds(n, static_cast<int>(n), 5);
    for (int k = 1; k <= static_cast<int>(n); ++k) {
        CHECK(p.fold_size(k) == 1);
        CHECK(p.complement_rows(k).size() == n - 1);
    }
}

TEST_CASE("crossfit of a constant response is that constant") {
    const std::size_t n = 4;
    const Dataset d = Dataset::create(
        {{"Y", {7.0, 7.0, 7.0, 7.0}}, {"X1", {0.1, 0.3, 0.6, 0.9}}},
        {{roles::outcome, "Y"}, {roles::covariate(1), "X1"}});
    MomentModel m = catalog_model(ModelId::PLM);  // first spec is E[Y|X]
    m.p = 1;
    m.nuisance_specs.resize(1);
    m.required_roles = {roles::outcome};
    m.psi_a = [](const ModelBinding&, std::size_t, std::span<const double>) { return 1.0; };
    m.psi_b = [](const ModelBinding& b, std::size_t i, std::span<const double>) {
        return b.outcome[i];
    };
    const FoldPartition p = partition_folds(n, 2, 3);
    const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, {2, 1.0, 0.2, {}});
    for (std::size_t i = 0; i < n; ++i)
        CHECK(eta.eta[i] == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("oracle passthrough returns the truth columns") {
    const Dataset d = testsup::make_plm_dataset(50, 8);
    const CrossFitEvaluations eta = oracle_passthrough(d, 2, 5);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        CHECK(eta.eta[i * 2 + 0] == d.by_role(roles::truth_eta(1))[i]);
        CHECK(eta.eta[i * 2 + 1] == d.by_role(roles::truth_eta(2))[i]);
    }
    CHECK_THROWS_AS(oracle_passthrough(d, 3, 5), SchemaError);
}

TEST_CASE("fused crossfit equals per-component NwFit evaluation") {
    const std::size_t n = 120;
    const Dataset d = gen_late(n, 404);
    const MomentModel m = catalog_model(ModelId::LATE);
    const FoldPartition p = partition_folds(n, 3, 11);
    const KernelConfig kc{2, 0.8, 0.2, {}};
    const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, kc);

    const auto& x = d.by_role(roles::covariate(1));
    for (int k = 1; k <= 3; ++k) {
        const auto train = p.complement_rows(k);
        const double h = bandwidth(kc.c, train.size(), kc.phi0);
        for (std::size_t j = 0; j < m.p; ++j) {
            const NwFit fit =
                nw_fit(m.nuisance_specs[j], d, train, KernelSpec{kc.order, h, 1});
            for (std::size_t i : p.fold_rows(k)) {
                CHECK(eta.eta[i * m.p + j] ==
                      doctest::Approx(fit.evaluate({&x[i], 1})).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("out-of-fold purity under single-row perturbation") {
    const std::size_t n = 24;
    const Dataset d = testsup::make_ate_family_dataset(n, 15, "ate");
    const MomentModel m = catalog_model(ModelId::ATE);
    const FoldPartition p = partition_folds(n, 3, 2);
    const KernelConfig kc{2, 1.0, 0.2, {}};
    const CrossFitEvaluations base = crossfit_nuisance(d, m, p, kc);

    const std::size_t j = 5;  // perturbed row
    auto y = d.by_role(roles::outcome);
    std::vector<double> y2(y.begin(), y.end());
    y2[j] += 3.0;
    const Dataset d2 = d.with_column("Y", y2);
    const CrossFitEvaluations pert = crossfit_nuisance(d2, m, p, kc);

    bool some_changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        bool same = true;
        for (std::size_t c = 0; c < m.p; ++c)
            same &= (base.eta[i * m.p + c] == pert.eta[i * m.p + c]);
        if (p.fold_of(i) == p.fold_of(j)) {
            CHECK(same);  // training never sees row j for these rows
        } else {
            some_changed |= !same;
        }
    }
    CHECK(some_changed);
}

TEST_CASE("permutation equivariance of the eta matrix") {
    const std::size_t n = 30;
    const Dataset d = testsup::make_plm_dataset(n, 77);
    const MomentModel m = catalog_model(ModelId::PLM);

    // Fixed assignment, then relabel rows by a rotation.
    std::vector<int> assign(n);
    for (std::size_t i = 0; i < n; ++i) assign[i] = static_cast<int>(i % 3) + 1;
    const FoldPartition p = FoldPartition::from_assignment(assign, 3);
    const KernelConfig kc{2, 1.0, 0.25, {}};
    const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, kc);

    auto rot = [n](std::size_t i) { return (i + 7) % n; };  // new index of old row i
    std::vector<double> y(n), dd(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[rot(i)] = d.by_role(roles::outcome)[i];
        dd[rot(i)] = d.by_role(roles::treatment)[i];
        x[rot(i)] = d.by_role(roles::covariate(1))[i];
    }
    std::vector<int> assign2(n);
    for (std::size_t i = 0; i < n; ++i) assign2[rot(i)] = assign[i];
    const Dataset d2 = Dataset::create(
        {{"Y", y}, {"D", dd}, {"X1", x}},
        {{roles::outcome, "Y"}, {roles::treatment, "D"}, {roles::covariate(1), "X1"}});
    const CrossFitEvaluations eta2 =
        crossfit_nuisance(d2, m, FoldPartition::from_assignment(assign2, 3), kc);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < m.p; ++c)
            CHECK(eta2.eta[rot(i) * m.p + c] ==
                  doctest::Approx(eta.eta[i * m.p + c]).epsilon(1e-12));
}

TEST_CASE("bandwidth follows each fold's actual complement size") {
    // K does not divide n, so complements differ in size and thus bandwidth.
    const std::size_t n = 11;
    const Dataset d = testsup::make_plm_dataset(n, 5);
    const MomentModel m = catalog_model(ModelId::PLM);
    const FoldPartition p = partition_folds(n, 3, 1);
    const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, {2, 1.0, 0.2, {}});
    for (int k = 1; k <= 3; ++k)
        CHECK(eta.n0_per_fold[static_cast<std::size_t>(k - 1)] == n - p.fold_size(k));
}

TEST_CASE("crossfit errors carry fold, component and row") {
    // All-control data make the treated-group mean unfittable.
    const std::size_t n = 12;
    std::vector<double> y(n, 1.0), a(n, 0.0), x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (i + 0.5) / n;
    const Dataset d = Dataset::create(
        {{"Y", y}, {"A", a}, {"X1", x}},
        {{roles::outcome, "Y"}, {roles::treatment, "A"}, {roles::covariate(1), "X1"}});
    const MomentModel m = catalog_model(ModelId::ATE);
    const FoldPartition p = partition_folds(n, 3, 1);
    try {
        crossfit_nuisance(d, m, p, {2, 0.5, 0.2, {}});
        FAIL("expected EmptyNeighborhoodError");
    } catch (const EmptyNeighborhoodError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("fold") != std::string::npos);
        CHECK(msg.find("component") != std::string::npos);
        CHECK(msg.find("row") != std::string::npos);
    }
}

TEST_CASE("late crossfit gets closer to the truth as n grows") {
    // Mean squared eta gap across the 6 components, averaged over seeds.
    auto mean_gap = [](std::size_t n, std::uint64_t seed) {
        const Dataset d = gen_late(n, seed);
        const MomentModel m = catalog_model(ModelId::LATE);
        const FoldPartition p = partition_folds(n, 5, seed ^ 0x9E);
        const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, {2, 0.53, 0.2, {}});
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
                const double truth = d.by_role(roles::truth_eta(j + 1))[i];
                const double gap = eta.eta[i * 6 + j] - truth;
                acc += gap * gap;
            }
        return acc / static_cast<double>(n * 6);
    };
    const int seeds = 20;
    double small = 0, big = 0;
    for (int s = 0; s < seeds; ++s) {
        small += mean_gap(500, 900 + s) / seeds;
        big += mean_gap(2000, 900 + s) / seeds;
    }
    CHECK(std::isfinite(small));
    CHECK(big < small);
}

TEST_CASE("eta matrix exports to csv") {
    const std::size_t n = 10;
    const Dataset d = testsup::make_plm_dataset(n, 3);
    const MomentModel m = catalog_model(ModelId::PLM);
    const FoldPartition p = partition_folds(n, 2, 4);
    const CrossFitEvaluations eta = crossfit_nuisance(d, m, p, {2, 1.0, 0.2, {}});
    const std::string path = "/tmp/dmlwb_test_eta.csv";
    write_eta_csv(eta, p, path);
    const Dataset back = load_csv(path, {{roles::covariate(1), "eta_1"}});
    CHECK(back.n_rows() == n);
    CHECK(back.column("eta_2")[3] == doctest::Approx(eta.eta[3 * 2 + 1]).epsilon(1e-15));
    CHECK(back.column("fold_id")[0] == p.fold_of(0));
}
