#include "dmlwb/crossfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "dmlwb/errors.hpp"
#include "dmlwb/stats.hpp"

namespace dmlwb {

FoldPartition FoldPartition::make(std::size_t n, int K, std::uint64_t seed) {
    if (K < 2 || static_cast<std::size_t>(K) > n)
        throw ArgumentError("fold count K must satisfy 2 <= K <= n (K = " +
                            std::to_string(K) + ", n = " + std::to_string(n) + ")");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    shuffle_indices(perm, rng);

    // First (n mod K) folds get floor(n/K) + 1 rows, the rest floor(n/K).
    const std::size_t base = n / static_cast<std::size_t>(K);
    const std::size_t extra = n % static_cast<std::size_t>(K);
    FoldPartition fp;
    fp.K_ = K;
    fp.fold_id_.assign(n, 0);
    fp.sizes_.resize(static_cast<std::size_t>(K));
    std::size_t pos = 0;
    for (int k = 1; k <= K; ++k) {
        const std::size_t sz = base + (static_cast<std::size_t>(k) <= extra ? 1 : 0);
        fp.sizes_[static_cast<std::size_t>(k - 1)] = sz;
        for (std::size_t j = 0; j < sz; ++j) fp.fold_id_[perm[pos++]] = k;
    }
    return fp;
}

FoldPartition FoldPartition::from_assignment(std::vector<int> fold_id, int K) {
    if (K < 2) throw ArgumentError("fold count K must be at least 2");
    FoldPartition fp;
    fp.K_ = K;
    fp.sizes_.assign(static_cast<std::size_t>(K), 0);
    for (int f : fold_id) {
        if (f < 1 || f > K)
            throw ArgumentError("fold assignment value out of range: " + std::to_string(f));
        ++fp.sizes_[static_cast<std::size_t>(f - 1)];
    }
    for (std::size_t s : fp.sizes_)
        if (s == 0) throw ArgumentError("fold assignment leaves an empty fold");
    fp.fold_id_ = std::move(fold_id);
    return fp;
}

std::vector<std::size_t> FoldPartition::fold_rows(int k) const {
    std::vector<std::size_t> out;
    out.reserve(fold_size(k));
    for (std::size_t i = 0; i < fold_id_.size(); ++i)
        if (fold_id_[i] == k) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPartition::complement_rows(int k) const {
    std::vector<std::size_t> out;
    out.reserve(fold_id_.size() - fold_size(k));
    for (std::size_t i = 0; i < fold_id_.size(); ++i)
        if (fold_id_[i] != k) out.push_back(i);
    return out;
}

FoldPartition partition_folds(std::size_t n, int K, std::uint64_t seed) {
    return FoldPartition::make(n, K, seed);
}

std::size_t CrossFitEvaluations::flag_count() const {
    std::size_t c = 0;
    for (auto f : flags) c += f;
    return c;
}

namespace {
constexpr double kDenominatorGuard = 1e-12;
}

CrossFitEvaluations crossfit_nuisance(const Dataset& data, const MomentModel& model,
                                      const FoldPartition& partition,
                                      const KernelConfig& kernel) {
    {
        auto errors = validate_for_model(data, model);
        if (!errors.empty()) throw SchemaError(errors.front());
    }
    const std::size_t n = data.n_rows();
    const std::size_t p = model.p;
    const std::size_t d = data.d_x();
    if (partition.n() != n)
        throw ArgumentError("partition size does not match the dataset");

    CrossFitEvaluations out;
    out.n = n;
    out.p = p;
    out.K = partition.K();
    out.eta.assign(n * p, 0.0);
    out.flags.assign(n, 0);
    out.n0_per_fold.resize(static_cast<std::size_t>(partition.K()));

    // Row-major covariate matrix, shared across folds.
    std::vector<double> xmat(n * d);
    for (std::size_t l = 0; l < d; ++l) {
        const auto& col = data.by_role(roles::covariate(l + 1));
        for (std::size_t i = 0; i < n; ++i) xmat[i * d + l] = col[i];
    }
    // Per-component response and indicator columns, full length.
    std::vector<std::vector<double>> resp(p), ind(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto& spec = model.nuisance_specs[j];
        if (spec.kind != NuisanceKind::InvGroupProb) {
            resp[j].resize(n);
            for (std::size_t i = 0; i < n; ++i)
                resp[j][i] = eval_response(spec.response, data, i);
        }
        if (spec.kind != NuisanceKind::CondMean) {
            const auto& g = data.by_role(*spec.group_role);
            ind[j].resize(n);
            for (std::size_t i = 0; i < n; ++i)
                ind[j][i] = (g[i] == static_cast<double>(spec.group_value)) ? 1.0 : 0.0;
        }
    }

    std::vector<double> num(p), den(p);
    for (int k = 1; k <= partition.K(); ++k) {
        const auto train = partition.complement_rows(k);
        const std::size_t n0 = train.size();
        if (n0 == 0) throw ArgumentError("fold " + std::to_string(k) + " has an empty complement");
        out.n0_per_fold[static_cast<std::size_t>(k - 1)] = n0;
        const double h = bandwidth(kernel.c, n0, kernel.phi0);
        const KernelSpec ks{kernel.order, h, d};

        for (std::size_t i = 0; i < n; ++i) {
            if (partition.fold_of(i) != k) continue;
            std::fill(num.begin(), num.end(), 0.0);
            std::fill(den.begin(), den.end(), 0.0);
            double sum_k = 0.0;
            const double* xi = &xmat[i * d];
            double dx[16];
            for (std::size_t t = 0; t < n0; ++t) {
                const std::size_t l = train[t];
                const double* xl = &xmat[l * d];
                for (std::size_t c = 0; c < d; ++c) dx[c] = xi[c] - xl[c];
                const double w = product_kernel(ks, std::span<const double>(dx, d));
                sum_k += w;
                for (std::size_t j = 0; j < p; ++j) {
                    switch (model.nuisance_specs[j].kind) {
                        case NuisanceKind::CondMean:
                            num[j] += resp[j][l] * w;
                            den[j] += w;
                            break;
                        case NuisanceKind::GroupCondMean:
                            num[j] += resp[j][l] * ind[j][l] * w;
                            den[j] += ind[j][l] * w;
                            break;
                        case NuisanceKind::InvGroupProb:
                            num[j] += w;
                            den[j] += ind[j][l] * w;
                            break;
                    }
                }
            }
            for (std::size_t j = 0; j < p; ++j) {
                double dj = den[j];
                if (model.nuisance_specs[j].kind == NuisanceKind::InvGroupProb &&
                    kernel.propensity_floor && sum_k > 0.0 &&
                    dj < *kernel.propensity_floor * sum_k) {
                    dj = *kernel.propensity_floor * sum_k;
                    if (out.flags[i] < 255) ++out.flags[i];
                }
                if (std::abs(dj) < kDenominatorGuard) {
                    throw EmptyNeighborhoodError(
                        "empty neighborhood / bandwidth too small (fold " +
                            std::to_string(k) + ", component " + std::to_string(j + 1) +
                            ", row " + std::to_string(i + 1) + ")",
                        xi[0]);
                }
                out.eta[i * p + j] = num[j] / dj;
            }
        }
    }
    return out;
}

CrossFitEvaluations oracle_passthrough(const Dataset& data, std::size_t p, int K) {
    const std::size_t n = data.n_rows();
    CrossFitEvaluations out;
    out.n = n;
    out.p = p;
    out.K = K;
    out.eta.resize(n * p);
    out.flags.assign(n, 0);
    for (std::size_t j = 0; j < p; ++j) {
        if (!data.has_role(roles::truth_eta(j + 1)))
            throw SchemaError("oracle run requires role '" + roles::truth_eta(j + 1) +
                              "' to be mapped");
        const auto& col = data.by_role(roles::truth_eta(j + 1));
        for (std::size_t i = 0; i < n; ++i) out.eta[i * p + j] = col[i];
    }
    return out;
}

void write_eta_csv(const CrossFitEvaluations& eta, const FoldPartition& partition,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    for (std::size_t j = 0; j < eta.p; ++j) out << "eta_" << (j + 1) << ',';
    out << "fold_id\n";
    char buf[40];
    for (std::size_t i = 0; i < eta.n; ++i) {
        for (std::size_t j = 0; j < eta.p; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", eta.eta[i * eta.p + j]);
            out << buf << ',';
        }
        out << partition.fold_of(i) << '\n';
    }
}

}  // namespace dmlwb
