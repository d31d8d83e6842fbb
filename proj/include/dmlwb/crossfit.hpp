#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmlwb/dataset.hpp"
#include "dmlwb/kernel.hpp"
#include "dmlwb/moments.hpp"

namespace dmlwb {

// K-fold assignment of rows. Fully determined by (n, K, seed): a seeded
// Fisher-Yates permutation of row indices cut into K contiguous blocks, the
// first (n mod K) blocks one element larger.
class FoldPartition {
public:
    static FoldPartition make(std::size_t n, int K, std::uint64_t seed);
    // Builds a partition from an explicit assignment (1-based fold ids).
    static FoldPartition from_assignment(std::vector<int> fold_id, int K);

    int K() const { return K_; }
    std::size_t n() const { return fold_id_.size(); }
    int fold_of(std::size_t i) const { return fold_id_[i]; }
    const std::vector<int>& assignment() const { return fold_id_; }
    std::size_t fold_size(int k) const { return sizes_[static_cast<std::size_t>(k - 1)]; }
    // Row indices of fold k (1-based k), in ascending order.
    std::vector<std::size_t> fold_rows(int k) const;
    // Rows outside fold k, ascending.
    std::vector<std::size_t> complement_rows(int k) const;

private:
    FoldPartition() = default;
    int K_ = 0;
    std::vector<int> fold_id_;
    std::vector<std::size_t> sizes_;
};

FoldPartition partition_folds(std::size_t n, int K, std::uint64_t seed);

struct KernelConfig {
    int order = 2;          // s
    double c = 1.0;         // bandwidth constant
    double phi0 = 0.2;      // bandwidth exponent
    std::optional<double> propensity_floor;
};

// Out-of-fold nuisance evaluations: row i of eta is produced by the fit
// trained on the complement of i's fold. flags[i] counts propensity-floor
// clips at row i.
struct CrossFitEvaluations {
    std::size_t n = 0;
    std::size_t p = 0;
    int K = 0;
    std::vector<double> eta;            // n x p, row-major
    std::vector<std::uint8_t> flags;    // per-row floor-trigger count
    std::vector<std::size_t> n0_per_fold;

    std::span<const double> row(std::size_t i) const {
        return {eta.data() + i * p, p};
    }
    std::size_t flag_count() const;
};

// Fits all p components of the model on each fold complement (bandwidth
// recomputed from the complement's actual size) and evaluates them at the
// in-fold points. The kernel weight at a (point, training row) pair is
// computed once and shared across components, which equals running the
// per-component NwFit path at matching accumulation order.
// Denominator failures are rethrown annotated with (fold, component, row).
CrossFitEvaluations crossfit_nuisance(const Dataset& data, const MomentModel& model,
                                      const FoldPartition& partition,
                                      const KernelConfig& kernel);

// Oracle bypass: eta row i is taken from the truth_eta_1..p columns.
CrossFitEvaluations oracle_passthrough(const Dataset& data, std::size_t p, int K);

// Debug export of the eta matrix (columns eta_1..eta_p plus fold_id).
void write_eta_csv(const CrossFitEvaluations& eta, const FoldPartition& partition,
                   const std::string& path);

}  // namespace dmlwb
