#pragma once

#include <cstdint>
#include <vector>

namespace dmlwb {

// ---------------------------------------------------------------------------
// Normal distribution helpers.
//
// norm_cdf and norm_pdf are accurate to a few ulp (erfc based). norm_quantile
// uses Acklam's rational approximation refined by one Newton step against
// norm_cdf, giving absolute error below 1e-13 on (0,1) -- well inside the
// 1e-9 budget needed for confidence intervals and the 1e-12 budget of the
// simulation designs.
// ---------------------------------------------------------------------------
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);  // throws ArgumentError outside (0,1)

// ---------------------------------------------------------------------------
// Deterministic random number generation.
//
// All randomness in the library flows through SplitMix64: a 64-bit counter
// advanced by the golden-ratio constant and passed through a finalizer. The
// stream is fully determined by its seed, is cheap to split, and behaves the
// same on every platform, which is what makes simulation output reproducible
// across runs and worker counts.
// ---------------------------------------------------------------------------

// SplitMix64 finalizer (bit mixer).
inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and a stream index.
// Documented contract: mix_seed(m, s) = mix_bits(m + golden * (s + 1)).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_bits(master + 0x9E3779B97F4A7C15ull * (stream + 1ull));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix_bits(state_);
    }

    // Uniform on the open interval (0,1); never returns an exact 0 or 1 so
    // it can be pushed through norm_quantile.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

    double normal() { return norm_quantile(uniform01()); }

    // Poisson by CDF inversion. Intended for small rates (the simulation
    // designs use lambda <= 2.72); the walk is capped defensively.
    long poisson(double lambda);

    // Unbiased-enough bounded draw via 128-bit multiply-high. The modulo-free
    // bias is bound/2^64, irrelevant at the sample sizes handled here.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by the SplitMix64 stream.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

// Mean and (unbiased) standard error of the mean.
struct MeanSe {
    double mean;
    double se;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace dmlwb
