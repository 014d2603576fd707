// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace lmk {

/// Seeded random source with a fully pinned-down bit stream.
///
/// std::mt19937_64 output is specified by the standard, but the
/// distribution adaptors (normal_distribution et al.) are not; their
/// algorithms differ between standard libraries. Every draw here is
/// derived from raw engine words with a fixed recipe so that a seed
/// reproduces the same values on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 bits of entropy.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive, by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(next_u64());  // full range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return lo + static_cast<std::int64_t>(x % range);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller. Consumes exactly two engine words
    /// per draw; the spare is discarded so the stream position does not
    /// depend on call history.
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <typename Derived>
    void fill_gaussian(Eigen::ArrayBase<Derived>& out) {
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out(i) = static_cast<typename Derived::Scalar>(gaussian());
    }

    Eigen::ArrayXf gaussian_array(Eigen::Index n) {
        Eigen::ArrayXf a(n);
        fill_gaussian(a);
        return a;
    }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace lmk
