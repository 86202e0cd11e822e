#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tdpb/common.hpp"

namespace tdpb {

/// Philox4x32-10 counter-based generator. A stream is keyed by
/// (seed, stream_id); outputs depend only on the key and the block counter,
/// so replications drawn from distinct streams are order-free and
/// reproducible under any parallel schedule.
class counter_rng {
  public:
    counter_rng(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(stream_id),
               static_cast<std::uint32_t>(stream_id >> 32)} {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            block_ = philox(ctr_, key_);
            if (++ctr_[0] == 0) ++ctr_[1]; // 64-bit block counter
            have_ = 4;
        }
        return block_[4 - have_--];
    }

    /// Uniform on the open interval (0,1).
    double next_uniform() { return (next_u32() + 0.5) * 0x1p-32; }

    /// Standard normal via Box-Muller on counter-based uniforms.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// chi-square(nu) via the Marsaglia-Tsang gamma(nu/2, 2) sampler.
    double next_chi_squared(int nu) {
        if (nu < 1) throw parameter_error("next_chi_squared: nu must be >= 1");
        double k = nu / 2.0;
        if (k < 1.0) {
            // boost shape below 1, then apply the standard power correction
            double g = next_gamma_shape(k + 1.0);
            return 2.0 * g * std::pow(next_uniform(), 1.0 / k);
        }
        return 2.0 * next_gamma_shape(k);
    }

  private:
    double next_gamma_shape(double k) {
        double d = k - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> block_{};
    int have_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Seeded disjoint index partition of {0,...,n-1} into sizes (n_first,
/// n_second), n_first + n_second <= n; Fisher-Yates on a counter stream.
inline std::pair<std::vector<int>, std::vector<int>> split_indices(int n, int n_first,
                                                                   int n_second,
                                                                   std::uint64_t seed) {
    if (n_first < 0 || n_second < 0 || n_first + n_second > n)
        throw parameter_error("split_indices: sizes must be non-negative and sum to at most n");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    counter_rng rng(seed, 0x73706c6974ULL); // fixed "split" sub-stream tag
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u32() % static_cast<std::uint32_t>(i + 1));
        std::swap(idx[i], idx[j]);
    }
    return {std::vector<int>(idx.begin(), idx.begin() + n_first),
            std::vector<int>(idx.begin() + n_first, idx.begin() + n_first + n_second)};
}

} // namespace tdpb
