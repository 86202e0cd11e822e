#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "tdpb/common.hpp"

namespace tdpb {

/// Closed-testing lower bound for the number of true discoveries in the full
/// set, with Simes local tests: d = m - h, where h is the size of the
/// largest subset no Simes test rejects.
struct gs_result {
    int d = 0;
    int h = 0;
    double alpha = 0.0;
};

namespace detail {

inline std::vector<double> checked_sorted_pvalues(std::span<const double> pvalues) {
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0)) throw domain_error("gs_bound: p-values must be in [0,1]");
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

/// Simes at level alpha rejects I iff some p_(j:I) <= j*alpha/|I|.
inline bool simes_rejects(std::span<const double> sorted_subset, double alpha) {
    const int n = static_cast<int>(sorted_subset.size());
    for (int j = 1; j <= n; ++j)
        if (sorted_subset[j - 1] <= j * alpha / n) return true;
    return false;
}

} // namespace detail

/// Exhaustive closed testing over every non-empty subset; the source of
/// truth the polynomial shortcut must match. Combinatorial, so m <= 15.
inline gs_result gs_bound_oracle(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("gs_bound: alpha must be in (0,1)");
    const int m = static_cast<int>(pvalues.size());
    if (m > 15) throw size_error("gs_bound_oracle: m must be <= 15");
    if (m == 0) return {0, 0, alpha};

    // A subset survives closed testing iff some superset survives its local
    // test, so the largest locally-surviving subset already has maximal size.
    int h = 0;
    std::vector<double> buf;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        buf.clear();
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) buf.push_back(pvalues[i]);
        std::sort(buf.begin(), buf.end());
        if (!detail::simes_rejects(buf, alpha)) h = std::max(h, static_cast<int>(buf.size()));
    }
    return {m - h, h, alpha};
}

/// Polynomial shortcut. If any size-i subset survives Simes, the subset of
/// the i largest p-values survives (replacing entries with larger p-values
/// can only raise order statistics), so only those candidates need checking.
/// O(m^2) worst case; equals gs_bound_oracle on every instance.
inline gs_result gs_bound(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("gs_bound: alpha must be in (0,1)");
    const int m = static_cast<int>(pvalues.size());
    if (m == 0) return {0, 0, alpha};
    auto sorted = detail::checked_sorted_pvalues(pvalues);

    int h = 0;
    for (int i = m; i >= 1; --i) {
        bool survives = true;
        for (int j = 1; j <= i; ++j) {
            if (sorted[m - i + j - 1] <= j * alpha / i) {
                survives = false;
                break;
            }
        }
        if (survives) {
            h = i;
            break;
        }
    }
    return {m - h, h, alpha};
}

} // namespace tdpb
