#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/critical_vector.hpp"

namespace tdpb {

struct stepup_result {
    int num_rejections = 0;
    std::vector<int> rejected_indices; // original indices, ascending
};

/// Number of rejections of the step-up rule on an already sorted p-value
/// vector: r = max{ i : p_(i) <= t_i }, 0 if no index qualifies.
inline int stepup_count_sorted(std::span<const double> sorted_p, const critical_vector& cv) {
    const int m = cv.m();
    if (static_cast<int>(sorted_p.size()) != m)
        throw dimension_error("stepup: p-value count must match critical vector length");
    for (int i = m; i >= 1; --i) {
        if (sorted_p[i - 1] <= cv.values[i - 1]) return i;
    }
    return 0;
}

/// Step-up decision rule. Rejects the hypotheses carrying the r smallest
/// p-values; ties are broken by original index (this never changes r).
inline stepup_result stepup_reject(std::span<const double> pvalues, const critical_vector& cv) {
    const int m = cv.m();
    if (static_cast<int>(pvalues.size()) != m)
        throw dimension_error("stepup_reject: p-value count must match critical vector length");
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0)) throw domain_error("stepup_reject: p-values must be in [0,1]");

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pvalues[a] != pvalues[b]) return pvalues[a] < pvalues[b];
        return a < b;
    });

    stepup_result res;
    for (int i = m; i >= 1; --i) {
        if (pvalues[order[i - 1]] <= cv.values[i - 1]) {
            res.num_rejections = i;
            break;
        }
    }
    res.rejected_indices.assign(order.begin(), order.begin() + res.num_rejections);
    std::sort(res.rejected_indices.begin(), res.rejected_indices.end());
    return res;
}

} // namespace tdpb
