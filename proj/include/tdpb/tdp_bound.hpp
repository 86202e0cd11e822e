#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/critical_vector.hpp"
#include "tdpb/rejection_dist.hpp"
#include "tdpb/stepup.hpp"

namespace tdpb {

/// Shrinkage factor stored as the exact rational num/den so that the ceiling
/// in the bound never suffers floating rounding at integer boundaries.
struct gamma_value {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool operator==(const gamma_value& o) const { return num * o.den == o.num * den; }
    bool operator<(const gamma_value& o) const { return num * o.den < o.num * den; }

    /// ceil(r * num/den) in exact integer arithmetic.
    std::int64_t ceil_times(std::int64_t r) const {
        if (num == 0 || r == 0) return 0;
        return (r * num + den - 1) / den;
    }
};

inline constexpr int kEllSentinel = -1; // ell is undefined for the m1=0 candidate

/// gamma_{m1} for all candidates plus their minimum gamma*.
struct gamma_table {
    double alpha = 0.0;
    std::vector<gamma_value> gammas; // size m+1
    std::vector<int> ell;            // ell_{m1}; kEllSentinel at m1 = 0
    gamma_value star{1, 1};

    int m() const { return static_cast<int>(gammas.size()) - 1; }
};

namespace detail {

/// Theorem-2 scan on a precomputed pmf. For m1 = 0 the answer is 1 or 0
/// depending on whether P(R=0) >= 1-alpha; otherwise gamma = m1/ell with
/// ell the first index >= m1 whose cumulative probability crosses 1-alpha
/// (the crossing at ell = m is guaranteed since P(R <= m) = 1; ties in the
/// >= comparison resolve in favor of crossing, as written).
inline std::pair<gamma_value, int> gamma_from_pmf(const rejection_pmf& pmf, int m1,
                                                  double alpha) {
    const int m = pmf.m();
    if (m1 == 0) {
        bool ok = pmf.probs[0] >= 1.0 - alpha;
        return {gamma_value{ok ? 1 : 0, 1}, kEllSentinel};
    }
    compensated_sum cum;
    for (int l = 0; l < m1; ++l) cum.add(pmf.probs[l]);
    int ell = m;
    for (int l = m1; l <= m; ++l) {
        cum.add(pmf.probs[l]);
        if (cum.value() >= 1.0 - alpha) {
            ell = l;
            break;
        }
    }
    return {gamma_value{m1, ell}, ell};
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must be in (0,1)");
}

} // namespace detail

/// gamma_{m1} for a single candidate.
struct gamma_result {
    gamma_value gamma;
    int ell = kEllSentinel;
};

inline gamma_result gamma_for(int m1_candidate, const alt_pvalue_dist& f_alt,
                              const critical_vector& cv, double alpha) {
    detail::check_alpha(alpha);
    two_group_model model{cv.m(), m1_candidate, f_alt};
    auto pmf = exact_rejection_pmf(model, cv);
    auto [g, ell] = detail::gamma_from_pmf(pmf, m1_candidate, alpha);
    return {g, ell};
}

/// Full gamma table over all m1 candidates and gamma* = min. Deterministic
/// and data-independent: depends only on (F, critical vector, alpha).
inline gamma_table gamma_star_table(const alt_pvalue_dist& f_alt, const critical_vector& cv,
                                    double alpha) {
    detail::check_alpha(alpha);
    const int m = cv.m();
    auto pmfs = all_rejection_pmfs(f_alt, cv);
    gamma_table table;
    table.alpha = alpha;
    table.gammas.resize(m + 1);
    table.ell.resize(m + 1);
    table.star = gamma_value{1, 1};
    for (int m1 = 0; m1 <= m; ++m1) {
        auto [g, ell] = detail::gamma_from_pmf(pmfs[m1], m1, alpha);
        table.gammas[m1] = g;
        table.ell[m1] = ell;
        if (g < table.star) table.star = g;
    }
    return table;
}

/// Lower confidence bound m1_hat = ceil(r * gamma*) plus derived quantities.
struct bound_result {
    int r = 0;
    gamma_value gamma_star;
    int m1_hat = 0;
    int m0_hat = 0; // upper confidence bound for false discoveries, m - m1_hat
    double tdp_hat = 0.0;
    gamma_table table;
};

inline bound_result bound_from_table(int r, gamma_table table) {
    const int m = table.m();
    if (r < 0 || r > m) throw parameter_error("bound_from_table: r must be in [0, m]");
    bound_result res;
    res.r = r;
    res.gamma_star = table.star;
    res.m1_hat = static_cast<int>(table.star.ceil_times(r));
    res.m0_hat = m - res.m1_hat;
    res.tdp_hat = static_cast<double>(res.m1_hat) / m;
    res.table = std::move(table);
    return res;
}

/// End-to-end bound: step-up rejections on the observed p-values, then
/// m1_hat = ceil(r * gamma*). gamma* never touches the data.
inline bound_result compute_bound(std::span<const double> pvalues, const critical_vector& cv,
                                  const alt_pvalue_dist& f_alt, double alpha) {
    auto su = stepup_reject(pvalues, cv);
    auto table = gamma_star_table(f_alt, cv, alpha);
    return bound_from_table(su.num_rejections, std::move(table));
}

} // namespace tdpb
