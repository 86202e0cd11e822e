#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tdpb/common.hpp"

namespace tdpb {

/// Selection rule for the t-statistics entering the effect-size estimate.
struct threshold_rule {
    enum class kind { t_quantile, fixed_p, bonferroni, sidak };

    kind which = kind::fixed_p;
    double param = 0.0; // omega for t_quantile; c or a otherwise

    static threshold_rule t_quantile(double omega) { return make(kind::t_quantile, omega); }
    static threshold_rule fixed_p(double c) { return make(kind::fixed_p, c); }
    static threshold_rule bonferroni(double a) { return make(kind::bonferroni, a); }
    static threshold_rule sidak(double a) { return make(kind::sidak, a); }

    /// p-value cutoff h for the p-value based rules: c, a/m, or
    /// 1 - (1-a)^(1/m).
    double pvalue_threshold(int m) const {
        if (m < 1) throw parameter_error("threshold_rule: m must be >= 1");
        switch (which) {
        case kind::fixed_p: return param;
        case kind::bonferroni: return param / m;
        case kind::sidak: return -std::expm1(std::log1p(-param) / m);
        case kind::t_quantile:
            throw parameter_error("threshold_rule: quantile rule has no p-value threshold");
        }
        return 0.0;
    }

  private:
    static threshold_rule make(kind k, double p) {
        if (!(p > 0.0 && p < 1.0))
            throw parameter_error("threshold_rule: parameter must be in (0,1)");
        return threshold_rule{k, p};
    }
};

namespace detail {

/// Linear-interpolation empirical quantile (R default, type 7).
inline double empirical_quantile(std::vector<double> sorted, double omega) {
    const std::size_t n = sorted.size();
    if (n == 0) throw parameter_error("empirical_quantile: empty sample");
    double h = (n - 1) * omega;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

} // namespace detail

/// Keeps the t-statistics the rule selects as alternatives: those at or above
/// the empirical omega-quantile, or those whose p-value is at most h.
inline std::vector<double> select_statistics(std::span<const double> tvalues,
                                             std::span<const double> pvalues,
                                             const threshold_rule& rule) {
    if (tvalues.size() != pvalues.size())
        throw dimension_error("select_statistics: t/p length mismatch");
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0))
            throw domain_error("select_statistics: p-values must be in [0,1]");
    std::vector<double> out;
    if (rule.which == threshold_rule::kind::t_quantile) {
        std::vector<double> sorted(tvalues.begin(), tvalues.end());
        std::sort(sorted.begin(), sorted.end());
        double q = detail::empirical_quantile(std::move(sorted), rule.param);
        for (double t : tvalues)
            if (t >= q) out.push_back(t);
        return out;
    }
    double h = rule.pvalue_threshold(static_cast<int>(pvalues.size()));
    for (std::size_t i = 0; i < pvalues.size(); ++i)
        if (pvalues[i] <= h) out.push_back(tvalues[i]);
    return out;
}

struct effect_size_estimate {
    double theta_hat = 0.0;
    double mu_hat = 0.0;
    int n_selected = 0;
    int sample_size = 0; // N
    int nu = 0;          // N - 1
};

/// mu_hat = qbar * sqrt(2/nu) * Gamma(nu/2) / Gamma((nu-1)/2) and
/// theta_hat = mu_hat * sqrt(2/N); an empty selection estimates zero.
/// The Gamma ratio goes through log-gamma differences.
inline effect_size_estimate estimate_theta(std::span<const double> selected_t, int n_obs) {
    if (n_obs < 2) throw parameter_error("estimate_theta: sample size must be >= 2");
    effect_size_estimate est;
    est.sample_size = n_obs;
    est.nu = n_obs - 1;
    est.n_selected = static_cast<int>(selected_t.size());
    if (selected_t.empty()) return est;

    compensated_sum s;
    for (double t : selected_t) s.add(t);
    double qbar = s.value() / static_cast<double>(selected_t.size());
    double nu = est.nu;
    double gamma_ratio = std::exp(std::lgamma(nu / 2.0) - std::lgamma((nu - 1.0) / 2.0));
    est.mu_hat = qbar * std::sqrt(2.0 / nu) * gamma_ratio;
    est.theta_hat = est.mu_hat * std::sqrt(2.0 / n_obs);
    return est;
}

inline effect_size_estimate estimate_theta(std::span<const double> tvalues,
                                           std::span<const double> pvalues,
                                           const threshold_rule& rule, int n_obs) {
    auto selected = select_statistics(tvalues, pvalues, rule);
    return estimate_theta(selected, n_obs);
}

/// Escalation policy used by the data-analysis workflow: walk the rule chain
/// until something is selected; if the estimate stays small in absolute
/// value, substitute the floor constant. Off by default (callers opt in).
struct effect_size_policy {
    std::vector<threshold_rule> rules;
    double small_abs_threshold = 0.4;
    double floor_value = 0.5;
};

struct effect_size_decision {
    effect_size_estimate estimate;
    double theta_used = 0.0;
    bool floored = false;
    int rule_index = -1; // which rule in the chain produced the estimate
};

inline effect_size_decision estimate_theta_with_policy(std::span<const double> tvalues,
                                                       std::span<const double> pvalues,
                                                       const effect_size_policy& policy,
                                                       int n_obs) {
    if (policy.rules.empty()) throw parameter_error("effect size policy: no rules");
    effect_size_decision dec;
    for (std::size_t k = 0; k < policy.rules.size(); ++k) {
        dec.estimate = estimate_theta(tvalues, pvalues, policy.rules[k], n_obs);
        dec.rule_index = static_cast<int>(k);
        if (dec.estimate.theta_hat != 0.0) break;
    }
    dec.theta_used = dec.estimate.theta_hat;
    if (std::abs(dec.theta_used) < policy.small_abs_threshold) {
        dec.theta_used = policy.floor_value;
        dec.floored = true;
    }
    return dec;
}

} // namespace tdpb
