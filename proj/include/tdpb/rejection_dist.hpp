#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/critical_vector.hpp"
#include "tdpb/order_stats.hpp"
#include "tdpb/pvalue_dist.hpp"

namespace tdpb {

/// Assumption-1 model: m independent p-values, m1_candidate of them with CDF
/// f_alt and the rest uniform.
struct two_group_model {
    int m = 1;
    int m1_candidate = 0;
    alt_pvalue_dist f_alt = alt_pvalue_dist::uniform();

    void validate() const {
        if (m < 1) throw parameter_error("two_group_model: m must be >= 1");
        if (m1_candidate < 0 || m1_candidate > m)
            throw parameter_error("two_group_model: m1 candidate must be in [0, m]");
    }
};

/// Exact law of the number of rejections R, probs[l] = P(R = l), l = 0..m.
struct rejection_pmf {
    std::vector<double> probs;

    int m() const { return static_cast<int>(probs.size()) - 1; }

    double cdf(int ell) const {
        compensated_sum s;
        for (int l = 0; l <= ell; ++l) s.add(probs[l]);
        return clamp_probability(s.value());
    }
};

/// mean = gamma * E[R], variance = gamma^2 * Var[R].
inline std::pair<double, double> rejection_moments(const rejection_pmf& pmf, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw parameter_error("rejection_moments: gamma must be in [0,1]");
    compensated_sum e1, e2;
    for (int l = 0; l < static_cast<int>(pmf.probs.size()); ++l) {
        e1.add(l * pmf.probs[l]);
        e2.add(static_cast<double>(l) * l * pmf.probs[l]);
    }
    double mean = e1.value();
    double var = e2.value() - mean * mean;
    if (var < 0.0) var = 0.0;
    return {gamma * mean, gamma * gamma * var};
}

namespace detail {

/// Shared machinery behind the exact distribution of R for a step-up test.
///
/// The tail-survival factors of the per-l decomposition are joint
/// order-statistic probabilities of the complemented remaining p-values. One
/// interval-count DP over the complement thresholds c_j = 1 - t_{m+1-j}
/// serves every (m1, l, j) combination at once: its table after step n holds,
/// for each split (a, b) of the n = m - l remaining variables, the
/// probability that all of them stay above their thresholds. The candidate
/// count m1 enters only through the binomial/power factors, which are
/// combined in log space per term.
class rejection_dist_engine {
  public:
    rejection_dist_engine(std::span<const double> t, std::span<const double> f_at_t)
        : m_(static_cast<int>(t.size())), t_(t.begin(), t.end()), f_(f_at_t.begin(), f_at_t.end()) {
        if (t_.size() != f_.size())
            throw dimension_error("rejection_dist_engine: t and F(t) must have equal length");
        log_fact_.resize(m_ + 1);
        for (int i = 0; i <= m_; ++i) log_fact_[i] = std::lgamma(i + 1.0);
        binom_ = binomial_table(m_);
        log_t_.resize(m_);
        log_f_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            f_[i] = clamp_probability(f_[i]);
            log_t_[i] = t_[i] > 0.0 ? std::log(t_[i]) : -std::numeric_limits<double>::infinity();
            log_f_[i] = f_[i] > 0.0 ? std::log(f_[i]) : -std::numeric_limits<double>::infinity();
        }
    }

    int m() const { return m_; }

    /// P(R = l), l = 0..m, under the model with m1 alternative p-values.
    std::vector<double> pmf(int m1) const {
        std::vector<double> out(m_ + 1, 0.0);
        const int m0 = m_ - m1;
        run(m0, m1, [&](int ell, const std::vector<double>& h, int stride) {
            out[ell] = assemble(m1, ell, h, stride, m0, m1);
        });
        return out;
    }

    /// pmfs for every m1 candidate 0..m in a single DP sweep.
    std::vector<std::vector<double>> all_pmfs() const {
        std::vector<std::vector<double>> out(m_ + 1, std::vector<double>(m_ + 1, 0.0));
        run(m_, m_, [&](int ell, const std::vector<double>& h, int stride) {
            for (int m1 = 0; m1 <= m_; ++m1)
                out[m1][ell] = assemble(m1, ell, h, stride, m_, m_);
        });
        return out;
    }

  private:
    template <typename Callback>
    void run(int k1_max, int k2_max, Callback&& emit) const {
        const int stride = k2_max + 1;
        std::vector<double> h(static_cast<std::size_t>(k1_max + 1) * stride, 0.0);
        h[0] = 1.0;
        emit(m_, h, stride);

        std::vector<double> w1pow(k1_max + 1), w2pow(k2_max + 1);
        for (int j = 1; j <= m_; ++j) {
            // interval masses in original threshold space; index m+1-j is the
            // threshold whose complement is c_j
            double w1, w2;
            if (j == 1) {
                w1 = 1.0 - t_[m_ - 1];
                w2 = 1.0 - f_[m_ - 1];
            } else {
                w1 = t_[m_ + 1 - j] - t_[m_ - j];
                w2 = f_[m_ + 1 - j] - f_[m_ - j];
            }
            if (w1 < 0.0) w1 = 0.0;
            if (w2 < 0.0) w2 = 0.0;

            if (w1 > 0.0) {
                w1pow[0] = 1.0;
                for (int d = 1; d <= k1_max; ++d) w1pow[d] = w1pow[d - 1] * w1;
                for (int k2 = 0; k2 <= k2_max; ++k2) {
                    int k1_hi = std::min(k1_max, m_ - k2);
                    for (int k1 = k1_hi; k1 >= 1; --k1) {
                        const auto& bi = binom_[k1];
                        double acc = 0.0;
                        for (int d = 0; d <= k1; ++d)
                            acc += bi[d] * w1pow[d] * h[(k1 - d) * stride + k2];
                        h[k1 * stride + k2] = acc;
                    }
                }
            }
            if (w2 > 0.0) {
                w2pow[0] = 1.0;
                for (int d = 1; d <= k2_max; ++d) w2pow[d] = w2pow[d - 1] * w2;
                for (int k1 = 0; k1 <= k1_max; ++k1) {
                    double* row = h.data() + static_cast<std::size_t>(k1) * stride;
                    int k2_hi = std::min(k2_max, m_ - k1);
                    for (int k2 = k2_hi; k2 >= 1; --k2) {
                        const auto& bi = binom_[k2];
                        double acc = 0.0;
                        for (int d = 0; d <= k2; ++d) acc += bi[d] * w2pow[d] * row[k2 - d];
                        row[k2] = acc;
                    }
                }
            }
            // order-statistic constraint: states with k1 + k2 < j die
            for (int k1 = 0; k1 <= k1_max; ++k1)
                for (int k2 = 0; k2 <= k2_max && k1 + k2 < j; ++k2) h[k1 * stride + k2] = 0.0;

            emit(m_ - j, h, stride);
        }
    }

    /// P(R = l) for one candidate from the current DP table: sum over the
    /// null/alternative split j of the l rejected p-values, each term
    /// binom(m0,j) * binom(m1,l-j) * t_l^j * F(t_l)^(l-j) * tail(a, b)
    /// evaluated in log space (the binomials overwhelm the tiny powers).
    double assemble(int m1, int ell, const std::vector<double>& h, int stride, int k1_max,
                    int k2_max) const {
        const int m0 = m_ - m1;
        const double log_tl = ell > 0 ? log_t_[ell - 1] : 0.0;
        const double log_fl = ell > 0 ? log_f_[ell - 1] : 0.0;
        compensated_sum acc;
        int j_lo = std::max(0, ell - m1);
        int j_hi = std::min(ell, m0);
        for (int j = j_lo; j <= j_hi; ++j) {
            int a = m0 - j;
            int b = m1 - (ell - j);
            if (a > k1_max || b > k2_max) continue;
            double tail = h[static_cast<std::size_t>(a) * stride + b];
            if (tail <= 0.0) continue;
            if (j > 0 && log_tl == -std::numeric_limits<double>::infinity()) continue;
            if (ell - j > 0 && log_fl == -std::numeric_limits<double>::infinity()) continue;
            double lg = log_choose(m0, j) + log_choose(m1, ell - j) + std::log(tail);
            if (j > 0) lg += j * log_tl;
            if (ell - j > 0) lg += (ell - j) * log_fl;
            acc.add(std::exp(lg));
        }
        return clamp_probability(acc.value());
    }

    double log_choose(int n, int k) const { return log_fact_[n] - log_fact_[k] - log_fact_[n - k]; }

    int m_;
    std::vector<double> t_, f_;
    std::vector<double> log_t_, log_f_, log_fact_;
    std::vector<std::vector<double>> binom_;
};

inline std::vector<double> evaluate_f_at_thresholds(const alt_pvalue_dist& f_alt,
                                                    const critical_vector& cv) {
    std::vector<double> f(cv.values.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = f_alt(cv.values[i]);
    // enforce monotonicity against quadrature jitter in the underlying CDF
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] < f[i - 1]) f[i] = f[i - 1];
    return f;
}

/// Literal Prop.-1 composition through upper_survival_orderstat; quadratic in
/// m per cell and only meant as the cross-check for the engine.
inline rejection_pmf rejection_pmf_reference(const two_group_model& model,
                                             const critical_vector& cv) {
    model.validate();
    cv.validate();
    if (model.m != cv.m()) throw dimension_error("rejection_pmf: model/cv dimension mismatch");
    const int m = model.m;
    const int m1 = model.m1_candidate;
    const int m0 = m - m1;
    std::vector<double> log_fact(m + 1);
    for (int i = 0; i <= m; ++i) log_fact[i] = std::lgamma(i + 1.0);
    auto log_choose = [&](int n, int k) { return log_fact[n] - log_fact[k] - log_fact[n - k]; };

    rejection_pmf pmf;
    pmf.probs.assign(m + 1, 0.0);
    for (int ell = 0; ell <= m; ++ell) {
        double t_l = ell > 0 ? cv.values[ell - 1] : 0.0;
        double f_l = ell > 0 ? model.f_alt(t_l) : 0.0;
        std::vector<double> tail_thresholds(cv.values.begin() + ell, cv.values.end());
        compensated_sum acc;
        for (int j = std::max(0, ell - m1); j <= std::min(ell, m0); ++j) {
            if (j > 0 && t_l <= 0.0) continue;
            if (ell - j > 0 && f_l <= 0.0) continue;
            two_group_sample rest{m0 - j, m1 - (ell - j), alt_pvalue_dist::uniform(),
                                  model.f_alt};
            double tail = upper_survival_orderstat(rest, tail_thresholds);
            if (tail <= 0.0) continue;
            double lg = log_choose(m0, j) + log_choose(m1, ell - j) + std::log(tail);
            if (j > 0) lg += j * std::log(t_l);
            if (ell - j > 0) lg += (ell - j) * std::log(f_l);
            acc.add(std::exp(lg));
        }
        pmf.probs[ell] = clamp_probability(acc.value());
    }
    return pmf;
}

} // namespace detail

/// Exact pmf of the number of rejections R of the step-up test under the
/// two-group model (Assumption-1).
inline rejection_pmf exact_rejection_pmf(const two_group_model& model,
                                         const critical_vector& cv) {
    model.validate();
    cv.validate();
    if (model.m != cv.m()) throw dimension_error("rejection_pmf: model/cv dimension mismatch");
    auto f_at_t = detail::evaluate_f_at_thresholds(model.f_alt, cv);
    detail::rejection_dist_engine engine(cv.values, f_at_t);
    return rejection_pmf{engine.pmf(model.m1_candidate)};
}

/// pmfs for every candidate m1 = 0..m, sharing one DP sweep.
inline std::vector<rejection_pmf> all_rejection_pmfs(const alt_pvalue_dist& f_alt,
                                                     const critical_vector& cv) {
    cv.validate();
    auto f_at_t = detail::evaluate_f_at_thresholds(f_alt, cv);
    detail::rejection_dist_engine engine(cv.values, f_at_t);
    auto raw = engine.all_pmfs();
    std::vector<rejection_pmf> out;
    out.reserve(raw.size());
    for (auto& row : raw) out.push_back(rejection_pmf{std::move(row)});
    return out;
}

} // namespace tdpb
