#pragma once

#include <span>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/pvalue_dist.hpp"

namespace tdpb {

/// n = count_g1 + count_g2 independent variables on [0,1]; count_g1 of them
/// follow g1 and count_g2 follow g2.
struct two_group_sample {
    int count_g1 = 0;
    int count_g2 = 0;
    alt_pvalue_dist g1 = alt_pvalue_dist::uniform();
    alt_pvalue_dist g2 = alt_pvalue_dist::uniform();

    int size() const { return count_g1 + count_g2; }

    void validate() const {
        if (count_g1 < 0 || count_g2 < 0)
            throw parameter_error("two_group_sample: negative group count");
    }
};

namespace detail {

inline void check_thresholds(std::span<const double> c) {
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (!(c[j] >= 0.0 && c[j] <= 1.0))
            throw domain_error("thresholds must lie in [0,1]");
        if (j > 0 && c[j] < c[j - 1])
            throw domain_error("thresholds must be non-decreasing");
    }
}

/// Pascal triangle as doubles, rows 0..n.
inline std::vector<std::vector<double>> binomial_table(int n) {
    std::vector<std::vector<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1.0);
        for (int k = 1; k < i; ++k) c[i][k] = c[i - 1][k - 1] + c[i - 1][k];
    }
    return c;
}

/// Interval-count DP over states (k1, k2) = variables at or below c_j per
/// group, with the order-statistic constraint k1 + k2 >= j enforced by
/// pruning after every step. Increments use the interval masses
/// G(c_j) - G(c_{j-1}) with binomial thinning, split into two 1-D passes.
/// H[k1][k2] after step j is the probability that k1 + k2 variables all lie
/// at or below c_j and satisfy the constraints up to j.
class interval_count_dp {
  public:
    interval_count_dp(int k1_max, int k2_max)
        : k1_max_(k1_max), k2_max_(k2_max), stride_(k2_max + 1),
          h_((k1_max + 1) * (k2_max + 1), 0.0),
          binom_(binomial_table(std::max(k1_max, k2_max))) {
        h_[0] = 1.0;
    }

    double at(int k1, int k2) const { return h_[k1 * stride_ + k2]; }

    /// Advance from step j-1 to step j with interval masses (w1, w2).
    void step(int j, double w1, double w2) {
        if (w1 < 0.0) w1 = 0.0;
        if (w2 < 0.0) w2 = 0.0;
        thin_group1(w1);
        thin_group2(w2);
        prune(j);
    }

  private:
    void thin_group1(double w) {
        if (w == 0.0) return;
        std::vector<double> wpow(k1_max_ + 1, 1.0);
        for (int d = 1; d <= k1_max_; ++d) wpow[d] = wpow[d - 1] * w;
        for (int k2 = 0; k2 <= k2_max_; ++k2) {
            for (int k1 = k1_max_; k1 >= 1; --k1) {
                compensated_sum acc;
                for (int d = 0; d <= k1; ++d)
                    acc.add(binom_[k1][d] * wpow[d] * h_[(k1 - d) * stride_ + k2]);
                h_[k1 * stride_ + k2] = acc.value();
            }
        }
    }

    void thin_group2(double w) {
        if (w == 0.0) return;
        std::vector<double> wpow(k2_max_ + 1, 1.0);
        for (int d = 1; d <= k2_max_; ++d) wpow[d] = wpow[d - 1] * w;
        for (int k1 = 0; k1 <= k1_max_; ++k1) {
            double* row = h_.data() + k1 * stride_;
            for (int k2 = k2_max_; k2 >= 1; --k2) {
                compensated_sum acc;
                for (int d = 0; d <= k2; ++d) acc.add(binom_[k2][d] * wpow[d] * row[k2 - d]);
                row[k2] = acc.value();
            }
        }
    }

    void prune(int j) {
        for (int k1 = 0; k1 <= k1_max_; ++k1)
            for (int k2 = 0; k2 <= k2_max_ && k1 + k2 < j; ++k2) h_[k1 * stride_ + k2] = 0.0;
    }

    int k1_max_, k2_max_, stride_;
    std::vector<double> h_;
    std::vector<std::vector<double>> binom_;
};

} // namespace detail

/// P(Z_(1) <= c_1, ..., Z_(n) <= c_n) for the two-group sample; c must be
/// non-decreasing with length n. n = 0 returns 1.
inline double joint_orderstat_cdf(const two_group_sample& sample, std::span<const double> c) {
    sample.validate();
    const int a = sample.count_g1;
    const int b = sample.count_g2;
    const int n = a + b;
    if (static_cast<int>(c.size()) != n)
        throw dimension_error("joint_orderstat_cdf: threshold count must equal sample size");
    detail::check_thresholds(c);
    if (n == 0) return 1.0;

    detail::interval_count_dp dp(a, b);
    double prev1 = 0.0, prev2 = 0.0;
    for (int j = 1; j <= n; ++j) {
        double g1 = sample.g1(c[j - 1]);
        double g2 = sample.g2(c[j - 1]);
        dp.step(j, g1 - prev1, g2 - prev2);
        prev1 = g1;
        prev2 = g2;
    }
    return clamp_probability(dp.at(a, b));
}

/// P(P_(1) > t_{k+1}, ..., P_(m-k) > t_m): the survival event of the ordered
/// p-values above the tail thresholds, computed as joint_orderstat_cdf of the
/// reversed complement thresholds (1-t_m, ..., 1-t_{k+1}) under the
/// complement-transformed distributions.
inline double upper_survival_orderstat(const two_group_sample& sample,
                                       std::span<const double> t_tail) {
    sample.validate();
    const int n = sample.size();
    if (static_cast<int>(t_tail.size()) != n)
        throw dimension_error("upper_survival_orderstat: threshold count must equal sample size");
    detail::check_thresholds(t_tail);
    if (n == 0) return 1.0;

    std::vector<double> rev(n);
    for (int i = 0; i < n; ++i) rev[i] = 1.0 - t_tail[n - 1 - i];
    two_group_sample comp{sample.count_g1, sample.count_g2, sample.g1.complement(),
                          sample.g2.complement()};
    return joint_orderstat_cdf(comp, rev);
}

} // namespace tdpb
