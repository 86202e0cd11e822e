#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tdpb/common.hpp"

namespace tdpb {

/// Parameters of a (non)central t-distribution: degrees of freedom nu >= 1
/// and noncentrality mu. For one-sample t-tests, nu = N - 1 and
/// mu = theta * sqrt(N/2).
struct t_dist_params {
    int nu = 1;
    double mu = 0.0;

    void validate() const {
        if (nu < 1) throw parameter_error("t_dist_params: nu must be >= 1");
        if (!std::isfinite(mu)) throw parameter_error("t_dist_params: mu must be finite");
    }

    static t_dist_params from_effect_size(double theta, int n_obs) {
        if (n_obs < 2) throw parameter_error("t_dist_params: sample size must be >= 2");
        return {n_obs - 1, theta * std::sqrt(n_obs / 2.0)};
    }
};

/// P(T <= x) for T ~ noncentral t(nu, mu). Non-finite x saturates to 0/1.
inline double noncentral_t_cdf(double x, const t_dist_params& params) {
    params.validate();
    if (std::isnan(x)) throw domain_error("noncentral_t_cdf: x is NaN");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    if (params.mu == 0.0) {
        boost::math::students_t dist(params.nu);
        return boost::math::cdf(dist, x);
    }
    boost::math::non_central_t dist(params.nu, params.mu);
    return clamp_probability(boost::math::cdf(dist, x));
}

/// Upper tail P(T > x); evaluated directly so tiny tails keep full precision.
inline double noncentral_t_ccdf(double x, const t_dist_params& params) {
    params.validate();
    if (std::isnan(x)) throw domain_error("noncentral_t_ccdf: x is NaN");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    if (params.mu == 0.0) {
        boost::math::students_t dist(params.nu);
        return boost::math::cdf(boost::math::complement(dist, x));
    }
    boost::math::non_central_t dist(params.nu, params.mu);
    return clamp_probability(boost::math::cdf(boost::math::complement(dist, x)));
}

/// Inverse CDF; |noncentral_t_cdf(result) - p| <= 1e-10 for p in (0,1).
inline double noncentral_t_quantile(double p, const t_dist_params& params) {
    params.validate();
    if (!(p > 0.0 && p < 1.0))
        throw domain_error("noncentral_t_quantile: p must be in (0,1)");
    if (params.mu == 0.0) {
        boost::math::students_t dist(params.nu);
        return boost::math::quantile(dist, p);
    }
    boost::math::non_central_t dist(params.nu, params.mu);
    return boost::math::quantile(dist, p);
}

/// CDF of the two-sided p-value of a one-sample t-test whose statistic is
/// noncentral t(nu, mu): with q = F_{nu,0}^{-1}(1 - p/2),
///   F(p) = P(|T| >= q) = [1 - F_{nu,mu}(q)] + F_{nu,mu}(-q).
/// Collapses to F(p) = p when mu = 0.
inline double alt_pvalue_cdf(double p, const t_dist_params& params) {
    params.validate();
    if (std::isnan(p) || p < 0.0 || p > 1.0)
        throw domain_error("alt_pvalue_cdf: p must be in [0,1]");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    t_dist_params central{params.nu, 0.0};
    double q = noncentral_t_quantile(1.0 - p / 2.0, central);
    double upper = noncentral_t_ccdf(q, params);
    double lower = noncentral_t_cdf(-q, params);
    return clamp_probability(upper + lower);
}

/// The p-value distribution F under the alternative (Assumption-1 model).
/// Immutable value type; all evaluation paths are pure and thread-safe.
class alt_pvalue_dist {
  public:
    enum class kind { t_test_two_sided, uniform, custom };

    static alt_pvalue_dist uniform() { return alt_pvalue_dist(kind::uniform); }

    static alt_pvalue_dist t_test_two_sided(t_dist_params params) {
        params.validate();
        alt_pvalue_dist d(kind::t_test_two_sided);
        d.params_ = params;
        return d;
    }

    /// Piecewise-linear monotone CDF through (grid, values). The anchors
    /// (0,0) and (1,1) are appended if absent so that F(0)=0, F(1)=1.
    static alt_pvalue_dist tabulated(std::vector<double> grid, std::vector<double> values) {
        if (grid.size() != values.size())
            throw dimension_error("alt_pvalue_dist: grid/value length mismatch");
        if (grid.empty()) throw parameter_error("alt_pvalue_dist: empty table");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] >= 0.0 && grid[i] <= 1.0 && values[i] >= 0.0 && values[i] <= 1.0))
                throw parameter_error("alt_pvalue_dist: table entries must lie in [0,1]");
            if (i > 0 && (grid[i] < grid[i - 1] || values[i] < values[i - 1]))
                throw parameter_error("alt_pvalue_dist: table must be non-decreasing");
        }
        if (grid.front() > 0.0) {
            grid.insert(grid.begin(), 0.0);
            values.insert(values.begin(), 0.0);
        } else {
            values.front() = 0.0;
        }
        if (grid.back() < 1.0) {
            grid.push_back(1.0);
            values.push_back(1.0);
        } else {
            values.back() = 1.0;
        }
        alt_pvalue_dist d(kind::custom);
        d.table_ = std::make_shared<table>(table{std::move(grid), std::move(values)});
        return d;
    }

    kind which() const { return kind_; }
    bool is_complemented() const { return complemented_; }
    const t_dist_params& t_params() const { return params_; }

    /// F(p), or the complement transform t -> 1 - F(1-t) when complemented.
    double operator()(double p) const {
        if (std::isnan(p) || p < 0.0 || p > 1.0)
            throw domain_error("alt_pvalue_dist: argument must be in [0,1]");
        if (complemented_) return clamp_probability(1.0 - base_cdf(1.0 - p));
        return base_cdf(p);
    }

    /// t -> 1 - F(1-t). Applying twice restores the original pointwise.
    alt_pvalue_dist complement() const {
        alt_pvalue_dist c(*this);
        c.complemented_ = !complemented_;
        return c;
    }

  private:
    struct table {
        std::vector<double> grid;
        std::vector<double> values;
    };

    explicit alt_pvalue_dist(kind k) : kind_(k) {}

    double base_cdf(double p) const {
        switch (kind_) {
        case kind::uniform:
            return clamp_probability(p);
        case kind::t_test_two_sided:
            return alt_pvalue_cdf(p, params_);
        case kind::custom: {
            const auto& g = table_->grid;
            const auto& v = table_->values;
            auto it = std::upper_bound(g.begin(), g.end(), p);
            if (it == g.begin()) return v.front();
            if (it == g.end()) return v.back();
            std::size_t hi = static_cast<std::size_t>(it - g.begin());
            std::size_t lo = hi - 1;
            double span = g[hi] - g[lo];
            if (span <= 0.0) return v[hi];
            double w = (p - g[lo]) / span;
            return clamp_probability(v[lo] + w * (v[hi] - v[lo]));
        }
        }
        return 0.0; // unreachable
    }

    kind kind_;
    bool complemented_ = false;
    t_dist_params params_{1, 0.0};
    std::shared_ptr<const table> table_;
};

} // namespace tdpb
