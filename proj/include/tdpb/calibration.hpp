#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/critical_vector.hpp"
#include "tdpb/rejection_dist.hpp"
#include "tdpb/tdp_bound.hpp"

namespace tdpb {

struct lambda_search_range {
    double lo = 0.0;
    double hi = -1.0; // < 0 means family default upper bound
    double tolerance = 1e-5;
};

struct calibration_spec {
    cv_family family = cv_family::bh;
    int m = 1;
    double alpha = 0.2;
    alt_pvalue_dist f_alt = alt_pvalue_dist::uniform();
    double gamma_target = 1.0; // in (0, 1]
    std::vector<double> beta_grid;      // empty -> {0, 0.25, 0.5, 1, 2, 4}
    lambda_search_range lambda_search;
    double tie_tolerance = 0.01; // relative slack for "reasonably close" ties
    int coarse_grid_points = 17;

    void validate() const {
        if (m < 1) throw parameter_error("calibration_spec: m must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw parameter_error("calibration_spec: alpha must be in (0,1)");
        if (!(gamma_target > 0.0 && gamma_target <= 1.0))
            throw parameter_error("calibration_spec: gamma target must be in (0,1]");
        if (!(tie_tolerance >= 0.0)) throw parameter_error("calibration_spec: bad tie tolerance");
        if (!(lambda_search.tolerance > 0.0))
            throw parameter_error("calibration_spec: bad lambda tolerance");
    }

    double lambda_hi() const {
        if (lambda_search.hi >= 0.0) return lambda_search.hi;
        return family == cv_family::by ? harmonic_number(m) : 1.0;
    }

    std::vector<double> effective_beta_grid() const {
        if (family == cv_family::bh || family == cv_family::by)
            return {std::numeric_limits<double>::quiet_NaN()};
        if (!beta_grid.empty()) return beta_grid;
        return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    }
};

namespace detail {

struct calibration_sweep_result {
    gamma_table table;
    double sum_expectation = 0.0;
    double sum_variance = 0.0;
};

/// One shared DP sweep yields the pmf of R for every m1 candidate, from which
/// both the gamma table and the calibration objectives follow.
inline calibration_sweep_result calibration_sweep(const critical_vector& cv,
                                                  const alt_pvalue_dist& f_alt, double alpha) {
    check_alpha(alpha);
    const int m = cv.m();
    auto pmfs = all_rejection_pmfs(f_alt, cv);

    calibration_sweep_result out;
    out.table.alpha = alpha;
    out.table.gammas.resize(m + 1);
    out.table.ell.resize(m + 1);
    out.table.star = gamma_value{1, 1};
    for (int m1 = 0; m1 <= m; ++m1) {
        auto [g, ell] = gamma_from_pmf(pmfs[m1], m1, alpha);
        out.table.gammas[m1] = g;
        out.table.ell[m1] = ell;
        if (g < out.table.star) out.table.star = g;
    }
    double gs = out.table.star.value();
    compensated_sum sum_e, sum_v;
    for (int m1 = 0; m1 <= m; ++m1) {
        auto [mean, var] = rejection_moments(pmfs[m1], 1.0);
        sum_e.add(gs * mean);
        sum_v.add(gs * gs * var);
    }
    out.sum_expectation = sum_e.value();
    out.sum_variance = sum_v.value();
    return out;
}

inline critical_vector family_vector(cv_family family, double lambda, double beta, int m) {
    if (family == cv_family::bh || family == cv_family::by)
        return make_critical_vector(family, lambda, m);
    return make_critical_vector(family, lambda, beta, m);
}

} // namespace detail

/// Eq.-(8) objective: sum over all m1 candidates of E_{m1}[R * gamma*], with
/// gamma* the data-independent factor belonging to (cv, F, alpha).
inline double objective_sum_expectation(const critical_vector& cv, const alt_pvalue_dist& f_alt,
                                        int m, double alpha) {
    if (cv.m() != m) throw dimension_error("objective_sum_expectation: m mismatch");
    return detail::calibration_sweep(cv, f_alt, alpha).sum_expectation;
}

/// Eq.-(9) tie-breaker: sum over all m1 candidates of Var_{m1}[R * gamma*].
inline double objective_sum_variance(const critical_vector& cv, const alt_pvalue_dist& f_alt,
                                     int m, double alpha) {
    if (cv.m() != m) throw dimension_error("objective_sum_variance: m mismatch");
    return detail::calibration_sweep(cv, f_alt, alpha).sum_variance;
}

struct lambda_target_result {
    double lambda = 0.0;
    bool attainable = false;
    double achieved_gamma_star = 0.0; // at `lambda`, or the closest value seen if unattainable
    bool certified = false;           // bisection verified gamma* < target just above lambda
    bool monotone_scan = true;        // empirical monotonicity of gamma*(lambda) on the grid
};

/// Largest lambda in the search range whose gamma* still reaches the target:
/// coarse scan (which also checks that gamma*(lambda) decreases), then
/// bisection on the boundary bracket. Falls back to an exhaustive grid if
/// monotonicity fails empirically.
inline lambda_target_result max_lambda_for_target(cv_family family, double beta,
                                                  const calibration_spec& spec) {
    spec.validate();
    const double lo = spec.lambda_search.lo;
    const double hi = spec.lambda_hi();
    const double tol = spec.lambda_search.tolerance;
    if (!(hi >= lo)) throw parameter_error("max_lambda_for_target: empty search range");

    auto gamma_at = [&](double lambda) {
        auto cv = detail::family_vector(family, lambda, beta, spec.m);
        return detail::calibration_sweep(cv, spec.f_alt, spec.alpha).table.star.value();
    };

    lambda_target_result res;
    const int grid_n = std::max(2, spec.coarse_grid_points);
    std::vector<double> grid_lambda(grid_n), grid_gamma(grid_n);
    for (int k = 0; k < grid_n; ++k) {
        grid_lambda[k] = lo + (hi - lo) * k / (grid_n - 1);
        grid_gamma[k] = gamma_at(grid_lambda[k]);
    }
    for (int k = 1; k < grid_n; ++k)
        if (grid_gamma[k] > grid_gamma[k - 1] + 1e-12) res.monotone_scan = false;

    double best_gamma = *std::max_element(grid_gamma.begin(), grid_gamma.end());
    if (best_gamma < spec.gamma_target) {
        res.attainable = false;
        res.achieved_gamma_star = best_gamma;
        return res;
    }

    if (!res.monotone_scan) {
        // exhaustive fallback: largest grid point achieving the target
        double step = std::max(tol, (hi - lo) / 2000.0);
        double best_lambda = lo, best_g = grid_gamma.front();
        for (double lambda = lo; lambda <= hi + 0.5 * step; lambda += step) {
            double l = std::min(lambda, hi);
            double g = gamma_at(l);
            if (g >= spec.gamma_target && l >= best_lambda) {
                best_lambda = l;
                best_g = g;
            }
        }
        res.attainable = true;
        res.lambda = best_lambda;
        res.achieved_gamma_star = best_g;
        return res;
    }

    if (grid_gamma.back() >= spec.gamma_target) {
        res.attainable = true;
        res.lambda = hi;
        res.achieved_gamma_star = grid_gamma.back();
        return res; // whole range qualifies; nothing to certify
    }

    int k = grid_n - 1;
    while (grid_gamma[k] < spec.gamma_target) --k;
    double a = grid_lambda[k], b = grid_lambda[k + 1];
    double gamma_a = grid_gamma[k];
    while (b - a > tol) {
        double mid = 0.5 * (a + b);
        double g = gamma_at(mid);
        if (g >= spec.gamma_target) {
            a = mid;
            gamma_a = g;
        } else {
            b = mid;
        }
    }
    res.attainable = true;
    res.lambda = a;
    res.achieved_gamma_star = gamma_a;
    res.certified = true;
    return res;
}

struct calibration_probe {
    double beta = 0.0;
    double lambda = 0.0;
    double gamma_star = 0.0;
    double objective_mean = 0.0;
    double objective_var = 0.0;
    bool attainable = false;
};

struct calibration_result {
    critical_vector cv;
    gamma_table table;
    double gamma_star = 0.0;
    double objective_mean = 0.0;
    double objective_var = 0.0;
    std::vector<calibration_probe> diagnostics;
};

/// The selection procedure: one-parameter families return the largest-lambda
/// vector for the target; two-parameter families search lambda per beta,
/// keep combinations within tie_tolerance of the best Eq.-(8) value and
/// among them pick the Eq.-(9) minimizer (ties: smallest beta, then lambda).
inline calibration_result select_critical_vector(const calibration_spec& spec) {
    spec.validate();
    if (spec.family == cv_family::custom)
        throw parameter_error("select_critical_vector: custom family has no parameters");

    std::vector<calibration_probe> probes;
    for (double beta : spec.effective_beta_grid()) {
        auto lr = max_lambda_for_target(spec.family, beta, spec);
        calibration_probe probe;
        probe.beta = beta;
        probe.attainable = lr.attainable;
        probe.lambda = lr.lambda;
        probe.gamma_star = lr.achieved_gamma_star;
        if (lr.attainable) {
            auto cv = detail::family_vector(spec.family, lr.lambda, beta, spec.m);
            auto sweep = detail::calibration_sweep(cv, spec.f_alt, spec.alpha);
            probe.gamma_star = sweep.table.star.value();
            probe.objective_mean = sweep.sum_expectation;
            probe.objective_var = sweep.sum_variance;
        }
        probes.push_back(probe);
    }

    const calibration_probe* best = nullptr;
    for (const auto& p : probes)
        if (p.attainable && (!best || p.objective_mean > best->objective_mean)) best = &p;
    if (!best)
        throw parameter_error("select_critical_vector: gamma target unattainable on the grid");

    const calibration_probe* picked = nullptr;
    for (const auto& p : probes) {
        if (!p.attainable) continue;
        if (p.objective_mean < best->objective_mean * (1.0 - spec.tie_tolerance)) continue;
        if (!picked || p.objective_var < picked->objective_var ||
            (p.objective_var == picked->objective_var &&
             (p.beta < picked->beta || (p.beta == picked->beta && p.lambda < picked->lambda))))
            picked = &p;
    }

    calibration_result res;
    res.cv = detail::family_vector(spec.family, picked->lambda, picked->beta, spec.m);
    auto sweep = detail::calibration_sweep(res.cv, spec.f_alt, spec.alpha);
    res.table = std::move(sweep.table);
    res.gamma_star = res.table.star.value();
    res.objective_mean = sweep.sum_expectation;
    res.objective_var = sweep.sum_variance;
    res.diagnostics = std::move(probes);
    return res;
}

} // namespace tdpb
