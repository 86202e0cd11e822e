#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tdpb/calibration.hpp"
#include "tdpb/common.hpp"
#include "tdpb/gs_bound.hpp"
#include "tdpb/pvalue_dist.hpp"
#include "tdpb/rng.hpp"
#include "tdpb/stepup.hpp"
#include "tdpb/tdp_bound.hpp"

namespace tdpb {

/// One method evaluated per replication: a step-up bound from a calibrated
/// family (with a gamma* target) or the closed-testing baseline.
struct method_spec {
    enum class kind { step_up, gs };
    kind which = kind::step_up;
    cv_family family = cv_family::bh;
    double gamma_target = 1.0;

    static method_spec step_up(cv_family f, double target) {
        return {kind::step_up, f, target};
    }
    static method_spec goeman_solari() { return {kind::gs, cv_family::custom, 0.0}; }

    std::string label() const {
        if (which == kind::gs) return "GS";
        if (gamma_target == 1.0) return family_name(family) + "-opt";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s-%g", family_name(family).c_str(), gamma_target);
        return buf;
    }
};

struct scenario_config {
    int n_obs = 50;
    int m = 100;
    int m1 = 0;
    double theta = 0.0;
    double rho = 0.0;
    std::optional<double> theta_assumed; // defaults to theta (correct specification)
    double alpha = 0.2;
    int replications = 10000;
    std::uint64_t seed = 0;
    std::vector<method_spec> methods;

    double assumed_theta() const { return theta_assumed.value_or(theta); }

    void validate() const {
        if (n_obs < 2) throw parameter_error("scenario: N must be >= 2");
        if (m < 1) throw parameter_error("scenario: m must be >= 1");
        if (m1 < 0 || m1 > m) throw parameter_error("scenario: m1 must be in [0, m]");
        if (rho < 0.0) throw parameter_error("scenario: negative correlation unsupported");
        if (rho >= 1.0) throw parameter_error("scenario: rho must be in [0, 1)");
        if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("scenario: alpha in (0,1)");
        if (replications < 1) throw parameter_error("scenario: B must be >= 1");
        if (methods.empty()) throw parameter_error("scenario: no methods configured");
    }

    std::string id() const {
        char buf[192];
        std::snprintf(buf, sizeof(buf),
                      "theta=%g;rho=%g;theta_assumed=%g;m=%d;m1=%d;N=%d;alpha=%g;B=%d;seed=%llu",
                      theta, rho, assumed_theta(), m, m1, n_obs, alpha, replications,
                      static_cast<unsigned long long>(seed));
        return buf;
    }
};

struct data_matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values; // row-major

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// N i.i.d. rows from the equicorrelated normal model: row = eta + eps with
/// eps = sqrt(rho) * Z0 * 1 + sqrt(1-rho) * Z, unit marginal variances and
/// pairwise correlation rho; eta has the first m1 entries at theta/sqrt(2).
/// Fully determined by (seed, replication_index).
inline data_matrix gen_dataset(const scenario_config& config, int replication_index) {
    config.validate();
    counter_rng rng(config.seed, static_cast<std::uint64_t>(replication_index));
    const double eta_alt = config.theta / std::numbers::sqrt2;
    const double shared = std::sqrt(config.rho);
    const double own = std::sqrt(1.0 - config.rho);

    data_matrix x;
    x.rows = config.n_obs;
    x.cols = config.m;
    x.values.resize(static_cast<std::size_t>(x.rows) * x.cols);
    for (int r = 0; r < x.rows; ++r) {
        double z0 = rng.next_normal();
        for (int c = 0; c < x.cols; ++c) {
            double eta = c < config.m1 ? eta_alt : 0.0;
            x.at(r, c) = eta + shared * z0 + own * rng.next_normal();
        }
    }
    return x;
}

struct t_test_maps_result {
    std::vector<double> tvalues;
    std::vector<double> pvalues;
};

/// Per-coordinate two-sided one-sample t-test, Studentized per coordinate:
/// t = mean / (sd / sqrt(N)), p = 2 * (1 - F_{nu,0}(|t|)) with nu = N-1.
/// Zero sample variance degenerates to p = 0 if the mean is nonzero, else
/// p = 1 (with t = +-inf or 0 accordingly).
inline t_test_maps_result ttest_maps(const data_matrix& data) {
    if (data.rows < 2) throw parameter_error("ttest_maps: need N >= 2 observations");
    const int n = data.rows;
    const int m = data.cols;
    const t_dist_params central{n - 1, 0.0};
    t_test_maps_result out;
    out.tvalues.resize(m);
    out.pvalues.resize(m);
    for (int c = 0; c < m; ++c) {
        compensated_sum s;
        for (int r = 0; r < n; ++r) s.add(data.at(r, c));
        double mean = s.value() / n;
        compensated_sum ss;
        for (int r = 0; r < n; ++r) {
            double d = data.at(r, c) - mean;
            ss.add(d * d);
        }
        double sd = std::sqrt(ss.value() / (n - 1));
        if (sd == 0.0) {
            out.tvalues[c] = mean == 0.0 ? 0.0
                                         : std::copysign(std::numeric_limits<double>::infinity(),
                                                         mean);
            out.pvalues[c] = mean == 0.0 ? 1.0 : 0.0;
            continue;
        }
        double t = mean / (sd / std::sqrt(static_cast<double>(n)));
        out.tvalues[c] = t;
        out.pvalues[c] = clamp_probability(2.0 * noncentral_t_ccdf(std::abs(t), central));
    }
    return out;
}

struct method_summary {
    std::string label;
    double mean_bound = 0.0;
    double empirical_variance = 0.0;
    double violation_rate = 0.0; // fraction of replications with m1_hat > m1
    double mean_se = 0.0;
    double variance_se = 0.0;
    double violation_se = 0.0;
};

struct scenario_summary {
    scenario_config config;
    std::vector<method_summary> methods;
    std::vector<double> gamma_stars; // per method; NaN for GS
};

/// Runs the B-replication study. Critical vectors and gamma* are calibrated
/// once per scenario from the assumed effect size (they never see data);
/// replications touch the data only through r. Per-replication results land
/// in preallocated slots, so parallel execution is schedule-independent.
inline scenario_summary run_scenario(const scenario_config& config) {
    config.validate();
    const int b = config.replications;
    const int n_methods = static_cast<int>(config.methods.size());

    auto f_assumed = alt_pvalue_dist::t_test_two_sided(
        t_dist_params::from_effect_size(config.assumed_theta(), config.n_obs));

    struct calibrated {
        bool is_gs = false;
        critical_vector cv;
        gamma_value star{1, 1};
    };
    std::vector<calibrated> prepared(n_methods);
    for (int k = 0; k < n_methods; ++k) {
        const auto& ms = config.methods[k];
        if (ms.which == method_spec::kind::gs) {
            prepared[k].is_gs = true;
            continue;
        }
        calibration_spec cs;
        cs.family = ms.family;
        cs.m = config.m;
        cs.alpha = config.alpha;
        cs.f_alt = f_assumed;
        cs.gamma_target = ms.gamma_target;
        auto cal = select_critical_vector(cs);
        prepared[k].cv = std::move(cal.cv);
        prepared[k].star = cal.table.star;
    }

    std::vector<std::vector<int>> bounds(n_methods, std::vector<int>(b, 0));
    parallel_for(static_cast<std::size_t>(b), [&](std::size_t rep) {
        auto data = gen_dataset(config, static_cast<int>(rep));
        auto maps = ttest_maps(data);
        std::vector<double> sorted_p = maps.pvalues;
        std::sort(sorted_p.begin(), sorted_p.end());
        for (int k = 0; k < n_methods; ++k) {
            if (prepared[k].is_gs) {
                bounds[k][rep] = gs_bound(sorted_p, config.alpha).d;
            } else {
                int r = stepup_count_sorted(sorted_p, prepared[k].cv);
                bounds[k][rep] = static_cast<int>(prepared[k].star.ceil_times(r));
            }
        }
    });

    scenario_summary summary;
    summary.config = config;
    for (int k = 0; k < n_methods; ++k) {
        method_summary ms;
        ms.label = config.methods[k].label();
        compensated_sum s;
        int violations = 0;
        for (int rep = 0; rep < b; ++rep) {
            s.add(bounds[k][rep]);
            if (bounds[k][rep] > config.m1) ++violations;
        }
        ms.mean_bound = s.value() / b;
        compensated_sum sq;
        for (int rep = 0; rep < b; ++rep) {
            double d = bounds[k][rep] - ms.mean_bound;
            sq.add(d * d);
        }
        ms.empirical_variance = b > 1 ? sq.value() / (b - 1) : 0.0;
        ms.violation_rate = static_cast<double>(violations) / b;
        ms.mean_se = std::sqrt(ms.empirical_variance / b);
        ms.variance_se = b > 1 ? ms.empirical_variance * std::sqrt(2.0 / (b - 1)) : 0.0;
        ms.violation_se = std::sqrt(ms.violation_rate * (1.0 - ms.violation_rate) / b);
        summary.methods.push_back(std::move(ms));
        summary.gamma_stars.push_back(prepared[k].is_gs
                                          ? std::numeric_limits<double>::quiet_NaN()
                                          : prepared[k].star.value());
    }
    return summary;
}

/// Tidy CSV rows (UTF-8, '.' decimals): scenario,method,m1,statistic,value,mc_se.
inline void write_scenario_csv(std::ostream& os, const scenario_summary& summary,
                               bool header = true) {
    if (header) os << "scenario,method,m1,statistic,value,mc_se\n";
    auto row = [&](const std::string& method, const char* stat, double value, double se) {
        char buf[64];
        os << summary.config.id() << ',' << method << ',' << summary.config.m1 << ',' << stat;
        std::snprintf(buf, sizeof(buf), ",%.10g,%.10g\n", value, se);
        os << buf;
    };
    for (const auto& ms : summary.methods) {
        row(ms.label, "mean_bound", ms.mean_bound, ms.mean_se);
        row(ms.label, "empirical_variance", ms.empirical_variance, ms.variance_se);
        row(ms.label, "violation_rate", ms.violation_rate, ms.violation_se);
    }
}

} // namespace tdpb
