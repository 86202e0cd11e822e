#include <doctest.h>

#include "support/oracles.hpp"
#include "tdpb/effect_size.hpp"
#include "tdpb/rng.hpp"

using tdpb::estimate_theta;
using tdpb::select_statistics;
using tdpb::threshold_rule;

TEST_CASE("p-value thresholds") {
    CHECK(threshold_rule::bonferroni(0.05).pvalue_threshold(100) ==
          doctest::Approx(0.0005).epsilon(1e-14));
    // Sidak h = 1 - (1-a)^(1/m), cross-checked in long double
    double h = threshold_rule::sidak(0.01).pvalue_threshold(100);
    long double ref = 1.0L - std::pow(1.0L - 0.01L, 1.0L / 100.0L);
    CHECK(h == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
    CHECK(h == doctest::Approx(1.00503358535014e-4).epsilon(1e-9));
    CHECK_THROWS_AS(threshold_rule::fixed_p(0.0), tdpb::parameter_error);
    CHECK_THROWS_AS(threshold_rule::sidak(1.0), tdpb::parameter_error);
}

TEST_CASE("threshold monotonicity in a and Sidak >= Bonferroni") {
    double prev_b = 0.0, prev_s = 0.0;
    for (int k = 1; k <= 99; ++k) {
        double a = k / 100.0;
        double hb = threshold_rule::bonferroni(a).pvalue_threshold(50);
        double hs = threshold_rule::sidak(a).pvalue_threshold(50);
        CHECK(hb > prev_b);
        CHECK(hs > prev_s);
        CHECK(hs >= hb);
        prev_b = hb;
        prev_s = hs;
    }
}

TEST_CASE("selection rules") {
    std::vector<double> t{1.0, 2.0, 3.0, 4.0};
    std::vector<double> p{0.5, 0.04, 0.009, 0.0001};

    auto none = select_statistics(t, std::vector<double>{1.0, 1.0, 1.0, 1.0},
                                  threshold_rule::fixed_p(0.1));
    CHECK(none.empty());

    auto fixed = select_statistics(t, p, threshold_rule::fixed_p(0.01));
    CHECK(fixed == std::vector<double>{3.0, 4.0});

    // type-7 median of {1,2,3,4} is 2.5, so the upper half is kept
    auto quant = select_statistics(t, p, threshold_rule::t_quantile(0.5));
    CHECK(quant == std::vector<double>{3.0, 4.0});

    CHECK_THROWS_AS(select_statistics(t, std::vector<double>{0.1}, threshold_rule::fixed_p(0.1)),
                    tdpb::dimension_error);
}

TEST_CASE("estimator values") {
    auto empty = estimate_theta(std::vector<double>{}, 50);
    CHECK(empty.theta_hat == 0.0);
    CHECK(empty.mu_hat == 0.0);
    CHECK(empty.n_selected == 0);

    auto zero = estimate_theta(std::vector<double>{1.0, -1.0}, 50);
    CHECK(zero.theta_hat == doctest::Approx(0.0));

    // qbar = 4, N = 50: mu = 4 sqrt(2/49) Gamma(24.5)/Gamma(24), theta = mu/5
    auto est = estimate_theta(std::vector<double>{4.0}, 50);
    double ratio = std::exp(oracles::stirling_lgamma(24.5) - oracles::stirling_lgamma(24.0));
    double mu_ref = 4.0 * std::sqrt(2.0 / 49.0) * ratio;
    CHECK(est.mu_hat == doctest::Approx(mu_ref).epsilon(1e-10));
    CHECK(est.mu_hat == doctest::Approx(3.9384087089446658).epsilon(1e-10));
    CHECK(est.theta_hat == doctest::Approx(est.mu_hat * std::sqrt(2.0 / 50.0)).epsilon(1e-14));
    CHECK(est.nu == 49);

    CHECK_THROWS_AS(estimate_theta(std::vector<double>{1.0}, 1), tdpb::parameter_error);
}

TEST_CASE("doubling the selected statistics doubles the estimate") {
    std::vector<double> t{1.25, 2.5, 0.75};
    std::vector<double> t2{2.5, 5.0, 1.5};
    auto a = estimate_theta(t, 50);
    auto b = estimate_theta(t2, 50);
    CHECK(b.mu_hat == 2.0 * a.mu_hat);
    CHECK(b.theta_hat == 2.0 * a.theta_hat);
}

TEST_CASE("oracle selection keeps the estimator unbiased") {
    const int n_obs = 50, nu = 49, m1 = 10;
    const double theta = 0.8, mu = theta * std::sqrt(n_obs / 2.0);
    const int reps = 10000;
    tdpb::counter_rng rng(4242, 0);
    tdpb::compensated_sum sum, sumsq;
    std::vector<double> draws(m1);
    for (int rep = 0; rep < reps; ++rep) {
        for (int i = 0; i < m1; ++i) draws[i] = oracles::sample_noncentral_t(rng, nu, mu);
        double est = estimate_theta(draws, n_obs).theta_hat;
        sum.add(est);
        sumsq.add(est * est);
    }
    double mean = sum.value() / reps;
    double var = sumsq.value() / reps - mean * mean;
    double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - theta) <= 3 * se);
}

TEST_CASE("escalation policy with floor") {
    std::vector<double> t{0.5, 0.6};
    std::vector<double> p{0.9, 0.8}; // nothing passes the strict rule
    tdpb::effect_size_policy policy;
    policy.rules = {threshold_rule::sidak(0.01), threshold_rule::fixed_p(0.95)};
    auto dec = tdpb::estimate_theta_with_policy(t, p, policy, 50);
    CHECK(dec.rule_index == 1);             // escalated
    CHECK(dec.estimate.n_selected == 2);
    CHECK(dec.floored);                     // |theta| < 0.4 is replaced
    CHECK(dec.theta_used == 0.5);
}

TEST_CASE("seeded subject split") {
    auto [a, b] = tdpb::split_indices(140, 50, 90, 7);
    CHECK(a.size() == 50);
    CHECK(b.size() == 90);
    std::vector<bool> seen(140, false);
    for (int i : a) seen[i] = true;
    for (int i : b) {
        CHECK_FALSE(seen[i]);
        seen[i] = true;
    }
    auto [a2, b2] = tdpb::split_indices(140, 50, 90, 7);
    CHECK(a == a2);
    CHECK(b == b2);
    auto [a3, b3] = tdpb::split_indices(140, 50, 90, 8);
    CHECK(a != a3);
    CHECK_THROWS_AS(tdpb::split_indices(10, 6, 6, 1), tdpb::parameter_error);
}
