#include <doctest.h>

#include "support/oracles.hpp"
#include "tdpb/pvalue_dist.hpp"

using tdpb::alt_pvalue_cdf;
using tdpb::alt_pvalue_dist;
using tdpb::noncentral_t_cdf;
using tdpb::noncentral_t_quantile;
using tdpb::t_dist_params;

TEST_CASE("central t cdf trivial values") {
    CHECK(noncentral_t_cdf(0.0, {49, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    // nu = 1 is Cauchy: CDF(1) = 1/2 + atan(1)/pi = 3/4
    CHECK(noncentral_t_cdf(1.0, {1, 0.0}) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(noncentral_t_cdf(std::numeric_limits<double>::infinity(), {5, 2.0}) == 1.0);
    CHECK(noncentral_t_cdf(-std::numeric_limits<double>::infinity(), {5, 2.0}) == 0.0);
}

TEST_CASE("noncentral t cdf against the quadrature oracle") {
    // frozen from the chi-square-mixture quadrature oracle
    const double expected_1p5_49_4 = 0.0065841783978122841;
    double got = noncentral_t_cdf(1.5, {49, 4.0});
    CHECK(got == doctest::Approx(expected_1p5_49_4).epsilon(1e-9));
    CHECK(std::abs(got - oracles::noncentral_t_cdf(1.5, 49, 4.0)) <= 1e-10);

    const int nus[] = {1, 5, 49, 500};
    const double mus[] = {-10.0, -4.0, 0.5, 4.0, 10.0};
    const double xs[] = {-20.0, -2.0, 0.0, 1.5, 8.0, 30.0};
    for (int nu : nus)
        for (double mu : mus)
            for (double x : xs) {
                double impl = noncentral_t_cdf(x, {nu, mu});
                double ref = oracles::noncentral_t_cdf(x, nu, mu);
                CAPTURE(nu);
                CAPTURE(mu);
                CAPTURE(x);
                CHECK(std::abs(impl - ref) <= 1e-10);
            }
}

TEST_CASE("noncentral t cdf against direct density integration") {
    double impl = noncentral_t_cdf(1.5, {10, 2.0});
    double ref = oracles::noncentral_t_cdf_by_density(1.5, 10, 2.0);
    CHECK(std::abs(impl - ref) <= 1e-8);
}

TEST_CASE("t quantile trivial and derived values") {
    CHECK(std::abs(noncentral_t_quantile(0.5, {49, 0.0})) <= 1e-10);
    CHECK(noncentral_t_quantile(0.75, {1, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
    // frozen from bisection on the quadrature-oracle CDF
    const double expected_q975_49 = 2.0095752371292397;
    double got = noncentral_t_quantile(0.975, {49, 0.0});
    CHECK(got == doctest::Approx(expected_q975_49).epsilon(1e-10));
    CHECK(std::abs(got - oracles::noncentral_t_quantile(0.975, 49, 0.0)) <= 1e-8);
}

TEST_CASE("quantile/cdf round trip") {
    const double ps[] = {1e-6, 1e-3, 0.1, 0.5, 0.9, 1 - 1e-3, 1 - 1e-6};
    for (t_dist_params params : {t_dist_params{49, 0.0}, t_dist_params{49, 4.0},
                                 t_dist_params{7, -3.0}}) {
        for (double p : ps) {
            double x = noncentral_t_quantile(p, params);
            CHECK(std::abs(noncentral_t_cdf(x, params) - p) <= 1e-9);
        }
    }
}

TEST_CASE("t distribution parameter and domain errors") {
    CHECK_THROWS_AS(noncentral_t_cdf(1.0, {0, 0.0}), tdpb::parameter_error);
    CHECK_THROWS_AS(noncentral_t_cdf(1.0, {5, std::nan("")}), tdpb::parameter_error);
    CHECK_THROWS_AS(noncentral_t_cdf(std::nan(""), {5, 0.0}), tdpb::domain_error);
    CHECK_THROWS_AS(noncentral_t_quantile(0.0, {5, 0.0}), tdpb::domain_error);
    CHECK_THROWS_AS(noncentral_t_quantile(1.0, {5, 0.0}), tdpb::domain_error);
    CHECK_THROWS_AS(alt_pvalue_cdf(-0.1, {5, 0.0}), tdpb::domain_error);
    CHECK_THROWS_AS(alt_pvalue_cdf(1.1, {5, 0.0}), tdpb::domain_error);
}

TEST_CASE("alternative p-value CDF collapses to uniform at mu = 0") {
    for (int i = 0; i <= 200; ++i) {
        double p = i / 200.0;
        CHECK(std::abs(alt_pvalue_cdf(p, {49, 0.0}) - p) <= 1e-9);
    }
}

TEST_CASE("alternative p-value CDF boundaries, monotonicity, sign symmetry") {
    t_dist_params params{49, 4.0};
    CHECK(alt_pvalue_cdf(0.0, params) == 0.0);
    CHECK(alt_pvalue_cdf(1.0, params) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 500; ++i) {
        double p = i / 500.0;
        double f = alt_pvalue_cdf(p, params);
        CHECK(f >= prev - 1e-12);
        CHECK(std::abs(f - alt_pvalue_cdf(p, {49, -4.0})) <= 1e-9);
        prev = f;
    }
}

TEST_CASE("alternative p-value CDF against the Monte Carlo oracle") {
    const double frozen = 0.97503027612400752; // high-precision quadrature value
    double impl = alt_pvalue_cdf(0.05, {49, 4.0});
    CHECK(std::abs(impl - frozen) <= 1e-9);

    auto mc = oracles::mc_alt_pvalue_cdf(0.05, 49, 4.0, 2'000'000, 20240901);
    CHECK(std::abs(impl - mc.value) <= 3 * mc.se);
}

TEST_CASE("complement transform") {
    auto uni = alt_pvalue_dist::uniform();
    auto cuni = uni.complement();
    for (double t : {0.0, 0.2, 0.77, 1.0}) CHECK(cuni(t) == doctest::Approx(t).epsilon(1e-15));

    auto f = alt_pvalue_dist::t_test_two_sided({49, 4.0});
    auto fbar = f.complement();
    CHECK(fbar(0.0) == 0.0);
    CHECK(fbar(1.0) == 1.0);
    CHECK(fbar(0.95) == doctest::Approx(1.0 - f(0.05)).epsilon(1e-12));
    auto back = fbar.complement();
    for (double t : {0.0, 0.031, 0.5, 0.97, 1.0}) CHECK(back(t) == f(t));
}

TEST_CASE("tabulated custom CDF") {
    auto f = alt_pvalue_dist::tabulated({0.0, 0.5, 1.0}, {0.0, 0.9, 1.0});
    CHECK(f(0.25) == doctest::Approx(0.45));
    CHECK(f(0.75) == doctest::Approx(0.95));
    CHECK(f(0.0) == 0.0);
    CHECK(f(1.0) == 1.0);
    // anchors are added when the grid does not cover the endpoints
    auto g = alt_pvalue_dist::tabulated({0.4, 0.6}, {0.5, 0.7});
    CHECK(g(0.0) == 0.0);
    CHECK(g(1.0) == 1.0);
    CHECK(g(0.5) == doctest::Approx(0.6));
    CHECK_THROWS_AS(alt_pvalue_dist::tabulated({0.0, 0.5}, {0.4, 0.2}), tdpb::parameter_error);
    CHECK_THROWS_AS(alt_pvalue_dist::tabulated({0.5, 0.2}, {0.1, 0.4}), tdpb::parameter_error);
}
