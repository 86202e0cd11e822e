#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tdpb/rng.hpp"

using tdpb::counter_rng;

TEST_CASE("determinism and stream separation") {
    counter_rng a(123, 7), b(123, 7), c(123, 8), d(124, 7);
    bool all_equal = true;
    int diff_c = 0, diff_d = 0;
    for (int i = 0; i < 1000; ++i) {
        auto x = a.next_u32();
        if (x != b.next_u32()) all_equal = false;
        if (x != c.next_u32()) ++diff_c;
        if (x != d.next_u32()) ++diff_d;
    }
    CHECK(all_equal);
    CHECK(diff_c > 900);
    CHECK(diff_d > 900);
}

TEST_CASE("uniformity (Kolmogorov-Smirnov)") {
    counter_rng rng(2023, 0);
    const int n = 100000;
    std::vector<double> u(n);
    for (auto& x : u) x = rng.next_uniform();
    std::sort(u.begin(), u.end());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        dmax = std::max(dmax, std::abs(u[i] - (i + 1.0) / n));
        dmax = std::max(dmax, std::abs(u[i] - static_cast<double>(i) / n));
    }
    CHECK(dmax * std::sqrt(static_cast<double>(n)) < 1.95); // ~alpha = 0.001
}

TEST_CASE("normals have the right first two moments") {
    counter_rng rng(99, 3);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.next_normal();
        s += z;
        s2 += z * z;
    }
    double mean = s / n;
    double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("chi-square sampler moments") {
    counter_rng rng(7, 1);
    for (int nu : {1, 5, 49}) {
        const int n = 100000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = rng.next_chi_squared(nu);
            s += v;
            s2 += v * v;
        }
        double mean = s / n;
        double var = s2 / n - mean * mean;
        // Var[chi2_nu] = 2 nu; SE of the mean = sqrt(2 nu / n)
        CHECK(std::abs(mean - nu) < 5.0 * std::sqrt(2.0 * nu / n));
        double kurt_se = std::sqrt((48.0 * nu + 8.0 * 2 * nu * 2) / n); // loose
        CHECK(std::abs(var - 2.0 * nu) < 6.0 * std::max(1.0, kurt_se));
    }
}

TEST_CASE("streams are uncorrelated") {
    counter_rng a(55, 0), b(55, 1);
    const int n = 100000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = a.next_uniform(), y = b.next_uniform();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    double cov = sxy / n - (sx / n) * (sy / n);
    double vx = sxx / n - (sx / n) * (sx / n);
    double vy = syy / n - (sy / n) * (sy / n);
    double corr = cov / std::sqrt(vx * vy);
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}
