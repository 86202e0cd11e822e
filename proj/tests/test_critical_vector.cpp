#include <doctest.h>

#include "tdpb/critical_vector.hpp"

using tdpb::cv_family;
using tdpb::make_critical_vector;
using tdpb::make_custom_critical_vector;

TEST_CASE("BH thresholds") {
    auto cv = make_critical_vector(cv_family::bh, 0.05, 100);
    CHECK(cv.values.front() == doctest::Approx(0.0005).epsilon(1e-14));
    CHECK(cv.values.back() == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("Exp with beta = 1 is BH") {
    auto bh = make_critical_vector(cv_family::bh, 0.05, 100);
    auto ex = make_critical_vector(cv_family::exp_curve, 0.05, 1.0, 100);
    for (int i = 0; i < 100; ++i)
        CHECK(ex.values[i] == doctest::Approx(bh.values[i]).epsilon(1e-14));
}

TEST_CASE("AORC direct evaluation") {
    auto cv = make_critical_vector(cv_family::aorc, 0.1, 1.0, 100);
    // i = 50: 50*0.1 / (100 + 1 - 50*0.9) = 5/56
    CHECK(cv.values[49] == doctest::Approx(5.0 / 56.0).epsilon(1e-14));
}

TEST_CASE("AORC corners") {
    auto zero = make_critical_vector(cv_family::aorc, 0.0, 0.0, 10);
    for (double t : zero.values) CHECK(t == 0.0);
    auto b0 = make_critical_vector(cv_family::aorc, 0.05, 0.0, 10);
    CHECK(b0.values.back() == doctest::Approx(1.0));
}

TEST_CASE("BY normalization") {
    auto cv = make_critical_vector(cv_family::by, 0.1, 4);
    double hm = 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
    CHECK(cv.values[3] == doctest::Approx(0.1 / hm).epsilon(1e-14));
    CHECK(cv.values[0] == doctest::Approx(0.1 / hm / 4).epsilon(1e-14));
    CHECK_NOTHROW(make_critical_vector(cv_family::by, hm, 4));
    CHECK_THROWS_AS(make_critical_vector(cv_family::by, hm + 0.01, 4), tdpb::parameter_error);
}

TEST_CASE("parameter range errors") {
    CHECK_THROWS_AS(make_critical_vector(cv_family::bh, -0.1, 10), tdpb::parameter_error);
    CHECK_THROWS_AS(make_critical_vector(cv_family::bh, 1.1, 10), tdpb::parameter_error);
    CHECK_THROWS_AS(make_critical_vector(cv_family::aorc, -0.1, 1.0, 10), tdpb::parameter_error);
    CHECK_THROWS_AS(make_critical_vector(cv_family::aorc, 0.1, -1.0, 10), tdpb::parameter_error);
    CHECK_THROWS_AS(make_critical_vector(cv_family::exp_curve, 0.1, -0.5, 10),
                    tdpb::parameter_error);
    CHECK_THROWS_AS(make_critical_vector(cv_family::bh, 0.1, 0), tdpb::parameter_error);
}

TEST_CASE("custom vectors are validated") {
    CHECK_NOTHROW(make_custom_critical_vector({0.0, 0.1, 0.1, 0.5}));
    CHECK_THROWS_AS(make_custom_critical_vector({0.2, 0.1}), tdpb::validity_error);
    CHECK_THROWS_AS(make_custom_critical_vector({0.2, 1.3}), tdpb::validity_error);
    CHECK_THROWS_AS(make_custom_critical_vector({}), tdpb::validity_error);
}
