#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tdpb/common.hpp"

namespace tdpb {

enum class cv_family { bh, by, aorc, exp_curve, custom };

inline std::string family_name(cv_family f) {
    switch (f) {
    case cv_family::bh: return "BH";
    case cv_family::by: return "BY";
    case cv_family::aorc: return "AORC";
    case cv_family::exp_curve: return "Exp";
    case cv_family::custom: return "Custom";
    }
    return "?";
}

inline double harmonic_number(int m) {
    compensated_sum s;
    for (int j = 1; j <= m; ++j) s.add(1.0 / j);
    return s.value();
}

/// Non-decreasing step-up thresholds (t_1,...,t_m) with their family and
/// parameter provenance. Construction always verifies monotonicity and range.
struct critical_vector {
    std::vector<double> values; // t_1..t_m
    cv_family family = cv_family::custom;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();

    int m() const { return static_cast<int>(values.size()); }

    void validate() const {
        if (values.empty()) throw validity_error("critical_vector: empty");
        double prev = 0.0;
        for (double t : values) {
            if (!(t >= 0.0 && t <= 1.0))
                throw validity_error("critical_vector: threshold outside [0,1]");
            if (t < prev) throw validity_error("critical_vector: thresholds must be non-decreasing");
            prev = t;
        }
    }
};

inline critical_vector make_custom_critical_vector(std::vector<double> t) {
    critical_vector cv{std::move(t), cv_family::custom, 0.0, 0.0};
    cv.validate();
    return cv;
}

/// Builds t_i for the requested family:
///   BH   : t_i = (i/m) * lambda,               lambda in [0, 1]
///   BY   : t_i = (i/m) * lambda / H_m,         lambda in [0, H_m]
///   AORC : t_i = i*lambda / (m + beta - i*(1-lambda)),  lambda, beta >= 0
///   Exp  : t_i = lambda * (i/m)^beta,          lambda in [0, 1], beta >= 0
/// The result is re-validated against the monotone-in-[0,1] requirement.
inline critical_vector make_critical_vector(cv_family family, double lambda, double beta, int m) {
    if (m < 1) throw parameter_error("make_critical_vector: m must be >= 1");
    if (!std::isfinite(lambda)) throw parameter_error("make_critical_vector: lambda not finite");
    critical_vector cv;
    cv.family = family;
    cv.lambda = lambda;
    cv.beta = beta;
    cv.values.resize(m);
    switch (family) {
    case cv_family::bh: {
        if (lambda < 0.0 || lambda > 1.0)
            throw parameter_error("BH: lambda must be in [0,1]");
        for (int i = 1; i <= m; ++i) cv.values[i - 1] = lambda * i / m;
        cv.beta = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    case cv_family::by: {
        double hm = harmonic_number(m);
        if (lambda < 0.0 || lambda > hm)
            throw parameter_error("BY: lambda must be in [0, sum_{j<=m} 1/j]");
        for (int i = 1; i <= m; ++i) cv.values[i - 1] = (lambda / hm) * i / m;
        cv.beta = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    case cv_family::aorc: {
        if (lambda < 0.0) throw parameter_error("AORC: lambda must be >= 0");
        if (!(beta >= 0.0)) throw parameter_error("AORC: beta must be >= 0");
        for (int i = 1; i <= m; ++i) {
            if (lambda == 0.0) {
                cv.values[i - 1] = 0.0; // includes the 0/0 corner at i=m, beta=0
                continue;
            }
            double den = m + beta - i * (1.0 - lambda);
            cv.values[i - 1] = i * lambda / den;
        }
        break;
    }
    case cv_family::exp_curve: {
        if (lambda < 0.0 || lambda > 1.0)
            throw parameter_error("Exp: lambda must be in [0,1]");
        if (!(beta >= 0.0)) throw parameter_error("Exp: beta must be >= 0");
        for (int i = 1; i <= m; ++i)
            cv.values[i - 1] = lambda * std::pow(static_cast<double>(i) / m, beta);
        break;
    }
    case cv_family::custom:
        throw parameter_error("make_critical_vector: custom family takes explicit thresholds");
    }
    cv.validate();
    return cv;
}

inline critical_vector make_critical_vector(cv_family family, double lambda, int m) {
    return make_critical_vector(family, lambda, std::numeric_limits<double>::quiet_NaN(), m);
}

} // namespace tdpb
