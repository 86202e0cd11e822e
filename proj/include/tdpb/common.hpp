#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tdpb {

/// Invalid parameter value (out of a family's stated range, bad alpha, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Mismatched lengths between vectors that must share a dimension.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// A constructed object violates its own invariants (e.g. a non-monotone
/// critical vector produced by extreme family parameters).
struct validity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem size exceeds what an exhaustive algorithm supports.
struct size_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Neumaier compensated accumulator for long sums of small terms.
class compensated_sum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double clamp_probability(double p) {
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

/// Static-partition parallel loop; results must be written to disjoint,
/// preallocated slots so the outcome is schedule-independent.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned max_threads = 0) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned k = max_threads == 0 ? (hw == 0 ? 1 : hw) : max_threads;
    if (k <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (k > n) k = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (unsigned w = 0; w < k; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += k) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace tdpb
