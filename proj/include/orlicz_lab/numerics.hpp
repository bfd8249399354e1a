#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace olab {

/// Raised for numerical failures (non-convergence, underflow, unreachable values).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an input violates an operation's preconditions.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
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

/// log(sum exp(v_i)) with compensated summation of the shifted terms.
double log_sum_exp(const std::vector<double>& v);

/// Log-spaced grid on [lo, hi] with n points (natural log coordinates).
struct GridSpec {
    double lo = 1e-12;
    double hi = 1.0;
    int n = 64;

    std::vector<double> log_points() const;
    std::vector<double> points() const;
    std::string describe() const;
};

/// Number of worker threads, capped by ORLICZ_LAB_THREADS.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index writes only its own slot, so
/// results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace olab
