// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace coba {

// Compensated (Neumaier) accumulator. value() is the correctly rounded
// total for the magnitude ranges used here, which keeps identities like
// "sum of n equal terms == n * term" exact in floating point. The score
// formulas divide by these sums, so that exactness is load-bearing: it is
// what makes the constant-slope scores come out at exactly +/-1 and the
// divergence factor at exactly 1.
class NeumaierSum {
  public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

    void reset() noexcept {
        sum_ = 0.0;
        comp_ = 0.0;
    }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double neumaier_total(std::span<const double> xs) noexcept {
    NeumaierSum s;
    for (double x : xs) {
        s.add(x);
    }
    return s.value();
}

inline bool all_finite(std::span<const double> xs) noexcept {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace coba
