#pragma once

#include <cmath>

namespace gasd {

/// Neumaier-compensated running sum. Reductions over image-sized arrays use
/// this so the result does not depend on summation order beyond ~1 ulp.
class CompensatedSum {
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

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Round half away from zero, absorbing the representation error of decimal
/// halves such as 1234.5 arriving as 1234.4999999999998.
inline double round_half_away(double x) noexcept {
  constexpr double kSlack = 1e-9;
  return x >= 0.0 ? std::floor(x + 0.5 + kSlack) : -std::floor(-x + 0.5 + kSlack);
}

}  // namespace gasd
