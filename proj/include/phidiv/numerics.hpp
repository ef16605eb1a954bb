#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace phidiv {

/* Kahan-Babuska (Neumaier) compensated sum: result within one rounding of the
   exact sum for any input ordering. */
inline double compensated_sum(std::span<const double> v) {
  double s = 0.0;
  double comp = 0.0;
  for (double x : v) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      comp += (s - t) + x;
    } else {
      comp += (x - t) + s;
    }
    s = t;
  }
  return s + comp;
}

// Running variant for streaming accumulation.
class CompensatedAccumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Central-difference step sizes balancing truncation against rounding.
inline double fd_step_first(double x) {
  static const double h0 = std::cbrt(2.220446049250313e-16);
  return h0 * std::fmax(1.0, std::abs(x));
}

inline double fd_step_second(double x) {
  static const double h0 = std::pow(2.220446049250313e-16, 0.25);
  return h0 * std::fmax(1.0, std::abs(x));
}

/* Deterministic uniform draw in [0, 1) from a 64-bit generator output.
   Avoids std::uniform_real_distribution, whose stream is implementation
   defined; results are reproducible across standard libraries. */
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace phidiv
