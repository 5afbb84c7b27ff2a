// Copyright 2026 The semigrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Quadrature building blocks shared by the radial transform and the
// decay-rate integrals. Not installed.

#include <cmath>
#include <numbers>
#include <span>

#include <boost/math/quadrature/gauss.hpp>

namespace semigrav::detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

/// Limit of a slowly converging sequence of partial sums by Wynn's epsilon
/// algorithm; returns the highest even-column entry of the table.
double wynn_epsilon(std::span<const double> partial_sums);

/// \int_{k_start}^\infty A (k / k_ref)^p k sin(k r) dk for p < -1, by
/// quadrature over the half-periods of sin(k r) with epsilon extrapolation
/// of the partial sums.
double oscillatory_power_tail(double amplitude, double k_ref, double exponent,
                              double k_start, double r);

/// \int_0^a A (k / k_ref)^p k sin(k r) dk for p > -3 via the Taylor series of
/// sin; accurate for a r <= 2.
double power_sine_series(double amplitude, double k_ref, double exponent,
                         double a, double r);

}  // namespace semigrav::detail
