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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "quadrature.hpp"
#include "semigrav/errors.hpp"
#include "semigrav/io.hpp"
#include "semigrav/kernel.hpp"

namespace semigrav::detail {

double wynn_epsilon(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  if (n < 3) return s.back();
  // eps[k][j]: column k, starting index j. Column -1 is zero.
  std::vector<double> prev(n, 0.0);
  std::vector<double> curr(s.begin(), s.end());
  double best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    bool finite = true;
    for (std::size_t j = 0; j + k < n; ++j) {
      const double diff = curr[j + 1] - curr[j];
      if (diff == 0.0) {
        finite = false;
        break;
      }
      next[j] = prev[j + 1] + 1.0 / diff;
    }
    if (!finite) break;
    prev = std::move(curr);
    curr = std::move(next);
    if (k % 2 == 0) best = curr.back();
  }
  return best;
}

double oscillatory_power_tail(double amplitude, double k_ref, double exponent,
                              double k_start, double r) {
  if (amplitude == 0.0) return 0.0;
  auto integrand = [&](double k) {
    return amplitude * std::pow(k / k_ref, exponent) * k * std::sin(k * r);
  };
  const double half_period = std::numbers::pi / r;
  double zero = std::ceil(k_start / half_period) * half_period;
  if (zero <= k_start) zero += half_period;

  std::vector<double> partial;
  partial.reserve(64);
  CompensatedSum sum;
  sum.add(gauss_legendre(integrand, k_start, zero));
  partial.push_back(sum.value());

  double previous_estimate = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  constexpr std::size_t kMaxPanels = 160;
  for (std::size_t j = 0; j < kMaxPanels; ++j) {
    const double a = zero + static_cast<double>(j) * half_period;
    sum.add(gauss_legendre(integrand, a, a + half_period));
    partial.push_back(sum.value());
    if (partial.size() < 8) continue;
    const std::size_t window = std::min<std::size_t>(partial.size(), 40);
    const double estimate = wynn_epsilon(
        std::span<const double>(partial).last(window));
    const double scale = std::max(std::abs(estimate), std::abs(partial[0]));
    if (std::abs(estimate - previous_estimate) <= 1e-14 * scale) {
      if (++stable >= 2) return estimate;
    } else {
      stable = 0;
    }
    previous_estimate = estimate;
  }
  return previous_estimate;
}

double power_sine_series(double amplitude, double k_ref, double exponent,
                         double a, double r) {
  if (amplitude == 0.0 || a <= 0.0) return 0.0;
  const double x = a * r;
  // sum_n (-1)^n x^(2n+1) / ((2n+1)! (p + 2n + 3))
  double term = x;  // x^(2n+1) / (2n+1)!
  CompensatedSum sum;
  for (int n = 0; n < 200; ++n) {
    const double contribution = term / (exponent + 2.0 * n + 3.0);
    sum.add(n % 2 == 0 ? contribution : -contribution);
    if (std::abs(contribution) <= 1e-18 * std::abs(sum.value())) break;
    term *= x * x / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
  }
  return amplitude * std::pow(a / k_ref, exponent) * a * a * sum.value();
}

}  // namespace semigrav::detail

namespace semigrav::kernel {
namespace {

using detail::CompensatedSum;
using detail::gauss_legendre;

constexpr double kTwoPiSquared = 2.0 * std::numbers::pi * std::numbers::pi;

double transform_at_origin(const FourierKernel& h) {
  const auto k = h.k_grid();
  const PowerTail& ir = h.infrared_tail();
  const PowerTail& uv = h.ultraviolet_tail();
  CompensatedSum sum;
  if (!ir.vanishes) {
    if (!(ir.exponent > -3.0)) {
      throw DomainError("radial transform at r = 0 diverges at small k");
    }
    sum.add(ir.amplitude * std::pow(k.front(), 3) / (ir.exponent + 3.0));
  }
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (h.segment_vanishes(i)) continue;
    sum.add(gauss_legendre(
        [&](double q) { return q * q * h.segment_value(i, q); }, k[i],
        k[i + 1]));
  }
  if (!uv.vanishes) {
    if (!(uv.exponent < -3.0)) {
      throw DomainError(
          "radial transform at r = 0 diverges at large k (unregularized "
          "kernel?)");
    }
    sum.add(-uv.amplitude * std::pow(k.back(), 3) / (uv.exponent + 3.0));
  }
  return sum.value() / kTwoPiSquared;
}

}  // namespace

double to_real_space(const FourierKernel& h, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("radius must be finite and >= 0");
  }
  if (r == 0.0) return transform_at_origin(h);

  const auto k = h.k_grid();
  const PowerTail& ir = h.infrared_tail();
  const PowerTail& uv = h.ultraviolet_tail();
  if (!ir.vanishes && !(ir.exponent > -3.0)) {
    throw DomainError("radial transform diverges at small k");
  }
  if (!uv.vanishes && !(uv.exponent < -1.0)) {
    throw DomainError("radial transform does not converge at large k");
  }

  CompensatedSum sum;
  const double half_period = std::numbers::pi / r;

  // Below the grid: series near the origin, then half-period panels.
  if (!ir.vanishes) {
    const double series_end = std::min(k.front(), 2.0 / r);
    sum.add(detail::power_sine_series(ir.amplitude, ir.k_ref, ir.exponent,
                                      series_end, r));
    auto f = [&](double q) { return ir(q) * q * std::sin(q * r); };
    double a = series_end;
    while (a < k.front()) {
      double b = (std::floor(a / half_period) + 1.0) * half_period;
      b = std::min(b, k.front());
      sum.add(gauss_legendre(f, a, b));
      a = b;
    }
  }

  // On the grid: pieces bounded by knots and zeros of sin(k r).
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (h.segment_vanishes(i)) continue;
    auto f = [&](double q) { return h.segment_value(i, q) * q * std::sin(q * r); };
    double a = k[i];
    while (a < k[i + 1]) {
      double b = (std::floor(a / half_period) + 1.0) * half_period;
      b = std::min(b, k[i + 1]);
      if (b <= a) b = std::min(a + half_period, k[i + 1]);
      sum.add(gauss_legendre(f, a, b));
      a = b;
    }
  }

  if (!uv.vanishes) {
    sum.add(detail::oscillatory_power_tail(uv.amplitude, uv.k_ref, uv.exponent,
                                           k.back(), r));
  }
  return sum.value() / (kTwoPiSquared * r);
}

}  // namespace semigrav::kernel
