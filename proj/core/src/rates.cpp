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

#include "semigrav/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "quadrature.hpp"
#include "semigrav/csl.hpp"
#include "semigrav/errors.hpp"

namespace semigrav::rates {
namespace {

using kernel::FourierKernel;

constexpr double kTailTolerance = 1e-14;
constexpr std::size_t kMaxTailPieces = 2'000'000;

struct Charge {
  Vec3 center;
  double radius;
  double q;
};

// Delta mu = mu1 - mu2 with coincident components merged and cancelled.
std::vector<Charge> difference(const MassDistribution& mu1,
                               const MassDistribution& mu2) {
  std::vector<Charge> out;
  auto add = [&](const MassComponent& c, double sign) {
    for (Charge& e : out) {
      if (e.center == c.center && e.radius == c.radius) {
        e.q += sign * c.mass;
        return;
      }
    }
    out.push_back({c.center, c.radius, sign * c.mass});
  };
  for (const auto& c : mu1.components()) add(c, 1.0);
  for (const auto& c : mu2.components()) add(c, -1.0);
  std::erase_if(out, [](const Charge& c) { return c.q == 0.0; });
  return out;
}

double sinc(double x) {
  return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// (1 / 4 pi^2) \int_0^\infty k^2 D~(k) F_a(k) F_b(k) sinc(k d) dk, the
// contribution of one pair of unit charges to the rate.
class PairIntegral {
 public:
  PairIntegral(const FourierKernel& D, double d, double ra, double rb)
      : D_(D), d_(d), ra_(ra), rb_(rb) {
    const double omega = d + ra + rb;
    piece_ = omega > 0.0 ? std::numbers::pi / (2.0 * omega)
                         : std::numeric_limits<double>::infinity();
  }

  double operator()() const {
    detail::CompensatedSum sum;
    sum.add(infrared());
    const auto k = D_.k_grid();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      if (D_.segment_vanishes(i)) continue;
      auto f = [&](double x) { return shape(x) * D_.segment_value(i, x); };
      add_pieces(sum, f, k[i], k[i + 1]);
    }
    sum.add(ultraviolet(sum.value()));
    return sum.value() / (4.0 * std::numbers::pi * std::numbers::pi);
  }

 private:
  double shape(double k) const {
    return k * k * sphere_form_factor(k, ra_) * sphere_form_factor(k, rb_) *
           sinc(k * d_);
  }

  template <class F>
  void add_pieces(detail::CompensatedSum& sum, F&& f, double a,
                  double b) const {
    const auto n = static_cast<std::size_t>(
        std::max(1.0, std::ceil((b - a) / piece_)));
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = a + h * static_cast<double>(j);
      const double hi = j + 1 == n ? b : lo + h;
      sum.add(detail::gauss_legendre(f, lo, hi));
    }
  }

  double infrared() const {
    const kernel::PowerTail& tail = D_.infrared_tail();
    if (tail.vanishes) return 0.0;
    if (tail.exponent <= -3.0) {
      throw DomainError("decay-rate integral diverges at small k");
    }
    const double k0 = D_.k_grid().front();
    // k^2 (k / k0)^p combined so that k -> 0 neither overflows nor yields 0 * inf.
    const double scale = tail.amplitude * std::pow(tail.k_ref, -tail.exponent);
    auto f = [&](double x) {
      return scale * std::pow(x, 2.0 + tail.exponent) *
             sphere_form_factor(x, ra_) * sphere_form_factor(x, rb_) *
             sinc(x * d_);
    };
    const double first = std::min(k0, piece_);
    boost::math::quadrature::tanh_sinh<double> ts;
    detail::CompensatedSum sum;
    sum.add(ts.integrate(f, 0.0, first));
    if (first < k0) add_pieces(sum, f, first, k0);
    return sum.value();
  }

  double ultraviolet(double in_grid) const {
    const kernel::PowerTail& tail = D_.ultraviolet_tail();
    if (tail.vanishes) return 0.0;
    const double kn = D_.k_grid().back();
    const double p = tail.exponent;
    if (ra_ == 0.0 && rb_ == 0.0) {
      if (d_ == 0.0) {
        if (p >= -3.0) {
          throw DomainError(
              "decay-rate integral diverges at large k for coincident "
              "point masses");
        }
        return -tail.amplitude * kn * kn * kn / (p + 3.0);
      }
      if (p >= -1.0) {
        throw DomainError("decay-rate integral does not converge at large k");
      }
      return detail::oscillatory_power_tail(tail.amplitude, tail.k_ref, p, kn,
                                            d_) /
             d_;
    }
    // At least one ball: |F| <= 4 / (k R)^2 once k R >= 3 bounds the rest.
    const int balls = (ra_ > 0.0) + (rb_ > 0.0);
    const double decay = p + 3.0 - 2.0 * balls;
    if (decay >= 0.0) {
      throw DomainError("decay-rate integral diverges at large k");
    }
    const double r_min = balls == 2 ? std::min(ra_, rb_) : std::max(ra_, rb_);
    auto envelope_tail = [&](double K) {
      double c = std::abs(tail.amplitude) * std::pow(tail.k_ref, -p);
      if (ra_ > 0.0) c *= 4.0 / (ra_ * ra_);
      if (rb_ > 0.0) c *= 4.0 / (rb_ * rb_);
      return c * std::pow(K, decay) / -decay;
    };
    auto f = [&](double x) { return shape(x) * tail(x); };
    detail::CompensatedSum sum;
    double K = kn;
    for (std::size_t pieces = 0;; pieces += 64) {
      if (K * r_min >= 3.0 &&
          envelope_tail(K) <=
              kTailTolerance * std::abs(in_grid + sum.value())) {
        break;
      }
      if (pieces > kMaxTailPieces) {
        throw DomainError("decay-rate tail did not converge");
      }
      add_pieces(sum, f, K, K + 64.0 * piece_);
      K += 64.0 * piece_;
    }
    return sum.value();
  }

  const FourierKernel& D_;
  double d_, ra_, rb_;
  double piece_;
};

template <class PairValue>
double pair_sum(const std::vector<Charge>& charges, PairValue&& value) {
  // Group identical (distance, radii) pairs so each integral runs once.
  std::map<std::tuple<double, double, double>, double> cache;
  auto cached = [&](double d, double ra, double rb) {
    if (ra > rb) std::swap(ra, rb);
    const auto key = std::make_tuple(d, ra, rb);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, value(d, ra, rb)).first;
    return it->second;
  };
  detail::CompensatedSum total;
  double magnitude = 0.0;
  for (std::size_t a = 0; a < charges.size(); ++a) {
    for (std::size_t b = a; b < charges.size(); ++b) {
      const double d = (charges[a].center - charges[b].center).norm();
      const double term = (a == b ? 1.0 : 2.0) * charges[a].q * charges[b].q *
                          cached(d, charges[a].radius, charges[b].radius);
      total.add(term);
      magnitude += std::abs(term);
    }
  }
  const double gamma = total.value();
  if (gamma < -1e-10 * magnitude) {
    throw InvariantViolation("negative decay rate; kernel is not positive");
  }
  return std::max(gamma, 0.0);
}

}  // namespace

MassDistribution::MassDistribution(std::vector<MassComponent> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("empty mass distribution");
  for (const auto& c : parts_) {
    if (!(c.mass > 0.0) || !std::isfinite(c.mass)) {
      throw std::invalid_argument("component masses must be positive");
    }
    if (!(c.radius >= 0.0) || !std::isfinite(c.radius)) {
      throw std::invalid_argument("component radius must be >= 0");
    }
    if (!c.center.allFinite()) {
      throw std::invalid_argument("component position must be finite");
    }
  }
}

MassDistribution MassDistribution::point_set(std::vector<Vec3> positions,
                                             std::vector<double> masses) {
  if (positions.size() != masses.size()) {
    throw std::invalid_argument("one mass per position required");
  }
  std::vector<MassComponent> parts;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    parts.push_back({positions[i], masses[i], 0.0});
  }
  return MassDistribution(std::move(parts));
}

MassDistribution MassDistribution::uniform_sphere(Vec3 center, double radius,
                                                  double mass) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
  return MassDistribution({{center, mass, radius}});
}

double MassDistribution::total_mass() const {
  double m = 0.0;
  for (const auto& c : parts_) m += c.mass;
  return m;
}

bool MassDistribution::is_point_set() const {
  return std::all_of(parts_.begin(), parts_.end(),
                     [](const MassComponent& c) { return c.radius == 0.0; });
}

MassDistribution MassDistribution::translated(const Vec3& shift) const {
  auto parts = parts_;
  for (auto& c : parts) c.center += shift;
  return MassDistribution(std::move(parts));
}

MassDistribution MassDistribution::mass_scaled(double factor) const {
  auto parts = parts_;
  for (auto& c : parts) c.mass *= factor;
  return MassDistribution(std::move(parts));
}

double sphere_form_factor(double k, double radius) {
  const double x = k * radius;
  if (x < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
  }
  return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double superposition_decay_rate(const MassDistribution& mu1,
                                const MassDistribution& mu2,
                                const kernel::FourierKernel& D) {
  const auto charges = difference(mu1, mu2);
  if (charges.empty()) return 0.0;
  return pair_sum(charges, [&](double d, double ra, double rb) {
    return PairIntegral(D, d, ra, rb)();
  });
}

double real_space_decay_rate(const MassDistribution& mu1,
                             const MassDistribution& mu2,
                             const kernel::FourierKernel& D) {
  if (!mu1.is_point_set() || !mu2.is_point_set()) {
    throw std::invalid_argument("real-space route needs point masses");
  }
  const auto charges = difference(mu1, mu2);
  if (charges.empty()) return 0.0;
  return 0.5 * pair_sum(charges, [&](double d, double, double) {
    return kernel::to_real_space(D, d);
  });
}

std::string to_string(SigmaStatus status) {
  switch (status) {
    case SigmaStatus::excluded_by_decoherence_tests:
      return "excluded_by_decoherence_tests";
    case SigmaStatus::open_window:
      return "open_window";
    case SigmaStatus::constrained_by_gravity_tests:
      return "constrained_by_gravity_tests";
  }
  return "unknown";
}

FalsificationReport falsification_report(double sigma_m) {
  if (!(sigma_m > 0.0) || !std::isfinite(sigma_m)) {
    throw std::invalid_argument("sigma must be positive");
  }
  FalsificationReport r;
  r.sigma_m = sigma_m;
  if (sigma_m < kDecoherenceBoundSigmaM) {
    r.status = SigmaStatus::excluded_by_decoherence_tests;
  } else if (sigma_m >= kGravityTestSigmaM) {
    r.status = SigmaStatus::constrained_by_gravity_tests;
  } else {
    r.status = SigmaStatus::open_window;
  }
  // Internal units G = sigma = 1, then G m0^2 / (hbar sigma) sets the scale.
  const kernel::Mollifier g(kernel::MollifierKind::gaussian, 1.0);
  const auto grid = kernel::default_grid(1.0);
  const auto D = kernel::conjugate(
      kernel::magnitude(kernel::newtonian_kernel(1.0, grid)), g);
  const double m0 = csl::si::atomic_mass_unit;
  r.reference_rate_hz = kernel::to_real_space(D, 0.0) * csl::si::G * m0 * m0 /
                        (csl::si::hbar * sigma_m);
  return r;
}

}  // namespace semigrav::rates
