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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "semigrav/errors.hpp"

namespace semigrav::rates {
namespace {

using kernel::MollifierKind;
using testing::rel_err;

kernel::FourierKernel decoherence(double sigma, MollifierKind kind,
                                  double G = 1.0) {
  const auto grid = kernel::default_grid(sigma);
  return kernel::conjugate(kernel::magnitude(kernel::newtonian_kernel(G, grid)),
                           kernel::Mollifier(kind, sigma));
}

MassDistribution point(double x, double m = 1.0) {
  return MassDistribution::point_set({Vec3(x, 0.0, 0.0)}, {m});
}

TEST(DecayRate, PointPairMatchesClosedForm) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto D = decoherence(sigma, MollifierKind::gaussian);
    for (double d : {0.3, 1.0, 4.0, 30.0}) {
      const double expected =
          -testing::gaussian_potential(1.0, sigma, 0.0) +
          testing::gaussian_potential(1.0, sigma, d);
      EXPECT_LT(rel_err(superposition_decay_rate(point(0.0), point(d), D),
                        expected),
                1e-6)
          << sigma << " " << d;
    }
  }
}

TEST(DecayRate, FourierAndRealRoutesAgree) {
  for (auto kind : {MollifierKind::gaussian, MollifierKind::biharmonic}) {
    const auto D = decoherence(0.7, kind);
    for (double d : {0.1, 0.7, 2.0, 9.0}) {
      const double fourier = superposition_decay_rate(point(0.0), point(d), D);
      const double real = real_space_decay_rate(point(0.0), point(d), D);
      EXPECT_LT(rel_err(fourier, real), 1e-6) << d;
    }
  }
  const auto D = decoherence(0.5, MollifierKind::gaussian);
  const auto a = MassDistribution::point_set(
      {Vec3(0, 0, 0), Vec3(1, 0.5, 0)}, {1.0, 2.0});
  const auto b = MassDistribution::point_set(
      {Vec3(0.2, 0.3, 1), Vec3(-1, 0, 0.4)}, {1.5, 0.5});
  EXPECT_LT(rel_err(superposition_decay_rate(a, b, D),
                    real_space_decay_rate(a, b, D)),
            1e-6);
}

TEST(DecayRate, SymmetryTranslationAndMassScaling) {
  const auto D = decoherence(0.5, MollifierKind::biharmonic);
  const auto a = MassDistribution::uniform_sphere(Vec3(0, 0, 0), 0.3, 2.0);
  const auto b = MassDistribution::uniform_sphere(Vec3(1.2, 0.4, 0), 0.3, 2.0);
  const double ab = superposition_decay_rate(a, b, D);
  EXPECT_LT(rel_err(superposition_decay_rate(b, a, D), ab), 1e-10);
  const Vec3 shift(3.0, -1.0, 7.5);
  EXPECT_LT(rel_err(superposition_decay_rate(a.translated(shift),
                                             b.translated(shift), D),
                    ab),
            1e-10);
  EXPECT_LT(rel_err(superposition_decay_rate(a.mass_scaled(3.0),
                                             b.mass_scaled(3.0), D),
                    9.0 * ab),
            1e-12);
}

TEST(DecayRate, NonIncreasingInSigma) {
  for (auto kind : {MollifierKind::gaussian, MollifierKind::biharmonic}) {
    for (double d : {0.5, 2.0}) {
      double last = INFINITY;
      for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double rate = superposition_decay_rate(
            point(0.0), point(d), decoherence(sigma, kind));
        EXPECT_LE(rate, last) << sigma;
        last = rate;
      }
    }
  }
}

TEST(DecayRate, SeparatedSpheresFeelNewtonCrossTerm) {
  const auto D = decoherence(0.5, MollifierKind::gaussian);
  auto sphere = [](double x) {
    return MassDistribution::uniform_sphere(Vec3(x, 0, 0), 0.25, 1.0);
  };
  const double near = superposition_decay_rate(sphere(0), sphere(8), D);
  const double far = superposition_decay_rate(sphere(0), sphere(16), D);
  EXPECT_LT(rel_err(far - near, 1.0 / 8.0 - 1.0 / 16.0), 1e-6);
}

TEST(DecayRate, UnregularizedCoincidentPointsDiverge) {
  const auto D = kernel::magnitude(
      kernel::newtonian_kernel(1.0, kernel::default_grid()));
  EXPECT_THROW(superposition_decay_rate(point(0.0), point(1.0), D),
               DomainError);
}

TEST(FormFactor, Limits) {
  EXPECT_EQ(sphere_form_factor(3.0, 0.0), 1.0);
  EXPECT_NEAR(sphere_form_factor(1e-4, 1.0), 1.0, 1e-8);
  const double x = 2.0;
  EXPECT_NEAR(sphere_form_factor(x, 1.0),
              3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x), 1e-14);
}

TEST(Falsification, QuotedRegimes) {
  EXPECT_EQ(falsification_report(1e-16).status,
            SigmaStatus::excluded_by_decoherence_tests);
  EXPECT_EQ(falsification_report(1e-7).status, SigmaStatus::open_window);
  EXPECT_EQ(falsification_report(1e-3).status,
            SigmaStatus::constrained_by_gravity_tests);
  EXPECT_EQ(to_string(SigmaStatus::open_window), "open_window");
  EXPECT_THROW(falsification_report(0.0), std::invalid_argument);
}

TEST(Falsification, ReferenceRate) {
  // G u^2 / (hbar sigma sqrt(pi)) from SI constants typed in here.
  const double G = 6.67430e-11, u = 1.66053906660e-27, hbar = 1.054571817e-34;
  const double sigma = 1e-7;
  EXPECT_LT(rel_err(falsification_report(sigma).reference_rate_hz,
                    G * u * u / (hbar * sigma * std::sqrt(testing::kPi))),
            1e-6);
}

}  // namespace
}  // namespace semigrav::rates
