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

// Decay rates of superpositions of two mass distributions under a
// decoherence kernel D:
//   Gamma = 1/2 \int\int D(x, y) dmu(x) dmu(y),  dmu = mu1 - mu2,
// evaluated in Fourier space as (1 / 4 pi^2) \int k^2 D~(k) S(k) dk with
// S the angular average of |dmu~(k)|^2.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "semigrav/kernel.hpp"

namespace semigrav::rates {

using Vec3 = Eigen::Vector3d;

/// A point mass (radius 0) or a homogeneous ball.
struct MassComponent {
  Vec3 center = Vec3::Zero();
  double mass = 0.0;
  double radius = 0.0;
};

class MassDistribution {
 public:
  static MassDistribution point_set(std::vector<Vec3> positions,
                                    std::vector<double> masses);
  static MassDistribution uniform_sphere(Vec3 center, double radius,
                                         double mass);

  const std::vector<MassComponent>& components() const { return parts_; }
  double total_mass() const;
  bool is_point_set() const;

  MassDistribution translated(const Vec3& shift) const;
  MassDistribution mass_scaled(double factor) const;

 private:
  explicit MassDistribution(std::vector<MassComponent> parts);
  std::vector<MassComponent> parts_;
};

/// 3 (sin x - x cos x) / x^3 with x = k R; 1 for a point.
double sphere_form_factor(double k, double radius);

/// Fourier-space rate. Throws DomainError when the integral diverges
/// (coincident point support under an unregularized kernel).
double superposition_decay_rate(const MassDistribution& mu1,
                                const MassDistribution& mu2,
                                const kernel::FourierKernel& D);

/// 1/2 sum_ab q_a q_b D(|x_a - x_b|) with D from to_real_space; point sets
/// only.
double real_space_decay_rate(const MassDistribution& mu1,
                             const MassDistribution& mu2,
                             const kernel::FourierKernel& D);

// ---------------------------------------------------------------------------
// Quoted experimental bounds on the smearing length.

/// Smearing lengths below 1e-13 cm are excluded by the absence of the
/// predicted heating in LISA Pathfinder data (Helou et al., Phys. Rev. D 95,
/// 084054 (2017)).
inline constexpr double kDecoherenceBoundSigmaM = 1e-15;
/// Torsion-balance tests have not confirmed the 1/r law below about
/// 100 micrometre; smearing lengths of 1e-2 cm and above are within their
/// reach.
inline constexpr double kGravityTestSigmaM = 1e-4;

enum class SigmaStatus {
  excluded_by_decoherence_tests,
  open_window,
  constrained_by_gravity_tests,
};

std::string to_string(SigmaStatus status);

struct FalsificationReport {
  double sigma_m = 0.0;
  SigmaStatus status = SigmaStatus::open_window;
  /// Saturated DP rate m0^2 D_sigma(0) of one atomic mass unit in a
  /// far-separated superposition, gaussian smearing, in 1/s.
  double reference_rate_hz = 0.0;
};

FalsificationReport falsification_report(double sigma_m);

}  // namespace semigrav::rates
