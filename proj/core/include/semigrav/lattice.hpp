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

// Single particle on a finite set of sites. The mass-density operators are
// diagonal in the site basis, mu_i = m_i |i><i|, and every kernel enters as
// the real symmetric matrix of its real-space values between sites.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "semigrav/kernel.hpp"
#include "semigrav/rng.hpp"

namespace semigrav::lattice {

using Vec3 = Eigen::Vector3d;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr std::size_t kMaxSites = 16;
inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;     // relative to max eigenvalue
inline constexpr double kMaxPsdShift = 1e-6;       // relative to max eigenvalue
inline constexpr double kNoiseFloor = 1e-12;       // relative eigenvalue floor

class LatticeSystem {
 public:
  LatticeSystem(std::vector<Vec3> sites, RealVector masses,
                ComplexMatrix hamiltonian);

  std::size_t size() const { return sites_.size(); }
  const std::vector<Vec3>& sites() const { return sites_; }
  const RealVector& masses() const { return masses_; }
  const ComplexMatrix& hamiltonian() const { return hamiltonian_; }
  double distance(std::size_t i, std::size_t j) const {
    return (sites_[i] - sites_[j]).norm();
  }

 private:
  std::vector<Vec3> sites_;
  RealVector masses_;
  ComplexMatrix hamiltonian_;
};

/// Nearest-neighbour hopping -J (|i><i+1| + h.c.) on a closed ring of n sites
/// placed on a regular polygon with unit edge length scaled by `spacing`.
LatticeSystem ring(std::size_t n, double spacing, double mass, double hopping);

/// Two sites on the x axis, H = 0.
LatticeSystem pair(double distance, double mass);

struct KernelMatrix {
  RealMatrix entries;
  /// Largest eigenvalue magnitude removed by the PSD projection (0 if none).
  double psd_shift = 0.0;
  double max_eigenvalue = 0.0;
};

/// K_ij = to_real_space(k, |x_i - x_j|). Positive-flagged kernels are
/// projected onto the PSD cone when quadrature noise leaves eigenvalues below
/// -1e-10 max; a shift above 1e-6 max throws InvariantViolation.
KernelMatrix build_kernel_matrix(const kernel::FourierKernel& k,
                                 const LatticeSystem& sys);

/// Eigenvalue check and projection of a symmetric matrix that should be
/// positive semi-definite.
KernelMatrix repair_psd(RealMatrix m);

/// gamma^+ = L L^T with eigenvalues below kNoiseFloor * max dropped.
struct NoiseFactor {
  RealMatrix L;        // covariance factor of gamma^+
  RealMatrix gamma_L;  // gamma L, the factor of gamma itself on its range
  RealMatrix pseudo_inverse;
  std::size_t rank = 0;
};

NoiseFactor factorize_monitoring(const RealMatrix& gamma);

/// delta mu = L xi / sqrt(dt), covariance gamma^+ / dt.
RealVector sample_signal_noise(const NoiseFactor& factor, double dt,
                               rng::Stream& stream);

/// gamma / 4 + V gamma^+ V (or gamma / 4 without the pair potential).
RealMatrix decoherence_matrix(const RealMatrix& gamma,
                              const std::optional<RealMatrix>& pairpot);

}  // namespace semigrav::lattice
