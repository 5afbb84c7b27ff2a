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

// Least-decoherence choice of the monitoring kernel. For a monitoring
// kernel gamma and pair potential V the total decoherence kernel is
//   D = gamma / 4 + V . gamma^{-1} . V,
// which is diagonal in Fourier space and minimized independently at every
// wave number by gamma = 2 |V|, giving D = |V|.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "semigrav/kernel.hpp"

namespace semigrav::pld {

using kernel::FourierKernel;
using kernel::Mollifier;

/// gamma~ / 4 + V~^2 / gamma~. A zero gamma~ entry is admitted only where
/// V~ vanishes too (pseudo-inverse convention).
FourierKernel decoherence_kernel(const FourierKernel& gamma,
                                 const FourierKernel& pairpot);

/// gamma* = 2 |V~| for a negative pair potential.
FourierKernel pld_minimize(const FourierKernel& pairpot);

struct RegularizedPld {
  FourierKernel gamma_sigma;  // -2 g.V.g
  FourierKernel D_sigma;      // g.|V|.g
};

RegularizedPld regularized_pld(const FourierKernel& pairpot,
                               const Mollifier& m);

/// Spatial covariance of the potential noise, V . gamma^{-1} . V.
FourierKernel phi_noise_covariance(const FourierKernel& gamma,
                                   const FourierKernel& pairpot);

/// Writes "k,pairpot,gamma_star,decoherence_star" rows for a pair potential.
void write_scan_csv(std::ostream& out, const FourierKernel& pairpot);

// ---------------------------------------------------------------------------
// Monte Carlo check of the 1/(VT) law for the box- and window-averaged
// gradient of the potential noise.

struct NoiseScalingConfig {
  double G = 1.0;
  Mollifier mollifier{kernel::MollifierKind::gaussian, 0.5};
  std::size_t lattice_points = 64;  // per side of the periodic cube
  double spacing = 1.0;
  double dt = 1.0;
  std::vector<std::size_t> box_sides{4, 8, 16};       // in lattice sites
  std::vector<std::size_t> window_steps{1, 4, 16, 64};  // in time steps
  /// Independent blocks of max(window_steps) time steps.
  std::size_t n_blocks = 32;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct NoiseScalingRecord {
  double sigma = 0.0;
  double V = 0.0;
  double T = 0.0;
  double variance = 0.0;
  double stderr_ = 0.0;
};

struct NoiseScalingResult {
  std::vector<NoiseScalingRecord> records;
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  /// exp(intercept) of the fit log E = log(prefactor) + exponent log(1/VT).
  double prefactor = 0.0;
};

/// Samples the white-in-time potential noise with spatial covariance
/// V_sigma . gamma_sigma^{-1} . V_sigma (= |V_sigma| / 2) on a periodic
/// lattice, averages its gradient over cubic boxes and time windows, and
/// fits the exponent of E[(grad Phi)^2] against 1 / (V T).
/// Throws DomainError when any relative standard error exceeds 10%.
NoiseScalingResult gradient_variance_scaling(const NoiseScalingConfig& config);

}  // namespace semigrav::pld
