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

// Stochastic unraveling of the hybrid dynamics and the master equation it
// averages to. Units: hbar = 1.

#include <cstdint>
#include <optional>
#include <vector>

#include "semigrav/lattice.hpp"

namespace semigrav::lattice {

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryState {
  ComplexVector psi;
  double t = 0.0;
  rng::Stream stream;
  /// Optional record of the signal mu_t = <mu> + delta mu, one row per step.
  std::optional<std::vector<RealVector>> record;
  /// | ||psi|| - 1 | before renormalization in the last step.
  double last_norm_defect = 0.0;
};

TrajectoryState make_trajectory(ComplexVector psi0, std::uint64_t seed,
                                std::uint64_t stream_id,
                                bool keep_record = false);

/// Everything one SSE step needs, with the noise factorization done once.
class SseModel {
 public:
  /// Without `pairpot` the trajectory is pure monitoring; with it the signal
  /// is fed back through V = sum_ij V_ij mu_t(x_j) mu_i.
  SseModel(const LatticeSystem& sys, const RealMatrix& gamma,
           std::optional<RealMatrix> pairpot = std::nullopt);

  const LatticeSystem& system() const { return sys_; }
  const RealMatrix& gamma() const { return gamma_; }
  const std::optional<RealMatrix>& pairpot() const { return pairpot_; }
  const NoiseFactor& noise() const { return noise_; }
  /// Rate scale entering the norm-defect bound.
  double rate_scale() const { return rate_scale_; }

 private:
  LatticeSystem sys_;
  RealMatrix gamma_;
  std::optional<RealMatrix> pairpot_;
  NoiseFactor noise_;
  double rate_scale_ = 0.0;
};

/// One step of the Ito SSE. The measurement part
///   d psi = -1/8 sum gamma_ij (mu_i - <mu_i>)((mu_j - <mu_j>) - 4 delta mu_j dt)
/// is integrated with the Milstein correction for commutative noise; the
/// feedback exp(-i V_t dt) uses the signal of the same step and acts after
/// the measurement update. The state is renormalized and the defect stored.
/// Throws InvariantViolation when the defect exceeds
/// 10 (rate_scale dt)^{3/2} (1 + max|xi|)^3.
void sse_step(TrajectoryState& state, const SseModel& model, double dt);

// ---------------------------------------------------------------------------
// Master equation

struct DensityMatrix {
  ComplexMatrix rho;
  double t = 0.0;
};

DensityMatrix pure_state(const ComplexVector& psi);

/// d rho / dt = -i [H + 1/2 sum V_ij mu_i mu_j, rho]
///              - 1/2 sum D_ij [mu_i, [mu_j, rho]].
class MasterEquation {
 public:
  MasterEquation(const LatticeSystem& sys, const RealMatrix& D,
                 std::optional<RealMatrix> pairpot = std::nullopt);

  ComplexMatrix generator(const ComplexMatrix& rho) const;
  const LatticeSystem& system() const { return sys_; }

 private:
  LatticeSystem sys_;
  ComplexMatrix h_eff_;
  RealMatrix dephasing_;  // m_a^2 D_aa + m_b^2 D_bb - 2 m_a m_b D_ab
};

/// Pure monitoring: D = gamma / 4, no pair potential.
MasterEquation monitoring_master_equation(const LatticeSystem& sys,
                                          const RealMatrix& gamma);

struct MeCheck {
  bool check_positivity = true;
};

/// Classical RK4 step; checks Hermiticity, unit trace and positivity and
/// throws InvariantViolation when one of them fails.
void me_step(DensityMatrix& state, const MasterEquation& me, double dt,
             MeCheck check = {});

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double purity(const ComplexMatrix& rho);
double min_eigenvalue(const ComplexMatrix& rho);

// ---------------------------------------------------------------------------
// Ensemble versus master equation

struct EnsembleConfig {
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t n_traj = 1000;
  std::size_t n_output = 50;  // comparison times, evenly spaced
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Trajectories per reduction block; results do not depend on threads.
  std::size_t block_size = 64;
  /// Trajectory stream ids are offset by this value (independent replicas).
  std::uint64_t stream_offset = 0;
};

struct EnsembleReport {
  std::vector<double> times;
  std::vector<double> trace_distance;
  std::vector<ComplexMatrix> ensemble;
  std::vector<ComplexMatrix> master;
  double max_trace_distance = 0.0;
  /// sqrt((1 - Tr rho^2) / n_traj) at the time of the maximum.
  double mc_error = 0.0;
  double max_norm_defect = 0.0;
  /// Trace distance above 5 / sqrt(n_traj).
  bool equivalence_failure = false;
};

/// Runs n_traj SSE trajectories from psi0, averages the projectors and
/// compares with the master equation whose D = gamma / 4 + V gamma^+ V is
/// built from the same matrices.
EnsembleReport ensemble_compare(const LatticeSystem& sys,
                                const RealMatrix& gamma,
                                const std::optional<RealMatrix>& pairpot,
                                const ComplexVector& psi0,
                                const EnsembleConfig& config);

}  // namespace semigrav::lattice
