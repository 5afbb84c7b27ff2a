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
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "semigrav/dynamics.hpp"

namespace semigrav::lattice {
namespace {

struct BlockResult {
  std::vector<ComplexMatrix> sums;
  double max_norm_defect = 0.0;
};

std::vector<std::size_t> output_steps(std::size_t n_steps,
                                      std::size_t n_output) {
  std::vector<std::size_t> steps;
  for (std::size_t j = 0; j <= n_output; ++j) {
    steps.push_back((j * n_steps + n_output / 2) / n_output);
  }
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

}  // namespace

EnsembleReport ensemble_compare(const LatticeSystem& sys,
                                const RealMatrix& gamma,
                                const std::optional<RealMatrix>& pairpot,
                                const ComplexVector& psi0,
                                const EnsembleConfig& config) {
  if (config.n_traj < 100) throw std::invalid_argument("n_traj must be >= 100");
  if (!(config.t_final > 0.0) || !(config.dt > 0.0)) {
    throw std::invalid_argument("t_final and dt must be positive");
  }
  if (config.n_output == 0 || config.block_size == 0) {
    throw std::invalid_argument("n_output and block_size must be positive");
  }
  const auto n_steps = static_cast<std::size_t>(
      std::max(1.0, std::round(config.t_final / config.dt)));
  const double dt = config.t_final / static_cast<double>(n_steps);
  const std::vector<std::size_t> outputs = output_steps(n_steps, config.n_output);
  const auto dim = static_cast<Eigen::Index>(sys.size());

  EnsembleReport report;
  for (std::size_t s : outputs) {
    report.times.push_back(static_cast<double>(s) * dt);
  }

  // Master equation with D built from the same matrices.
  const MasterEquation me(sys, decoherence_matrix(gamma, pairpot), pairpot);
  DensityMatrix rho = pure_state(psi0);
  {
    std::size_t next = 0;
    for (std::size_t s = 0; s <= n_steps; ++s) {
      if (next < outputs.size() && outputs[next] == s) {
        report.master.push_back(rho.rho);
        ++next;
      }
      if (s < n_steps) me_step(rho, me, dt);
    }
  }

  const SseModel model(sys, gamma, pairpot);
  const std::size_t n_blocks =
      (config.n_traj + config.block_size - 1) / config.block_size;
  std::vector<BlockResult> blocks(n_blocks);
  std::atomic<std::size_t> next_block{0};
  auto worker = [&] {
    for (std::size_t b = next_block++; b < n_blocks; b = next_block++) {
      BlockResult& out = blocks[b];
      out.sums.assign(outputs.size(), ComplexMatrix::Zero(dim, dim));
      const std::size_t first = b * config.block_size;
      const std::size_t last =
          std::min(config.n_traj, first + config.block_size);
      for (std::size_t i = first; i < last; ++i) {
        TrajectoryState st =
            make_trajectory(psi0, config.seed, config.stream_offset + i);
        std::size_t next = 0;
        for (std::size_t s = 0; s <= n_steps; ++s) {
          if (next < outputs.size() && outputs[next] == s) {
            out.sums[next].noalias() += st.psi * st.psi.adjoint();
            ++next;
          }
          if (s < n_steps) {
            sse_step(st, model, dt);
            out.max_norm_defect =
                std::max(out.max_norm_defect, st.last_norm_defect);
          }
        }
      }
    }
  };
  const unsigned n_threads = std::max(
      1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n_blocks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Fixed reduction order: block index.
  report.ensemble.assign(outputs.size(), ComplexMatrix::Zero(dim, dim));
  for (const BlockResult& b : blocks) {
    for (std::size_t j = 0; j < outputs.size(); ++j) {
      report.ensemble[j] += b.sums[j];
    }
    report.max_norm_defect = std::max(report.max_norm_defect, b.max_norm_defect);
  }
  const double inv_n = 1.0 / static_cast<double>(config.n_traj);
  std::size_t worst = 0;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    report.ensemble[j] *= inv_n;
    const double td = trace_distance(report.ensemble[j], report.master[j]);
    report.trace_distance.push_back(td);
    if (td > report.max_trace_distance) {
      report.max_trace_distance = td;
      worst = j;
    }
  }
  report.mc_error = std::sqrt(
      std::max(0.0, 1.0 - purity(report.ensemble[worst])) * inv_n);
  report.equivalence_failure =
      report.max_trace_distance >
      5.0 / std::sqrt(static_cast<double>(config.n_traj));
  return report;
}

}  // namespace semigrav::lattice
