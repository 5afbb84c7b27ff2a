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

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "semigrav/dynamics.hpp"
#include "semigrav/errors.hpp"

namespace semigrav::lattice {

TrajectoryState make_trajectory(ComplexVector psi0, std::uint64_t seed,
                                std::uint64_t stream_id, bool keep_record) {
  const double norm = psi0.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("initial state must be a non-zero vector");
  }
  TrajectoryState state{psi0 / norm, 0.0, rng::Stream(seed, stream_id),
                        std::nullopt, 0.0};
  if (keep_record) state.record.emplace();
  return state;
}

SseModel::SseModel(const LatticeSystem& sys, const RealMatrix& gamma,
                   std::optional<RealMatrix> pairpot)
    : sys_(sys), gamma_(0.5 * (gamma + gamma.transpose())),
      pairpot_(std::move(pairpot)) {
  const auto n = static_cast<Eigen::Index>(sys.size());
  if (gamma.rows() != n || gamma.cols() != n) {
    throw std::invalid_argument("gamma must be n x n");
  }
  if (pairpot_ && (pairpot_->rows() != n || pairpot_->cols() != n)) {
    throw std::invalid_argument("pair potential must be n x n");
  }
  noise_ = factorize_monitoring(gamma_);
  const double m_max = sys.masses().maxCoeff();
  rate_scale_ = sys.hamiltonian().norm() + m_max * m_max * gamma_.norm();
}

void sse_step(TrajectoryState& state, const SseModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const LatticeSystem& sys = model.system();
  const auto n = static_cast<Eigen::Index>(sys.size());
  if (state.psi.size() != n) {
    throw std::invalid_argument("state dimension does not match the lattice");
  }
  const RealVector& m = sys.masses();
  const RealMatrix& gamma = model.gamma();
  const NoiseFactor& noise = model.noise();
  ComplexVector& psi = state.psi;

  std::array<double, kMaxSites> p{}, mean{}, xi{}, dW{}, w{}, beta{}, q{};
  double xi_max = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    p[a] = std::norm(psi[a]);
    mean[a] = m[a] * p[a];
    xi[a] = state.stream.normal();
    xi_max = std::max(xi_max, std::abs(xi[a]));
  }
  const double sqrt_dt = std::sqrt(dt);
  for (Eigen::Index a = 0; a < n; ++a) {
    double s_l = 0.0, s_gl = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s_l += noise.L(a, j) * xi[j];
      s_gl += noise.gamma_L(a, j) * xi[j];
    }
    dW[a] = sqrt_dt * s_l;
    w[a] = sqrt_dt * s_gl;
  }
  double s_w = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s_w += mean[i] * w[i];
  std::array<double, kMaxSites> g{};
  double c = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += gamma(a, j) * mean[j];
    g[a] = s;
    c += mean[a] * s;
  }
  double avg_beta2 = 0.0, avg_q = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    beta[a] = 0.5 * (m[a] * w[a] - s_w);
    q[a] = 0.25 * (m[a] * m[a] * gamma(a, a) - 2.0 * m[a] * g[a] + c);
    avg_beta2 += p[a] * beta[a] * beta[a];
    avg_q += p[a] * q[a];
  }

  const ComplexVector h_psi = sys.hamiltonian() * psi;
  const std::complex<double> minus_i_dt(0.0, -dt);
  double norm2 = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double milstein = 0.5 * ((beta[a] * beta[a] - q[a] * dt) -
                                   2.0 * (avg_beta2 - avg_q * dt));
    psi[a] += minus_i_dt * h_psi[a] +
              psi[a] * (-0.5 * q[a] * dt + beta[a] + milstein);
    norm2 += std::norm(psi[a]);
  }
  const double norm = std::sqrt(norm2);
  state.last_norm_defect = std::abs(norm - 1.0);
  const double bound = 10.0 * std::pow(model.rate_scale() * dt, 1.5) *
                       std::pow(1.0 + xi_max, 3.0);
  if (!(state.last_norm_defect <= bound)) {
    throw InvariantViolation("SSE norm defect " +
                             std::to_string(state.last_norm_defect) +
                             " exceeds the step bound " +
                             std::to_string(bound) + "; reduce dt");
  }
  psi /= norm;

  if (model.pairpot()) {
    const RealMatrix& V = *model.pairpot();
    for (Eigen::Index a = 0; a < n; ++a) {
      double phase = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        phase += V(a, j) * (mean[j] * dt + dW[j]);
      }
      psi[a] *= std::polar(1.0, -m[a] * phase);
    }
  }
  if (state.record) {
    RealVector signal(n);
    for (Eigen::Index a = 0; a < n; ++a) signal[a] = mean[a] + dW[a] / dt;
    state.record->push_back(std::move(signal));
  }
  state.t += dt;
}

}  // namespace semigrav::lattice
