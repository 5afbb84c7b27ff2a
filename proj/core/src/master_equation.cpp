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

#include <cmath>
#include <stdexcept>
#include <string>

#include "semigrav/dynamics.hpp"
#include "semigrav/errors.hpp"

namespace semigrav::lattice {
namespace {

constexpr double kTraceTolerance = 1e-10;
constexpr double kPositivityTolerance = 1e-8;

}  // namespace

DensityMatrix pure_state(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("zero state vector");
  const ComplexVector u = psi / norm;
  return {u * u.adjoint(), 0.0};
}

MasterEquation::MasterEquation(const LatticeSystem& sys, const RealMatrix& D,
                               std::optional<RealMatrix> pairpot)
    : sys_(sys), h_eff_(sys.hamiltonian()) {
  const auto n = static_cast<Eigen::Index>(sys.size());
  if (D.rows() != n || D.cols() != n) {
    throw std::invalid_argument("decoherence matrix must be n x n");
  }
  const RealVector& m = sys.masses();
  if (pairpot) {
    if (pairpot->rows() != n || pairpot->cols() != n) {
      throw std::invalid_argument("pair potential must be n x n");
    }
    // 1/2 sum_ij V_ij mu_i mu_j is diagonal for a single particle.
    for (Eigen::Index a = 0; a < n; ++a) {
      h_eff_(a, a) += 0.5 * m[a] * m[a] * (*pairpot)(a, a);
    }
  }
  dephasing_.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      dephasing_(a, b) = m[a] * m[a] * D(a, a) + m[b] * m[b] * D(b, b) -
                         2.0 * m[a] * m[b] * D(a, b);
    }
  }
}

ComplexMatrix MasterEquation::generator(const ComplexMatrix& rho) const {
  const std::complex<double> minus_i(0.0, -1.0);
  ComplexMatrix out = minus_i * (h_eff_ * rho - rho * h_eff_);
  out -= 0.5 * dephasing_.cast<std::complex<double>>().cwiseProduct(rho);
  return out;
}

MasterEquation monitoring_master_equation(const LatticeSystem& sys,
                                          const RealMatrix& gamma) {
  return MasterEquation(sys, 0.25 * gamma);
}

void me_step(DensityMatrix& state, const MasterEquation& me, double dt,
             MeCheck check) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const ComplexMatrix& rho = state.rho;
  const ComplexMatrix k1 = me.generator(rho);
  const ComplexMatrix k2 = me.generator(rho + 0.5 * dt * k1);
  const ComplexMatrix k3 = me.generator(rho + 0.5 * dt * k2);
  const ComplexMatrix k4 = me.generator(rho + dt * k3);
  state.rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  state.t += dt;

  const double hermiticity =
      (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(hermiticity <= kHermiticityTolerance)) {
    throw InvariantViolation("density matrix lost Hermiticity: " +
                             std::to_string(hermiticity));
  }
  const double trace_error = std::abs(state.rho.trace() - 1.0);
  if (!(trace_error <= kTraceTolerance)) {
    throw InvariantViolation("density matrix trace drifted by " +
                             std::to_string(trace_error));
  }
  if (check.check_positivity) {
    const double lambda = min_eigenvalue(state.rho);
    if (!(lambda >= -kPositivityTolerance)) {
      throw InvariantViolation("density matrix lost positivity: " +
                               std::to_string(lambda));
    }
  }
}

double min_eigenvalue(const ComplexMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(
      0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix d = a - b;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (d + d.adjoint()),
                                                   Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double purity(const ComplexMatrix& rho) {
  return (rho * rho).trace().real();
}

}  // namespace semigrav::lattice
