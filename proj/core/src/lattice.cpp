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

#include "semigrav/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "semigrav/errors.hpp"

namespace semigrav::lattice {

LatticeSystem::LatticeSystem(std::vector<Vec3> sites, RealVector masses,
                             ComplexMatrix hamiltonian)
    : sites_(std::move(sites)),
      masses_(std::move(masses)),
      hamiltonian_(std::move(hamiltonian)) {
  const auto n = static_cast<Eigen::Index>(sites_.size());
  if (n == 0 || sites_.size() > kMaxSites) {
    throw std::invalid_argument("number of sites must be in [1, " +
                                std::to_string(kMaxSites) + "]");
  }
  if (masses_.size() != n) {
    throw std::invalid_argument("one mass per site required");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
      throw std::invalid_argument("site masses must be positive and finite");
    }
  }
  if (hamiltonian_.rows() != n || hamiltonian_.cols() != n) {
    throw std::invalid_argument("hamiltonian must be n x n");
  }
  if (!hamiltonian_.allFinite()) {
    throw std::invalid_argument("hamiltonian has non-finite entries");
  }
  const double scale = std::max(1.0, hamiltonian_.cwiseAbs().maxCoeff());
  if ((hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff() >
      kHermiticityTolerance * scale) {
    throw std::invalid_argument("hamiltonian is not Hermitian");
  }
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (std::size_t j = i + 1; j < sites_.size(); ++j) {
      if (distance(i, j) == 0.0) {
        throw std::invalid_argument("site positions must be distinct");
      }
    }
  }
}

LatticeSystem ring(std::size_t n, double spacing, double mass,
                   double hopping) {
  if (n < 3) throw std::invalid_argument("a ring needs at least 3 sites");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be > 0");
  const double radius = spacing / (2.0 * std::sin(std::numbers::pi / n));
  std::vector<Vec3> sites;
  ComplexMatrix H = ComplexMatrix::Zero(static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                         static_cast<double>(n);
    sites.emplace_back(radius * std::cos(angle), radius * std::sin(angle), 0.0);
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>((i + 1) % n);
    H(a, b) += -hopping;
    H(b, a) += -hopping;
  }
  return {std::move(sites),
          RealVector::Constant(static_cast<Eigen::Index>(n), mass),
          std::move(H)};
}

LatticeSystem pair(double distance, double mass) {
  if (!(distance > 0.0)) throw std::invalid_argument("distance must be > 0");
  return {{Vec3::Zero(), Vec3(distance, 0.0, 0.0)},
          RealVector::Constant(2, mass),
          ComplexMatrix::Zero(2, 2)};
}

KernelMatrix repair_psd(RealMatrix m) {
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw InvariantViolation("eigendecomposition of kernel matrix failed");
  }
  const RealVector& lambda = eig.eigenvalues();
  KernelMatrix out;
  out.max_eigenvalue = lambda.maxCoeff();
  const double scale = std::max(std::abs(out.max_eigenvalue), 0.0);
  if (lambda.minCoeff() >= -kPsdTolerance * scale) {
    out.entries = std::move(m);
    return out;
  }
  out.psd_shift = -lambda.minCoeff();
  if (out.psd_shift > kMaxPsdShift * scale) {
    throw InvariantViolation(
        "kernel matrix is not positive semi-definite: min eigenvalue " +
        std::to_string(lambda.minCoeff()) + " vs max " +
        std::to_string(out.max_eigenvalue));
  }
  const RealVector clipped = lambda.cwiseMax(0.0);
  out.entries = eig.eigenvectors() * clipped.asDiagonal() *
                eig.eigenvectors().transpose();
  return out;
}

KernelMatrix build_kernel_matrix(const kernel::FourierKernel& k,
                                 const LatticeSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.size());
  RealMatrix m(n, n);
  const double diagonal = kernel::to_real_space(k, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diagonal;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel::to_real_space(
          k, sys.distance(static_cast<std::size_t>(i),
                          static_cast<std::size_t>(j)));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  if (k.definiteness() == kernel::Definiteness::positive) {
    return repair_psd(std::move(m));
  }
  KernelMatrix out;
  out.entries = std::move(m);
  out.max_eigenvalue =
      Eigen::SelfAdjointEigenSolver<RealMatrix>(out.entries, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  return out;
}

NoiseFactor factorize_monitoring(const RealMatrix& gamma) {
  if (gamma.rows() != gamma.cols()) {
    throw std::invalid_argument("monitoring matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(
      0.5 * (gamma + gamma.transpose()));
  if (eig.info() != Eigen::Success) {
    throw InvariantViolation("eigendecomposition of gamma failed");
  }
  const RealVector& lambda = eig.eigenvalues();
  const double max = lambda.maxCoeff();
  if (!(max > 0.0)) throw DomainError("monitoring matrix has no positive part");
  if (lambda.minCoeff() < -kPsdTolerance * max) {
    throw DomainError("monitoring matrix is not positive semi-definite");
  }
  const Eigen::Index n = gamma.rows();
  RealVector inv_sqrt = RealVector::Zero(n);
  RealVector sqrt_l = RealVector::Zero(n);
  RealVector inv = RealVector::Zero(n);
  NoiseFactor out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda[i] > kNoiseFloor * max) {
      inv_sqrt[i] = 1.0 / std::sqrt(lambda[i]);
      sqrt_l[i] = std::sqrt(lambda[i]);
      inv[i] = 1.0 / lambda[i];
      ++out.rank;
    }
  }
  const RealMatrix& U = eig.eigenvectors();
  out.L = U * inv_sqrt.asDiagonal();
  out.gamma_L = U * sqrt_l.asDiagonal();
  out.pseudo_inverse = U * inv.asDiagonal() * U.transpose();
  return out;
}

RealVector sample_signal_noise(const NoiseFactor& factor, double dt,
                               rng::Stream& stream) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  RealVector xi(factor.L.cols());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = stream.normal();
  return factor.L * xi / std::sqrt(dt);
}

RealMatrix decoherence_matrix(const RealMatrix& gamma,
                              const std::optional<RealMatrix>& pairpot) {
  RealMatrix D = 0.25 * gamma;
  if (pairpot) {
    const NoiseFactor f = factorize_monitoring(gamma);
    D += *pairpot * f.pseudo_inverse * *pairpot;
  }
  return 0.5 * (D + D.transpose());
}

}  // namespace semigrav::lattice
