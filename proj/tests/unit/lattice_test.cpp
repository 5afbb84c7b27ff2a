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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semigrav/errors.hpp"
#include "semigrav/pld.hpp"

namespace semigrav::lattice {
namespace {

using kernel::MollifierKind;

struct Kernels {
  kernel::FourierKernel pairpot;
  kernel::FourierKernel gamma;
};

Kernels gaussian_kernels(double sigma) {
  const auto grid = kernel::default_grid(sigma);
  auto v = kernel::regularized_newtonian_kernel(
      1.0, kernel::Mollifier(MollifierKind::gaussian, sigma), grid);
  auto g = pld::pld_minimize(v);
  return {std::move(v), std::move(g)};
}

TEST(LatticeSystem, Validation) {
  const ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  EXPECT_THROW(LatticeSystem({Vec3::Zero(), Vec3::Zero()},
                             RealVector::Ones(2), h),
               std::invalid_argument);
  EXPECT_THROW(LatticeSystem({Vec3::Zero(), Vec3::UnitX()},
                             RealVector::Ones(3), h),
               std::invalid_argument);
  ComplexMatrix non_hermitian = h;
  non_hermitian(0, 1) = 1.0;
  EXPECT_THROW(LatticeSystem({Vec3::Zero(), Vec3::UnitX()},
                             RealVector::Ones(2), non_hermitian),
               std::invalid_argument);
  EXPECT_THROW(ring(2, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(pair(0.0, 1.0), std::invalid_argument);
}

TEST(LatticeSystem, RingGeometry) {
  const auto sys = ring(6, 2.0, 1.5, 0.7);
  ASSERT_EQ(sys.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(sys.distance(i, (i + 1) % 6), 2.0, 1e-12);
    EXPECT_EQ(sys.masses()[static_cast<Eigen::Index>(i)], 1.5);
    EXPECT_EQ(sys.hamiltonian()(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>((i + 1) % 6)),
              std::complex<double>(-0.7));
  }
  // Hexagon: opposite vertices sit two edges apart.
  EXPECT_NEAR(sys.distance(0, 3), 4.0, 1e-12);
}

TEST(KernelMatrix, EntriesAreRealSpaceKernel) {
  const auto k = gaussian_kernels(0.5);
  const auto sys = ring(4, 1.0, 1.0, 1.0);
  const auto m = build_kernel_matrix(k.pairpot, sys);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double r = sys.distance(static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(j));
      EXPECT_LT(testing::rel_err(m.entries(i, j),
                                 testing::gaussian_potential(1.0, 0.5, r)),
                1e-6);
      EXPECT_EQ(m.entries(i, j), m.entries(j, i));
    }
  }
}

TEST(KernelMatrix, PositiveKernelsArePsd) {
  for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
    const auto k = gaussian_kernels(sigma);
    for (const auto& sys : {pair(1.0, 1.0), ring(4, 1.0, 1.0, 1.0),
                            ring(8, 0.5, 1.0, 1.0)}) {
      const auto g = build_kernel_matrix(k.gamma, sys);
      EXPECT_LT(g.psd_shift, 1e-6 * g.max_eigenvalue);
      const auto p = build_kernel_matrix(k.pairpot, sys).entries;
      const auto d = repair_psd(decoherence_matrix(g.entries, p));
      EXPECT_LT(d.psd_shift, 1e-6 * d.max_eigenvalue);
      Eigen::SelfAdjointEigenSolver<RealMatrix> eig(d.entries);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * d.max_eigenvalue);
    }
  }
}

TEST(RepairPsd, ClipsSmallNegativeEigenvalues) {
  RealMatrix m(2, 2);
  m << 1.0, 1.0 + 1e-9, 1.0 + 1e-9, 1.0;
  const auto r = repair_psd(m);
  EXPECT_GT(r.psd_shift, 0.0);
  EXPECT_LT(r.psd_shift, 1e-6 * r.max_eigenvalue);
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(r.entries);
  EXPECT_GE(eig.eigenvalues().minCoeff(), 0.0 - 1e-15);

  RealMatrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(repair_psd(bad), InvariantViolation);

  const RealMatrix fine = RealMatrix::Identity(3, 3);
  EXPECT_EQ(repair_psd(fine).psd_shift, 0.0);
}

TEST(DecoherenceMatrix, Formula) {
  RealMatrix g(2, 2), v(2, 2);
  g << 4.0, 1.0, 1.0, 2.0;
  v << -1.0, -0.5, -0.5, -1.0;
  const RealMatrix expected = 0.25 * g + v * g.inverse() * v;
  EXPECT_LT((decoherence_matrix(g, v) - expected).norm(), 1e-14);
  EXPECT_LT((decoherence_matrix(g, std::nullopt) - 0.25 * g).norm(), 1e-15);
}

TEST(NoiseFactor, CovarianceIsPseudoInverse) {
  RealMatrix g(3, 3);
  g << 3.0, 1.0, 0.5, 1.0, 2.0, 0.3, 0.5, 0.3, 1.0;
  const auto f = factorize_monitoring(g);
  EXPECT_EQ(f.rank, 3u);
  EXPECT_LT((f.L * f.L.transpose() - g.inverse()).norm(), 1e-12);
  EXPECT_LT((f.pseudo_inverse - g.inverse()).norm(), 1e-12);

  rng::Stream stream(9, 0);
  const double dt = 0.01;
  const int n = 200000;
  RealMatrix cov = RealMatrix::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const RealVector x = sample_signal_noise(f, dt, stream);
    cov += x * x.transpose();
  }
  cov *= dt / n;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double sd = std::sqrt((g.inverse()(i, i) * g.inverse()(j, j) +
                                   std::pow(g.inverse()(i, j), 2)) / n);
      EXPECT_NEAR(cov(i, j), g.inverse()(i, j), 5.0 * sd);
    }
  }
}

TEST(NoiseFactor, RankDeficientMonitoring) {
  RealMatrix g(2, 2);
  g << 1.0, 1.0, 1.0, 1.0;
  const auto f = factorize_monitoring(g);
  EXPECT_EQ(f.rank, 1u);
  EXPECT_LT((g * f.pseudo_inverse * g - g).norm(), 1e-12);
  RealMatrix neg(2, 2);
  neg << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(factorize_monitoring(neg), DomainError);
}

}  // namespace
}  // namespace semigrav::lattice
