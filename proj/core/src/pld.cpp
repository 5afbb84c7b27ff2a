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

#include "semigrav/pld.hpp"

#include <ostream>
#include <stdexcept>

#include "semigrav/errors.hpp"
#include "semigrav/io.hpp"

namespace semigrav::pld {
namespace {

using kernel::Definiteness;

// Exact zeros only: the composition must not discard small but resolved
// entries of a kernel that spans many decades.
constexpr double kCompositionFloor = 0.0;

void require_monitoring_kernel(const FourierKernel& gamma,
                               const FourierKernel& pairpot) {
  if (!gamma.same_grid(pairpot)) {
    throw std::invalid_argument("gamma and pair potential grids differ");
  }
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] < 0.0) {
      throw DomainError("monitoring kernel negative at k = " +
                        io::format_double(gamma.k_grid()[i]));
    }
    if (gamma[i] == 0.0 && pairpot[i] != 0.0) {
      throw DomainError("monitoring kernel vanishes where the pair potential "
                        "does not, at k = " +
                        io::format_double(gamma.k_grid()[i]));
    }
  }
}

void require_negative(const FourierKernel& pairpot) {
  if (pairpot.definiteness() != Definiteness::negative) {
    throw DomainError("pair potential must be negative on the grid, got " +
                      kernel::to_string(pairpot.definiteness()));
  }
}

FourierKernel sandwich(const FourierKernel& gamma,
                       const FourierKernel& pairpot) {
  const auto inverse = kernel::kernel_inverse(gamma, kCompositionFloor);
  return kernel::kernel_product(
      kernel::kernel_product(pairpot, inverse.kernel), pairpot);
}

}  // namespace

FourierKernel decoherence_kernel(const FourierKernel& gamma,
                                 const FourierKernel& pairpot) {
  require_monitoring_kernel(gamma, pairpot);
  auto D = kernel::kernel_sum(kernel::scaled(gamma, 0.25),
                              sandwich(gamma, pairpot));
  kernel::KernelInfo info = pairpot.info();
  info.kind = "decoherence";
  return D.with_info(std::move(info));
}

FourierKernel pld_minimize(const FourierKernel& pairpot) {
  require_negative(pairpot);
  kernel::KernelInfo info = pairpot.info();
  info.kind = "pld_gamma";
  return kernel::scaled(kernel::magnitude(pairpot), 2.0)
      .with_info(std::move(info));
}

RegularizedPld regularized_pld(const FourierKernel& pairpot,
                               const Mollifier& m) {
  require_negative(pairpot);
  const FourierKernel smeared = kernel::conjugate(pairpot, m);
  kernel::KernelInfo gamma_info = smeared.info();
  gamma_info.kind = "pld_gamma";
  kernel::KernelInfo d_info = smeared.info();
  d_info.kind = "decoherence";
  return {kernel::scaled(smeared, -2.0).with_info(std::move(gamma_info)),
          kernel::conjugate(kernel::magnitude(pairpot), m)
              .with_info(std::move(d_info))};
}

FourierKernel phi_noise_covariance(const FourierKernel& gamma,
                                   const FourierKernel& pairpot) {
  require_monitoring_kernel(gamma, pairpot);
  kernel::KernelInfo info = pairpot.info();
  info.kind = "phi_noise_covariance";
  return sandwich(gamma, pairpot).with_info(std::move(info));
}

void write_scan_csv(std::ostream& out, const FourierKernel& pairpot) {
  const FourierKernel gamma = pld_minimize(pairpot);
  const FourierKernel D = decoherence_kernel(gamma, pairpot);
  io::write_csv_row(out, {"k", "pairpot", "gamma_star", "decoherence_star"});
  for (std::size_t i = 0; i < pairpot.size(); ++i) {
    io::write_csv_row(out, {io::format_double(pairpot.k_grid()[i]),
                            io::format_double(pairpot[i]),
                            io::format_double(gamma[i]),
                            io::format_double(D[i])});
  }
}

}  // namespace semigrav::pld
