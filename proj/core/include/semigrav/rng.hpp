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

// Counter-based random numbers. Every variate is a pure function of
// (seed, stream id, position), so work can be scattered over any number of
// threads without changing a single output bit.
//
// Counter layout of one Philox block:
//   word 0,1 : block index within the stream (64 bit)
//   word 2,3 : stream id (64 bit)
//   key      : the 64-bit seed
// Trajectory i of a run uses stream id i. Independent purposes inside a run
// (noise fields, replicas) derive their own seed with derive_seed().

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace semigrav::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
Counter philox4x32(Counter counter, Key key);

/// SplitMix64 finalizer of (seed, purpose); used to give unrelated uses of
/// one master seed disjoint keys.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t purpose);

class Stream {
 public:
  using result_type = std::uint32_t;

  Stream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal by the Box-Muller transform.
  double normal();

  void fill_normal(std::span<double> out);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace semigrav::rng
