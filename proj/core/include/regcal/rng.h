// Copyright 2026 The regcal Authors.
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

#ifndef REGCAL_RNG_H_
#define REGCAL_RNG_H_

#include <array>
#include <cstdint>

namespace regcal {

// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for the
// known-answer tests.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Counter-based random stream. The key is the master seed and the upper
// half of the counter is the stream id, so (master_seed, stream_id) fully
// determines the sequence and streams never share state. Copying a stream
// copies its position.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Independent stream keyed by (this stream's identity, index). Does not
  // advance this stream.
  RngStream child(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace regcal

#endif  // REGCAL_RNG_H_
