#pragma once

#include <cstdint>
#include <string_view>

namespace psp {

/// Counter-based pseudo-random stream (splitmix64).
///
/// Every consumer owns its own stream, derived from one master seed plus a
/// purpose key, so experiments can re-draw one family of random inputs
/// (say, communication delays) without perturbing any other family.
/// Identical (seed, key) pairs reproduce byte-identical sequences.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform draw on the half-open interval [0, 1).
  double next_unit();

 private:
  std::uint64_t state_;
};

/// Identifier of the stream algorithm, recorded in artifact metadata.
inline constexpr std::string_view kRngId = "splitmix64-v1";

/// Derives an independent substream from a master seed and a purpose key.
/// `a` and `b` distinguish streams of the same purpose (typically buyer id
/// and realization index).
RngStream substream(std::uint64_t master_seed, std::string_view purpose,
                    std::int64_t a = 0, std::int64_t b = 0);

}  // namespace psp
