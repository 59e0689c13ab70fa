#include "psp/random.hpp"

namespace psp {
namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

}  // namespace

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::next_unit() {
  // 53 random bits; ldexp keeps the draw in [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream substream(std::uint64_t master_seed, std::string_view purpose,
                    std::int64_t a, std::int64_t b) {
  // FNV-1a over the purpose string, then scramble in the numeric keys.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  h = mix64(h ^ master_seed);
  h = mix64(h + kGamma * static_cast<std::uint64_t>(a));
  h = mix64(h + kGamma * static_cast<std::uint64_t>(b));
  return RngStream(h);
}

}  // namespace psp
