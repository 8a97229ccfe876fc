#pragma once

#include <cstdint>
#include <random>

namespace sbmsi {

/// Finalizer of the splitmix64 generator (Steele, Lea, Flood 2014):
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27; z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
/// A bijection on 64-bit words.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Stateless per-stream seed:
///   derive_seed(m, s) = mix(m ^ mix(s + 0x9E3779B97F4A7C15))
/// For a fixed master seed the map s -> derive_seed(m, s) is a composition of
/// bijections, so distinct stream ids never collide.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) noexcept;

/// Stream ids reserved for a purpose carry the purpose in the top 16 bits.
enum class StreamPurpose : std::uint64_t {
  Replica = 0,
  Graph = 1,
  Tree = 2,
  Pool = 3,
  Labels = 4,
  Edges = 5,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 48) ^ index;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

}  // namespace sbmsi
