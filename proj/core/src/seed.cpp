#include "sbmsi/seed.hpp"

namespace sbmsi {

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) noexcept {
  return splitmix64_mix(master ^ splitmix64_mix(stream_id + 0x9E3779B97F4A7C15ULL));
}

}  // namespace sbmsi
