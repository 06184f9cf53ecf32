#pragma once

// Seeding contract: every stochastic operation takes an explicit 64-bit seed.
// Work is cut into fixed-size chunks (independent of thread count) and chunk k
// draws from std::mt19937_64 seeded with derive_seed(master, k).

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace diqrng {

using Rng = std::mt19937_64;

inline constexpr std::size_t kChunkTrials = std::size_t{1} << 20;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

// 53-bit uniform in [0,1); portable, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Walker/Vose alias table; one 64-bit draw per sample (high half picks the
// column, low half is compared against the column threshold).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> probs);

  std::size_t size() const noexcept { return alias_.size(); }

  std::size_t sample(Rng& rng) const {
    const std::uint64_t u = rng();
    const std::size_t column = static_cast<std::size_t>(((u >> 32) * alias_.size()) >> 32);
    const std::uint64_t frac = u & 0xffffffffULL;
    return frac < threshold_[column] ? column : alias_[column];
  }

 private:
  std::vector<std::uint64_t> threshold_;  // acceptance threshold scaled to 2^32
  std::vector<std::size_t> alias_;
};

}  // namespace diqrng
