#pragma once

// Toeplitz hashing over GF(2).
//
// Matrix convention: T[i][j] = seed[i - j + n - 1] for an m x n matrix, so the
// output is y_i = (seed * raw)[i + n - 1] with * the integer convolution,
// reduced mod 2. Bits are packed MSB-first; index 0 is the top bit of byte 0.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace diqrng {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::uint64_t size) : size_(size), bytes_((size + 7) / 8, 0) {}
  // Bits beyond size in the last byte are ignored.
  BitVector(std::vector<std::uint8_t> packed, std::uint64_t size);
  static BitVector from_string(const char* bits);  // "1011"

  std::uint64_t size() const noexcept { return size_; }
  bool get(std::uint64_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1; }
  void set(std::uint64_t i, bool v) {
    const std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
    bytes_[i >> 3] = static_cast<std::uint8_t>(v ? (bytes_[i >> 3] | mask) : (bytes_[i >> 3] & ~mask));
  }
  void flip(std::uint64_t i) { bytes_[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7)); }
  std::uint64_t popcount() const;

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  BitVector& operator^=(const BitVector& other);
  friend bool operator==(const BitVector&, const BitVector&) = default;

  // Headerless file of exactly ceil(size/8) bytes.
  static BitVector read_file(const std::filesystem::path& path, std::uint64_t size);
  void write_file(const std::filesystem::path& path) const;

 private:
  void clear_padding();

  std::uint64_t size_ = 0;
  std::vector<std::uint8_t> bytes_;
};

class ToeplitzSeed {
 public:
  // bits.size() must be exactly n + m - 1.
  ToeplitzSeed(BitVector bits, std::uint64_t n, std::uint64_t m);

  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t m() const noexcept { return m_; }
  const BitVector& bits() const noexcept { return bits_; }
  bool entry(std::uint64_t i, std::uint64_t j) const { return bits_.get(i - j + n_ - 1); }

 private:
  BitVector bits_;
  std::uint64_t n_;
  std::uint64_t m_;
};

// Deterministic pseudo-random seed. FOR TESTING ONLY: a real seed must come
// from an independent source, never from this generator.
ToeplitzSeed testing_only_seed(std::uint64_t n, std::uint64_t m, std::uint64_t rng_seed);

// O(n m) reference multiply.
BitVector extract_naive(const BitVector& raw, const ToeplitzSeed& seed);

// Splits raw into block_count contiguous blocks, convolves each with the
// matching seed window through a real FFT, rounds, reduces mod 2 and XORs the
// partial outputs. Refuses (ErrorKind::Parameter, "sizing") when rounding
// could be inexact.
BitVector extract_blocked_fft(const BitVector& raw, const ToeplitzSeed& seed, std::uint64_t block_count);

struct ExtractionPlan {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::int64_t t_e = 0;
  std::uint64_t block_count = 1;
  std::uint64_t block_len = 0;  // raw bits per block (last block may be shorter)
  std::uint64_t fft_size = 0;
  double hash_failure = 0.0;    // 2^-t_e

  std::uint64_t seed_length() const { return n + m - 1; }
  // Sizes, exactness guard and FFT-length limits; throws on violation.
  void validate() const;
};

// m = floor(hmin_bound) - t_e. block_count = 0 picks one automatically.
ExtractionPlan plan_extraction(double hmin_bound, std::int64_t t_e, std::uint64_t n, std::uint64_t block_count = 0);

// |ones/m - 1/2| < 4/sqrt(m)
bool monobit_ok(const BitVector& bits);

}  // namespace diqrng
