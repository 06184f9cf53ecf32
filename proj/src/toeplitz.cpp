#include "diqrng/toeplitz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <complex>
#include <fstream>
#include <iterator>
#include <memory>
#include <mutex>
#include <string>

#include "diqrng/error.hpp"
#include "diqrng/parallel.hpp"
#include "diqrng/rng.hpp"

namespace diqrng {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::uint64_t kMaxFftSize = std::uint64_t{1} << 30;
constexpr double kMaxRounding = 0.25;

std::uint64_t fft_size_for(std::uint64_t m, std::uint64_t block_len) {
  return std::bit_ceil(m + block_len - 1);
}

// Worst-case absolute error of a double-precision FFT convolution of 0/1
// vectors of lengths a_len and b_len (generous constant).
double rounding_bound(std::uint64_t fft_size, std::uint64_t a_len, std::uint64_t b_len) {
  const double log_n = std::log2(static_cast<double>(fft_size));
  return 3.0 * log_n * 0x1.0p-52 * std::sqrt(static_cast<double>(a_len) * static_cast<double>(b_len)) + 0x1.0p-40;
}

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) fail(ErrorKind::Parameter, "sizing: cannot allocate FFT buffer");
  return FftwBuffer<T>(p);
}

class FftPair {
 public:
  explicit FftPair(std::size_t size) {
    auto real = fftw_buffer<double>(size);
    auto spectrum = fftw_buffer<fftw_complex>(size / 2 + 1);
    std::lock_guard lock(planner_mutex());
    const int n = static_cast<int>(size);
    forward_ = fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE);
    if (!forward_ || !inverse_) fail(ErrorKind::Parameter, "sizing: FFT planning failed");
  }
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inverse_, in, out); }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace

BitVector::BitVector(std::vector<std::uint8_t> packed, std::uint64_t size) : size_(size), bytes_(std::move(packed)) {
  if (bytes_.size() != (size + 7) / 8) fail(ErrorKind::Format, "packed bit buffer does not match bit length");
  clear_padding();
}

BitVector BitVector::from_string(const char* bits) {
  const std::string s(bits);
  BitVector out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') fail(ErrorKind::Parameter, "bit string must contain only 0 and 1");
    out.set(i, s[i] == '1');
  }
  return out;
}

void BitVector::clear_padding() {
  if (size_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>(0xff00u >> (size_ % 8));
}

std::uint64_t BitVector::popcount() const {
  std::uint64_t sum = 0;
  for (std::uint8_t b : bytes_) sum += static_cast<std::uint64_t>(std::popcount(b));
  return sum;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.size_ != size_) fail(ErrorKind::Parameter, "bit vector length mismatch");
  for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
  return *this;
}

BitVector BitVector::read_file(const std::filesystem::path& path, std::uint64_t size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != (size + 7) / 8) {
    fail(ErrorKind::Format, path.string() + ": expected " + std::to_string((size + 7) / 8) + " bytes for " +
                                std::to_string(size) + " bits, found " + std::to_string(bytes.size()));
  }
  return BitVector(std::move(bytes), size);
}

void BitVector::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

ToeplitzSeed::ToeplitzSeed(BitVector bits, std::uint64_t n, std::uint64_t m) : bits_(std::move(bits)), n_(n), m_(m) {
  if (n == 0 || m == 0) fail(ErrorKind::Parameter, "Toeplitz dimensions must be positive");
  if (bits_.size() != n + m - 1) {
    fail(ErrorKind::Validation, "seed has " + std::to_string(bits_.size()) + " bits, expected n+m-1 = " +
                                    std::to_string(n + m - 1));
  }
}

ToeplitzSeed testing_only_seed(std::uint64_t n, std::uint64_t m, std::uint64_t rng_seed) {
  BitVector bits(n + m - 1);
  Rng rng(derive_seed(rng_seed, 0));
  for (std::uint64_t i = 0; i < bits.size(); ++i) bits.set(i, rng() >> 63);
  return ToeplitzSeed(std::move(bits), n, m);
}

BitVector extract_naive(const BitVector& raw, const ToeplitzSeed& seed) {
  if (raw.size() != seed.n()) fail(ErrorKind::Parameter, "raw length does not match seed n");
  BitVector out(seed.m());
  for (std::uint64_t i = 0; i < seed.m(); ++i) {
    bool acc = false;
    for (std::uint64_t j = 0; j < seed.n(); ++j) acc ^= raw.get(j) && seed.entry(i, j);
    out.set(i, acc);
  }
  return out;
}

void ExtractionPlan::validate() const {
  if (n == 0) fail(ErrorKind::Parameter, "extraction input is empty");
  if (m == 0) fail(ErrorKind::Parameter, "extraction output is empty");
  if (m > n) fail(ErrorKind::Parameter, "output length exceeds input length");
  if (block_count == 0 || block_count > n) fail(ErrorKind::Parameter, "block_count must lie in [1, n]");
  if (block_len != (n + block_count - 1) / block_count) fail(ErrorKind::Parameter, "block length inconsistent");
  if (fft_size != fft_size_for(m, block_len)) fail(ErrorKind::Parameter, "FFT size inconsistent");
  if (fft_size > kMaxFftSize) {
    fail(ErrorKind::Parameter, "sizing: FFT length " + std::to_string(fft_size) + " exceeds 2^30; use more blocks");
  }
  if (rounding_bound(fft_size, m + block_len - 1, block_len) >= kMaxRounding) {
    fail(ErrorKind::Parameter, "sizing: block too large for exact integer recovery");
  }
}

namespace {

ExtractionPlan make_plan(std::uint64_t n, std::uint64_t m, std::uint64_t block_count) {
  ExtractionPlan plan;
  plan.n = n;
  plan.m = m;
  plan.block_count = block_count;
  plan.block_len = block_count == 0 ? 0 : (n + block_count - 1) / block_count;
  plan.fft_size = plan.block_len == 0 ? 0 : fft_size_for(m, plan.block_len);
  return plan;
}

}  // namespace

ExtractionPlan plan_extraction(double hmin_bound, std::int64_t t_e, std::uint64_t n, std::uint64_t block_count) {
  if (t_e <= 0) fail(ErrorKind::Parameter, "t_e must be > 0");
  if (!(hmin_bound > static_cast<double>(t_e))) fail(ErrorKind::Validation, "nothing extractable: hmin_bound <= t_e");
  const double floor_h = std::floor(hmin_bound);
  if (floor_h - static_cast<double>(t_e) < 1.0) fail(ErrorKind::Validation, "nothing extractable: m < 1");
  const auto m = static_cast<std::uint64_t>(floor_h) - static_cast<std::uint64_t>(t_e);
  if (block_count == 0) {
    // Keep each block near 4m raw bits (at least 2^16), then grow the count
    // until the exactness guard holds.
    const std::uint64_t target = std::max<std::uint64_t>(4 * m, std::uint64_t{1} << 16);
    block_count = std::clamp<std::uint64_t>((n + target - 1) / target, 1, std::max<std::uint64_t>(n, 1));
    while (block_count < n) {
      const ExtractionPlan p = make_plan(n, m, block_count);
      if (p.fft_size <= kMaxFftSize && rounding_bound(p.fft_size, m + p.block_len - 1, p.block_len) < kMaxRounding) {
        break;
      }
      block_count *= 2;
    }
    block_count = std::min(block_count, n);
  }
  ExtractionPlan plan = make_plan(n, m, block_count);
  plan.t_e = t_e;
  plan.hash_failure = std::exp2(-static_cast<double>(t_e));
  plan.validate();
  return plan;
}

BitVector extract_blocked_fft(const BitVector& raw, const ToeplitzSeed& seed, std::uint64_t block_count) {
  const std::uint64_t n = seed.n(), m = seed.m();
  if (raw.size() != n) fail(ErrorKind::Parameter, "raw length does not match seed n");
  if (block_count == 0) fail(ErrorKind::Parameter, "block_count must be >= 1");
  block_count = std::min(block_count, n);
  const std::uint64_t block_len = (n + block_count - 1) / block_count;
  const std::uint64_t size = fft_size_for(m, block_len);
  if (size > kMaxFftSize) fail(ErrorKind::Parameter, "sizing: FFT length exceeds 2^30; use more blocks");
  if (rounding_bound(size, m + block_len - 1, block_len) >= kMaxRounding) {
    fail(ErrorKind::Parameter, "sizing: block too large for exact integer recovery");
  }
  const std::uint64_t blocks = (n + block_len - 1) / block_len;
  const FftPair fft(size);
  const double scale = 1.0 / static_cast<double>(size);

  BitVector result(m);
  std::mutex combine_mutex;
  parallel_for(blocks, [&](std::size_t k) {
    const std::uint64_t jb = k * block_len;
    const std::uint64_t len = std::min(block_len, n - jb);
    // Seed window seg[t] = seed[base + t], base = n - jb - len; then the
    // block's contribution to y_i is conv(seg, raw_block)[i + len - 1].
    const std::uint64_t base = n - jb - len;
    const std::uint64_t seg_len = m + len - 1;

    auto seg = fftw_buffer<double>(size);
    auto blk = fftw_buffer<double>(size);
    auto seg_hat = fftw_buffer<fftw_complex>(size / 2 + 1);
    auto blk_hat = fftw_buffer<fftw_complex>(size / 2 + 1);
    for (std::uint64_t t = 0; t < size; ++t) {
      seg[t] = t < seg_len ? static_cast<double>(seed.bits().get(base + t)) : 0.0;
      blk[t] = t < len ? static_cast<double>(raw.get(jb + t)) : 0.0;
    }
    fft.forward(seg.get(), seg_hat.get());
    fft.forward(blk.get(), blk_hat.get());
    for (std::uint64_t f = 0; f < size / 2 + 1; ++f) {
      const double re = seg_hat[f][0] * blk_hat[f][0] - seg_hat[f][1] * blk_hat[f][1];
      const double im = seg_hat[f][0] * blk_hat[f][1] + seg_hat[f][1] * blk_hat[f][0];
      seg_hat[f][0] = re;
      seg_hat[f][1] = im;
    }
    fft.inverse(seg_hat.get(), seg.get());

    BitVector partial(m);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
      const double v = seg[i + len - 1] * scale;
      const double r = std::nearbyint(v);
      worst = std::max(worst, std::abs(v - r));
      if (static_cast<std::uint64_t>(r) & 1) partial.set(i, true);
    }
    if (worst >= kMaxRounding) fail(ErrorKind::Parameter, "sizing: FFT rounding residual too large");
    std::lock_guard lock(combine_mutex);
    result ^= partial;
  });
  return result;
}

bool monobit_ok(const BitVector& bits) {
  if (bits.size() == 0) return false;
  const double m = static_cast<double>(bits.size());
  return std::abs(static_cast<double>(bits.popcount()) / m - 0.5) < 4.0 / std::sqrt(m);
}

}  // namespace diqrng
