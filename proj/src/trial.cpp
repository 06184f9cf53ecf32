#include "diqrng/trial.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "diqrng/error.hpp"
#include "diqrng/parallel.hpp"
#include "diqrng/rng.hpp"

namespace diqrng {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Format: return "format";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

AliasTable::AliasTable(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n == 0) fail(ErrorKind::Parameter, "alias table needs at least one outcome");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) fail(ErrorKind::Parameter, "alias table probabilities must be non-negative");
    sum += p;
  }
  if (!(sum > 0.0)) fail(ErrorKind::Parameter, "alias table probabilities sum to zero");

  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs[i] / sum * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  threshold_.assign(n, std::uint64_t{1} << 32);
  alias_.resize(n);
  for (std::size_t i = 0; i < n; ++i) alias_[i] = i;
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    threshold_[s] = static_cast<std::uint64_t>(std::ldexp(scaled[s], 32));
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : small) threshold_[i] = std::uint64_t{1} << 32;
  for (std::size_t i : large) threshold_[i] = std::uint64_t{1} << 32;
}

TrialStream::TrialStream(std::vector<std::uint8_t> packed, std::uint64_t first_index)
    : packed_(std::move(packed)), first_index_(first_index) {
  for (std::uint8_t byte : packed_) {
    if (byte & 0xe0) fail(ErrorKind::Format, "trial byte has reserved bits 5-7 set");
  }
}

TrialRecord TrialStream::operator[](std::size_t i) const {
  const std::uint8_t v = packed_[i];
  return TrialRecord{first_index_ + i, bool(v & 4), bool(v & 8), bool(v & 1), bool(v & 2), bool(v & 16)};
}

TrialStream TrialStream::slice(std::size_t offset, std::size_t count) const {
  if (offset > packed_.size() || count > packed_.size() - offset) {
    fail(ErrorKind::Parameter, "trial slice out of range");
  }
  TrialStream out;
  out.packed_.assign(packed_.begin() + static_cast<std::ptrdiff_t>(offset),
                     packed_.begin() + static_cast<std::ptrdiff_t>(offset + count));
  out.first_index_ = first_index_ + offset;
  return out;
}

std::uint64_t CountsTable::setting_total(bool x, bool y) const {
  const auto& row = cells_[2 * x + y];
  return row[0] + row[1] + row[2] + row[3];
}

std::uint64_t CountsTable::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : cells_) {
    for (std::uint64_t v : row) sum += v;
  }
  return sum;
}

CountsTable CountsTable::with_rows_exchanged() const {
  CountsTable out = *this;
  std::swap(out.cells_[1], out.cells_[2]);
  return out;
}

CountsTable CountsTable::with_parties_transposed() const {
  CountsTable out = *this;
  for (auto& row : out.cells_) std::swap(row[1], row[2]);
  return out;
}

CountsTable& CountsTable::operator+=(const CountsTable& other) {
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t o = 0; o < 4; ++o) cells_[s][o] += other.cells_[s][o];
  }
  return *this;
}

CountsTable aggregate_trials(const TrialStream& trials) {
  // Histogram over the raw byte, then fold into cells.
  std::array<std::uint64_t, 32> by_byte{};
  for (std::uint8_t v : trials.bytes()) ++by_byte[v & 0x1f];
  CountsTable counts;
  for (std::size_t v = 0; v < by_byte.size(); ++v) {
    if (by_byte[v] == 0) continue;
    counts.at(v & 4, v & 8, v & 1, v & 2) += by_byte[v];
  }
  return counts;
}

GameValue game_value_from_counts(const CountsTable& counts) {
  double sum_j = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const std::uint64_t n = counts.setting_total(x, y);
      if (n == 0) {
        fail(ErrorKind::Validation, "empty setting cell x=" + std::to_string(x) + " y=" + std::to_string(y));
      }
      std::uint64_t wins = 0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (score_trial(x, y, a, b)) wins += counts.at(x, y, a, b);
        }
      }
      sum_j += static_cast<double>(wins) / static_cast<double>(n);
    }
  }
  GameValue gv;
  gv.win_prob = sum_j / 4.0;
  gv.jbar = gv.win_prob - 0.75;
  gv.n_trials = counts.total();
  return gv;
}

std::uint64_t sum_scores(const TrialStream& trials) {
  std::uint64_t sum = 0;
  for (std::uint8_t v : trials.bytes()) {
    if ((v & 16) && score_trial(v & 4, v & 8, v & 1, v & 2)) ++sum;
  }
  return sum;
}

double SpotCheckConfig::threshold() const {
  if (mode == InputMode::Biased) {
    const double r = p / (1.0 - p);
    return omega_exp * r * r - delta_est;
  }
  return omega_exp * q - delta_est;
}

void SpotCheckConfig::validate() const {
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorKind::Parameter, "spot-check q must lie in (0,1]");
  if (!(delta_est >= 0.0 && delta_est < 1.0)) fail(ErrorKind::Parameter, "delta_est must lie in [0,1)");
  if (mode == InputMode::Biased && !(p > 0.0 && p <= 0.5)) {
    fail(ErrorKind::Parameter, "biased-input p must lie in (0,1/2]");
  }
}

bool abort_decision(std::uint64_t sum_scores, std::uint64_t n, const SpotCheckConfig& cfg) {
  if (n == 0) fail(ErrorKind::Parameter, "abort decision needs n > 0");
  if (sum_scores > n) fail(ErrorKind::Parameter, "sum of scores exceeds number of trials");
  cfg.validate();
  return static_cast<double>(sum_scores) / static_cast<double>(n) < cfg.threshold();
}

double spot_check_test_probability(double p) {
  if (!(p > 0.0 && p <= 0.5)) fail(ErrorKind::Parameter, "biased-input p must lie in (0,1/2]");
  const double r = p / (1.0 - p);
  return r * r;
}

TrialStream spot_check_relabel(const TrialStream& trials, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 0.5)) fail(ErrorKind::Parameter, "biased-input p must lie in (0,1/2]");
  const double zero_prob = p / (1.0 - p);
  std::vector<std::uint8_t> out(trials.bytes().begin(), trials.bytes().end());
  parallel_for((out.size() + kChunkTrials - 1) / kChunkTrials, [&](std::size_t chunk) {
    Rng rng(derive_seed(seed, chunk));
    const std::size_t end = std::min(out.size(), (chunk + 1) * kChunkTrials);
    for (std::size_t i = chunk * kChunkTrials; i < end; ++i) {
      const bool ta_zero = uniform01(rng) < zero_prob;
      const bool tb_zero = uniform01(rng) < zero_prob;
      out[i] = static_cast<std::uint8_t>((out[i] & 0x0f) | ((ta_zero && tb_zero) << 4));
    }
  });
  return TrialStream(std::move(out), trials.first_index());
}

}  // namespace diqrng
