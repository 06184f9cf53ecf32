#pragma once

// Trial data model and CHSH-game scoring.
//
// Outcome encoding used everywhere: bit 0 = no click, bit 1 = click.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace diqrng {

struct TrialRecord {
  std::uint64_t index = 0;
  bool x = false;
  bool y = false;
  bool a = false;
  bool b = false;
  bool t = false;  // test trial flag

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Wire byte of one trial: bit0=a, bit1=b, bit2=x, bit3=y, bit4=t.
constexpr std::uint8_t pack_trial(bool x, bool y, bool a, bool b, bool t) noexcept {
  return static_cast<std::uint8_t>(a | (b << 1) | (x << 2) | (y << 3) | (t << 4));
}

// Cell index 0..15 of (x,y,a,b): ((2x+y) << 2) | (2a+b).
constexpr std::size_t cell_index(bool x, bool y, bool a, bool b) noexcept {
  return (static_cast<std::size_t>(2 * x + y) << 2) | static_cast<std::size_t>(2 * a + b);
}

// A contiguous run of trials with implicit indices first_index, first_index+1, ...
// Stored one byte per trial in the wire layout.
class TrialStream {
 public:
  TrialStream() = default;
  explicit TrialStream(std::vector<std::uint8_t> packed, std::uint64_t first_index = 0);

  std::size_t size() const noexcept { return packed_.size(); }
  bool empty() const noexcept { return packed_.empty(); }
  std::uint64_t first_index() const noexcept { return first_index_; }

  TrialRecord operator[](std::size_t i) const;
  void push_back(bool x, bool y, bool a, bool b, bool t = true) { packed_.push_back(pack_trial(x, y, a, b, t)); }
  void reserve(std::size_t n) { packed_.reserve(n); }

  std::span<const std::uint8_t> bytes() const noexcept { return packed_; }
  std::span<std::uint8_t> mutable_bytes() noexcept { return packed_; }

  // Trials [offset, offset + count) as a new stream with matching indices.
  TrialStream slice(std::size_t offset, std::size_t count) const;

  friend bool operator==(const TrialStream&, const TrialStream&) = default;

 private:
  std::vector<std::uint8_t> packed_;
  std::uint64_t first_index_ = 0;
};

// counts[setting][outcome] with setting = 2x+y and outcome = 2a+b.
class CountsTable {
 public:
  using Cells = std::array<std::array<std::uint64_t, 4>, 4>;

  CountsTable() = default;
  explicit CountsTable(const Cells& cells) : cells_(cells) {}

  std::uint64_t& at(bool x, bool y, bool a, bool b) { return cells_[2 * x + y][2 * a + b]; }
  std::uint64_t at(bool x, bool y, bool a, bool b) const { return cells_[2 * x + y][2 * a + b]; }
  const std::array<std::uint64_t, 4>& setting(bool x, bool y) const { return cells_[2 * x + y]; }
  const Cells& cells() const noexcept { return cells_; }

  std::uint64_t setting_total(bool x, bool y) const;
  std::uint64_t total() const;

  // Exchanges the (x=0,y=1) and (x=1,y=0) rows.
  CountsTable with_rows_exchanged() const;
  // Reads every 4-vector as (b,a) instead of (a,b).
  CountsTable with_parties_transposed() const;

  CountsTable& operator+=(const CountsTable& other);
  friend bool operator==(const CountsTable&, const CountsTable&) = default;

 private:
  Cells cells_{};
};

struct GameValue {
  double jbar = 0.0;      // win_prob - 3/4
  double win_prob = 0.75;
  std::uint64_t n_trials = 0;
};

enum class InputMode { Uniform, Biased };

struct SpotCheckConfig {
  InputMode mode = InputMode::Uniform;
  double p = 0.5;          // biased-input parameter, (0, 1/2]
  double q = 1.0;          // test probability, (0, 1]
  double omega_exp = 0.75; // expected winning probability
  double delta_est = 0.0;  // (0, 1)

  double threshold() const;
  void validate() const;
};

// 1 iff a XOR b == x AND y.
constexpr bool score_trial(bool x, bool y, bool a, bool b) noexcept { return (a != b) == (x && y); }

CountsTable aggregate_trials(const TrialStream& trials);

// jbar = (1/4) * sum_xy J_xy - 3/4, J_xy the winning fraction at setting (x,y).
GameValue game_value_from_counts(const CountsTable& counts);

// Sum of J_i over the stream, counting only trials flagged as test trials.
std::uint64_t sum_scores(const TrialStream& trials);

bool abort_decision(std::uint64_t sum_scores, std::uint64_t n, const SpotCheckConfig& cfg);

// Probability that a trial becomes a test trial: (p/(1-p))^2.
double spot_check_test_probability(double p);

// Redraws every t-flag from independent T^A, T^B with P(T=0) = p/(1-p);
// a trial is a test trial iff T^A = T^B = 0. Settings and outcomes are untouched.
TrialStream spot_check_relabel(const TrialStream& trials, double p, std::uint64_t seed);

}  // namespace diqrng
