#pragma once

// Photon-pair source model: Poisson-distributed pairs of the state
// (|HV> + r|VH>)/sqrt(1+r^2), polarization projections at the chosen bases,
// per-arm efficiency, misalignment, threshold detection with double-click
// assignment, and dark counts.
//
// Per pair and per party the outcome is 0 (found in the basis state
// cos t|H> + sin t|V>, which is the monitored port), 1 (orthogonal state) or
// u (lost). After composing all pairs, a party "clicks" (trial bit 1) iff its
// resolved outcome is 0.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "diqrng/trial.hpp"

namespace diqrng {

enum class PhotonOutcome : std::uint8_t { Zero = 0, One = 1, Lost = 2 };

// Resolution of a double click (both 0 and 1 seen by one party).
struct DoubleClickRule {
  double zero = 0.5;
  double one = 0.5;
  double lost = 0.0;
};

struct SourceParams {
  double mu = 0.07;                               // mean pairs per trial
  double r = 0.41;                                // amplitude ratio of |VH>
  std::array<double, 2> alice_deg{-83.5, -119.38};  // basis angle for x = 0, 1
  std::array<double, 2> bob_deg{6.5, -29.38};       // basis angle for y = 0, 1
  double eta_a = 0.788;
  double eta_b = 0.785;
  double p_dark = 2e-5;  // per party per trial
  double p_mis = 5e-4;   // per party per photon polarization flip
  DoubleClickRule assign_a{};
  DoubleClickRule assign_b{};

  void validate() const;
};

// Published source configuration (mu = 0.07 operating point).
SourceParams paper_source_params();

struct MuSweepPoint {
  double mu;
  double violation;
};
// The 19 measured (mean photon number, violation) points.
std::span<const MuSweepPoint> published_mu_sweep();

// 9 joint events over {0,1,u}^2, index 3*alice + bob with 0,1,u -> 0,1,2.
struct PairOutcomeDist {
  std::array<double, 9> probs{};

  double operator()(PhotonOutcome a, PhotonOutcome b) const {
    return probs[3 * static_cast<int>(a) + static_cast<int>(b)];
  }
  double sum() const;
};

PairOutcomeDist single_pair_probs(const SourceParams& params, bool x, bool y);

inline constexpr int kMaxPairs = 3;

// Outcome distribution of k independent pairs under threshold detection.
PairOutcomeDist multi_pair_probs(const PairOutcomeDist& single, int k, const DoubleClickRule& assign_a,
                                 const DoubleClickRule& assign_b);

// P(a,b | x,y) over trial bits, indexed [2x+y][2a+b].
using ConditionalTable = std::array<std::array<double, 4>, 4>;

// Poisson mixture of 0..3 pairs (renormalized over the truncation), dark counts, bit mapping.
ConditionalTable outcome_probabilities(const SourceParams& params);

// Game value under uniform settings; n_trials is 0 (analytic).
GameValue predicted_game_value(const SourceParams& params);

// Joint 16-cell distribution settings[2x+y] * P(ab|xy), indexed by cell_index.
std::array<double, 16> joint_cell_probabilities(const ConditionalTable& cond, const std::array<double, 4>& settings);

// i.i.d. trials from a joint cell distribution; every trial is a test trial.
TrialStream sample_trials(const std::array<double, 16>& joint, std::size_t n, std::uint64_t seed,
                          std::uint64_t first_index = 0);

TrialStream simulate_trials(const SourceParams& params, std::size_t n, const std::array<double, 4>& settings,
                            std::uint64_t seed);

struct MuOptimum {
  double mu;
  double jbar;
};
// Grid argmax of the predicted game value; ties go to the smaller mu.
MuOptimum optimize_mu(const SourceParams& params, std::span<const double> mu_grid);

}  // namespace diqrng
