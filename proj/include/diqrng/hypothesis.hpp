#pragma once

// Prediction-based-ratio (PBR) tests of the NS and LR hypotheses, plus the
// two-proportion Z-tests of the four no-signaling conditions.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "diqrng/behavior.hpp"
#include "diqrng/trial.hpp"

namespace diqrng {

enum class NullPolytope { NS, LR };
std::string_view to_string(NullPolytope p) noexcept;
NullPolytope null_polytope_from_string(std::string_view s);

struct PbrModel {
  std::array<double, 4> settings{0.25, 0.25, 0.25, 0.25};
  ConditionalTable ratios{};  // R(ab|xy), [2x+y][2a+b]
  double scale = 1.0;         // divisor applied to enforce validity (1 when none was needed)
  double gap_ns = 0.0;        // projection gaps (bits) of the estimate this model came from
  double gap_lr = 0.0;

  // max over the polytope's vertices of sum_xy p_xy sum_ab v(ab|xy) R(ab|xy).
  double max_vertex_expectation(NullPolytope null) const;
};

// All ratios 1.
PbrModel trivial_pbr(const std::array<double, 4>& settings = {0.25, 0.25, 0.25, 0.25});

// NS: R = f / p*_NS. LR: R = p*_NS / p*_LR. Cells with a zero numerator get
// R = 0, except 0/0 which gets 1. The result is divided by
// max(1, max_vertex_expectation) so it is a valid test factor.
PbrModel build_pbr(const BehaviorDist& f_prev, NullPolytope null, const ProjectionOptions& options = {});

// sum over cells of N_cell * ln R_cell; -infinity when an observed cell has R = 0.
double block_log_score(const PbrModel& model, const CountsTable& counts);

struct PValue {
  double log_p = 0.0;  // natural log, <= 0

  double log10() const;
  double value() const;  // may underflow to 0
};

// p = min(1, exp(-sum of block log scores)); a -infinity score forces p = 1.
PValue pvalue_from_scores(std::span<const double> log_scores);

struct ScoredBlock {
  PbrModel model;
  CountsTable counts;
};
PValue pvalue_accumulate(std::span<const ScoredBlock> blocks);

enum class PbrEstimator { PreviousBlock, Cumulative };

struct CertifyOptions {
  NullPolytope null = NullPolytope::LR;
  std::uint64_t block_size = 24'000'000;
  PbrEstimator estimator = PbrEstimator::PreviousBlock;
  std::array<double, 4> settings{0.25, 0.25, 0.25, 0.25};
  // Unconverged projections are kept (the PBR is renormalized to stay valid)
  // and their gaps land in the report.
  ProjectionOptions projection{.gap_tolerance = 1e-12, .max_iterations = 100000, .throw_on_failure = false};
};

struct CertificationReport {
  NullPolytope null = NullPolytope::LR;
  PbrEstimator estimator = PbrEstimator::PreviousBlock;
  std::uint64_t block_size = 0;
  std::uint64_t blocks = 0;
  PValue p;
  // Per block: number of preceding blocks whose data built its PBR (0 = trivial),
  // projection gaps, block score and running log10 p after the block.
  std::vector<std::uint64_t> pbr_sources;
  std::vector<std::uint64_t> pbr_first_block;
  std::vector<double> convergence_gaps;
  std::vector<double> log_scores;
  std::vector<double> running_log10_p;
};

// Splits the stream into consecutive blocks (the last one may be shorter) and
// scores each with a PBR built strictly from earlier blocks.
CertificationReport certify(const TrialStream& trials, const CertifyOptions& options);
CertificationReport certify_counts(std::span<const CountsTable> block_counts, const CertifyOptions& options);

struct ZTestResult {
  static constexpr std::array<std::string_view, 4> kLabels{"alice_x0", "alice_x1", "bob_y0", "bob_y1"};
  std::array<double, 4> z{};
  std::array<double, 4> p_values{1.0, 1.0, 1.0, 1.0};
  std::array<bool, 4> degenerate{};
};

// Pooled two-sided two-proportion Z-test of the click marginal: Alice's at
// x=0 and x=1 across y, then Bob's at y=0 and y=1 across x.
ZTestResult ztest_no_signaling(const CountsTable& counts);

// Explicit hidden-variable sampler: per trial draw a deterministic strategy
// from weights (indexed as deterministic_vertex) and settings from the given
// distribution, then answer deterministically.
TrialStream lhv_trials(std::span<const double> weights, const std::array<double, 4>& settings, std::size_t n,
                       std::uint64_t seed);

}  // namespace diqrng
