#pragma once

// Two-party, two-setting, two-outcome behaviors and KL projections onto the
// no-signaling (NS) and local-realistic (LR) polytopes.

#include <array>
#include <cstdint>
#include <vector>

#include "diqrng/source.hpp"
#include "diqrng/trial.hpp"

namespace diqrng {

struct BehaviorDist {
  std::array<double, 4> settings{0.25, 0.25, 0.25, 0.25};  // p_xy, index 2x+y
  ConditionalTable cond{};                                 // p(ab|xy), [2x+y][2a+b]

  double operator()(bool x, bool y, bool a, bool b) const { return cond[2 * x + y][2 * a + b]; }
  void validate() const;  // tolerance 1e-10 on each block sum

  // Largest violation of the eight NS equalities.
  double signaling_residual() const;
};

BehaviorDist uniform_behavior(const std::array<double, 4>& settings = {0.25, 0.25, 0.25, 0.25});
// Empirical conditionals; the settings vector is passed separately (known by design).
BehaviorDist behavior_from_counts(const CountsTable& counts,
                                  const std::array<double, 4>& settings = {0.25, 0.25, 0.25, 0.25});

// a = alpha0 XOR (alpha1 AND x), b = beta0 XOR (beta1 AND y); index alpha0 | alpha1<<1 | beta0<<2 | beta1<<3.
ConditionalTable deterministic_vertex(int index);
// a XOR b = xy XOR (alpha AND x) XOR (beta AND y) XOR gamma with uniform marginals; index alpha | beta<<1 | gamma<<2.
ConditionalTable pr_box_vertex(int index);

const std::vector<ConditionalTable>& lr_vertices();  // 16
const std::vector<ConditionalTable>& ns_vertices();  // 16 local + 8 PR boxes

// D(f || p) = sum_xy p_xy sum_ab f log2(f/p), +infinity on a support violation.
double kl_divergence(const BehaviorDist& f, const BehaviorDist& p);

struct ProjectionResult {
  BehaviorDist behavior;
  std::vector<double> weights;  // mixture over the polytope's vertex list (empty on the NS shortcut)
  double divergence = 0.0;      // bits
  double gap = 0.0;             // certified upper bound on divergence - optimum, bits
  std::uint64_t iterations = 0;
};

struct ProjectionOptions {
  double gap_tolerance = 1e-12;
  std::uint64_t max_iterations = 100000;
  // When false an unconverged result is returned with its gap instead.
  bool throw_on_failure = true;
};

// Minimizes D(f || p) over the vertex hull by multiplicative EM on the mixture
// weights (SQUAREM-accelerated). At every iterate G_k = sum p_xy f v_k / p and
// log2(max_k G_k) bounds the remaining gap. Throws ErrorKind::Convergence
// (message carries the gap) when the tolerance is not met, unless disabled.
ProjectionResult project_onto_hull(const BehaviorDist& f, const std::vector<ConditionalTable>& vertices,
                                   const ProjectionOptions& options = {});

// max over the eight CHSH facets of sum_xy P(a XOR b = xy ^ alpha x ^ beta y ^ gamma | xy) - 3.
double chsh_facet_excess(const BehaviorDist& f);

// Returns f itself when it already satisfies the NS equalities within 1e-12.
ProjectionResult project_no_signaling(const BehaviorDist& f, const ProjectionOptions& options = {});
// Returns p_ns itself (with EM mixture weights) when it is no-signaling and
// satisfies every CHSH facet within 1e-12.
ProjectionResult project_local_realistic(const BehaviorDist& p_ns, const ProjectionOptions& options = {});

}  // namespace diqrng
