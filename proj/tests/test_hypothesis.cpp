#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "battery.hpp"
#include "diqrng/error.hpp"
#include "diqrng/hypothesis.hpp"
#include "diqrng/trial_io.hpp"
#include "oracles/barrier.hpp"
#include "oracles/kl.hpp"

using namespace diqrng;

namespace {

double max_abs_diff(const ConditionalTable& a, const ConditionalTable& b) {
  double d = 0.0;
  for (int s = 0; s < 4; ++s)
    for (int o = 0; o < 4; ++o) d = std::max(d, std::abs(a[s][o] - b[s][o]));
  return d;
}

CountsTable counts_from(const ConditionalTable& cond, double per_setting) {
  CountsTable c;
  for (int s = 0; s < 4; ++s)
    for (int o = 0; o < 4; ++o)
      c.at(s >> 1, s & 1, o >> 1, o & 1) = static_cast<std::uint64_t>(std::llround(cond[s][o] * per_setting));
  return c;
}

}  // namespace

TEST_CASE("KL divergence examples") {
  const BehaviorDist u = uniform_behavior();
  CHECK(kl_divergence(u, u) == 0.0);

  // Deterministic on a cell where p has mass 1/2 in every setting.
  BehaviorDist f = battery::from_table(deterministic_vertex(0));
  BehaviorDist p = f;
  for (auto& row : p.cond) {
    for (double& v : row) v = v > 0.0 ? 0.5 : 0.5 / 3.0;
  }
  CHECK(kl_divergence(f, p) == doctest::Approx(1.0).epsilon(1e-15));

  BehaviorDist zero = u;
  zero.cond[2] = {1.0, 0.0, 0.0, 0.0};
  CHECK(std::isinf(kl_divergence(u, zero)));
  CHECK(std::isfinite(kl_divergence(zero, u)));
}

TEST_CASE("KL divergence matches direct summation and is non-negative") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 300; ++rep) {
    const BehaviorDist f = battery::from_table(battery::random_table(rng, rep % 3 == 0));
    const BehaviorDist p = battery::from_table(battery::random_table(rng, false));
    const double d = kl_divergence(f, p);
    CHECK(d == doctest::Approx(oracle::kl_bits(f.settings, f.cond, p.cond)).epsilon(1e-12).scale(1e-12));
    CHECK(d >= 0.0);
    CHECK(kl_divergence(f, f) == 0.0);
  }
}

TEST_CASE("vertices") {
  CHECK(lr_vertices().size() == 16);
  CHECK(ns_vertices().size() == 24);
  for (const auto& v : ns_vertices()) CHECK(battery::from_table(v).signaling_residual() == 0.0);
  // The canonical PR box wins CHSH with certainty.
  const auto pr = pr_box_vertex(0);
  double win = 0.0;
  for (int s = 0; s < 4; ++s)
    for (int o = 0; o < 4; ++o)
      if (score_trial(s >> 1, s & 1, o >> 1, o & 1)) win += pr[s][o] / 4.0;
  CHECK(win == 1.0);
  // Facet excess: 0 on local vertices, 1 on PR boxes, sqrt2 - 1 at Tsirelson.
  for (const auto& v : lr_vertices()) CHECK(chsh_facet_excess(battery::from_table(v)) == 0.0);
  for (int i = 0; i < 8; ++i) CHECK(chsh_facet_excess(battery::from_table(pr_box_vertex(i))) == 1.0);
  CHECK(chsh_facet_excess(battery::from_table(battery::tsirelson())) == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK_THROWS_AS(deterministic_vertex(16), Error);
  CHECK_THROWS_AS(pr_box_vertex(-1), Error);
}

TEST_CASE("projection examples") {
  const BehaviorDist u = uniform_behavior();
  const auto ns_u = project_no_signaling(u);
  CHECK(ns_u.divergence == 0.0);
  CHECK(ns_u.behavior.cond == u.cond);

  const BehaviorDist pr = battery::from_table(pr_box_vertex(0));
  CHECK(project_no_signaling(pr).behavior.cond == pr.cond);
  const auto lr_pr = project_local_realistic(pr);
  CHECK(lr_pr.divergence > 0.1);

  for (int i = 0; i < 16; ++i) {
    const BehaviorDist d = battery::from_table(deterministic_vertex(i));
    const auto lr = project_local_realistic(d);
    CHECK(lr.divergence <= 1e-12);
    CHECK(max_abs_diff(lr.behavior.cond, d.cond) <= 1e-9);
    CHECK(lr.weights.size() == 16);
  }
}

TEST_CASE("projections match the interior-point oracle on the battery") {
  for (const auto& c : battery::behaviors()) {
    CAPTURE(c.name);
    const auto ns = project_no_signaling(c.f);
    const auto ns_ref = oracle::barrier_project(c.f.settings, c.f.cond, false);
    CHECK(std::abs(ns.divergence - ns_ref.divergence_bits) <= 1e-6);
    CHECK(ns.behavior.signaling_residual() <= 1e-9);
    CHECK(std::isfinite(ns.divergence));

    const auto lr = project_local_realistic(ns.behavior);
    const auto lr_ref = oracle::barrier_project(ns.behavior.settings, ns.behavior.cond, true);
    CHECK(std::abs(lr.divergence - lr_ref.divergence_bits) <= 1e-6);
    CHECK(lr.gap <= 1e-12);
    CHECK(ns.gap <= 1e-12);
  }
}

TEST_CASE("projections are idempotent") {
  for (const auto& c : battery::behaviors()) {
    CAPTURE(c.name);
    const auto ns = project_no_signaling(c.f);
    const auto ns2 = project_no_signaling(ns.behavior);
    CHECK(max_abs_diff(ns2.behavior.cond, ns.behavior.cond) <= 1e-9);
    const auto lr = project_local_realistic(ns.behavior);
    const auto lr2 = project_local_realistic(lr.behavior);
    CHECK(max_abs_diff(lr2.behavior.cond, lr.behavior.cond) <= 1e-9);
    CHECK(lr2.divergence <= 1e-9);
  }
}

TEST_CASE("projection failure is reported, not silent") {
  const BehaviorDist f = battery::from_table(battery::alice_signaling(0.1));
  ProjectionOptions strict;
  strict.max_iterations = 2;
  try {
    project_no_signaling(f, strict);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Convergence);
    CHECK(std::string(e.what()).find("gap") != std::string::npos);
  }
  strict.throw_on_failure = false;
  const auto r = project_no_signaling(f, strict);
  CHECK(r.gap > 1e-12);
}

TEST_CASE("PBR construction") {
  SUBCASE("NS data against the NS null gives unit ratios") {
    const PbrModel m = build_pbr(battery::from_table(battery::tsirelson()), NullPolytope::NS);
    for (const auto& row : m.ratios)
      for (double r : row) CHECK(r == doctest::Approx(1.0));
  }
  SUBCASE("trivial PBR") {
    const PbrModel m = trivial_pbr();
    for (const auto& row : m.ratios)
      for (double r : row) CHECK(r == 1.0);
    CHECK(m.max_vertex_expectation(NullPolytope::LR) == doctest::Approx(1.0));
  }
  SUBCASE("violating data against LR: some ratio above 1, all vertices bounded") {
    const BehaviorDist f = battery::from_table(outcome_probabilities(paper_source_params()));
    const PbrModel m = build_pbr(f, NullPolytope::LR);
    double max_ratio = 0.0;
    for (const auto& row : m.ratios)
      for (double r : row) max_ratio = std::max(max_ratio, r);
    CHECK(max_ratio > 1.0);
    for (const auto& v : lr_vertices()) {
      double e = 0.0;
      for (int s = 0; s < 4; ++s)
        for (int o = 0; o < 4; ++o) e += m.settings[s] * v[s][o] * m.ratios[s][o];
      CHECK(e <= 1.0 + 1e-9);
    }
  }
  SUBCASE("every battery behavior yields valid PBRs for both nulls") {
    for (const auto& c : battery::behaviors()) {
      CAPTURE(c.name);
      CHECK(build_pbr(c.f, NullPolytope::LR).max_vertex_expectation(NullPolytope::LR) <= 1.0 + 1e-9);
      CHECK(build_pbr(c.f, NullPolytope::NS).max_vertex_expectation(NullPolytope::NS) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("p-value accumulation") {
  SUBCASE("all-trivial PBRs give p = 1") {
    std::vector<ScoredBlock> blocks(5, {trivial_pbr(), counts_from(battery::tsirelson(), 1000)});
    CHECK(pvalue_accumulate(blocks).log_p == 0.0);
    CHECK(pvalue_accumulate(blocks).value() == 1.0);
  }
  SUBCASE("zero ratio on an observed cell forces p = 1") {
    PbrModel m = trivial_pbr();
    for (auto& row : m.ratios) row.fill(2.0);
    m.ratios[0][0] = 0.0;
    CountsTable c = counts_from(battery::tsirelson(), 1000);
    CHECK(block_log_score(m, c) == -std::numeric_limits<double>::infinity());
    std::vector<ScoredBlock> blocks{{m, c}};
    CHECK(pvalue_accumulate(blocks).log_p == 0.0);
  }
  SUBCASE("violating blocks decrease p monotonically; split accumulation agrees") {
    const BehaviorDist f = battery::from_table(outcome_probabilities(paper_source_params()));
    const PbrModel m = build_pbr(f, NullPolytope::LR);
    const CountsTable c = counts_from(f.cond, 1e8);
    std::vector<ScoredBlock> blocks;
    double prev = 0.0;
    std::vector<double> scores;
    for (int k = 0; k < 8; ++k) {
      blocks.push_back({m, c});
      scores.push_back(block_log_score(m, c));
      const double lp = pvalue_accumulate(blocks).log_p;
      CHECK(lp <= prev);
      prev = lp;
    }
    CHECK(prev < 0.0);
    double piece = 0.0;
    piece += -pvalue_from_scores(std::span(scores).first(3)).log_p;
    piece += -pvalue_from_scores(std::span(scores).subspan(3)).log_p;
    CHECK(-prev == doctest::Approx(piece).epsilon(1e-12));
  }
  SUBCASE("log-space survives huge exponents") {
    std::vector<double> scores(100, 5000.0);
    const PValue p = pvalue_from_scores(scores);
    CHECK(p.log10() == doctest::Approx(-500000.0 / std::log(10.0)));
    CHECK(p.value() == 0.0);
  }
}

TEST_CASE("certification pipeline") {
  const SourceParams src = paper_source_params();
  const TrialStream s = simulate_trials(src, 2'000'000, {0.25, 0.25, 0.25, 0.25}, 77);
  CertifyOptions opts;
  opts.block_size = 400'000;
  const CertificationReport r = certify(s, opts);
  CHECK(r.blocks == 5);
  CHECK(r.pbr_sources[0] == 0);
  for (std::size_t k = 1; k < r.blocks; ++k) {
    CHECK(r.pbr_sources[k] == 1);
    CHECK(r.pbr_first_block[k] == k - 1);
  }
  CHECK(r.log_scores[0] == 0.0);
  CHECK(r.running_log10_p.back() == doctest::Approx(r.p.log10()));

  opts.estimator = PbrEstimator::Cumulative;
  const CertificationReport rc = certify(s, opts);
  CHECK(rc.pbr_sources[3] == 3);
  CHECK(rc.pbr_first_block[3] == 0);

  opts.null = NullPolytope::NS;
  opts.estimator = PbrEstimator::PreviousBlock;
  const CertificationReport rn = certify(s, opts);
  CHECK(rn.p.log_p <= 0.0);

  opts.block_size = 0;
  CHECK_THROWS_AS(certify(s, opts), Error);
}

TEST_CASE("hidden-variable sampler") {
  std::vector<double> w(16, 0.0);
  w[5] = 1.0;
  const TrialStream s = lhv_trials(w, {0.25, 0.25, 0.25, 0.25}, 10000, 3);
  const CountsTable c = aggregate_trials(s);
  const auto v = deterministic_vertex(5);
  for (int st = 0; st < 4; ++st)
    for (int o = 0; o < 4; ++o)
      if (v[st][o] == 0.0) CHECK(c.cells()[st][o] == 0);
  CHECK(lhv_trials(w, {0.25, 0.25, 0.25, 0.25}, 5000, 9) == lhv_trials(w, {0.25, 0.25, 0.25, 0.25}, 5000, 9));
  CHECK(game_value_from_counts(c).jbar <= 1e-12);
  CHECK_THROWS_AS(lhv_trials(std::vector<double>(15, 1.0), {0.25, 0.25, 0.25, 0.25}, 10, 1), Error);
}

TEST_CASE("Z-test") {
  SUBCASE("equal marginals give p = 1") {
    CountsTable c;
    for (int s = 0; s < 4; ++s)
      for (int o = 0; o < 4; ++o) c.at(s >> 1, s & 1, o >> 1, o & 1) = 250 + 10 * o;
    const ZTestResult z = ztest_no_signaling(c);
    for (double p : z.p_values) CHECK(p == 1.0);
  }
  SUBCASE("degenerate marginals are flagged") {
    CountsTable c;
    for (int s = 0; s < 4; ++s) c.at(s >> 1, s & 1, 0, 0) = 100;
    const ZTestResult z = ztest_no_signaling(c);
    for (int i = 0; i < 4; ++i) {
      CHECK(z.degenerate[i]);
      CHECK(z.p_values[i] == 1.0);
    }
  }
  SUBCASE("a 1e-2 marginal shift at n = 1e9 per setting is decisive") {
    CountsTable c;
    const std::uint64_t n = 1'000'000'000ULL;
    // Alice clicks with probability 0.3 at (0,0) and 0.31 at (0,1); balanced elsewhere.
    auto fill = [&](bool x, bool y, double pa) {
      const auto clicks = static_cast<std::uint64_t>(pa * static_cast<double>(n));
      c.at(x, y, 1, 0) = clicks;
      c.at(x, y, 0, 0) = n - clicks;
    };
    fill(0, 0, 0.30);
    fill(0, 1, 0.31);
    fill(1, 0, 0.30);
    fill(1, 1, 0.30);
    const ZTestResult z = ztest_no_signaling(c);
    CHECK(z.p_values[0] < 1e-10);
    // Closed form for the pooled statistic.
    const double pooled = 0.305;
    const double expected_z = -0.01 / std::sqrt(pooled * (1 - pooled) * 2.0 / static_cast<double>(n));
    CHECK(z.z[0] == doctest::Approx(expected_z).epsilon(1e-9));
    CHECK(z.p_values[1] == 1.0);
  }
  SUBCASE("published counts under the row exchange") {
    const ZTestResult z = ztest_no_signaling(published_counts().with_rows_exchanged());
    std::vector<double> got(z.p_values.begin(), z.p_values.end());
    std::vector<double> want{0.139842, 0.045396, 0.474135, 0.226216};
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-3);
  }
}
