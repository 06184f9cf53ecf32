#include "diqrng/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "diqrng/error.hpp"
#include "diqrng/parallel.hpp"
#include "diqrng/rng.hpp"

namespace diqrng {

std::string_view to_string(NullPolytope p) noexcept { return p == NullPolytope::NS ? "NS" : "LR"; }

NullPolytope null_polytope_from_string(std::string_view s) {
  if (s == "NS" || s == "ns") return NullPolytope::NS;
  if (s == "LR" || s == "lr") return NullPolytope::LR;
  fail(ErrorKind::Parameter, "unknown polytope '" + std::string(s) + "' (expected NS or LR)");
}

double PbrModel::max_vertex_expectation(NullPolytope null) const {
  const auto& vertices = null == NullPolytope::NS ? ns_vertices() : lr_vertices();
  double worst = 0.0;
  for (const auto& v : vertices) {
    double e = 0.0;
    for (int s = 0; s < 4; ++s) {
      for (int o = 0; o < 4; ++o) e += settings[s] * v[s][o] * ratios[s][o];
    }
    worst = std::max(worst, e);
  }
  return worst;
}

PbrModel trivial_pbr(const std::array<double, 4>& settings) {
  PbrModel model;
  model.settings = settings;
  for (auto& row : model.ratios) row.fill(1.0);
  return model;
}

PbrModel build_pbr(const BehaviorDist& f_prev, NullPolytope null, const ProjectionOptions& options) {
  const ProjectionResult ns = project_no_signaling(f_prev, options);
  PbrModel model;
  model.settings = f_prev.settings;
  model.gap_ns = ns.gap;
  const ConditionalTable* num = &f_prev.cond;
  const ConditionalTable* den = &ns.behavior.cond;
  ProjectionResult lr;
  if (null == NullPolytope::LR) {
    lr = project_local_realistic(ns.behavior, options);
    model.gap_lr = lr.gap;
    num = &ns.behavior.cond;
    den = &lr.behavior.cond;
  }
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 4; ++o) {
      const double a = (*num)[s][o], b = (*den)[s][o];
      model.ratios[s][o] = a == 0.0 ? (b == 0.0 ? 1.0 : 0.0) : a / b;
    }
  }
  const double worst = model.max_vertex_expectation(null);
  if (worst > 1.0) {
    model.scale = worst;
    for (auto& row : model.ratios) {
      for (double& r : row) r /= worst;
    }
  }
  return model;
}

double block_log_score(const PbrModel& model, const CountsTable& counts) {
  double score = 0.0;
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 4; ++o) {
      const std::uint64_t n = counts.cells()[s][o];
      if (n == 0) continue;
      const double r = model.ratios[s][o];
      if (r == 0.0) return -std::numeric_limits<double>::infinity();
      score += static_cast<double>(n) * std::log(r);
    }
  }
  return score;
}

double PValue::log10() const { return log_p / std::numbers::ln10; }
double PValue::value() const { return std::exp(log_p); }

PValue pvalue_from_scores(std::span<const double> log_scores) {
  double total = 0.0;
  for (double s : log_scores) {
    if (s == -std::numeric_limits<double>::infinity()) return PValue{0.0};
    total += s;
  }
  return PValue{std::min(0.0, -total)};
}

PValue pvalue_accumulate(std::span<const ScoredBlock> blocks) {
  std::vector<double> scores(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t i) { scores[i] = block_log_score(blocks[i].model, blocks[i].counts); });
  return pvalue_from_scores(scores);
}

namespace {

bool all_settings_seen(const CountsTable& counts) {
  for (int s = 0; s < 4; ++s) {
    if (counts.setting_total(s >> 1, s & 1) == 0) return false;
  }
  return true;
}

}  // namespace

CertificationReport certify_counts(std::span<const CountsTable> block_counts, const CertifyOptions& options) {
  const std::size_t k_count = block_counts.size();
  CertificationReport report;
  report.null = options.null;
  report.estimator = options.estimator;
  report.block_size = options.block_size;
  report.blocks = k_count;
  report.pbr_sources.assign(k_count, 0);
  report.pbr_first_block.assign(k_count, 0);
  report.convergence_gaps.assign(k_count, 0.0);
  report.log_scores.assign(k_count, 0.0);
  report.running_log10_p.assign(k_count, 0.0);

  std::vector<CountsTable> prefix(k_count + 1);
  for (std::size_t k = 0; k < k_count; ++k) {
    prefix[k + 1] = prefix[k];
    prefix[k + 1] += block_counts[k];
  }

  parallel_for(k_count, [&](std::size_t k) {
    PbrModel model = trivial_pbr(options.settings);
    if (k > 0) {
      const bool cumulative = options.estimator == PbrEstimator::Cumulative;
      const CountsTable& estimate = cumulative ? prefix[k] : block_counts[k - 1];
      if (all_settings_seen(estimate)) {
        model = build_pbr(behavior_from_counts(estimate, options.settings), options.null, options.projection);
        report.pbr_first_block[k] = cumulative ? 0 : k - 1;
        report.pbr_sources[k] = cumulative ? k : 1;
      }
    }
    report.convergence_gaps[k] = std::max(model.gap_ns, model.gap_lr);
    report.log_scores[k] = block_log_score(model, block_counts[k]);
  });

  for (std::size_t k = 0; k < k_count; ++k) {
    report.running_log10_p[k] = pvalue_from_scores(std::span(report.log_scores).first(k + 1)).log10();
  }
  report.p = pvalue_from_scores(report.log_scores);
  return report;
}

CertificationReport certify(const TrialStream& trials, const CertifyOptions& options) {
  if (options.block_size == 0) fail(ErrorKind::Parameter, "block size must be > 0");
  const std::size_t k_count = (trials.size() + options.block_size - 1) / options.block_size;
  std::vector<CountsTable> counts(k_count);
  parallel_for(k_count, [&](std::size_t k) {
    const std::size_t begin = k * options.block_size;
    const std::size_t len = std::min<std::size_t>(options.block_size, trials.size() - begin);
    counts[k] = aggregate_trials(trials.slice(begin, len));
  });
  return certify_counts(counts, options);
}

ZTestResult ztest_no_signaling(const CountsTable& counts) {
  for (int s = 0; s < 4; ++s) {
    if (counts.setting_total(s >> 1, s & 1) == 0) {
      fail(ErrorKind::Validation, "empty setting cell x=" + std::to_string(s >> 1) + " y=" + std::to_string(s & 1));
    }
  }
  // Click count of one party within one setting row.
  auto clicks = [&](int setting, bool alice) {
    const auto& row = counts.cells()[setting];
    return alice ? row[2] + row[3] : row[1] + row[3];
  };
  // (setting row 1, setting row 2, party)
  constexpr std::array<std::array<int, 3>, 4> kPairs{{{0, 1, 1}, {2, 3, 1}, {0, 2, 0}, {1, 3, 0}}};
  ZTestResult out;
  for (int c = 0; c < 4; ++c) {
    const auto [s1, s2, alice] = kPairs[c];
    const double n1 = static_cast<double>(counts.setting_total(s1 >> 1, s1 & 1));
    const double n2 = static_cast<double>(counts.setting_total(s2 >> 1, s2 & 1));
    const double k1 = static_cast<double>(clicks(s1, alice));
    const double k2 = static_cast<double>(clicks(s2, alice));
    const double pooled = (k1 + k2) / (n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    if (!(se > 0.0)) {
      out.degenerate[c] = true;
      continue;
    }
    out.z[c] = (k1 / n1 - k2 / n2) / se;
    out.p_values[c] = std::erfc(std::abs(out.z[c]) / std::numbers::sqrt2);
  }
  return out;
}

TrialStream lhv_trials(std::span<const double> weights, const std::array<double, 4>& settings, std::size_t n,
                       std::uint64_t seed) {
  if (weights.size() != 16) fail(ErrorKind::Parameter, "hidden-variable model needs 16 strategy weights");
  const AliasTable strategy(weights);
  const AliasTable setting(settings);
  std::vector<std::uint8_t> packed(n);
  parallel_for((n + kChunkTrials - 1) / kChunkTrials, [&](std::size_t chunk) {
    Rng rng(derive_seed(seed, chunk));
    const std::size_t end = std::min(n, (chunk + 1) * kChunkTrials);
    for (std::size_t i = chunk * kChunkTrials; i < end; ++i) {
      const std::size_t lambda = strategy.sample(rng);
      const std::size_t s = setting.sample(rng);
      const bool x = s >> 1, y = s & 1;
      const bool a = ((lambda & 1) != 0) != ((lambda & 2) && x);
      const bool b = ((lambda & 4) != 0) != ((lambda & 8) && y);
      packed[i] = pack_trial(x, y, a, b, true);
    }
  });
  return TrialStream(std::move(packed));
}

}  // namespace diqrng
