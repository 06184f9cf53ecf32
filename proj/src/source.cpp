#include "diqrng/source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "diqrng/error.hpp"
#include "diqrng/parallel.hpp"
#include "diqrng/rng.hpp"

namespace diqrng {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void validate_rule(const DoubleClickRule& rule, const char* who) {
  if (!is_probability(rule.zero) || !is_probability(rule.one) || !is_probability(rule.lost) ||
      std::abs(rule.zero + rule.one + rule.lost - 1.0) > 1e-12) {
    fail(ErrorKind::Parameter, std::string("double-click assignment for ") + who + " must be a probability triple");
  }
}

// Per-party threshold state: bit 0 = a photon was found in the basis state,
// bit 1 = a photon was found in the orthogonal state.
constexpr int kSawZero = 1;
constexpr int kSawOne = 2;

constexpr int flag_of(int outcome) { return outcome == 0 ? kSawZero : outcome == 1 ? kSawOne : 0; }

using FlagDist = std::array<double, 16>;  // index 4*alice_flags + bob_flags

FlagDist compose_flags(const PairOutcomeDist& single, int k) {
  FlagDist dist{};
  dist[0] = 1.0;
  for (int pair = 0; pair < k; ++pair) {
    FlagDist next{};
    for (int fa = 0; fa < 4; ++fa) {
      for (int fb = 0; fb < 4; ++fb) {
        const double w = dist[4 * fa + fb];
        if (w == 0.0) continue;
        for (int ea = 0; ea < 3; ++ea) {
          for (int eb = 0; eb < 3; ++eb) {
            next[4 * (fa | flag_of(ea)) + (fb | flag_of(eb))] += w * single.probs[3 * ea + eb];
          }
        }
      }
    }
    dist = next;
  }
  return dist;
}

// Distribution over outcomes {0,1,u} for one party's threshold state.
std::array<double, 3> resolve(int flags, const DoubleClickRule& rule) {
  switch (flags) {
    case 0: return {0.0, 0.0, 1.0};
    case kSawZero: return {1.0, 0.0, 0.0};
    case kSawOne: return {0.0, 1.0, 0.0};
    default: return {rule.zero, rule.one, rule.lost};
  }
}

PairOutcomeDist resolve_joint(const FlagDist& flags, const DoubleClickRule& rule_a, const DoubleClickRule& rule_b) {
  PairOutcomeDist out;
  for (int fa = 0; fa < 4; ++fa) {
    const auto ra = resolve(fa, rule_a);
    for (int fb = 0; fb < 4; ++fb) {
      const double w = flags[4 * fa + fb];
      if (w == 0.0) continue;
      const auto rb = resolve(fb, rule_b);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) out.probs[3 * a + b] += w * ra[a] * rb[b];
      }
    }
  }
  return out;
}

FlagDist add_dark_counts(const FlagDist& in, double p_dark) {
  FlagDist out{};
  for (int fa = 0; fa < 4; ++fa) {
    for (int fb = 0; fb < 4; ++fb) {
      const double w = in[4 * fa + fb];
      for (int da = 0; da < 2; ++da) {
        for (int db = 0; db < 2; ++db) {
          const double pa = da ? p_dark : 1.0 - p_dark;
          const double pb = db ? p_dark : 1.0 - p_dark;
          out[4 * (fa | (da ? kSawZero : 0)) + (fb | (db ? kSawZero : 0))] += w * pa * pb;
        }
      }
    }
  }
  return out;
}

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void SourceParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) fail(ErrorKind::Parameter, "mean photon number must be >= 0");
  if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorKind::Parameter, "state amplitude ratio must be >= 0");
  for (double a : alice_deg) {
    if (!std::isfinite(a)) fail(ErrorKind::Parameter, "basis angles must be finite");
  }
  for (double b : bob_deg) {
    if (!std::isfinite(b)) fail(ErrorKind::Parameter, "basis angles must be finite");
  }
  if (!is_probability(eta_a) || !is_probability(eta_b)) fail(ErrorKind::Parameter, "efficiencies must lie in [0,1]");
  if (!is_probability(p_dark)) fail(ErrorKind::Parameter, "dark-count probability must lie in [0,1]");
  if (!is_probability(p_mis)) fail(ErrorKind::Parameter, "misalignment probability must lie in [0,1]");
  validate_rule(assign_a, "Alice");
  validate_rule(assign_b, "Bob");
}

SourceParams paper_source_params() { return SourceParams{}; }

std::span<const MuSweepPoint> published_mu_sweep() {
  static constexpr MuSweepPoint kSweep[] = {
      {0.011, 6.47e-5}, {0.026, 1.38e-4}, {0.049, 2.29e-4}, {0.061, 2.46e-4}, {0.070, 2.17e-4},
      {0.072, 2.89e-4}, {0.073, 2.98e-4}, {0.074, 2.66e-4}, {0.082, 2.80e-4}, {0.083, 2.58e-4},
      {0.085, 2.85e-4}, {0.098, 3.39e-4}, {0.108, 3.44e-4}, {0.113, 3.49e-4}, {0.124, 3.22e-4},
      {0.132, 2.96e-4}, {0.139, 2.74e-4}, {0.153, 2.71e-4}, {0.162, 2.60e-4},
  };
  return kSweep;
}

double PairOutcomeDist::sum() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

PairOutcomeDist single_pair_probs(const SourceParams& params, bool x, bool y) {
  params.validate();
  const double ta = deg2rad(params.alice_deg[x]);
  const double tb = deg2rad(params.bob_deg[y]);
  // Amplitude <e_i(ta) e_j(tb)|psi> with e_0 = (cos, sin), e_1 = (-sin, cos) in the H/V basis.
  const std::array<std::array<double, 2>, 2> ea{{{std::cos(ta), std::sin(ta)}, {-std::sin(ta), std::cos(ta)}}};
  const std::array<std::array<double, 2>, 2> eb{{{std::cos(tb), std::sin(tb)}, {-std::sin(tb), std::cos(tb)}}};
  const double norm = 1.0 + params.r * params.r;
  double proj[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double amp = ea[i][0] * eb[j][1] + params.r * ea[i][1] * eb[j][0];
      proj[i][j] = amp * amp / norm;
    }
  }
  // Independent polarization flips per party.
  const double m = params.p_mis;
  double flipped[2][2] = {};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int i2 = 0; i2 < 2; ++i2) {
        for (int j2 = 0; j2 < 2; ++j2) {
          const double fa = (i == i2) ? 1.0 - m : m;
          const double fb = (j == j2) ? 1.0 - m : m;
          flipped[i2][j2] += proj[i][j] * fa * fb;
        }
      }
    }
  }
  const double na = params.eta_a, nb = params.eta_b;
  PairOutcomeDist out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.probs[3 * i + j] = na * nb * flipped[i][j];
    out.probs[3 * i + 2] = na * (1.0 - nb) * (flipped[i][0] + flipped[i][1]);
    out.probs[3 * 2 + i] = (1.0 - na) * nb * (flipped[0][i] + flipped[1][i]);
  }
  out.probs[8] = (1.0 - na) * (1.0 - nb);
  return out;
}

PairOutcomeDist multi_pair_probs(const PairOutcomeDist& single, int k, const DoubleClickRule& assign_a,
                                 const DoubleClickRule& assign_b) {
  if (k < 0) fail(ErrorKind::Parameter, "pair count must be non-negative");
  if (k > kMaxPairs) fail(ErrorKind::Unsupported, "unsupported order: at most 3 pairs are modeled");
  validate_rule(assign_a, "Alice");
  validate_rule(assign_b, "Bob");
  return resolve_joint(compose_flags(single, k), assign_a, assign_b);
}

ConditionalTable outcome_probabilities(const SourceParams& params) {
  params.validate();
  std::array<double, kMaxPairs + 1> weight{};
  double total = 0.0;
  double term = std::exp(-params.mu);
  for (int k = 0; k <= kMaxPairs; ++k) {
    weight[k] = term;
    total += term;
    term *= params.mu / (k + 1);
  }
  ConditionalTable table{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const PairOutcomeDist single = single_pair_probs(params, x, y);
      FlagDist mixed{};
      for (int k = 0; k <= kMaxPairs; ++k) {
        const FlagDist fk = compose_flags(single, k);
        for (int s = 0; s < 16; ++s) mixed[s] += weight[k] / total * fk[s];
      }
      const PairOutcomeDist resolved =
          resolve_joint(add_dark_counts(mixed, params.p_dark), params.assign_a, params.assign_b);
      auto& row = table[2 * x + y];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int click_a = a == 0 ? 1 : 0;
          const int click_b = b == 0 ? 1 : 0;
          row[2 * click_a + click_b] += resolved.probs[3 * a + b];
        }
      }
    }
  }
  return table;
}

GameValue predicted_game_value(const SourceParams& params) {
  const ConditionalTable table = outcome_probabilities(params);
  double sum_win = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (score_trial(x, y, a, b)) sum_win += table[2 * x + y][2 * a + b];
        }
      }
    }
  }
  GameValue gv;
  gv.win_prob = sum_win / 4.0;
  gv.jbar = gv.win_prob - 0.75;
  return gv;
}

std::array<double, 16> joint_cell_probabilities(const ConditionalTable& cond, const std::array<double, 4>& settings) {
  double total = 0.0;
  for (double s : settings) {
    if (!(s >= 0.0)) fail(ErrorKind::Parameter, "settings distribution must be non-negative");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::Parameter, "settings distribution must sum to 1");
  std::array<double, 16> joint{};
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 4; ++o) joint[4 * s + o] = settings[s] * cond[s][o];
  }
  return joint;
}

TrialStream sample_trials(const std::array<double, 16>& joint, std::size_t n, std::uint64_t seed,
                          std::uint64_t first_index) {
  const AliasTable table(joint);
  std::array<std::uint8_t, 16> wire{};
  for (int cell = 0; cell < 16; ++cell) {
    const int s = cell >> 2, o = cell & 3;
    wire[cell] = pack_trial(s >> 1, s & 1, o >> 1, o & 1, true);
  }
  std::vector<std::uint8_t> packed(n);
  parallel_for((n + kChunkTrials - 1) / kChunkTrials, [&](std::size_t chunk) {
    Rng rng(derive_seed(seed, chunk));
    const std::size_t end = std::min(n, (chunk + 1) * kChunkTrials);
    for (std::size_t i = chunk * kChunkTrials; i < end; ++i) packed[i] = wire[table.sample(rng)];
  });
  return TrialStream(std::move(packed), first_index);
}

TrialStream simulate_trials(const SourceParams& params, std::size_t n, const std::array<double, 4>& settings,
                            std::uint64_t seed) {
  return sample_trials(joint_cell_probabilities(outcome_probabilities(params), settings), n, seed);
}

MuOptimum optimize_mu(const SourceParams& params, std::span<const double> mu_grid) {
  if (mu_grid.empty()) fail(ErrorKind::Parameter, "mean photon number grid is empty");
  MuOptimum best{0.0, -std::numeric_limits<double>::infinity()};
  bool first = true;
  SourceParams p = params;
  for (double mu : mu_grid) {
    p.mu = mu;
    const double j = predicted_game_value(p).jbar;
    if (first || j > best.jbar || (j == best.jbar && mu < best.mu)) {
      best = {mu, j};
      first = false;
    }
  }
  return best;
}

}  // namespace diqrng
