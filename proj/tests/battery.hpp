#pragma once

// Fixed battery of behaviors for projection checks.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "diqrng/behavior.hpp"
#include "diqrng/source.hpp"

namespace battery {

struct Case {
  std::string name;
  diqrng::BehaviorDist f;
};

inline diqrng::BehaviorDist from_table(const diqrng::ConditionalTable& t,
                                       const std::array<double, 4>& settings = {0.25, 0.25, 0.25, 0.25}) {
  diqrng::BehaviorDist b;
  b.settings = settings;
  b.cond = t;
  return b;
}

inline diqrng::ConditionalTable tsirelson() {
  diqrng::ConditionalTable t{};
  for (int s = 0; s < 4; ++s) {
    const int xy = (s >> 1) & (s & 1);
    for (int o = 0; o < 4; ++o) {
      const int parity = (o >> 1) ^ (o & 1);
      t[s][o] = (1.0 + ((parity == xy) ? 1.0 : -1.0) / std::sqrt(2.0)) / 4.0;
    }
  }
  return t;
}

inline diqrng::ConditionalTable mix(const diqrng::ConditionalTable& a, const diqrng::ConditionalTable& b, double w) {
  diqrng::ConditionalTable t{};
  for (int s = 0; s < 4; ++s)
    for (int o = 0; o < 4; ++o) t[s][o] = w * a[s][o] + (1.0 - w) * b[s][o];
  return t;
}

inline diqrng::ConditionalTable uniform_table() {
  diqrng::ConditionalTable t{};
  for (auto& row : t) row.fill(0.25);
  return t;
}

// Alice's P(a=0) is 0.5 + shift at y = 1 and 0.5 at y = 0, for both x.
inline diqrng::ConditionalTable alice_signaling(double shift) {
  diqrng::ConditionalTable t = mix(tsirelson(), uniform_table(), 0.5);
  for (int x = 0; x < 2; ++x) {
    auto& row = t[2 * x + 1];
    const double a0 = row[0] + row[1];
    const double scale0 = (a0 + shift) / a0, scale1 = (1.0 - a0 - shift) / (1.0 - a0);
    row[0] *= scale0;
    row[1] *= scale0;
    row[2] *= scale1;
    row[3] *= scale1;
  }
  return t;
}

inline diqrng::ConditionalTable random_table(std::mt19937_64& rng, bool with_zeros) {
  std::gamma_distribution<double> gamma(0.7, 1.0);
  diqrng::ConditionalTable t{};
  for (int s = 0; s < 4; ++s) {
    double sum = 0.0;
    for (int o = 0; o < 4; ++o) {
      t[s][o] = (with_zeros && (rng() % 5 == 0)) ? 0.0 : gamma(rng) + 1e-3;
      sum += t[s][o];
    }
    if (sum == 0.0) {
      t[s][0] = 1.0;
      sum = 1.0;
    }
    for (double& v : t[s]) v /= sum;
  }
  return t;
}

inline std::vector<Case> behaviors() {
  using namespace diqrng;
  std::vector<Case> out;
  out.push_back({"uniform", from_table(uniform_table())});
  out.push_back({"pr_box_0", from_table(pr_box_vertex(0))});
  out.push_back({"pr_box_5", from_table(pr_box_vertex(5))});
  out.push_back({"deterministic_0", from_table(deterministic_vertex(0))});
  out.push_back({"deterministic_9", from_table(deterministic_vertex(9))});
  out.push_back({"tsirelson", from_table(tsirelson())});
  out.push_back({"source_model", from_table(outcome_probabilities(paper_source_params()))});
  out.push_back({"alice_signaling_0.1", from_table(alice_signaling(0.1))});
  ConditionalTable bob = alice_signaling(0.07);
  // Transpose the parties: swap x<->y and a<->b.
  ConditionalTable bob_t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) bob_t[2 * y + x][2 * b + a] = bob[2 * x + y][2 * a + b];
  out.push_back({"bob_signaling_0.07", from_table(bob_t)});
  out.push_back({"noisy_pr_0.6", from_table(mix(pr_box_vertex(0), uniform_table(), 0.6))});
  out.push_back({"noisy_pr_0.4_local", from_table(mix(pr_box_vertex(3), uniform_table(), 0.4))});
  out.push_back({"two_deterministic", from_table(mix(deterministic_vertex(3), deterministic_vertex(12), 0.3))});
  out.push_back({"tsirelson_biased_settings", from_table(tsirelson(), {0.1, 0.2, 0.3, 0.4})});
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 5; ++i) out.push_back({"random_" + std::to_string(i), from_table(random_table(rng, false))});
  for (int i = 0; i < 2; ++i) {
    out.push_back({"random_sparse_" + std::to_string(i), from_table(random_table(rng, true), {0.4, 0.3, 0.2, 0.1})});
  }
  return out;
}

}  // namespace battery
