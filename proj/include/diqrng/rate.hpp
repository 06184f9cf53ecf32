#pragma once

// Entropy-accumulation rate functions for the spot-checking CHSH protocol.
// All logarithms are base 2. p is the probability of (test trial AND win),
// q the test probability, so p/q is the winning probability on test trials.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace diqrng {

// Upper end of the curved branch of g: (2 + sqrt 2)/4.
inline constexpr double kTsirelsonWin = 0.85355339059327376220;

struct RateParams {
  std::uint64_t n = 1;
  double q = 1.0;
  double omega_win = 0.75;
  double eps_s = 1e-5;
  double eps_ea = 1e-5;
  double delta_est = 1e-5;
  std::int64_t t_e = 100;

  // omega_win * q - delta_est
  double p_est() const { return omega_win * q - delta_est; }
  void validate() const;
};

struct RateResult {
  double rate = 0.0;       // certified bits per trial, clamped at 0
  double p_t_star = 0.0;   // optimal tangent point (absolute, not divided by q)
  double hmin_bound = 0.0; // n * rate
  std::int64_t extractable_bits = 0;  // floor(hmin_bound) - t_e; <= 0 means nothing to extract
  double soundness = 0.0;  // eps_s + eps_ea + 2^-t_e
};

double binary_entropy(double x);

double g_fn(double p, double q);
// dg/dp, closed form. Diverges at p/q = (2+sqrt 2)/4 from below; 0 above.
double g_prime(double p, double q);
double f_min_fn(double p, double p_t, double q);
// May be negative.
double rate_fn(double p, double p_t, const RateParams& params);

RateResult r_opt(const RateParams& params);

double completeness_error(std::uint64_t n, double delta_est);

// n -> infinity limit at fixed omega_win and q: g(omega_win * q, q).
double asymptotic_rate(double omega_win, double q);

struct RateCurvePoint {
  std::uint64_t n = 0;
  double rate = 0.0;
  double total_bits = 0.0;  // n * rate
};

// For each n: eps_s = eps_ea = 1/sqrt(n), delta_est = sqrt(10/n), then r_opt.
// Only q, omega_win and t_e are taken from base.
std::vector<RateCurvePoint> rate_curve(const RateParams& base, std::span<const std::uint64_t> n_list);

// -log2 of the largest relative frequency.
double min_entropy_from_histogram(std::span<const std::uint64_t> counts);
double min_entropy_from_histogram(const std::map<std::int64_t, std::uint64_t>& hist);

}  // namespace diqrng
