#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "diqrng/error.hpp"
#include "diqrng/rate.hpp"
#include "oracles/scalar.hpp"

using namespace diqrng;

namespace {

RateParams published_params(double eps) {
  RateParams p;
  p.n = 68'950'000'000ULL;
  p.q = 1.0;
  p.omega_win = 0.75 + 2.757e-4;
  p.eps_s = p.eps_ea = eps;
  p.delta_est = std::sqrt(10.0 / static_cast<double>(p.n));
  p.t_e = 100;
  return p;
}

}  // namespace

TEST_CASE("g examples") {
  CHECK(g_fn(0.75, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(g_fn(kTsirelsonWin, 1.0) == 1.0);
  CHECK(g_fn(0.95, 1.0) == 1.0);
  CHECK(g_fn(0.80, 1.0) == doctest::Approx(oracle::g_of_win(0.80)).epsilon(1e-12));
  CHECK(g_fn(0.80, 1.0) == doctest::Approx(0.3457).epsilon(1e-3));
  CHECK(g_fn(0.4, 0.5) == doctest::Approx(oracle::g_of_win(0.8)).epsilon(1e-12));
  // Just below the kink both branches meet.
  CHECK(g_fn(kTsirelsonWin - 1e-13, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("g domain errors") {
  CHECK_THROWS_AS(g_fn(0.7, 1.0), Error);
  CHECK_THROWS_AS(g_fn(1.01, 1.0), Error);
  try {
    g_fn(0.5, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("g matches the scalar oracle and is non-decreasing") {
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double w = 0.75 + 0.25 * i / 2000.0;
    const double v = g_fn(w, 1.0);
    CHECK(v == doctest::Approx(oracle::g_of_win(w)).epsilon(1e-12).scale(1.0));
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("analytic derivative matches central differences at 100 random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> win(0.7505, 0.85);
  std::uniform_real_distribution<double> qd(0.2, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double w = win(rng), q = qd(rng);
    const double p = w * q;
    const double fd = oracle::central_difference([&](double pp) { return oracle::g_of_win(pp / q); }, p, 1e-7 * q);
    const double an = g_prime(p, q);
    CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
  CHECK(g_prime(0.9, 1.0) == 0.0);
}

TEST_CASE("f_min definition and continuity") {
  const double q = 0.8, p_t = 0.79 * q;
  for (double w : {0.751, 0.77, 0.789}) CHECK(f_min_fn(w * q, p_t, q) == g_fn(w * q, q));
  CHECK(std::abs(f_min_fn(p_t, p_t, q) - g_fn(p_t, q)) <= 1e-12);
  CHECK(std::abs(f_min_fn(p_t + 1e-12, p_t, q) - g_fn(p_t, q)) <= 1e-9);
  const double slope = oracle::central_difference([&](double pp) { return oracle::g_of_win(pp / q); }, p_t, 1e-7);
  for (double w : {0.8, 0.82, 0.85}) {
    const double p = w * q;
    const double tangent = oracle::g_of_win(p_t / q) + slope * (p - p_t);
    CHECK(std::abs(f_min_fn(p, p_t, q) - tangent) <= 1e-6);
  }
}

TEST_CASE("tangent lies below g on the curved branch (g is convex there)") {
  for (double wt : {0.7501, 0.76, 0.8, 0.84, 0.853}) {
    const double q = 1.0, p_t = wt;
    for (int i = 0; i <= 1000; ++i) {
      const double p = p_t + (kTsirelsonWin - p_t) * i / 1000.0;
      CHECK(f_min_fn(p, p_t, q) <= g_fn(p, q) + 1e-12);
    }
  }
}

TEST_CASE("rate_fn correction term") {
  RateParams params;
  params.n = 100;
  params.eps_s = 0.5;
  params.eps_ea = 1.0;
  const double p = 0.8, p_t = 0.78;
  const double expected = f_min_fn(p, p_t, 1.0) - 2.0 * (std::log2(13.0) + g_prime(p_t, 1.0)) * std::sqrt(3.0) / 10.0;
  CHECK(rate_fn(p, p_t, params) == doctest::Approx(expected).epsilon(1e-12));

  params.n = 1ULL << 62;
  CHECK(rate_fn(p, p_t, params) == doctest::Approx(f_min_fn(p, p_t, 1.0)).epsilon(1e-7));
}

TEST_CASE("published rate reproduction") {
  const RateResult r = r_opt(published_params(3.8e-6));
  CHECK(std::abs(static_cast<double>(r.extractable_bits) / 6.2469e7 - 1.0) <= 0.02);
  CHECK(r.rate == doctest::Approx(9.06e-4).epsilon(5e-3));
  CHECK(r.soundness == doctest::Approx(7.6e-6).epsilon(1e-9));
  // At the optimizer the objective equals the reported rate.
  const RateParams p = published_params(3.8e-6);
  CHECK(rate_fn(p.p_est(), r.p_t_star, p) == doctest::Approx(r.rate).epsilon(1e-12));
  // The optimizer is a maximum: nearby tangent points do no better.
  for (double d : {-1e-6, 1e-6, -1e-4, 1e-4}) CHECK(rate_fn(p.p_est(), r.p_t_star + d, p) <= r.rate + 1e-15);
}

TEST_CASE("r_opt edge cases") {
  RateParams p = published_params(1e-5);
  p.omega_win = 0.75;
  const RateResult none = r_opt(p);
  CHECK(none.rate == 0.0);
  CHECK(none.extractable_bits < 1);

  RateParams small = published_params(1e-5);
  small.n = 1'000'000;
  CHECK(r_opt(small).rate == 0.0);

  RateParams bad = published_params(1e-5);
  bad.delta_est = 0.0;
  CHECK_THROWS_AS(r_opt(bad), Error);
  bad = published_params(1e-5);
  bad.q = 0.0;
  CHECK_THROWS_AS(r_opt(bad), Error);
}

TEST_CASE("rate is monotone in n and delta") {
  RateParams p = published_params(1e-5);
  double prev = -1.0;
  for (double n = 1e9; n <= 1e13; n *= 3.0) {
    p.n = static_cast<std::uint64_t>(n);
    const double r = r_opt(p).rate;
    CHECK(r >= prev);
    prev = r;
  }
  p = published_params(1e-5);
  prev = 2.0;
  for (double d = 1e-6; d < 2e-4; d *= 1.5) {
    p.delta_est = d;
    const double r = r_opt(p).rate;
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("extractable bits never exceed the bound") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> jb(0.0, 0.05), le(6.0, 13.0);
  for (int i = 0; i < 200; ++i) {
    RateParams p;
    p.n = static_cast<std::uint64_t>(std::pow(10.0, le(rng)));
    p.omega_win = 0.75 + jb(rng);
    p.delta_est = std::sqrt(10.0 / static_cast<double>(p.n));
    const RateResult r = r_opt(p);
    CHECK(static_cast<double>(r.extractable_bits + p.t_e) <= r.hmin_bound);
    CHECK(r.rate >= 0.0);
    CHECK(r.rate <= 1.0);
  }
}

TEST_CASE("completeness error") {
  CHECK(completeness_error(1000, 0.0) == 1.0);
  const double n = 68'950'000'000.0;
  CHECK(completeness_error(68'950'000'000ULL, std::sqrt(10.0 / n)) == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
  const double a = completeness_error(1'000'000, 1e-3);
  CHECK(completeness_error(2'000'000, 1e-3) == doctest::Approx(a * a).epsilon(1e-12));
}

TEST_CASE("rate curve") {
  RateParams base;
  base.omega_win = 0.75 + 2.757e-4;
  std::vector<std::uint64_t> ns{1, 1000, 1'000'000, 68'950'000'000ULL};
  for (double n = 1e11; n <= 1e14 * 1.01; n *= 2.0) ns.push_back(static_cast<std::uint64_t>(n));
  const auto curve = rate_curve(base, ns);
  CHECK(curve[0].total_bits == 0.0);
  CHECK(curve[1].total_bits == 0.0);
  CHECK(curve[2].total_bits == 0.0);
  const double asym = asymptotic_rate(base.omega_win, 1.0);
  const double frac = curve[3].total_bits / (static_cast<double>(ns[3]) * asym);
  CHECK(std::abs(frac - 0.569) <= 0.02);
  double prev = frac;
  for (std::size_t i = 4; i < curve.size(); ++i) {
    const double f = curve[i].total_bits / (static_cast<double>(ns[i]) * asym);
    CHECK(f >= prev);
    CHECK(f <= 1.0);
    prev = f;
  }
  CHECK(prev > 0.9);
  const auto again = rate_curve(base, ns);
  for (std::size_t i = 0; i < curve.size(); ++i) CHECK(again[i].total_bits == curve[i].total_bits);
  CHECK_THROWS_AS(rate_curve(base, std::vector<std::uint64_t>{}), Error);
}

TEST_CASE("min-entropy of histograms") {
  std::vector<std::uint64_t> uniform(256, 1000);
  CHECK(min_entropy_from_histogram(uniform) == 8.0);
  std::map<std::int64_t, std::uint64_t> spike{{42, 123}};
  CHECK(min_entropy_from_histogram(spike) == 0.0);
  CHECK_THROWS_AS(min_entropy_from_histogram(std::vector<std::uint64_t>{0, 0}), Error);

  // 8-bit quantized Gaussian whose +-3.75 sigma spans the ADC range.
  const double sigma = 256.0 / 7.5;
  std::vector<std::uint64_t> adc(256, 0);
  for (int k = 0; k < 256; ++k) {
    const double lo = (k - 128.0) / sigma, hi = (k - 127.0) / sigma;
    const double pr = 0.5 * (std::erfc(-hi / std::sqrt(2.0)) - std::erfc(-lo / std::sqrt(2.0)));
    adc[k] = static_cast<std::uint64_t>(std::llround(pr * 1e12));
  }
  CHECK(min_entropy_from_histogram(adc) >= 6.4);
}
