#include "diqrng/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "diqrng/error.hpp"
#include "diqrng/parallel.hpp"

namespace diqrng {

namespace {

constexpr double kDomainSlack = 1e-12;

// p/q checked against [3/4, 1] and snapped onto it when within rounding.
double win_ratio(double p, double q) {
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorKind::Domain, "q must lie in (0,1]");
  const double r = p / q;
  if (!(r >= 0.75 - kDomainSlack && r <= 1.0 + kDomainSlack)) {
    fail(ErrorKind::Domain, "p/q = " + std::to_string(r) + " outside [3/4, 1]");
  }
  return std::clamp(r, 0.75, 1.0);
}

double radicand(double r) { return std::max(0.0, 16.0 * r * (r - 1.0) + 3.0); }

}  // namespace

void RateParams::validate() const {
  if (n == 0) fail(ErrorKind::Parameter, "n must be > 0");
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorKind::Parameter, "q must lie in (0,1]");
  if (!(omega_win >= 0.0 && omega_win <= 1.0)) fail(ErrorKind::Parameter, "omega_win must lie in [0,1]");
  if (!(eps_s > 0.0 && eps_s < 1.0)) fail(ErrorKind::Parameter, "eps_s must lie in (0,1)");
  if (!(eps_ea > 0.0 && eps_ea < 1.0)) fail(ErrorKind::Parameter, "eps_ea must lie in (0,1)");
  if (!(delta_est > 0.0 && delta_est < 1.0)) fail(ErrorKind::Parameter, "delta_est must lie in (0,1)");
  if (t_e <= 0) fail(ErrorKind::Parameter, "t_e must be > 0");
  const double p = p_est();
  if (!(p > 0.0 && p <= q)) fail(ErrorKind::Parameter, "omega_win*q - delta_est must lie in (0, q]");
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::Domain, "binary entropy argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double g_fn(double p, double q) {
  const double r = win_ratio(p, q);
  if (r >= kTsirelsonWin) return 1.0;
  return 1.0 - binary_entropy(std::min(1.0, 0.5 + 0.5 * std::sqrt(radicand(r))));
}

double g_prime(double p, double q) {
  const double r = win_ratio(p, q);
  if (r >= kTsirelsonWin) return 0.0;
  const double s = std::sqrt(radicand(r));
  // atanh(s)/s -> 1 as s -> 0
  const double atanh_ratio = s < 1e-8 ? 1.0 + s * s / 3.0 : std::atanh(s) / s;
  return 8.0 * (2.0 * r - 1.0) * atanh_ratio / (q * std::numbers::ln2);
}

double f_min_fn(double p, double p_t, double q) {
  win_ratio(p, q);
  if (p <= p_t) return g_fn(p, q);
  const double slope = g_prime(p_t, q);
  return slope * p + (g_fn(p_t, q) - slope * p_t);
}

double rate_fn(double p, double p_t, const RateParams& params) {
  if (params.n == 0) fail(ErrorKind::Parameter, "n must be > 0");
  const double eps = params.eps_s * params.eps_ea;
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::Parameter, "eps_s*eps_ea must lie in (0,1)");
  const double correction = 2.0 * (std::log2(13.0) + g_prime(p_t, params.q)) *
                            std::sqrt(1.0 - 2.0 * std::log2(eps)) / std::sqrt(static_cast<double>(params.n));
  return f_min_fn(p, p_t, params.q) - correction;
}

RateResult r_opt(const RateParams& params) {
  params.validate();
  const double q = params.q;
  const double p = params.p_est();

  RateResult out;
  out.soundness = params.eps_s + params.eps_ea + std::exp2(-static_cast<double>(params.t_e));
  out.p_t_star = 0.75 * q;
  if (p / q > 0.75) {
    auto objective = [&](double u) { return rate_fn(p, u * q, params); };
    constexpr int kGrid = 1024;
    const double lo = 0.75, hi = kTsirelsonWin;
    const double step = (hi - lo) / (kGrid + 1);
    int best_i = 1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kGrid; ++i) {
      const double v = objective(lo + i * step);
      if (v > best_v) {
        best_v = v;
        best_i = i;
      }
    }
    // Golden section on the bracket around the best grid point.
    double a = lo + (best_i - 1) * step, b = lo + (best_i + 1) * step;
    if (best_i == 1) a = lo + 1e-15;
    if (best_i == kGrid) b = hi - 1e-15;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-11) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
    }
    double u = 0.5 * (a + b);
    double v = objective(u);
    if (best_v > v) {
      u = lo + best_i * step;
      v = best_v;
    }
    out.p_t_star = u * q;
    out.rate = std::clamp(v, 0.0, 1.0);
  }
  out.hmin_bound = static_cast<double>(params.n) * out.rate;
  out.extractable_bits = static_cast<std::int64_t>(std::floor(out.hmin_bound)) - params.t_e;
  return out;
}

double completeness_error(std::uint64_t n, double delta_est) {
  return std::exp(-2.0 * static_cast<double>(n) * delta_est * delta_est);
}

double asymptotic_rate(double omega_win, double q) {
  if (omega_win * q <= 0.75 * q) return 0.0;
  return g_fn(omega_win * q, q);
}

std::vector<RateCurvePoint> rate_curve(const RateParams& base, std::span<const std::uint64_t> n_list) {
  if (n_list.empty()) fail(ErrorKind::Parameter, "rate curve needs at least one n");
  std::vector<RateCurvePoint> out(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t i) {
    const std::uint64_t n = n_list[i];
    if (n == 0) fail(ErrorKind::Parameter, "rate curve n must be > 0");
    out[i].n = n;
    const double nd = static_cast<double>(n);
    RateParams p = base;
    p.n = n;
    p.eps_s = p.eps_ea = 1.0 / std::sqrt(nd);
    p.delta_est = std::sqrt(10.0 / nd);
    // Tiny n leaves the parameter domain; nothing is certifiable there anyway.
    if (p.delta_est >= 1.0 || p.eps_s >= 1.0 || p.p_est() <= 0.0) return;
    out[i].rate = r_opt(p).rate;
    out[i].total_bits = nd * out[i].rate;
  });
  return out;
}

double min_entropy_from_histogram(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0, peak = 0;
  for (std::uint64_t c : counts) {
    total += c;
    peak = std::max(peak, c);
  }
  if (total == 0) fail(ErrorKind::Parameter, "histogram is empty");
  if (peak == total) return 0.0;
  return -std::log2(static_cast<double>(peak) / static_cast<double>(total));
}

double min_entropy_from_histogram(const std::map<std::int64_t, std::uint64_t>& hist) {
  std::vector<std::uint64_t> counts;
  counts.reserve(hist.size());
  for (const auto& [symbol, count] : hist) counts.push_back(count);
  return min_entropy_from_histogram(counts);
}

}  // namespace diqrng
