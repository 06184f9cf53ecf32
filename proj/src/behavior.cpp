#include "diqrng/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "diqrng/error.hpp"

namespace diqrng {

void BehaviorDist::validate() const {
  double total = 0.0;
  for (double s : settings) {
    if (!(s >= 0.0)) fail(ErrorKind::Parameter, "settings probabilities must be non-negative");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-10) fail(ErrorKind::Parameter, "settings probabilities must sum to 1");
  for (const auto& row : cond) {
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) fail(ErrorKind::Parameter, "conditional probabilities must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) fail(ErrorKind::Parameter, "conditional block does not sum to 1");
  }
}

double BehaviorDist::signaling_residual() const {
  double worst = 0.0;
  for (int x = 0; x < 2; ++x) {
    // Alice's marginal P(a=0|x,y) must not depend on y.
    const double a0 = cond[2 * x][0] + cond[2 * x][1];
    const double a1 = cond[2 * x + 1][0] + cond[2 * x + 1][1];
    worst = std::max(worst, std::abs(a0 - a1));
  }
  for (int y = 0; y < 2; ++y) {
    const double b0 = cond[y][0] + cond[y][2];
    const double b1 = cond[2 + y][0] + cond[2 + y][2];
    worst = std::max(worst, std::abs(b0 - b1));
  }
  return worst;
}

BehaviorDist uniform_behavior(const std::array<double, 4>& settings) {
  BehaviorDist out;
  out.settings = settings;
  for (auto& row : out.cond) row.fill(0.25);
  return out;
}

BehaviorDist behavior_from_counts(const CountsTable& counts, const std::array<double, 4>& settings) {
  BehaviorDist out;
  out.settings = settings;
  for (int s = 0; s < 4; ++s) {
    const std::uint64_t n = counts.setting_total(s >> 1, s & 1);
    if (n == 0) {
      fail(ErrorKind::Validation,
           "empty setting cell x=" + std::to_string(s >> 1) + " y=" + std::to_string(s & 1));
    }
    for (int o = 0; o < 4; ++o) {
      out.cond[s][o] = static_cast<double>(counts.cells()[s][o]) / static_cast<double>(n);
    }
  }
  out.validate();
  return out;
}

ConditionalTable deterministic_vertex(int index) {
  if (index < 0 || index > 15) fail(ErrorKind::Parameter, "deterministic strategy index outside 0..15");
  const bool a0 = index & 1, a1 = index & 2, b0 = index & 4, b1 = index & 8;
  ConditionalTable v{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const bool a = a0 != (a1 && x);
      const bool b = b0 != (b1 && y);
      v[2 * x + y][2 * a + b] = 1.0;
    }
  }
  return v;
}

ConditionalTable pr_box_vertex(int index) {
  if (index < 0 || index > 7) fail(ErrorKind::Parameter, "PR box index outside 0..7");
  const bool alpha = index & 1, beta = index & 2, gamma = index & 4;
  ConditionalTable v{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const bool parity = (((x && y) != (alpha && x)) != (beta && y)) != gamma;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if ((a != b) == parity) v[2 * x + y][2 * a + b] = 0.5;
        }
      }
    }
  }
  return v;
}

const std::vector<ConditionalTable>& lr_vertices() {
  static const std::vector<ConditionalTable> kVertices = [] {
    std::vector<ConditionalTable> v;
    for (int i = 0; i < 16; ++i) v.push_back(deterministic_vertex(i));
    return v;
  }();
  return kVertices;
}

const std::vector<ConditionalTable>& ns_vertices() {
  static const std::vector<ConditionalTable> kVertices = [] {
    std::vector<ConditionalTable> v = lr_vertices();
    for (int i = 0; i < 8; ++i) v.push_back(pr_box_vertex(i));
    return v;
  }();
  return kVertices;
}

double kl_divergence(const BehaviorDist& f, const BehaviorDist& p) {
  for (int s = 0; s < 4; ++s) {
    if (std::abs(f.settings[s] - p.settings[s]) > 1e-12) {
      fail(ErrorKind::Parameter, "KL divergence needs a shared settings distribution");
    }
  }
  double d = 0.0;
  for (int s = 0; s < 4; ++s) {
    if (f.settings[s] == 0.0) continue;
    for (int o = 0; o < 4; ++o) {
      const double fv = f.cond[s][o];
      if (fv == 0.0) continue;
      const double pv = p.cond[s][o];
      if (pv <= 0.0) return std::numeric_limits<double>::infinity();
      d += f.settings[s] * fv * std::log2(fv / pv);
    }
  }
  return std::max(d, 0.0);
}

namespace {

// One EM sweep of the mixture weights with its diagnostics.
struct EmState {
  std::vector<double> lambda;
  ConditionalTable mix{};
  double log_likelihood = 0.0;  // sum w ln mix, -inf if a data cell lost all mass
  double gap = 0.0;             // log2 max_k G_k
  std::vector<double> next;     // lambda_k * G_k
};

struct Cell {
  int s, o;
  double w;
};

void em_evaluate(EmState& st, const std::vector<Cell>& cells, const std::vector<ConditionalTable>& vertices) {
  for (auto& row : st.mix) row.fill(0.0);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (st.lambda[k] == 0.0) continue;
    for (int s = 0; s < 4; ++s) {
      for (int o = 0; o < 4; ++o) st.mix[s][o] += st.lambda[k] * vertices[k][s][o];
    }
  }
  st.log_likelihood = 0.0;
  for (const Cell& c : cells) {
    if (!(st.mix[c.s][c.o] > 0.0)) {
      st.log_likelihood = -std::numeric_limits<double>::infinity();
      st.gap = std::numeric_limits<double>::infinity();
      return;
    }
    st.log_likelihood += c.w * std::log(st.mix[c.s][c.o]);
  }
  st.next.assign(vertices.size(), 0.0);
  double max_gain = 0.0, total = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    double g = 0.0;
    for (const Cell& c : cells) {
      const double v = vertices[k][c.s][c.o];
      if (v != 0.0) g += c.w * v / st.mix[c.s][c.o];
    }
    max_gain = std::max(max_gain, g);
    st.next[k] = st.lambda[k] * g;
    total += st.next[k];
  }
  for (double& l : st.next) l /= total;
  st.gap = std::log2(max_gain);
}

}  // namespace

ProjectionResult project_onto_hull(const BehaviorDist& f, const std::vector<ConditionalTable>& vertices,
                                   const ProjectionOptions& options) {
  f.validate();
  const std::size_t k_count = vertices.size();
  if (k_count == 0) fail(ErrorKind::Parameter, "polytope has no vertices");

  // Cells carrying data: weight w = p_xy * f(ab|xy) > 0.
  std::vector<Cell> cells;
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 4; ++o) {
      const double w = f.settings[s] * f.cond[s][o];
      if (w > 0.0) cells.push_back({s, o, w});
    }
  }

  // EM on the weights, extrapolated with SQUAREM steps (two EM sweeps, a
  // squared extrapolation, then a stabilizing sweep). Extrapolations that lose
  // likelihood fall back to the plain EM iterate.
  EmState cur;
  cur.lambda.assign(k_count, 1.0 / static_cast<double>(k_count));
  em_evaluate(cur, cells, vertices);
  std::uint64_t it = 0;
  EmState a, b, c;
  while (!(cur.gap < options.gap_tolerance) && it < options.max_iterations) {
    a.lambda = cur.next;
    em_evaluate(a, cells, vertices);
    ++it;
    if (a.gap < options.gap_tolerance || it >= options.max_iterations) {
      cur = a;
      break;
    }
    b.lambda = a.next;
    em_evaluate(b, cells, vertices);
    ++it;
    std::vector<double> r(k_count), v(k_count);
    double rr = 0.0, vv = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      r[k] = a.lambda[k] - cur.lambda[k];
      v[k] = b.lambda[k] - 2.0 * a.lambda[k] + cur.lambda[k];
      rr += r[k] * r[k];
      vv += v[k] * v[k];
    }
    if (vv == 0.0 || rr == 0.0) {
      cur = b;
      continue;
    }
    double alpha = std::min(-1.0, -std::sqrt(rr / vv));
    c.lambda.assign(k_count, 0.0);
    for (;;) {
      bool feasible = true;
      for (std::size_t k = 0; k < k_count; ++k) {
        c.lambda[k] = cur.lambda[k] - 2.0 * alpha * r[k] + alpha * alpha * v[k];
        if (c.lambda[k] < 0.0) {
          if (c.lambda[k] > -1e-300) c.lambda[k] = 0.0;
          else feasible = false;
        }
      }
      if (feasible || alpha == -1.0) break;
      alpha = (alpha - 1.0) / 2.0;
      if (alpha > -1.0 - 1e-9) alpha = -1.0;
    }
    double total = 0.0;
    for (double& l : c.lambda) total += std::max(l, 0.0);
    for (double& l : c.lambda) l = std::max(l, 0.0) / total;
    em_evaluate(c, cells, vertices);
    if (c.log_likelihood >= b.log_likelihood) {
      // Stabilizing sweep from the extrapolated point.
      a.lambda = c.next;
      em_evaluate(a, cells, vertices);
      ++it;
      cur = a.log_likelihood >= c.log_likelihood ? a : c;
    } else {
      cur = b;
    }
  }
  if (!(cur.gap < options.gap_tolerance) && options.throw_on_failure) {
    fail(ErrorKind::Convergence, "projection did not converge after " + std::to_string(it) +
                                     " iterations, gap " + std::to_string(cur.gap) + " bits");
  }
  ProjectionResult out;
  out.behavior.settings = f.settings;
  out.behavior.cond = cur.mix;
  // Remove rounding drift in the block sums.
  for (auto& row : out.behavior.cond) {
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  out.weights = cur.lambda;
  out.divergence = kl_divergence(f, out.behavior);
  out.gap = std::max(cur.gap, 0.0);
  out.iterations = it;
  return out;
}

ProjectionResult project_no_signaling(const BehaviorDist& f, const ProjectionOptions& options) {
  f.validate();
  if (f.signaling_residual() <= 1e-12) {
    ProjectionResult out;
    out.behavior = f;
    return out;
  }
  return project_onto_hull(f, ns_vertices(), options);
}

double chsh_facet_excess(const BehaviorDist& f) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const bool alpha = k & 1, beta = k & 2, gamma = k & 4;
    double sum = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const bool parity = (((x && y) != (alpha && x)) != (beta && y)) != gamma;
        for (int o = 0; o < 4; ++o) {
          if (((o >> 1) != (o & 1)) == parity) sum += f.cond[2 * x + y][o];
        }
      }
    }
    worst = std::max(worst, sum - 3.0);
  }
  return worst;
}

ProjectionResult project_local_realistic(const BehaviorDist& p_ns, const ProjectionOptions& options) {
  p_ns.validate();
  // NS plus every CHSH facet characterizes the local polytope here, so a
  // member is its own projection; EM still supplies mixture weights.
  if (p_ns.signaling_residual() <= 1e-12 && chsh_facet_excess(p_ns) <= 1e-12) {
    ProjectionOptions quiet = options;
    quiet.throw_on_failure = false;
    ProjectionResult out = project_onto_hull(p_ns, lr_vertices(), quiet);
    out.behavior = p_ns;
    out.divergence = 0.0;
    out.gap = 0.0;
    return out;
  }
  return project_onto_hull(p_ns, lr_vertices(), options);
}

}  // namespace diqrng
