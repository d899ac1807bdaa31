#pragma once

#include "sip/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace sip {

/// Infeasibility / optimality measurements at one point, taken against the
/// true (noise-free) functions.
struct Certificate {
  double f_value = 0.0;
  Vec g_star;
  double max_violation = 0.0;
  std::optional<double> f_gap;
  double epsilon_optimal_at = 0.0;
};

/// Closed-form maximum of (a + scale*y)'x - b over the unit L2 ball in y:
/// g* = a'x + scale*|x| at y* = x/|x| (y* = 0 when x = 0).
inline std::pair<double, Vec> max_g_ball_linear(const Vec& a, double b, double scale,
                                                const Vec& x) {
  const double n = x.norm();
  Vec y_star = n == 0.0 ? Vec(Vec::Zero(x.size())) : Vec(x / n);
  return {a.dot(x) + scale * n - b, std::move(y_star)};
}

struct AscentResult {
  double g_star = 0.0;
  Vec y_star;
  long iterations = 0;
};

/// Certified maximizer of g_i(x, .) over Y^i for strongly concave g_i:
/// projected gradient ascent with step 1/L_g_yy from y = 0 until the update
/// moves less than tol*step. Deterministic; throws if an ascent step ever
/// decreases g (non-concave oracle or an underestimated L_g_yy).
inline AscentResult max_g_concave_quadratic(const ProblemInstance& problem, int i, const Vec& x,
                                            double tol = 1e-8) {
  const double L = problem.constants.L_g_yy;
  detail::require(L > 0.0, "max_g_concave_quadratic: L_g_yy must be positive");
  const FeasibleSet& Y = problem.Ys[static_cast<size_t>(i)];
  const double step = 1.0 / L;

  Vec y = Y.project(Vec::Zero(problem.q[static_cast<size_t>(i)]));
  double value = problem.eval_g(i, x, y);
  long iters = 0;
  constexpr long kMaxIters = 10'000'000;
  while (true) {
    Vec y_next = Y.project(y + step * problem.grad_y_g(i, x, y));
    const double value_next = problem.eval_g(i, x, y_next);
    if (value_next < value - 1e-12)
      throw std::runtime_error(
          "max_g_concave_quadratic: ascent step decreased g (oracle not concave in y, "
          "or L_g_yy underestimated)");
    const double moved = (y_next - y).norm();
    y = std::move(y_next);
    value = value_next;
    ++iters;
    if (moved <= tol * step) break;
    if (iters >= kMaxIters)
      throw std::runtime_error("max_g_concave_quadratic: no convergence within iteration cap");
  }
  return {value, std::move(y), iters};
}

/// Brute-force maximizer over a box Y^i, for tests and cross-checks only.
/// Exhaustive evaluation on an axis-aligned grid with the given spacing;
/// the result is within M_g_y * sqrt(q_i) * resolution of the true maximum.
inline std::pair<double, Vec> max_g_grid(const ProblemInstance& problem, int i, const Vec& x,
                                         double resolution) {
  const Eigen::Index qi = problem.q[static_cast<size_t>(i)];
  detail::require(qi <= 3, "max_g_grid: refused for q_i > 3");
  const FeasibleSet& Y = problem.Ys[static_cast<size_t>(i)];
  detail::require(Y.kind == FeasibleSet::Kind::box, "max_g_grid: requires a box Y^i");
  detail::require(resolution > 0.0, "max_g_grid: resolution must be positive");

  std::vector<long> counts(static_cast<size_t>(qi));
  for (Eigen::Index d = 0; d < qi; ++d) {
    counts[static_cast<size_t>(d)] =
        static_cast<long>(std::floor((Y.hi[d] - Y.lo[d]) / resolution)) + 1;
  }
  Vec y(qi), best_y(qi);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<long> idx(static_cast<size_t>(qi), 0);
  while (true) {
    for (Eigen::Index d = 0; d < qi; ++d) {
      // last grid line snaps to the upper bound so corners are covered exactly
      const long j = idx[static_cast<size_t>(d)];
      y[d] = (j == counts[static_cast<size_t>(d)] - 1) ? Y.hi[d] : Y.lo[d] + j * resolution;
    }
    const double v = problem.eval_g(i, x, y);
    if (v > best) {
      best = v;
      best_y = y;
    }
    Eigen::Index d = 0;
    for (; d < qi; ++d) {
      if (++idx[static_cast<size_t>(d)] < counts[static_cast<size_t>(d)]) break;
      idx[static_cast<size_t>(d)] = 0;
    }
    if (d == qi) break;
  }
  return {best, best_y};
}

/// g_i*(x) and its maximizer through the instance's registered method.
inline std::pair<double, Vec> max_g(const ProblemInstance& problem, int i, const Vec& x) {
  const MaxOracle& oracle = problem.max_oracles[static_cast<size_t>(i)];
  if (std::holds_alternative<BallLinearMax>(oracle)) {
    const auto& s = std::get<BallLinearMax>(oracle);
    return max_g_ball_linear(s.a, s.b, s.scale, x);
  }
  if (std::holds_alternative<ConcaveAscentMax>(oracle)) {
    AscentResult r = max_g_concave_quadratic(problem, i, x);
    return {r.g_star, std::move(r.y_star)};
  }
  throw config_error("certify: no maximizer registered for constraint " + std::to_string(i) +
                     " of " + problem.name);
}

/// Evaluates g_i*(x) for every constraint through the instance's registered
/// maximizer and assembles the certificate. Pure: identical inputs produce
/// identical output.
inline Certificate certify(const ProblemInstance& problem, const Vec& x,
                           std::optional<double> f_star_ref = std::nullopt) {
  detail::require(x.size() == problem.p, "certify: x dimension mismatch");
  Certificate cert;
  cert.f_value = problem.eval_f(x);
  cert.g_star.resize(problem.m);
  for (int i = 0; i < problem.m; ++i) cert.g_star[i] = max_g(problem, i, x).first;
  cert.max_violation = std::max(0.0, cert.g_star.maxCoeff());
  if (f_star_ref) {
    cert.f_gap = cert.f_value - *f_star_ref;
    cert.epsilon_optimal_at = std::max(*cert.f_gap, cert.max_violation);
  } else {
    cert.epsilon_optimal_at = cert.max_violation;
  }
  return cert;
}

}  // namespace sip
