#pragma once

#include "sip/certify.hpp"
#include "sip/problems.hpp"
#include "sip/solver_agsip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace sip {

/// Uniform draw from a box or an L2 ball, counter-addressed by (seed, index).
/// Ball draws use a Gaussian direction scaled by u^(1/q).
inline Vec uniform_point(const FeasibleSet& set, std::uint64_t seed, int constraint,
                         std::uint64_t index) {
  const rng::StreamKey key = oracle_stream(seed, index, 7, OracleKind::sampler, constraint);
  switch (set.kind) {
    case FeasibleSet::Kind::box: {
      const Vec u = rng::uniforms(key, set.dim);
      return Vec(set.lo.array() + u.array() * (set.hi - set.lo).array());
    }
    case FeasibleSet::Kind::ball2: {
      const Vec dir = rng::normals(key, set.dim).normalized();
      const rng::StreamKey rkey = oracle_stream(seed, index, 8, OracleKind::sampler, constraint);
      const double u = rng::uniforms(rkey, 1)[0];
      const double r = set.radius * std::pow(u, 1.0 / static_cast<double>(set.dim));
      return Vec(set.center + r * dir);
    }
    default:
      throw config_error("uniform_point: only box and ball2 sets are samplable");
  }
}

struct InnerSolverConfig {
  long iterations = 200'000;
  double penalty_rho = 10.0;  // exact-penalty weight on the worst active-set violation
  double step_c = 0.5;        // subgradient step scale when f is not strongly convex
};

struct ExchangeConfig {
  int init_samples = 100;
  double tol = 1e-3;
  int max_rounds = 50;
  InnerSolverConfig inner;
  std::uint64_t seed = 0;
  bool measure_wall = true;
};

struct ExchangeResult {
  Vec x;
  int rounds = 0;
  bool converged = false;
  IterateTrace trace;  // one row per round; k = round index
  double solver_seconds = 0.0;
};

namespace detail {

/// Projected subgradient descent on f(x) + rho * [max over the finite active
/// sets of g_i(x, y)]_+ over X. Returns the best visited iterate by penalty
/// value. Step 2/(mu_f (j+1)) when f is strongly convex, c/sqrt(j+1) otherwise.
inline Vec solve_finite_relaxation(const ProblemInstance& problem,
                                   const std::vector<std::vector<Vec>>& active_sets, Vec x,
                                   const InnerSolverConfig& cfg) {
  const double rho = cfg.penalty_rho;
  const double mu = problem.constants.mu_f;
  Vec best = x;
  double best_value = std::numeric_limits<double>::infinity();
  for (long j = 0; j < cfg.iterations; ++j) {
    int worst_i = 0;
    const Vec* worst_y = nullptr;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < problem.m; ++i)
      for (const Vec& y : active_sets[static_cast<size_t>(i)]) {
        const double g = problem.eval_g(i, x, y);
        if (g > worst) {
          worst = g;
          worst_i = i;
          worst_y = &y;
        }
      }
    const double value = problem.eval_f(x) + rho * std::max(0.0, worst);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
    Vec d = problem.grad_f(x);
    if (worst > 0.0 && worst_y) d += rho * problem.grad_x_g(worst_i, x, *worst_y);
    const double eta = mu > 0.0 ? 2.0 / (mu * static_cast<double>(j + 1))
                                : cfg.step_c / std::sqrt(static_cast<double>(j + 1));
    x = problem.X.project(x - eta * d);
  }
  return best;
}

}  // namespace detail

/// Exchange method: alternate between solving the finite relaxation over the
/// accumulated parameter sets and appending each constraint's current worst
/// case. Stops when the certified worst violation falls below tol.
inline ExchangeResult exchange_solve(const ProblemInstance& problem, const ExchangeConfig& cfg) {
  detail::require(cfg.init_samples >= 1, "exchange_solve: init_samples must be >= 1");
  detail::require(cfg.max_rounds >= 1, "exchange_solve: max_rounds must be >= 1");

  std::vector<std::vector<Vec>> active_sets(static_cast<size_t>(problem.m));
  for (int i = 0; i < problem.m; ++i)
    for (int s = 0; s < cfg.init_samples; ++s)
      active_sets[static_cast<size_t>(i)].push_back(
          uniform_point(problem.Ys[static_cast<size_t>(i)], cfg.seed, i,
                        static_cast<std::uint64_t>(s)));

  ExchangeResult result;
  detail::SolverClock clock(cfg.measure_wall);
  Vec x = problem.default_x0();
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    x = detail::solve_finite_relaxation(problem, active_sets, std::move(x), cfg.inner);
    double worst_signed = -std::numeric_limits<double>::infinity();
    std::vector<Vec> worst_ys(static_cast<size_t>(problem.m));
    for (int i = 0; i < problem.m; ++i) {
      auto [gi, yi] = max_g(problem, i, x);
      worst_signed = std::max(worst_signed, gi);
      worst_ys[static_cast<size_t>(i)] = std::move(yi);
    }
    result.rounds = round;
    result.trace.rows.push_back({round, problem.eval_f(x), std::max(0.0, worst_signed), 0.0,
                                 clock.seconds()});
    if (worst_signed <= cfg.tol) {
      result.converged = true;
      break;
    }
    for (int i = 0; i < problem.m; ++i)
      active_sets[static_cast<size_t>(i)].push_back(std::move(worst_ys[static_cast<size_t>(i)]));
  }
  result.x = std::move(x);
  result.solver_seconds = clock.seconds();
  return result;
}

enum class Decay { constant, inv_k, inv_sqrt_k };

/// Switching-subgradient baseline. Steps along the objective gradient when
/// the current worst case clears the tolerance delta_k, otherwise along the
/// violated constraint's subgradient at its worst-case parameter.
struct SipComConfig {
  double step_c = 0.1;
  Decay step_rule = Decay::inv_sqrt_k;
  double delta = 0.002;
  Decay delta_rule = Decay::constant;
  long K = 100'000;
  bool strongly_convex_weights = false;  // weights eta_k/(1-eta_k) instead of uniform
  long record_every = 100;
  bool measure_wall = true;
};

struct SipComResult {
  Vec x_bar;
  bool any_feasible_step = false;
  IterateTrace trace;
  double solver_seconds = 0.0;
};

inline double decayed(double c, Decay rule, long k) {
  switch (rule) {
    case Decay::constant: return c;
    case Decay::inv_k: return c / static_cast<double>(k + 1);
    case Decay::inv_sqrt_k: return c / std::sqrt(static_cast<double>(k + 1));
  }
  return c;
}

inline SipComResult sipcom_solve(const ProblemInstance& problem, const SipComConfig& cfg) {
  detail::require(cfg.K >= 1, "sipcom_solve: K must be >= 1");
  detail::require(cfg.step_c > 0.0, "sipcom_solve: step constant must be positive");
  // eta_k < 1 keeps the strongly convex weights eta/(1-eta) finite.
  const double c_eff = cfg.strongly_convex_weights ? std::min(cfg.step_c, 0.99) : cfg.step_c;

  SipComResult result;
  detail::SolverClock clock(cfg.measure_wall);
  Vec x = problem.default_x0();
  Vec acc = Vec::Zero(problem.p);
  double acc_w = 0.0;

  for (long k = 0; k < cfg.K; ++k) {
    double worst_signed = -std::numeric_limits<double>::infinity();
    int worst_i = 0;
    Vec worst_y;
    for (int i = 0; i < problem.m; ++i) {
      auto [gi, yi] = max_g(problem, i, x);
      if (gi > worst_signed) {
        worst_signed = gi;
        worst_i = i;
        worst_y = std::move(yi);
      }
    }
    if (k % cfg.record_every == 0)
      result.trace.rows.push_back(
          {k, problem.eval_f(x), std::max(0.0, worst_signed), 0.0, clock.seconds()});

    const double eta = decayed(c_eff, cfg.step_rule, k);
    const double delta_k = decayed(cfg.delta, cfg.delta_rule, k);
    Vec d;
    if (worst_signed <= delta_k) {
      d = problem.grad_f(x);
      const double w = cfg.strongly_convex_weights ? eta / (1.0 - eta) : 1.0;
      acc += w * x;
      acc_w += w;
      result.any_feasible_step = true;
    } else {
      d = problem.grad_x_g(worst_i, x, worst_y);
    }
    x = problem.X.project(x - eta * d);
  }

  result.x_bar = result.any_feasible_step ? Vec(acc / acc_w) : x;
  {
    double worst_signed = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < problem.m; ++i)
      worst_signed = std::max(worst_signed, max_g(problem, i, result.x_bar).first);
    result.trace.rows.push_back({cfg.K, problem.eval_f(result.x_bar),
                                 std::max(0.0, worst_signed), 0.0, clock.seconds()});
  }
  result.solver_seconds = clock.seconds();
  return result;
}

}  // namespace sip
