#pragma once

#include "sip/certify.hpp"
#include "sip/core.hpp"
#include "sip/schedules.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace sip {

/// One recorded point of a run. f and the violation refer to the current
/// iterate x_k; wall_seconds is solver-only time (certification excluded).
struct TraceRow {
  long k = 0;
  double f_value = 0.0;
  double max_violation = 0.0;
  double lambda_l1 = 0.0;
  double wall_seconds = 0.0;
};

struct IterateTrace {
  std::vector<TraceRow> rows;
};

struct RunOptions {
  long record_every = 10;
  double early_stop_eps = -1.0;  // < 0: disabled; otherwise stop when the
                                 // certified violation of x_bar drops below it
  bool measure_wall = true;      // false writes 0.0 wall seconds (reproducible traces)
  std::function<void(long k, const Vec& x, const ParamBlock& y, const Vec& lambda)> observer;
};

struct RunResult {
  Vec x_bar;
  IterateTrace trace;
  long iterations = 0;
  double solver_seconds = 0.0;
};

/// Rolling window of iterates. Initialization ties x_{-2} = x_{-1} = x_0 and
/// y_{-1} = y_0, which makes every momentum term vanish at k = 0.
struct SolverState {
  Vec x_km2, x_km1, x_k;
  ParamBlock y_km1, y_k;
  Vec lambda_k;
  long k = 0;
  Vec avg_num;
  double avg_den = 0.0;

  void advance(Vec x_next, ParamBlock y_next, Vec lambda_next, double t) {
    avg_num += t * x_next;
    avg_den += t;
    x_km2 = std::move(x_km1);
    x_km1 = std::move(x_k);
    x_k = std::move(x_next);
    y_km1 = std::move(y_k);
    y_k = std::move(y_next);
    lambda_k = std::move(lambda_next);
    ++k;
  }

  Vec average() const {
    detail::require(avg_den > 0.0, "SolverState::average: no iterations accumulated");
    return avg_num / avg_den;
  }
};

inline SolverState make_initial_state(const ProblemInstance& problem,
                                      std::optional<Vec> x0 = std::nullopt,
                                      std::optional<ParamBlock> y0 = std::nullopt,
                                      std::optional<Vec> lambda0 = std::nullopt) {
  SolverState st;
  st.x_k = x0 ? problem.X.project(*x0) : problem.default_x0();
  st.x_km1 = st.x_k;
  st.x_km2 = st.x_k;
  st.y_k = y0 ? *y0 : problem.default_y0();
  for (int i = 0; i < problem.m; ++i)
    st.y_k[static_cast<size_t>(i)] =
        problem.Ys[static_cast<size_t>(i)].project(st.y_k[static_cast<size_t>(i)]);
  st.y_km1 = st.y_k;
  st.lambda_k = lambda0 ? Vec(lambda0->cwiseMax(0.0)) : Vec(Vec::Zero(problem.m));
  st.avg_num = Vec::Zero(problem.p);
  return st;
}

namespace detail {
/// now + theta * (now - prev); shared by the deterministic and stochastic
/// solvers so that zero-variance oracles reproduce identical floating point.
inline Vec extrapolate(const Vec& now, const Vec& prev, double theta) {
  return now + theta * (now - prev);
}
}  // namespace detail

/// Momentum ascent step on each y^i.
inline ParamBlock y_update(const SolverState& st, const ProblemInstance& problem,
                           const StepTuple& step) {
  detail::require(step.sigma > 0.0, "y_update: sigma must be positive");
  ParamBlock y_next(static_cast<size_t>(problem.m));
  for (int i = 0; i < problem.m; ++i) {
    const size_t ii = static_cast<size_t>(i);
    const Vec gy_now = problem.grad_y_g(i, st.x_k, st.y_k[ii]);
    const Vec gy_prev = problem.grad_y_g(i, st.x_km1, st.y_km1[ii]);
    const Vec u = detail::extrapolate(gy_now, gy_prev, step.theta);
    y_next[ii] = problem.Ys[ii].project(st.y_k[ii] + u / step.sigma);
  }
  return y_next;
}

/// Extrapolated ascent step on the multipliers, driven by linearized
/// constraint values anchored at the previous iterates. All three
/// linearizations are evaluated fresh from the stored window.
inline Vec lambda_update(const SolverState& st, const ProblemInstance& problem,
                         const ParamBlock& y_next, const StepTuple& step) {
  detail::require(step.gamma > 0.0, "lambda_update: gamma must be positive");
  const Vec ell_new = linearize_g(problem, st.x_k, st.x_km1, y_next);
  const Vec ell_now = linearize_g(problem, st.x_k, st.x_km1, st.y_k);
  const Vec ell_prev = linearize_g(problem, st.x_km1, st.x_km2, st.y_k);
  const Vec v = ell_new + step.theta * (ell_now - ell_prev);
  return Vec((st.lambda_k + v / step.gamma).cwiseMax(0.0));
}

/// Projected gradient step on x using the freshly updated (y, lambda).
inline Vec x_update(const SolverState& st, const ProblemInstance& problem,
                    const ParamBlock& y_next, const Vec& lambda_next, const StepTuple& step) {
  detail::require(step.tau > 0.0, "x_update: tau must be positive");
  Vec s = problem.grad_f(st.x_k);
  for (int i = 0; i < problem.m; ++i) {
    if (lambda_next[i] != 0.0)
      s += lambda_next[i] * problem.grad_x_g(i, st.x_k, y_next[static_cast<size_t>(i)]);
  }
  return problem.X.project(st.x_k - s / step.tau);
}

namespace detail {

class SolverClock {
 public:
  explicit SolverClock(bool enabled) : enabled_(enabled) { resume(); }
  void pause() {
    if (enabled_ && running_) {
      total_ += std::chrono::duration<double>(clock::now() - mark_).count();
      running_ = false;
    }
  }
  void resume() {
    if (enabled_) {
      mark_ = clock::now();
      running_ = true;
    }
  }
  double seconds() {
    pause();
    resume();
    return enabled_ ? total_ : 0.0;
  }

 private:
  using clock = std::chrono::steady_clock;
  bool enabled_;
  bool running_ = false;
  double total_ = 0.0;
  clock::time_point mark_{};
};

inline bool should_record(long completed, long record_every, long K) {
  return completed == K || completed % record_every == 0;
}

}  // namespace detail

/// Runs K iterations and returns the t_k-weighted average of x_1..x_K.
/// The trace is sampled every record_every iterations (plus k = 0 and k = K);
/// certification happens only at recorded iterations.
inline RunResult run(const ProblemInstance& problem, const Schedule& schedule, long K,
                     const RunOptions& opts = {},
                     std::optional<Vec> x0 = std::nullopt,
                     std::optional<ParamBlock> y0 = std::nullopt,
                     std::optional<Vec> lambda0 = std::nullopt) {
  detail::require(K >= 1, "run: K must be >= 1");
  detail::require(opts.record_every >= 1, "run: record_every must be >= 1");
  detail::require(K <= schedule.K(), "run: K exceeds the schedule horizon");

  SolverState st = make_initial_state(problem, std::move(x0), std::move(y0), std::move(lambda0));
  RunResult result;
  detail::SolverClock clock(opts.measure_wall);

  const auto record = [&](long k_now) {
    clock.pause();
    const Certificate cert = certify(problem, st.x_k);
    result.trace.rows.push_back(
        {k_now, cert.f_value, cert.max_violation, st.lambda_k.lpNorm<1>(), clock.seconds()});
    clock.resume();
  };

  record(0);
  for (long k = 0; k < K; ++k) {
    const StepTuple step = schedule.step(k);
    ParamBlock y_next = y_update(st, problem, step);
    Vec lambda_next = lambda_update(st, problem, y_next, step);
    Vec x_next = x_update(st, problem, y_next, lambda_next, step);
    st.advance(std::move(x_next), std::move(y_next), std::move(lambda_next), step.t);

    if (opts.observer) {
      clock.pause();
      opts.observer(st.k, st.x_k, st.y_k, st.lambda_k);
      clock.resume();
    }
    if (detail::should_record(st.k, opts.record_every, K)) {
      record(st.k);
      if (opts.early_stop_eps >= 0.0) {
        clock.pause();
        const Certificate avg_cert = certify(problem, st.average());
        clock.resume();
        if (avg_cert.max_violation <= opts.early_stop_eps) break;
      }
    }
  }

  result.x_bar = st.average();
  result.iterations = st.k;
  result.solver_seconds = clock.seconds();
  return result;
}

}  // namespace sip
