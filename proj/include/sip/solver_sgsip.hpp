#pragma once

#include "sip/problems.hpp"
#include "sip/solver_agsip.hpp"

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace sip {

/// Sample slots for one iteration. Each of the six oracle evaluations has its
/// own slot; in three-sample mode (the default) slot 2 aliases slot 1 and
/// slots 4, 5 alias slot 3, so only three independent draws are consumed.
struct SampleBatch {
  std::uint64_t iter = 0;
  bool three_sample = true;

  int canonical_slot(int slot) const {
    if (!three_sample) return slot;
    switch (slot) {
      case 2: return 1;
      case 4:
      case 5: return 3;
      default: return slot;
    }
  }

  SampleKey key(int slot) const { return SampleKey{iter, canonical_slot(slot)}; }
};

/// Momentum ascent step on each y^i from sampled gradients. The two current
/// terms read slot 1; the subtracted past gradient reads slot 2.
inline ParamBlock y_update_stoch(const SolverState& st, const StochasticProblemInstance& sp,
                                 const SampleBatch& batch, const StepTuple& step) {
  detail::require(step.sigma > 0.0, "y_update_stoch: sigma must be positive");
  const ProblemInstance& base = sp.base;
  ParamBlock y_next(static_cast<size_t>(base.m));
  for (int i = 0; i < base.m; ++i) {
    const size_t ii = static_cast<size_t>(i);
    const Vec gy_now = sp.grad_y_g(i, st.x_k, st.y_k[ii], batch.key(1));
    const Vec gy_prev = sp.grad_y_g(i, st.x_km1, st.y_km1[ii], batch.key(2));
    const Vec u = detail::extrapolate(gy_now, gy_prev, step.theta);
    y_next[ii] = base.Ys[ii].project(st.y_k[ii] + u / step.sigma);
  }
  return y_next;
}

/// Multiplier step from sampled linearizations (slots 3, 4, 5).
inline Vec lambda_update_stoch(const SolverState& st, const StochasticProblemInstance& sp,
                               const ParamBlock& y_next, const SampleBatch& batch,
                               const StepTuple& step) {
  detail::require(step.gamma > 0.0, "lambda_update_stoch: gamma must be positive");
  const Vec ell_new = sp.linearize_g(st.x_k, st.x_km1, y_next, batch.key(3));
  const Vec ell_now = sp.linearize_g(st.x_k, st.x_km1, st.y_k, batch.key(4));
  const Vec ell_prev = sp.linearize_g(st.x_km1, st.x_km2, st.y_k, batch.key(5));
  const Vec v = ell_new + step.theta * (ell_now - ell_prev);
  return Vec((st.lambda_k + v / step.gamma).cwiseMax(0.0));
}

/// Primal step; the objective and constraint gradients both read slot 6.
inline Vec x_update_stoch(const SolverState& st, const StochasticProblemInstance& sp,
                          const ParamBlock& y_next, const Vec& lambda_next,
                          const SampleBatch& batch, const StepTuple& step) {
  detail::require(step.tau > 0.0, "x_update_stoch: tau must be positive");
  const ProblemInstance& base = sp.base;
  Vec s = sp.grad_f(st.x_k, batch.key(6));
  for (int i = 0; i < base.m; ++i) {
    if (lambda_next[i] != 0.0)
      s += lambda_next[i] *
           sp.grad_x_g(i, st.x_k, y_next[static_cast<size_t>(i)], batch.key(6));
  }
  return base.X.project(st.x_k - s / step.tau);
}

struct StochRunOptions {
  long record_every = 10;
  int repetitions = 1;
  bool three_sample = true;
  bool measure_wall = true;
  std::function<void(long k, const Vec& x, const ParamBlock& y, const Vec& lambda)> observer;
};

/// Mean / standard deviation of the recorded metrics across repetitions.
struct AggregateRow {
  long k = 0;
  double mean_f_value = 0.0, std_f_value = 0.0;
  double mean_max_violation = 0.0, std_max_violation = 0.0;
  double mean_lambda_l1 = 0.0, std_lambda_l1 = 0.0;
};

struct StochRunResult {
  std::vector<Vec> x_bars;             // one averaged solution per repetition
  std::vector<IterateTrace> traces;    // per-repetition traces
  std::vector<AggregateRow> aggregate;
  double solver_seconds = 0.0;
};

/// One repetition of the stochastic loop. Certification in the trace always
/// uses the deterministic (noise-free) functions.
inline RunResult run_stoch_once(const StochasticProblemInstance& sp, const Schedule& schedule,
                                long K, const StochRunOptions& opts) {
  detail::require(K >= 1, "run_stoch: K must be >= 1");
  detail::require(opts.record_every >= 1, "run_stoch: record_every must be >= 1");
  detail::require(K <= schedule.K(), "run_stoch: K exceeds the schedule horizon");

  const ProblemInstance& base = sp.base;
  SolverState st = make_initial_state(base);
  RunResult result;
  detail::SolverClock clock(opts.measure_wall);

  const auto record = [&](long k_now) {
    clock.pause();
    const Certificate cert = certify(base, st.x_k);
    result.trace.rows.push_back(
        {k_now, cert.f_value, cert.max_violation, st.lambda_k.lpNorm<1>(), clock.seconds()});
    clock.resume();
  };

  record(0);
  for (long k = 0; k < K; ++k) {
    const StepTuple step = schedule.step(k);
    const SampleBatch batch{static_cast<std::uint64_t>(k), opts.three_sample};
    ParamBlock y_next = y_update_stoch(st, sp, batch, step);
    Vec lambda_next = lambda_update_stoch(st, sp, y_next, batch, step);
    Vec x_next = x_update_stoch(st, sp, y_next, lambda_next, batch, step);
    st.advance(std::move(x_next), std::move(y_next), std::move(lambda_next), step.t);

    if (opts.observer) {
      clock.pause();
      opts.observer(st.k, st.x_k, st.y_k, st.lambda_k);
      clock.resume();
    }
    if (detail::should_record(st.k, opts.record_every, K)) record(st.k);
  }

  result.x_bar = st.average();
  result.iterations = st.k;
  result.solver_seconds = clock.seconds();
  return result;
}

/// Runs `repetitions` independent repetitions (seed mixed per repetition) and
/// aggregates the recorded metrics.
inline StochRunResult run_stoch(const StochasticProblemInstance& sp, const Schedule& schedule,
                                long K, const StochRunOptions& opts = {}) {
  detail::require(opts.repetitions >= 1, "run_stoch: repetitions must be >= 1");
  StochRunResult out;
  for (int rep = 0; rep < opts.repetitions; ++rep) {
    StochasticProblemInstance rep_sp = sp;
    if (opts.repetitions > 1)
      rep_sp.noise.seed = rng::splitmix64(sp.noise.seed + static_cast<std::uint64_t>(rep));
    RunResult r = run_stoch_once(rep_sp, schedule, K, opts);
    out.solver_seconds += r.solver_seconds;
    out.x_bars.push_back(std::move(r.x_bar));
    out.traces.push_back(std::move(r.trace));
  }

  const size_t rows = out.traces.front().rows.size();
  const double n = static_cast<double>(opts.repetitions);
  for (size_t j = 0; j < rows; ++j) {
    AggregateRow agg;
    agg.k = out.traces.front().rows[j].k;
    double sf = 0, sf2 = 0, sv = 0, sv2 = 0, sl = 0, sl2 = 0;
    for (const IterateTrace& tr : out.traces) {
      const TraceRow& row = tr.rows[j];
      sf += row.f_value;
      sf2 += row.f_value * row.f_value;
      sv += row.max_violation;
      sv2 += row.max_violation * row.max_violation;
      sl += row.lambda_l1;
      sl2 += row.lambda_l1 * row.lambda_l1;
    }
    const auto stddev = [n](double s, double s2) {
      return n > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1))) : 0.0;
    };
    agg.mean_f_value = sf / n;
    agg.std_f_value = stddev(sf, sf2);
    agg.mean_max_violation = sv / n;
    agg.std_max_violation = stddev(sv, sv2);
    agg.mean_lambda_l1 = sl / n;
    agg.std_lambda_l1 = stddev(sl, sl2);
    out.aggregate.push_back(agg);
  }
  return out;
}

}  // namespace sip
