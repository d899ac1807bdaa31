#pragma once

#include "sip/baselines.hpp"
#include "sip/certify.hpp"
#include "sip/config.hpp"
#include "sip/problems.hpp"
#include "sip/solver_agsip.hpp"
#include "sip/solver_sgsip.hpp"
#include "sip/svg.hpp"
#include "sip/trace.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

namespace sip {
namespace bench {

inline Regime resolve_regime(const RunConfig& rc, const ProblemConstants& c) {
  if (rc.regime != "auto") return parse_regime(rc.regime);
  if (rc.method == "sgsip" &&
      (rc.noise_std_f > 0 || rc.noise_std_g > 0 || rc.noise_std_gprime > 0))
    return Regime::stochastic;
  if (c.mu_f > 0 && c.mu_y > 0) return Regime::both_strong;
  if (c.mu_f > 0) return Regime::f_strong_only;
  if (c.mu_y > 0) return Regime::y_strong_only;
  return Regime::neither;
}

inline ScheduleParams schedule_params(const RunConfig& rc, Regime regime) {
  ScheduleParams sp;
  sp.regime = regime;
  sp.K = rc.K;
  sp.k0 = rc.k0;
  if (regime == Regime::practical && sp.k0 < 0) sp.k0 = 100;
  sp.tau = rc.tau;
  sp.tau_prime = rc.tau_prime;
  sp.lambda_bound = rc.lambda_bound;
  return sp;
}

inline NoiseModel noise_model(const RunConfig& rc) {
  NoiseModel nm;
  nm.std_f = rc.noise_std_f;
  nm.std_g = rc.noise_std_g;
  nm.std_gprime = rc.noise_std_gprime;
  nm.seed = rc.seed;
  return nm;
}

struct RunArtifacts {
  std::string label;
  std::string csv;
  IterateTrace trace;
  Vec x_out;
  double final_f = 0.0;
  double final_violation = 0.0;
  long iterations = 0;
  double wall_seconds = 0.0;
  std::string schedule_note;
};

inline std::string default_label(const RunConfig& rc, Regime regime) {
  if (!rc.label.empty()) return rc.label;
  if (rc.method == "agsip" || rc.method == "sgsip")
    return rc.method + "_" + regime_name(regime);
  return rc.method;
}

/// Runs the configured method. Throws config_error for invalid configurations
/// (mapped to exit code 2 by the CLI) and std::runtime_error for failures.
inline RunArtifacts execute(const RunConfig& rc) {
  const ProblemInstance problem = build_problem(rc.problem, rc.seed);
  RunArtifacts art;

  if (rc.method == "agsip" || rc.method == "sgsip") {
    const StochasticProblemInstance sp = make_stochastic(problem, noise_model(rc));
    const ProblemConstants& consts = sp.base.constants;
    const Regime regime = resolve_regime(rc, consts);
    art.label = default_label(rc, regime);

    const ScheduleParams params = schedule_params(rc, regime);
    const Schedule schedule = Schedule::checked(params, consts, problem.m);
    {
      std::ostringstream os;
      os << "regime = " << regime_name(regime) << ", K = " << params.K
         << ", k0 = " << schedule.k0() << ", tau' = " << schedule.tau_prime()
         << ", tau = " << schedule.tau_coeff();
      art.schedule_note = os.str();
    }
    if (regime != Regime::practical) {
      const ConditionReport rep =
          verify_conditions(params, consts, problem.m, params.K);
      if (!rep.all_asserted_pass) {
        std::string bad;
        for (const auto& row : rep.rows)
          if (row.asserted && !row.pass) bad += (bad.empty() ? "" : ", ") + row.id;
        throw config_error("schedule violates structural conditions: " + bad);
      }
    }

    if (rc.method == "agsip") {
      RunOptions opts;
      opts.record_every = rc.record_every;
      opts.measure_wall = rc.timing;
      RunResult r = run(sp.base, schedule, rc.K, opts);
      art.trace = r.trace;
      art.x_out = r.x_bar;
      art.iterations = r.iterations;
      art.wall_seconds = r.solver_seconds;
      art.csv = trace_to_csv(r.trace);
    } else {
      StochRunOptions opts;
      opts.record_every = rc.record_every;
      opts.repetitions = rc.repetitions;
      opts.three_sample = !rc.six_sample;
      opts.measure_wall = rc.timing;
      StochRunResult r = run_stoch(sp, schedule, rc.K, opts);
      art.trace = r.traces.front();
      art.x_out = r.x_bars.front();
      art.iterations = rc.K;
      art.wall_seconds = r.solver_seconds;
      art.csv = rc.repetitions > 1 ? aggregate_to_csv(r) : trace_to_csv(r.traces.front());
    }
  } else if (rc.method == "exchange") {
    art.label = default_label(rc, Regime::neither);
    ExchangeConfig cfg;
    cfg.init_samples = rc.exchange_init_samples;
    cfg.tol = rc.exchange_tol;
    cfg.max_rounds = rc.exchange_max_rounds;
    cfg.inner.iterations = rc.inner_iterations;
    cfg.inner.penalty_rho = rc.inner_rho;
    cfg.inner.step_c = rc.inner_step;
    cfg.seed = rc.seed;
    cfg.measure_wall = rc.timing;
    ExchangeResult r = exchange_solve(problem, cfg);
    if (!r.converged) art.schedule_note = "exchange: round budget exhausted before tol";
    art.trace = r.trace;
    art.x_out = r.x;
    art.iterations = r.rounds;
    art.wall_seconds = r.solver_seconds;
    art.csv = trace_to_csv(r.trace);
  } else if (rc.method == "sipcom") {
    art.label = default_label(rc, Regime::neither);
    SipComConfig cfg;
    cfg.step_c = rc.sipcom_c;
    cfg.delta = rc.sipcom_delta;
    cfg.K = rc.K;
    cfg.record_every = rc.record_every;
    cfg.measure_wall = rc.timing;
    const bool strong = problem.constants.mu_f > 0;
    cfg.step_rule = strong ? Decay::inv_k : Decay::inv_sqrt_k;
    cfg.strongly_convex_weights = strong;
    cfg.delta_rule = strong ? Decay::constant : Decay::inv_sqrt_k;
    if (rc.sipcom_step_rule != "auto")
      cfg.step_rule = rc.sipcom_step_rule == "constant"
                          ? Decay::constant
                          : (rc.sipcom_step_rule == "inv_k" ? Decay::inv_k : Decay::inv_sqrt_k);
    if (rc.sipcom_delta_rule != "auto")
      cfg.delta_rule = rc.sipcom_delta_rule == "constant" ? Decay::constant : Decay::inv_sqrt_k;
    SipComResult r = sipcom_solve(problem, cfg);
    if (!r.any_feasible_step) art.schedule_note = "sipcom: no feasible step was ever taken";
    art.trace = r.trace;
    art.x_out = r.x_bar;
    art.iterations = cfg.K;
    art.wall_seconds = r.solver_seconds;
    art.csv = trace_to_csv(r.trace);
  } else {
    throw config_error("unknown method '" + rc.method +
                       "' (available: agsip, sgsip, exchange, sipcom)");
  }

  const Certificate cert = certify(problem, art.x_out);
  art.final_f = cert.f_value;
  art.final_violation = cert.max_violation;
  return art;
}

inline std::string summary_text(const RunConfig& rc, const RunArtifacts& art) {
  std::ostringstream os;
  os << "label = " << art.label << "\n"
     << "problem = " << rc.problem << "\n"
     << "method = " << rc.method << "\n"
     << "final_f = " << csv::num(art.final_f) << "\n"
     << "final_violation = " << csv::num(art.final_violation) << "\n"
     << "iterations = " << art.iterations << "\n"
     << "wall_seconds = " << csv::num(rc.timing ? art.wall_seconds : 0.0) << "\n";
  if (!art.schedule_note.empty()) os << "schedule = " << art.schedule_note << "\n";
  return os.str();
}

inline int cmd_run(const RunConfig& rc, std::ostream& out) {
  RunArtifacts art = execute(rc);
  std::filesystem::create_directories(rc.out);
  const std::string base = (std::filesystem::path(rc.out) / art.label).string();
  csv::write_file(base + ".csv", art.csv);
  const std::string summary = summary_text(rc, art);
  csv::write_file(base + ".summary.txt", summary);
  out << summary << "trace = " << base << ".csv\n";
  return 0;
}

inline int compare_parallelism() {
  if (const char* env = std::getenv("SIP_ACCEL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs every config (in waves of at most SIP_ACCEL_THREADS threads), then
/// writes the aligned CSV and the two convergence plots. Output writing is
/// serialized after all runs complete.
inline int cmd_compare(std::vector<RunConfig> configs, const std::string& out_dir,
                       std::ostream& out) {
  if (configs.size() < 2) throw config_error("compare: needs at least 2 configs");
  for (size_t i = 1; i < configs.size(); ++i) {
    if (configs[i].problem != configs[0].problem || configs[i].seed != configs[0].seed)
      throw config_error("compare: all configs must target the same problem and seed");
  }

  std::vector<RunArtifacts> arts(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const int max_threads = compare_parallelism();
  for (size_t start = 0; start < configs.size(); start += static_cast<size_t>(max_threads)) {
    std::vector<std::thread> wave;
    const size_t stop = std::min(configs.size(), start + static_cast<size_t>(max_threads));
    for (size_t i = start; i < stop; ++i) {
      wave.emplace_back([&, i]() {
        try {
          arts[i] = execute(configs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : wave) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // de-duplicate labels
  std::map<std::string, int> seen;
  for (auto& a : arts) {
    const int n = seen[a.label]++;
    if (n > 0) a.label += "#" + std::to_string(n + 1);
  }

  // aligned CSV: outer join on k
  std::set<long> ks;
  for (const auto& a : arts)
    for (const auto& r : a.trace.rows) ks.insert(r.k);
  csv::Table table;
  table.header = {"k"};
  for (const auto& a : arts) {
    table.header.push_back(a.label + ".f_value");
    table.header.push_back(a.label + ".max_violation");
    table.header.push_back(a.label + ".wall_seconds");
  }
  for (long k : ks) {
    std::vector<std::string> row{std::to_string(k)};
    for (const auto& a : arts) {
      const TraceRow* found = nullptr;
      for (const auto& r : a.trace.rows)
        if (r.k == k) {
          found = &r;
          break;
        }
      if (found) {
        row.push_back(csv::num(found->f_value));
        row.push_back(csv::num(found->max_violation));
        row.push_back(csv::num(found->wall_seconds));
      } else {
        row.insert(row.end(), {"", "", ""});
      }
    }
    table.rows.push_back(std::move(row));
  }

  const auto make_panels = [&](bool time_axis) {
    svg::Panel obj, viol;
    obj.title = "objective value";
    viol.title = "constraint violation";
    obj.x_label = viol.x_label = time_axis ? "wall seconds" : "iteration";
    obj.y_label = "f";
    viol.y_label = "max violation";
    viol.log_y = true;
    bool all_positive = true;
    for (const auto& a : arts) {
      svg::Series so, sv;
      so.label = sv.label = a.label;
      for (const auto& r : a.trace.rows) {
        const double x = time_axis ? r.wall_seconds : static_cast<double>(r.k);
        so.x.push_back(x);
        so.y.push_back(r.f_value);
        sv.x.push_back(x);
        sv.y.push_back(r.max_violation);
        if (r.f_value <= 0) all_positive = false;
      }
      obj.series.push_back(std::move(so));
      viol.series.push_back(std::move(sv));
    }
    obj.log_y = all_positive;
    return std::vector<svg::Panel>{obj, viol};
  };

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  csv::write_file((dir / "compare.csv").string(), table.to_string());
  csv::write_file((dir / "compare_iterations.svg").string(), svg::render(make_panels(false)));
  csv::write_file((dir / "compare_time.svg").string(), svg::render(make_panels(true)));
  for (const auto& a : arts)
    out << a.label << ": final_f = " << csv::num(a.final_f)
        << ", final_violation = " << csv::num(a.final_violation) << "\n";
  out << "wrote " << (dir / "compare.csv").string() << ", compare_iterations.svg, "
      << "compare_time.svg\n";
  return 0;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
  const ProblemInstance problem = build_problem(rc.problem, rc.seed);
  ProblemConstants consts = problem.constants;
  consts.sigma_fprime = rc.noise_std_f;
  consts.sigma_g = rc.noise_std_g;
  consts.sigma_gprime = rc.noise_std_gprime;
  const Regime regime = resolve_regime(rc, consts);
  const ScheduleParams params = schedule_params(rc, regime);
  const Schedule sched = Schedule::unchecked(params, consts, problem.m);
  const ConditionReport rep = verify_conditions(params, consts, problem.m, params.K);

  out << "schedule conditions: regime " << regime_name(regime) << " on " << rc.problem
      << " (K = " << params.K << ", k0 = " << sched.k0() << ", checked k = " << rep.k_lo << ".."
      << rep.k_hi << ")\n";
  for (const auto& row : rep.rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-14s worst lhs = %-14.6g at k = %-8ld %s%s\n",
                  row.id.c_str(), row.worst_value, row.worst_k, row.pass ? "PASS" : "FAIL",
                  row.asserted ? "" : " (not asserted)");
    out << buf;
  }
  for (const auto& n : rep.notes) out << "  note: " << n << "\n";
  out << (rep.all_asserted_pass ? "result: PASS\n" : "result: FAIL\n");
  return rep.all_asserted_pass ? 0 : 1;
}

inline int cmd_list_problems(std::ostream& out) {
  out << "toy1              p=1  m=1  q=1   box X=[-1,1], box Y=[-1,1]; 1-D desk instance\n"
      << "robust_lp_strong  p=10 m=4  q=10  strongly convex objective, concave quadratic "
         "lower level (seeded Q)\n"
      << "robust_lp         p=10 m=4  q=10  linear objective, bilinear constraints over "
         "unit-ball uncertainty\n";
  return 0;
}

}  // namespace bench
}  // namespace sip
