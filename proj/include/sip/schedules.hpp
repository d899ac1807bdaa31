#pragma once

#include "sip/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sip {

enum class Regime {
  both_strong,    // mu_f > 0, mu_y > 0: t_k, theta_k, tau_k, sigma_k grow, gamma_k decays
  f_strong_only,  // mu_f > 0: sigma_k anchored at the horizon
  y_strong_only,  // mu_y > 0: flat t/theta, growing sigma
  neither,        // flat everything
  stochastic,     // flat t/theta, gamma_k carries the variance term
  practical,      // heuristic sigma_k = tau_k = (k+k0+1)/k0, gamma_k = 1/sigma_k
};

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::both_strong: return "both_strong";
    case Regime::f_strong_only: return "f_strong_only";
    case Regime::y_strong_only: return "y_strong_only";
    case Regime::neither: return "neither";
    case Regime::stochastic: return "stochastic";
    case Regime::practical: return "practical";
  }
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  for (Regime r : {Regime::both_strong, Regime::f_strong_only, Regime::y_strong_only,
                   Regime::neither, Regime::stochastic, Regime::practical})
    if (s == regime_name(r)) return r;
  throw config_error("unknown regime '" + s + "'");
}

/// Per-iteration parameters consumed by one solver step.
struct StepTuple {
  double t = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
};

/// Hyperparameters of a schedule. Negative k0 / tau / tau_prime mean
/// "resolve to the regime's lower bound". lambda_bound stands in for the
/// unknown |lambda*|_1 + 1 wherever a bound needs it.
struct ScheduleParams {
  Regime regime = Regime::neither;
  long k0 = -1;
  long K = 1;
  double tau_prime = -1.0;
  double tau = -1.0;
  double lambda_bound = 10.0;
};

namespace detail {

struct ResolvedBounds {
  double k0_min = 1.0;
  double tau_prime_min = 0.0;
  double tau_min = 0.0;
  bool k0_used = false;
  bool tau_used = false;
  bool lambda_dependent = false;
  std::string k0_desc, tau_prime_desc, tau_desc;
};

inline ResolvedBounds regime_bounds(Regime regime, const ProblemConstants& c, double Lambda) {
  ResolvedBounds b;
  switch (regime) {
    case Regime::both_strong:
      b.k0_used = true;
      b.k0_min = std::max({1.0, 32.0 * c.L_f / c.mu_f, std::sqrt(224.0) * c.L_g_yy / c.mu_y});
      b.k0_desc = "k0 >= max(32*L_f/mu_f, sqrt(224)*L_g_yy/mu_y)";
      break;
    case Regime::f_strong_only:
      b.k0_used = true;
      b.k0_min = std::max(1.0, 18.0 * c.L_f / c.mu_f);
      b.k0_desc = "k0 >= 18*L_f/mu_f";
      break;
    case Regime::y_strong_only:
      b.k0_used = true;
      b.k0_min = std::max(
          {1.0, std::sqrt(56.0) * c.L_g_yy / c.mu_y, 14.0 * c.L_g_yx / c.mu_y});
      b.k0_desc = "k0 >= max(sqrt(56)*L_g_yy/mu_y, 14*L_g_yx/mu_y)";
      b.tau_used = true;
      b.tau_prime_min = std::max(8.0 * (c.L_f + 1.0), 8.0 * (c.L_g_yx + c.L_g_xx) * Lambda);
      b.tau_min = std::sqrt(c.H_g_x * c.H_g_x * Lambda * Lambda + c.H_f * c.H_f);
      b.tau_prime_desc = "tau' >= max(8*(L_f+1), 8*(L_g_yx+L_g_xx)*Lambda)";
      b.tau_desc = "tau >= sqrt(H_g_x^2*Lambda^2 + H_f^2)";
      b.lambda_dependent = true;
      break;
    case Regime::neither:
      b.tau_used = true;
      b.tau_prime_min = std::max(8.0 * (c.L_f + 1.0), 8.0 * (c.L_g_yx + c.L_g_xx) * Lambda);
      b.tau_min = std::sqrt(c.H_g_x * c.H_g_x * Lambda * Lambda + c.H_f * c.H_f);
      b.tau_prime_desc = "tau' >= max(8*(L_f+1), 8*(L_g_yx+L_g_xx)*Lambda)";
      b.tau_desc = "tau >= sqrt(H_g_x^2*Lambda^2 + H_f^2)";
      b.lambda_dependent = true;
      break;
    case Regime::stochastic:
      b.tau_used = true;
      b.tau_prime_min = std::max(4.0 * (c.L_f + 1.0 + c.sigma_gprime),
                                 8.0 * (c.L_g_yx + c.L_g_xx) * Lambda);
      b.tau_min = std::sqrt(c.H_g_x * c.H_g_x * Lambda * Lambda + c.H_f * c.H_f +
                            c.sigma_gprime * c.sigma_gprime * Lambda +
                            c.sigma_fprime * c.sigma_fprime);
      b.tau_prime_desc = "tau' >= max(4*(L_f+1+sigma_g'), 8*(L_g_yx+L_g_xx)*Lambda)";
      b.tau_desc = "tau >= sqrt(H_g_x^2*Lambda^2 + H_f^2 + sigma_g'^2*Lambda + sigma_f'^2)";
      b.lambda_dependent = true;
      break;
    case Regime::practical:
      b.k0_used = true;
      b.k0_min = 1.0;
      b.k0_desc = "k0 >= 1";
      break;
  }
  return b;
}

}  // namespace detail

/// A parameter sequence (t_k, theta_k, tau_k, sigma_k, gamma_k) bound to one
/// problem's constants. Construct via Schedule::checked (hyperparameter lower
/// bounds enforced) or Schedule::unchecked (formulas only, for the verifier).
class Schedule {
 public:
  static Schedule checked(const ScheduleParams& params, const ProblemConstants& c, int m) {
    return Schedule(params, c, m, true);
  }
  static Schedule unchecked(const ScheduleParams& params, const ProblemConstants& c, int m) {
    return Schedule(params, c, m, false);
  }

  const ScheduleParams& params() const { return params_; }
  const ProblemConstants& constants() const { return consts_; }
  int m() const { return m_; }
  long K() const { return params_.K; }
  long k0() const { return k0_; }
  double tau_prime() const { return tau_prime_; }
  double tau_coeff() const { return tau_; }
  Regime regime() const { return params_.regime; }
  bool lambda_bound_used() const { return bounds_.lambda_dependent; }

  /// Parameters for iteration k. Valid for 0 <= k <= K.
  StepTuple step(long k) const {
    if (k < 0 || k > params_.K)
      throw std::invalid_argument("Schedule::step: k must satisfy 0 <= k <= K (got " +
                                  std::to_string(k) + ", K = " + std::to_string(params_.K) + ")");
    return at(k);
  }

  /// Same closed forms without the horizon guard; the condition verifier
  /// needs entries up to K+1.
  StepTuple at(long k) const {
    const ProblemConstants& c = consts_;
    const double n = static_cast<double>(k + k0_ + 1);
    const double K = static_cast<double>(params_.K);
    StepTuple s;
    switch (params_.regime) {
      case Regime::both_strong:
        s.t = n;
        s.theta = (n - 1.0) / n;
        s.tau = n * c.mu_f / 2.0;
        s.sigma = (n - 1.0) * c.mu_y / 2.0;
        s.gamma = 3456.0 * m_ * c.M_g_x * c.M_g_x / (c.mu_f * n);
        break;
      case Regime::f_strong_only: {
        s.t = n;
        s.theta = (n - 1.0) / n;
        s.tau = n * c.mu_f / 2.0;
        double anchor = std::sqrt(56.0) * (K + k0_) * c.L_g_yy;
        if (c.H_g_y > 0.0)
          anchor = std::max(anchor, (c.H_g_y / c.D_y) * std::sqrt(K) * (K + k0_));
        s.sigma = anchor / n;
        s.gamma = 3456.0 * m_ * c.M_g_x * c.M_g_x / (c.mu_f * n);
        break;
      }
      case Regime::y_strong_only:
        s.t = 1.0;
        s.theta = 1.0;
        s.tau = std::max(tau_prime_, tau_ * std::sqrt(K));
        s.sigma = n * c.mu_y;
        s.gamma = 60.0 * m_ * c.M_g_x * c.M_g_x;
        break;
      case Regime::neither: {
        s.t = 1.0;
        s.theta = 1.0;
        s.tau = std::max(tau_prime_, tau_ * std::sqrt(K));
        double sg = std::max(std::sqrt(56.0) * c.L_g_yy, 14.0 * c.L_g_yx);
        if (c.H_g_y > 0.0) sg = std::max(sg, (c.H_g_y / c.D_y) * std::sqrt(K));
        s.sigma = sg;
        s.gamma = 60.0 * c.M_g_x * c.M_g_x;
        break;
      }
      case Regime::stochastic: {
        s.t = 1.0;
        s.theta = 1.0;
        s.tau = std::max(tau_prime_, tau_ * std::sqrt(K));
        double sg = std::max(std::sqrt(56.0) * c.L_g_yy, 14.0 * c.L_g_yx);
        const double h = std::sqrt(c.H_g_y * c.H_g_y + c.sigma_gprime * c.sigma_gprime);
        if (h > 0.0) sg = std::max(sg, (h / c.D_y) * std::sqrt(K));
        s.sigma = sg;
        s.gamma = 60.0 * c.M_g_x * c.M_g_x +
                  60.0 * m_ * c.sigma_gprime * (2.0 * K - static_cast<double>(k)) / std::sqrt(K);
        break;
      }
      case Regime::practical:
        s.t = n;
        s.theta = (n - 1.0) / n;
        s.tau = n / static_cast<double>(k0_);
        s.sigma = n / static_cast<double>(k0_);
        s.gamma = static_cast<double>(k0_) / n;
        break;
    }
    return s;
  }

 private:
  Schedule(const ScheduleParams& params, const ProblemConstants& c, int m, bool enforce)
      : params_(params), consts_(c), m_(m) {
    if (params_.K < 1) throw config_error("schedule: K must be >= 1");
    if (m_ < 1) throw config_error("schedule: m must be >= 1");

    const Regime r = params_.regime;
    if (enforce) {
      if ((r == Regime::both_strong || r == Regime::f_strong_only) && c.mu_f <= 0.0)
        throw config_error(std::string("regime ") + regime_name(r) + " requires mu_f > 0");
      if ((r == Regime::both_strong || r == Regime::y_strong_only) && c.mu_y <= 0.0)
        throw config_error(std::string("regime ") + regime_name(r) + " requires mu_y > 0");
    }

    bounds_ = detail::regime_bounds(r, c, params_.lambda_bound);

    k0_ = params_.k0 >= 0 ? params_.k0
                          : static_cast<long>(std::ceil(std::max(1.0, bounds_.k0_min)));
    tau_prime_ = params_.tau_prime >= 0.0 ? params_.tau_prime : bounds_.tau_prime_min;
    tau_ = params_.tau >= 0.0 ? params_.tau : bounds_.tau_min;

    if (bounds_.k0_used && k0_ < 1) throw config_error("schedule: k0 must be >= 1");

    if (enforce) {
      const double tol = 1e-12;
      if (bounds_.k0_used && static_cast<double>(k0_) < bounds_.k0_min - tol) {
        std::ostringstream os;
        os << "k0 = " << k0_ << " violates the " << regime_name(r) << " lower bound "
           << bounds_.k0_desc << " = " << bounds_.k0_min;
        throw config_error(os.str());
      }
      if (bounds_.tau_used && tau_prime_ < bounds_.tau_prime_min - tol) {
        std::ostringstream os;
        os << "tau' = " << tau_prime_ << " violates the " << regime_name(r) << " lower bound "
           << bounds_.tau_prime_desc << " = " << bounds_.tau_prime_min;
        throw config_error(os.str());
      }
      if (bounds_.tau_used && tau_ < bounds_.tau_min - tol) {
        std::ostringstream os;
        os << "tau = " << tau_ << " violates the " << regime_name(r) << " lower bound "
           << bounds_.tau_desc << " = " << bounds_.tau_min;
        throw config_error(os.str());
      }
    }

    // Whatever the bounds said, the solver needs strictly positive steps.
    const StepTuple s0 = at(0);
    if (!(s0.tau > 0.0))
      throw config_error(std::string("regime ") + regime_name(r) +
                         ": tau_0 = 0 (set tau'/tau or use a regime matching the constants)");
    if (!(s0.sigma > 0.0))
      throw config_error(std::string("regime ") + regime_name(r) +
                         ": sigma_0 = 0 (no y curvature or horizon branch available)");
    if (!(s0.gamma > 0.0))
      throw config_error(std::string("regime ") + regime_name(r) + ": gamma_0 = 0 (M_g_x = 0?)");
  }

  ScheduleParams params_;
  ProblemConstants consts_;
  int m_ = 1;
  long k0_ = 1;
  double tau_prime_ = 0.0;
  double tau_ = 0.0;
  detail::ResolvedBounds bounds_;
};

/// One structural step-size condition evaluated across the horizon.
/// `value` is the worst (largest) left-hand side of the "<= 0" form; the
/// condition passes when value <= 1e-9, i.e. slack = -value >= -1e-9.
struct ConditionRow {
  std::string id;
  bool asserted = true;
  double worst_value = 0.0;
  long worst_k = 0;
  bool pass = true;
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  long k_lo = 0;
  long k_hi = 0;
  bool all_asserted_pass = true;
  std::vector<std::string> notes;

  const ConditionRow* find(const std::string& id) const {
    for (const auto& r : rows)
      if (r.id == id) return &r;
    return nullptr;
  }
};

/// Evaluates the structural conditions that the convergence guarantees place
/// on (t_k, theta_k, tau_k, sigma_k, gamma_k):
///   theta-t:      theta_{k+1} t_{k+1} = t_k                 (identity)
///   x-step:       t_k L_f/2 + momentum terms <= t_k tau_k / 16
///   y-step:       7 t_{k+1} (theta_{k+1} L_g_yy)^2 / sigma_{k+1} <= t_k sigma_k / 8
///   tau-growth:   t_{k+1} tau_{k+1} - t_{k+1} mu_f - t_k tau_k <= 0
///   sigma-growth: t_{k+1} sigma_{k+1} - t_k sigma_k - t_k mu_y <= 0
///   gamma-growth: t_{k+1} gamma_{k+1} - t_k gamma_k (+ variance term) <= 0
/// The stochastic regime is checked against the variance-carrying forms; the
/// deterministic regimes against the simplified forms. Conditions are checked
/// for k = 0..K-1, the indices the K-iteration loop actually relies on (the
/// horizon-anchored sigma of f_strong_only is only designed to cover that
/// range). The practical regime asserts only the theta-t identity.
inline ConditionReport verify_conditions(const ScheduleParams& params, const ProblemConstants& c,
                                         int m, long K) {
  ScheduleParams p = params;
  p.K = K;
  const Schedule sched = Schedule::unchecked(p, c, m);

  const bool stochastic_forms = params.regime == Regime::stochastic;
  const bool heuristic = params.regime == Regime::practical;
  const double sg2 = c.sigma_gprime * c.sigma_gprime;

  ConditionReport rep;
  rep.k_lo = 0;
  rep.k_hi = K - 1;

  const auto worst = [&](auto&& f) {
    double w = -std::numeric_limits<double>::infinity();
    long wk = 0;
    for (long k = 0; k <= K - 1; ++k) {
      const double v = f(k);
      if (v > w) {
        w = v;
        wk = k;
      }
    }
    return std::pair<double, long>(w, wk);
  };

  const auto add = [&](const std::string& id, bool asserted, std::pair<double, long> wv) {
    ConditionRow row;
    row.id = id;
    row.asserted = asserted;
    row.worst_value = wv.first;
    row.worst_k = wv.second;
    row.pass = wv.first <= 1e-9;
    if (asserted && !row.pass) rep.all_asserted_pass = false;
    rep.rows.push_back(row);
  };

  add("theta-t", true, worst([&](long k) {
        return std::abs(sched.at(k + 1).theta * sched.at(k + 1).t - sched.at(k).t);
      }));

  add("x-step", !heuristic, worst([&](long k) {
        const StepTuple s0 = sched.at(k), s1 = sched.at(k + 1), s2 = sched.at(k + 2);
        double lhs = s0.t * c.L_f / 2.0 +
                     6.0 * m * s1.t * s1.theta * s1.theta * c.M_g_x * c.M_g_x / s1.gamma +
                     24.0 * m * s2.t * s2.theta * s2.theta * c.M_g_x * c.M_g_x / s2.gamma;
        if (stochastic_forms)
          lhs += 18.0 * m * sg2 * s1.t / s1.gamma + 12.0 * m * sg2 * s2.t / s2.gamma;
        return lhs - s0.t * s0.tau / 16.0;
      }));

  add("y-step", !heuristic, worst([&](long k) {
        const StepTuple s0 = sched.at(k), s1 = sched.at(k + 1);
        return 7.0 * s1.t * s1.theta * s1.theta * c.L_g_yy * c.L_g_yy / s1.sigma -
               s0.t * s0.sigma / 8.0;
      }));

  add("tau-growth", !heuristic, worst([&](long k) {
        const StepTuple s0 = sched.at(k), s1 = sched.at(k + 1);
        return s1.t * s1.tau - s1.t * c.mu_f - s0.t * s0.tau;
      }));

  add("sigma-growth", !heuristic, worst([&](long k) {
        const StepTuple s0 = sched.at(k), s1 = sched.at(k + 1);
        return s1.t * s1.sigma - s0.t * s0.sigma - s0.t * c.mu_y;
      }));

  add("gamma-growth", !heuristic, worst([&](long k) {
        const StepTuple s0 = sched.at(k), s1 = sched.at(k + 1);
        double lhs = s1.t * s1.gamma - s0.t * s0.gamma;
        if (stochastic_forms) lhs += 8.0 * m * sg2 * s0.t / s0.tau;
        return lhs;
      }));

  if (heuristic)
    rep.notes.push_back(
        "practical schedule is heuristic: x-step, y-step and growth conditions "
        "are reported but not asserted");
  if (stochastic_forms)
    rep.notes.push_back("x-step and gamma-growth include the variance terms (sigma_g' = " +
                        std::to_string(c.sigma_gprime) + ")");
  if (sched.lambda_bound_used())
    rep.notes.push_back("tau'/tau lower bounds assume lambda_bound = " +
                        std::to_string(params.lambda_bound) + " as a stand-in for |lambda*|_1 + 1");
  return rep;
}

}  // namespace sip
