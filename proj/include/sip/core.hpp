#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sip {

using Vec = Eigen::VectorXd;

/// Decision variable x; lives in X after projection.
using PrimalPoint = Vec;

/// Dual multipliers; componentwise nonnegative.
using DualVector = Vec;

/// Constraint parameters y = (y^1, ..., y^m); block i lives in Ys[i].
/// Blocks may have different dimensions.
using ParamBlock = std::vector<Vec>;

/// Thrown when a run configuration (schedule hyperparameters, problem
/// selection, CLI flags) is rejected before any solve starts.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

/// Closed convex set with an O(dim) Euclidean projection.
/// Supported kinds: box [lo, hi], L2 ball, nonnegative orthant, whole space.
struct FeasibleSet {
  enum class Kind { box, ball2, nonneg_orthant, whole_space };

  Kind kind = Kind::whole_space;
  Vec lo, hi;       // box bounds
  Vec center;       // ball2 center
  double radius = 0.0;
  Eigen::Index dim = 0;

  static FeasibleSet box(Vec lo, Vec hi) {
    detail::require(lo.size() == hi.size(), "box: lo/hi dimension mismatch");
    detail::require((lo.array() <= hi.array()).all(), "box: requires lo <= hi");
    FeasibleSet s;
    s.kind = Kind::box;
    s.dim = lo.size();
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    return s;
  }

  static FeasibleSet ball2(Vec center, double radius) {
    detail::require(radius >= 0.0, "ball2: requires radius >= 0");
    FeasibleSet s;
    s.kind = Kind::ball2;
    s.dim = center.size();
    s.center = std::move(center);
    s.radius = radius;
    return s;
  }

  static FeasibleSet nonneg_orthant(Eigen::Index dim) {
    FeasibleSet s;
    s.kind = Kind::nonneg_orthant;
    s.dim = dim;
    return s;
  }

  static FeasibleSet whole_space(Eigen::Index dim) {
    FeasibleSet s;
    s.kind = Kind::whole_space;
    s.dim = dim;
    return s;
  }

  Vec project(const Vec& v) const {
    detail::require(v.size() == dim, "project: dimension mismatch");
    detail::require(v.allFinite(), "project: input must be finite");
    switch (kind) {
      case Kind::box:
        return v.cwiseMax(lo).cwiseMin(hi);
      case Kind::ball2: {
        Vec d = v - center;
        const double n = d.norm();
        if (n <= radius) return v;  // includes v == center
        return center + d * (radius / n);
      }
      case Kind::nonneg_orthant:
        return v.cwiseMax(0.0);
      case Kind::whole_space:
        return v;
    }
    throw std::logic_error("project: unknown set kind");
  }

  bool contains(const Vec& v, double tol = 1e-9) const {
    if (v.size() != dim) return false;
    switch (kind) {
      case Kind::box:
        return ((v - lo).array() >= -tol).all() && ((hi - v).array() >= -tol).all();
      case Kind::ball2:
        return (v - center).norm() <= radius + tol;
      case Kind::nonneg_orthant:
        return (v.array() >= -tol).all();
      case Kind::whole_space:
        return true;
    }
    return false;
  }

  double diameter() const {
    switch (kind) {
      case Kind::box:
        return (hi - lo).norm();
      case Kind::ball2:
        return 2.0 * radius;
      default:
        return std::numeric_limits<double>::infinity();
    }
  }
};

inline Vec project(const FeasibleSet& set, const Vec& v) { return set.project(v); }

/// Smoothness, curvature, Lipschitz and variance constants of an instance.
/// The smooth case is H_f = H_g_x = H_g_y = 0.
struct ProblemConstants {
  double mu_f = 0.0;
  double mu_y = 0.0;
  double L_f = 0.0;
  double L_g_xx = 0.0;
  double L_g_yx = 0.0;
  double L_g_yy = 0.0;
  double H_f = 0.0;
  double H_g_x = 0.0;
  double H_g_y = 0.0;
  double M_g_x = 0.0;
  double M_g_y = 0.0;
  double D_y = 0.0;
  double sigma_fprime = 0.0;
  double sigma_g = 0.0;
  double sigma_gprime = 0.0;

  bool smooth() const { return H_f == 0.0 && H_g_x == 0.0 && H_g_y == 0.0; }
};

/// Per-constraint recipe for evaluating g_i*(x) = max_{y in Y^i} g_i(x, y).
/// BallLinearMax: g_i(x, y) = (a + scale*y)^T x - b over the unit L2 ball,
/// maximized in closed form. ConcaveAscentMax: certified projected gradient
/// ascent using mu_y / L_g_yy.
struct BallLinearMax {
  Vec a;
  double b = 0.0;
  double scale = 0.0;
};
struct ConcaveAscentMax {};
using MaxOracle = std::variant<std::monostate, BallLinearMax, ConcaveAscentMax>;

/// A semi-infinite program min f(x) s.t. g_i(x, y) <= 0 for all y in Y^i,
/// described by value/gradient oracles plus its sets and constants.
/// Instances are immutable after construction and safe to share.
struct ProblemInstance {
  std::string name;
  Eigen::Index p = 0;             // dimension of x
  int m = 0;                      // number of constraint families
  std::vector<Eigen::Index> q;    // q[i] = dimension of y^i
  FeasibleSet X;
  std::vector<FeasibleSet> Ys;
  ProblemConstants constants;

  std::function<double(const Vec& x)> eval_f;
  std::function<Vec(const Vec& x)> grad_f;
  std::function<double(int i, const Vec& x, const Vec& yi)> eval_g;
  std::function<Vec(int i, const Vec& x, const Vec& yi)> grad_x_g;
  std::function<Vec(int i, const Vec& x, const Vec& yi)> grad_y_g;

  std::vector<MaxOracle> max_oracles;  // one per constraint; may be monostate

  ParamBlock zero_params() const {
    ParamBlock y(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) y[static_cast<size_t>(i)] = Vec::Zero(q[static_cast<size_t>(i)]);
    return y;
  }

  /// Default initial points: projection of the origin onto X and each Y^i.
  Vec default_x0() const { return X.project(Vec::Zero(p)); }
  ParamBlock default_y0() const {
    ParamBlock y = zero_params();
    for (int i = 0; i < m; ++i) y[static_cast<size_t>(i)] = Ys[static_cast<size_t>(i)].project(y[static_cast<size_t>(i)]);
    return y;
  }
};

/// Componentwise first-order model of g in x anchored at x_base:
/// component i is g_i(x_base, y^i) + <grad_x g_i(x_base, y^i), x_eval - x_base>.
/// Minorizes g(x_eval, y) componentwise when g is convex in x.
inline Vec linearize_g(const ProblemInstance& problem, const Vec& x_eval, const Vec& x_base,
                       const ParamBlock& y) {
  detail::require(x_eval.size() == problem.p && x_base.size() == problem.p,
                  "linearize_g: x dimension mismatch");
  Vec out(problem.m);
  const Vec dx = x_eval - x_base;
  for (int i = 0; i < problem.m; ++i) {
    const Vec& yi = y[static_cast<size_t>(i)];
    out[i] = problem.eval_g(i, x_base, yi) + problem.grad_x_g(i, x_base, yi).dot(dx);
  }
  return out;
}

/// Sum of t_j * points[j] divided by sum of t_j. Stays in X when the inputs do.
inline Vec weighted_average(const std::vector<Vec>& points, const std::vector<double>& weights) {
  detail::require(points.size() == weights.size(), "weighted_average: length mismatch");
  detail::require(!points.empty(), "weighted_average: empty input");
  double den = 0.0;
  Vec num = Vec::Zero(points.front().size());
  for (size_t j = 0; j < points.size(); ++j) {
    detail::require(weights[j] >= 0.0, "weighted_average: negative weight");
    detail::require(points[j].size() == num.size(), "weighted_average: point dimension mismatch");
    num += weights[j] * points[j];
    den += weights[j];
  }
  detail::require(den > 0.0, "weighted_average: weights sum to zero");
  return num / den;
}

/// f(x) + lambda^T g(x, y). Diagnostic only; the solvers never need it.
inline double lagrangian(const ProblemInstance& problem, const Vec& x, const Vec& lambda,
                         const ParamBlock& y) {
  detail::require(lambda.size() == problem.m, "lagrangian: lambda dimension mismatch");
  detail::require((lambda.array() >= 0.0).all(), "lagrangian: lambda must be nonnegative");
  double value = problem.eval_f(x);
  for (int i = 0; i < problem.m; ++i) {
    value += lambda[i] * problem.eval_g(i, x, y[static_cast<size_t>(i)]);
  }
  return value;
}

}  // namespace sip
