#pragma once

#include "sip/core.hpp"
#include "sip/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <memory>
#include <utility>

namespace sip {

namespace detail {

struct RobustLpData {
  Eigen::Matrix<double, 4, 10> A;
  Eigen::Vector4d b;
  Eigen::Matrix<double, 10, 10> Q;  // zero for the purely bilinear instance
};

inline Eigen::Matrix<double, 4, 10> robust_lp_rows() {
  Eigen::Matrix<double, 4, 10> A;
  A.row(2) << 1, 0, 1, 0, 0, 1, 1, 0, 1, 0;
  A.row(3) << 0, 1, 0, 1, 1, 0, 0, 1, 0, 1;
  A.row(0) = -A.row(2);
  A.row(1) = -A.row(3);
  return A;
}

}  // namespace detail

/// Streams reserved for instance construction and oracle noise.
enum class OracleKind : std::uint32_t {
  grad_f = 0,
  g_value = 1,
  grad_x_g = 2,
  grad_y_g = 3,
  instance = 4,
  sampler = 5,
};

inline rng::StreamKey oracle_stream(std::uint64_t seed, std::uint64_t iter, int slot,
                                    OracleKind kind, int constraint) {
  rng::StreamKey key;
  key.seed = seed;
  key.lo = static_cast<std::uint32_t>(iter);
  key.hi = (static_cast<std::uint32_t>(slot) << 28) |
           (static_cast<std::uint32_t>(kind) << 24) |
           (static_cast<std::uint32_t>(constraint) & 0xFFFFFFu);
  return key;
}

/// Box-uncertain robust LP with a strongly convex objective and a concave
/// quadratic lower level:
///   min -1'x + 0.05 |x|^2  s.t.  (a_i + 0.2 y)'x - b_i - y'Qy/2 <= 0
/// over |x|_inf <= 2, |y|_inf <= 1, with Q = 0.1 (q'q + I) and q a 10x10
/// matrix of uniform(0,1) entries drawn from the Philox stream of `seed`.
inline ProblemInstance build_strongly_convex_instance(std::uint64_t seed) {
  auto data = std::make_shared<detail::RobustLpData>();
  data->A = detail::robust_lp_rows();
  data->b << 0, 0, 1, 1;

  Eigen::Matrix<double, 10, 10> qm;
  const Eigen::VectorXd u =
      rng::uniforms(oracle_stream(seed, 0, 0, OracleKind::instance, 0), 100);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) qm(r, c) = u[10 * r + c];
  data->Q = 0.1 * (qm.transpose() * qm + Eigen::Matrix<double, 10, 10>::Identity());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 10, 10>> es(data->Q);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();

  ProblemInstance P;
  P.name = "robust_lp_strong";
  P.p = 10;
  P.m = 4;
  P.q.assign(4, 10);
  P.X = FeasibleSet::box(Vec::Constant(10, -2.0), Vec::Constant(10, 2.0));
  P.Ys.assign(4, FeasibleSet::box(Vec::Constant(10, -1.0), Vec::Constant(10, 1.0)));

  ProblemConstants c;
  c.mu_f = 0.1;
  c.L_f = 0.1;
  c.mu_y = lambda_min;
  c.L_g_yy = lambda_max;
  c.L_g_yx = 0.2;
  c.L_g_xx = 0.0;
  c.M_g_x = std::sqrt(5.0) + 0.2 * std::sqrt(10.0);
  c.M_g_y = 0.2 * 2.0 * std::sqrt(10.0) + lambda_max * std::sqrt(10.0);
  c.D_y = 2.0 * std::sqrt(10.0);
  P.constants = c;

  P.eval_f = [](const Vec& x) { return -x.sum() + 0.05 * x.squaredNorm(); };
  P.grad_f = [](const Vec& x) { return Vec(0.1 * x - Vec::Ones(x.size())); };
  P.eval_g = [data](int i, const Vec& x, const Vec& y) {
    return (data->A.row(i).transpose() + 0.2 * y).dot(x) - data->b[i] -
           0.5 * y.dot(data->Q * y);
  };
  P.grad_x_g = [data](int i, const Vec&, const Vec& y) {
    return Vec(data->A.row(i).transpose() + 0.2 * y);
  };
  P.grad_y_g = [data](int, const Vec& x, const Vec& y) { return Vec(0.2 * x - data->Q * y); };
  P.max_oracles.assign(4, ConcaveAscentMax{});
  return P;
}

/// Ball-uncertain robust LP, linear in both arguments:
///   min -1'x  s.t.  (a_i + 0.2 y)'x - b_i <= 0 over |x|_inf <= 2, |y|_2 <= 1.
inline ProblemInstance build_convex_instance() {
  auto data = std::make_shared<detail::RobustLpData>();
  data->A = detail::robust_lp_rows();
  data->b << 0, 0, 1, 1;
  data->Q.setZero();

  ProblemInstance P;
  P.name = "robust_lp";
  P.p = 10;
  P.m = 4;
  P.q.assign(4, 10);
  P.X = FeasibleSet::box(Vec::Constant(10, -2.0), Vec::Constant(10, 2.0));
  P.Ys.assign(4, FeasibleSet::ball2(Vec::Zero(10), 1.0));

  ProblemConstants c;
  c.L_g_yx = 0.2;
  c.M_g_x = std::sqrt(5.0) + 0.2;
  c.M_g_y = 0.2 * 2.0 * std::sqrt(10.0);
  c.D_y = 2.0;
  P.constants = c;

  P.eval_f = [](const Vec& x) { return -x.sum(); };
  P.grad_f = [](const Vec& x) { return Vec(-Vec::Ones(x.size())); };
  P.eval_g = [data](int i, const Vec& x, const Vec& y) {
    return (data->A.row(i).transpose() + 0.2 * y).dot(x) - data->b[i];
  };
  P.grad_x_g = [data](int i, const Vec&, const Vec& y) {
    return Vec(data->A.row(i).transpose() + 0.2 * y);
  };
  P.grad_y_g = [](int, const Vec& x, const Vec&) { return Vec(0.2 * x); };
  for (int i = 0; i < 4; ++i)
    P.max_oracles.push_back(BallLinearMax{Vec(data->A.row(i).transpose()), data->b[i], 0.2});
  return P;
}

/// One-dimensional desk instance. min (x-1)^2 s.t. y(x-0.5) - y^2/2 - 0.1 <= 0
/// over x, y in [-1, 1]. The worst case is g*(x) = (x-0.5)^2/2 - 0.1 while the
/// interior maximizer y* = x - 0.5 stays inside [-1, 1].
inline ProblemInstance build_toy1() {
  ProblemInstance P;
  P.name = "toy1";
  P.p = 1;
  P.m = 1;
  P.q.assign(1, 1);
  P.X = FeasibleSet::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
  P.Ys.assign(1, FeasibleSet::box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)));

  ProblemConstants c;
  c.mu_f = 2.0;
  c.L_f = 2.0;
  c.mu_y = 1.0;
  c.L_g_yy = 1.0;
  c.L_g_yx = 1.0;
  c.M_g_x = 1.0;
  c.M_g_y = 2.5;
  c.D_y = 2.0;
  P.constants = c;

  P.eval_f = [](const Vec& x) { return (x[0] - 1.0) * (x[0] - 1.0); };
  P.grad_f = [](const Vec& x) { return Vec(Vec::Constant(1, 2.0 * (x[0] - 1.0))); };
  P.eval_g = [](int, const Vec& x, const Vec& y) {
    return y[0] * (x[0] - 0.5) - 0.5 * y[0] * y[0] - 0.1;
  };
  P.grad_x_g = [](int, const Vec&, const Vec& y) { return Vec(Vec::Constant(1, y[0])); };
  P.grad_y_g = [](int, const Vec& x, const Vec& y) {
    return Vec(Vec::Constant(1, (x[0] - 0.5) - y[0]));
  };
  P.max_oracles.assign(1, ConcaveAscentMax{});
  return P;
}

inline ProblemInstance build_problem(const std::string& name, std::uint64_t seed) {
  if (name == "toy1") return build_toy1();
  if (name == "robust_lp_strong") return build_strongly_convex_instance(seed);
  if (name == "robust_lp") return build_convex_instance();
  throw config_error("unknown problem '" + name +
                     "' (available: toy1, robust_lp_strong, robust_lp)");
}

/// Additive zero-mean Gaussian noise on each oracle. Unbiased with variances
/// std_f^2 (objective gradient), std_g^2 (constraint values) and std_gprime^2
/// (both constraint gradients). The realization depends only on the stream
/// coordinates, never on the evaluation point, so aliased sample slots see
/// identical noise and their differences cancel exactly.
struct NoiseModel {
  double std_f = 0.0;
  double std_g = 0.0;
  double std_gprime = 0.0;
  std::uint64_t seed = 0;

  bool silent() const { return std_f == 0.0 && std_g == 0.0 && std_gprime == 0.0; }
};

/// Identifies one oracle draw: iteration plus sample slot (1..6).
struct SampleKey {
  std::uint64_t iter = 0;
  int slot = 1;
};

/// Deterministic instance plus sampled oracles satisfying the unbiasedness
/// and bounded-variance contracts. Sampling is replayable: a (seed, key)
/// pair always yields the same draw.
struct StochasticProblemInstance {
  ProblemInstance base;
  NoiseModel noise;

  Vec grad_f(const Vec& x, const SampleKey& key) const {
    Vec g = base.grad_f(x);
    if (noise.std_f != 0.0)
      g += noise.std_f *
           rng::normals(oracle_stream(noise.seed, key.iter, key.slot, OracleKind::grad_f, 0),
                        base.p);
    return g;
  }

  double eval_g(int i, const Vec& x, const Vec& yi, const SampleKey& key) const {
    double v = base.eval_g(i, x, yi);
    if (noise.std_g != 0.0)
      v += noise.std_g *
           rng::normals(oracle_stream(noise.seed, key.iter, key.slot, OracleKind::g_value, i),
                        1)[0];
    return v;
  }

  Vec grad_x_g(int i, const Vec& x, const Vec& yi, const SampleKey& key) const {
    Vec g = base.grad_x_g(i, x, yi);
    if (noise.std_gprime != 0.0)
      g += noise.std_gprime *
           rng::normals(oracle_stream(noise.seed, key.iter, key.slot, OracleKind::grad_x_g, i),
                        base.p);
    return g;
  }

  Vec grad_y_g(int i, const Vec& x, const Vec& yi, const SampleKey& key) const {
    Vec g = base.grad_y_g(i, x, yi);
    if (noise.std_gprime != 0.0)
      g += noise.std_gprime *
           rng::normals(oracle_stream(noise.seed, key.iter, key.slot, OracleKind::grad_y_g, i),
                        base.q[static_cast<size_t>(i)]);
    return g;
  }

  /// Stochastic first-order model of g in x anchored at x_base, all entries
  /// drawn from the slot in `key`.
  Vec linearize_g(const Vec& x_eval, const Vec& x_base, const ParamBlock& y,
                  const SampleKey& key) const {
    Vec out(base.m);
    const Vec dx = x_eval - x_base;
    for (int i = 0; i < base.m; ++i) {
      const Vec& yi = y[static_cast<size_t>(i)];
      out[i] = eval_g(i, x_base, yi, key) + grad_x_g(i, x_base, yi, key).dot(dx);
    }
    return out;
  }
};

inline StochasticProblemInstance make_stochastic(ProblemInstance problem, NoiseModel noise) {
  detail::require(noise.std_f >= 0.0 && noise.std_g >= 0.0 && noise.std_gprime >= 0.0,
                  "make_stochastic: noise standard deviations must be nonnegative");
  StochasticProblemInstance sp{std::move(problem), noise};
  sp.base.constants.sigma_fprime = noise.std_f;
  sp.base.constants.sigma_g = noise.std_g;
  sp.base.constants.sigma_gprime = noise.std_gprime;
  return sp;
}

}  // namespace sip
