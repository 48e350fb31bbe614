#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "optdesign/flow.hpp"
#include "optdesign/information.hpp"
#include "test_helpers.hpp"

using namespace optdesign;
using testutil::degree1_line;

namespace {

SqrtDesign degree1_optimum_z() {
  Eigen::VectorXd z(3);
  z << std::sqrt(0.5), 0.0, std::sqrt(0.5);
  return SqrtDesign(z);
}

// Stationary design on the support {-1, 0} with dE < 0 at the third point:
// a saddle of F with an exactly negative Hessian eigenvalue.
SqrtDesign degree1_saddle_z() {
  Eigen::VectorXd z(3);
  z << std::sqrt(0.5), std::sqrt(0.5), 0.0;
  return SqrtDesign(z);
}

VandermondeMatrix one_point_constant_model() {
  Eigen::MatrixXd pts(1, 1);
  pts << 0.5;
  auto basis = BasisSpec::explicit_functions(
      {[](const Eigen::RowVectorXd&) { return 1.0; }});
  return build_vandermonde(CandidateSet(pts), basis);
}

}  // namespace

TEST_CASE("newton_inner: exact stationary start takes zero iterations") {
  // One point, constant model: B = 1 = N exactly, so grad F vanishes exactly.
  const VandermondeMatrix V = one_point_constant_model();
  FlowParams p;
  const NewtonOutcome out =
      newton_inner(DesignObjective(V), SqrtDesign(Eigen::VectorXd::Ones(1)), 1.0, p);
  CHECK(out.converged);
  CHECK(out.iters == 0);
  CHECK(out.z.z[0] == 1.0);
}

TEST_CASE("newton_inner: near-stationary start stays put") {
  const VandermondeMatrix V = degree1_line();
  FlowParams p;
  const NewtonOutcome out =
      newton_inner(DesignObjective(V), degree1_optimum_z(), 1.0, p);
  CHECK(out.converged);
  CHECK(out.iters <= 2);
  CHECK((out.z.z - degree1_optimum_z().z).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("newton_inner: tau -> 0 matches explicit Euler to O(tau^2)") {
  const VandermondeMatrix V = degree1_line();
  const DesignObjective obj(V);
  const SqrtDesign z0 = SqrtDesign::uniform(3);
  const Eigen::VectorXd g0 = obj.eval(z0).grad;

  FlowParams p;
  p.eps = 1e-10;
  p.r_max = 50;
  auto euler_gap = [&](double tau) {
    const NewtonOutcome out = newton_inner(obj, z0, tau, p);
    REQUIRE(out.converged);
    return (out.z.z - (z0.z - tau * g0)).lpNorm<Eigen::Infinity>();
  };
  const double e3 = euler_gap(1e-3);
  const double e4 = euler_gap(1e-4);
  CHECK(e3 / e4 > 30.0);   // quadratic in tau: ratio ~ 100
  CHECK(e3 / e4 < 300.0);
}

TEST_CASE("newton_inner: uniform start on the line converges quickly") {
  const VandermondeMatrix V = degree1_line();
  FlowParams p;
  p.eps = 1e-4;
  p.r_max = 10;
  const NewtonOutcome out =
      newton_inner(DesignObjective(V), SqrtDesign::uniform(3), 1.0, p);
  CHECK(out.converged);
  CHECK(out.iters <= 10);
}

TEST_CASE("newton_inner: backward-Euler consistency and sign preservation") {
  const VandermondeMatrix V = testutil::random_instance(16, 2, 2, 40);
  const DesignObjective obj(V);
  FlowParams p;
  p.eps = 1e-4;
  p.r_max = 8;
  SqrtDesign z = SqrtDesign::uniform(16);
  double tau = 1.0;
  for (int k = 0; k < 12; ++k) {
    const NewtonOutcome out = newton_inner(obj, z, tau, p);
    if (!out.converged) break;
    const Eigen::VectorXd dz = out.z.z - z.z;
    const Eigen::VectorXd gF = obj.eval(out.z).grad;
    // componentwise eps-inexact stationarity of g restated
    const double floor = kUnitRoundoff *
                         std::max(1.0, z.z.lpNorm<Eigen::Infinity>()) *
                         (1.0 + 1.0 / tau);
    for (Index i = 0; i < 16; ++i) {
      const double lhs = std::abs(gF[i] + dz[i] / tau);
      CHECK(lhs <= std::max(p.eps * std::abs(dz[i]), floor));
    }
    for (Index i = 0; i < 16; ++i) {
      if (z.z[i] > 0) CHECK(out.z.z[i] > 0);
      if (z.z[i] == 0) CHECK(out.z.z[i] == 0.0);
    }
    z = out.z;
    tau *= 1.15;
  }
}

TEST_CASE("newton_solve: indefinite step Hessian is reported") {
  const VandermondeMatrix V = degree1_line();
  const DesignObjective obj(V);
  const SqrtDesign z = degree1_saddle_z();
  const ObjectiveEval ev = obj.eval(z);
  // dE at the off-support point is -4, so Hess F has the eigenvalue -8;
  // tau beyond 1/8 leaves the shifted Hessian indefinite.
  CHECK_THROWS_AS(obj.newton_solve(z, ev, 1.0, ev.grad), IndefiniteHessian);
  CHECK_NOTHROW(obj.newton_solve(z, ev, 0.1, ev.grad));
}

TEST_CASE("solve_fixed_step: brute-force optimum on the line") {
  const VandermondeMatrix V = degree1_line();
  FlowParams p;
  p.tau0 = 1.0;
  p.eps = 1e-4;
  p.r_max = 30;
  p.n_step = 200;
  const FlowResult r = solve_fixed_step(V, SqrtDesign::uniform(3), p);
  CHECK(r.converged);
  const Eigen::Vector3d oracle = testutil::brute_force_degree1_optimum(1e-4);
  CHECK((r.z.square().w - oracle).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("solve_fixed_step: square V converges to uniform weights") {
  Eigen::MatrixXd pts(4, 1);
  pts << -0.9, -0.2, 0.3, 0.8;
  const VandermondeMatrix V = build_vandermonde(
      CandidateSet(pts), BasisSpec::chebyshev_total_degree(3, 1));
  FlowParams p;
  p.r_max = 30;
  p.n_step = 300;
  const FlowResult r = solve_fixed_step(V, SqrtDesign::uniform(4), p);
  CHECK(r.converged);
  for (Index i = 0; i < 4; ++i)
    CHECK(r.z.square().w[i] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("solve_fixed_step rejects adaptive parameters") {
  const VandermondeMatrix V = degree1_line();
  FlowParams p;
  p.alpha = 1.15;
  CHECK_THROWS_AS(solve_fixed_step(V, SqrtDesign::uniform(3), p), InvalidConfig);
}

TEST_CASE("solve_adaptive with alpha = beta = 1 reproduces the fixed path") {
  const VandermondeMatrix V = testutil::random_instance(12, 1, 2, 60);
  FlowParams p;
  p.r_max = 30;
  p.n_step = 150;
  const FlowResult fixed = solve_fixed_step(V, SqrtDesign::uniform(12), p);
  const FlowResult adaptive = solve_adaptive(V, SqrtDesign::uniform(12), p);
  REQUIRE(fixed.trace.steps.size() == adaptive.trace.steps.size());
  CHECK((fixed.z.z - adaptive.z.z).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("descent and the variational inequality hold along traces") {
  const VandermondeMatrix V = testutil::random_instance(20, 2, 2, 61);
  FlowParams p;
  p.alpha = 1.15;
  p.beta = 1.0 / 1.15;
  p.n_step = 200;
  const FlowResult r = solve_adaptive(V, SqrtDesign::uniform(20), p);
  REQUIRE(r.converged);
  double f_prev = std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& s : r.trace.steps) {
    if (!first) {
      const double drop = f_prev - s.energy;
      const double gain = s.step_norm * s.step_norm / (2.0 * s.tau);
      const double slack = p.eps * s.step_norm * s.step_norm / s.tau +
                           1e-13 * std::max(1.0, std::abs(f_prev));
      CHECK(drop >= gain - slack);
    }
    f_prev = s.energy;
    first = false;
  }
}

TEST_CASE("mass emerges at optimality without normalization") {
  const VandermondeMatrix V = testutil::random_instance(18, 2, 2, 62);
  FlowParams p;
  p.alpha = 1.15;
  p.beta = 1.0 / 1.15;
  const FlowResult r = solve_adaptive(V, SqrtDesign::uniform(18), p);
  REQUIRE(r.converged);
  CHECK(std::abs(r.z.square().w.lpNorm<1>() - 1.0) < 1e-8);
}

TEST_CASE("saddle points do not attract the flow") {
  const VandermondeMatrix V = degree1_line();
  Eigen::VectorXd z0 = degree1_saddle_z().z;
  z0[2] = 1e-3;
  FlowParams p;
  p.alpha = 1.15;
  p.beta = 1.0 / 1.15;
  p.n_step = 300;
  const FlowResult r = solve_adaptive(V, SqrtDesign(z0), p);
  CHECK(r.converged);
  Eigen::VectorXd expect(3);
  expect << 0.5, 0.0, 0.5;
  CHECK((r.z.square().w - expect).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("zero-gradient start is rejected") {
  const VandermondeMatrix V = one_point_constant_model();
  FlowParams p;
  CHECK_THROWS_AS(solve_fixed_step(V, SqrtDesign(Eigen::VectorXd::Ones(1)), p),
                  ZeroGradientStart);
}

TEST_CASE("non-convergence statuses carry the best-so-far state") {
  const VandermondeMatrix V = degree1_line();

  FlowParams cap;
  cap.n_step = 1;
  cap.r_max = 30;
  const FlowResult r1 = solve_fixed_step(V, SqrtDesign::uniform(3), cap);
  CHECK_FALSE(r1.converged);
  CHECK(r1.status == FlowStatus::kMaxStepsReached);
  CHECK(r1.trace.steps.size() == 1);
  CHECK(r1.z.size() == 3);

  FlowParams strict;
  strict.eps = 1e-30;  // unsatisfiable ratio: every Newton run fails
  strict.r_max = 2;
  strict.alpha = 1.0;
  strict.beta = 0.5;
  strict.max_restarts = 2;
  const FlowResult r2 = solve_adaptive(V, SqrtDesign::uniform(3), strict);
  CHECK_FALSE(r2.converged);
  CHECK(r2.status == FlowStatus::kRestartBudgetExhausted);
}

TEST_CASE("flow parameter validation") {
  FlowParams p;
  p.tau0 = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  p = FlowParams{};
  p.beta = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  p = FlowParams{};
  p.alpha = 0.5;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
}
