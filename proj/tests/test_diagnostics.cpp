#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "optdesign/diagnostics.hpp"
#include "optdesign/flow.hpp"
#include "optdesign/information.hpp"
#include "optdesign/regularization.hpp"
#include "test_helpers.hpp"

using namespace optdesign;
using testutil::degree1_line;

namespace {

Design degree1_optimum_w() {
  Eigen::VectorXd w(3);
  w << 0.5, 0.0, 0.5;
  return Design(w);
}

}  // namespace

TEST_CASE("kkt_residual: zero at square-uniform and at the degree-1 optimum") {
  Eigen::MatrixXd pts(3, 1);
  pts << -0.9, 0.1, 0.8;
  const VandermondeMatrix Vs = build_vandermonde(
      CandidateSet(pts), BasisSpec::chebyshev_total_degree(2, 1));
  const Design wu = Design::uniform(3);
  const KKTReport ru =
      kkt_residual(wu, weighted_onb(Vs, SqrtDesign::from_design(wu)));
  CHECK(ru.max_residual < 1e-12);
  CHECK(ru.mass_error < 1e-15);

  const VandermondeMatrix V = degree1_line();
  const Design w = degree1_optimum_w();
  const KKTReport r =
      kkt_residual(w, weighted_onb(V, SqrtDesign::from_design(w)));
  CHECK(r.max_residual < 1e-14);  // B = (2,1,2): off-support part clips to 0
  CHECK(r.support == std::vector<Index>{0, 2});
}

TEST_CASE("kkt_residual agrees with a simplex-grid brute force on tiny instances") {
  // The brute-force argmax of det G over the simplex grid must sit where the
  // KKT residual is smallest among grid candidates.
  const VandermondeMatrix V = degree1_line();
  const Eigen::Vector3d oracle = testutil::brute_force_degree1_optimum(1e-3);
  const Design w(oracle);
  const KKTReport r =
      kkt_residual(w, weighted_onb(V, SqrtDesign::from_design(w)));
  CHECK(r.max_residual < 2e-3);  // grid-step-level violation only
}

TEST_CASE("titterington_step: fixed point and hand-computed update") {
  const VandermondeMatrix V = degree1_line();
  const Design w_opt = degree1_optimum_w();
  const Design next =
      titterington_step(w_opt, weighted_onb(V, SqrtDesign::from_design(w_opt)));
  CHECK((next.w - w_opt.w).lpNorm<Eigen::Infinity>() < 1e-14);

  const Design w3 = Design::uniform(3);
  const Design t3 =
      titterington_step(w3, weighted_onb(V, SqrtDesign::from_design(w3)));
  CHECK(t3.w[0] == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(t3.w[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(t3.w[2] == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("titterington_step: det G never decreases, mass preserved") {
  for (std::uint64_t seed : {2u, 4u, 8u}) {
    const Index M = 14;
    const VandermondeMatrix V = testutil::random_instance(M, 2, 2, 700 + seed);
    Eigen::VectorXd w0 = testutil::random_positive_z(M, 710 + seed).square().w;
    w0 /= w0.lpNorm<1>();
    Design w(w0);
    double logdet_prev = gram_matrix(V, w).logdet;
    for (int k = 0; k < 40; ++k) {
      const WeightedONB onb = weighted_onb(V, SqrtDesign::from_design(w));
      // mass preserved by the raw multiplicative update (trace identity)
      const Eigen::VectorXd raw =
          w.w.cwiseProduct(bergman(onb)) / static_cast<double>(V.cols());
      CHECK(std::abs(raw.lpNorm<1>() - 1.0) < 1e-14);
      w = titterington_step(w, onb);
      const double logdet = gram_matrix(V, w).logdet;
      CHECK(logdet >= logdet_prev - 1e-12 * std::abs(logdet_prev));
      logdet_prev = logdet;
    }
  }
}

TEST_CASE("titterington_solve: reaches the brute-force optimum on the line") {
  const VandermondeMatrix V = degree1_line();
  const TitteringtonResult r =
      titterington_solve(V, Design::uniform(3), 1e-10, 100000);
  CHECK(r.converged);
  const Eigen::Vector3d oracle = testutil::brute_force_degree1_optimum(1e-4);
  CHECK((r.w.w - oracle).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("titterington_solve agrees with the flow on the limit determinant") {
  const Index M = 60;
  const VandermondeMatrix V = testutil::random_instance(M, 2, 3, 801);
  FlowParams p;
  p.alpha = 1.15;
  p.beta = 1.0 / 1.15;
  const FlowResult fr = solve_adaptive(V, SqrtDesign::uniform(M), p);
  REQUIRE(fr.converged);
  const TitteringtonResult tr =
      titterington_solve(V, Design::uniform(M), 1e-8, 2000000);
  const double ld_flow = gram_matrix(V, fr.z.square()).logdet;
  const double ld_titt = gram_matrix(V, tr.w).logdet;
  CHECK(std::abs(ld_flow - ld_titt) <= 1e-8 * std::abs(ld_flow));
}

TEST_CASE("wellposedness_probe: trivial kernel certifies well-posedness") {
  const VandermondeMatrix V = degree1_line();
  const Phi2Space p2 = build_phi2(V);
  const KernelProjector proj = kernel_projector(p2);
  const WellPosednessCertificate cert =
      wellposedness_probe(V, degree1_optimum_w(), p2, proj);
  CHECK(cert.verdict == WellPosedness::kWellPosedEvidence);
}

TEST_CASE("wellposedness_probe: feasible kernel move certifies ill-posedness") {
  Eigen::MatrixXd pts(2, 1);
  pts << -1, 1;
  auto basis = BasisSpec::explicit_functions(
      {[](const Eigen::RowVectorXd&) { return 1.0; }});
  const VandermondeMatrix V = build_vandermonde(CandidateSet(pts), basis);
  const Phi2Space p2 = build_phi2(V);
  const KernelProjector proj = kernel_projector(p2);

  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  const WellPosednessCertificate cert =
      wellposedness_probe(V, Design(w), p2, proj);
  REQUIRE(cert.verdict == WellPosedness::kIllPosedCertified);
  REQUIRE(cert.witness.has_value());
  const Eigen::VectorXd& move = *cert.witness;
  CHECK(cert.witness_distance > 1e-2);
  CHECK((w + move).minCoeff() >= -1e-12);
  CHECK(cert.moment_residual <= 1e-10);
  CHECK(cert.energy_gap <= 1e-9);
}

TEST_CASE("wellposedness_probe: blocked moves stay inconclusive") {
  // Four collinear points, degree-1 model: the kernel direction has
  // alternating signs, and a design supported on the outer points blocks
  // every kernel move at t = 0.
  Eigen::MatrixXd pts(4, 1);
  pts << -1, 0, 0.5, 1;
  const VandermondeMatrix V = build_vandermonde(
      CandidateSet(pts), BasisSpec::chebyshev_total_degree(1, 1));
  const Phi2Space p2 = build_phi2(V);
  const KernelProjector proj = kernel_projector(p2);
  REQUIRE(proj.kernel_dim() == 1);

  Eigen::VectorXd w(4);
  w << 0.5, 0.0, 0.0, 0.5;
  const WellPosednessCertificate cert =
      wellposedness_probe(V, Design(w), p2, proj);
  CHECK(cert.verdict == WellPosedness::kInconclusive);
}

TEST_CASE("hessian_spectrum: PSD at the optimum, cap honored") {
  const VandermondeMatrix V = degree1_line();
  const SqrtDesign z = SqrtDesign::from_design(degree1_optimum_w());
  const Eigen::VectorXd spec = hessian_spectrum(V, z);
  CHECK(spec.minCoeff() >= -1e-10 * spec.maxCoeff());
  CHECK(spec.size() == 3);
  CHECK_THROWS_AS(hessian_spectrum(V, z, 2), DenseCapExceeded);
}

TEST_CASE("error_estimate: theta = 1/2 at the degree-1 optimum") {
  const VandermondeMatrix V = degree1_line();
  const SqrtDesign z = SqrtDesign::from_design(degree1_optimum_w());
  const ErrorEstimate est = error_estimate(V, z);
  CHECK(est.exponent_case == LojasiewiczCase::kThetaHalf);
  CHECK(est.C_hat == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(est.has_bound);
  CHECK(est.bound <= 1e-10);  // grad F vanishes here
}

TEST_CASE("error_estimate: degenerate restricted Hessian reports unknown") {
  Eigen::MatrixXd pts(2, 1);
  pts << -1, 1;
  auto basis = BasisSpec::explicit_functions(
      {[](const Eigen::RowVectorXd&) { return 1.0; }});
  const VandermondeMatrix V = build_vandermonde(CandidateSet(pts), basis);
  Eigen::VectorXd z(2);
  z << std::sqrt(0.5), std::sqrt(0.5);
  const ErrorEstimate est = error_estimate(V, SqrtDesign(z));
  CHECK(est.exponent_case == LojasiewiczCase::kUnknown);
  CHECK_FALSE(est.has_bound);
}

TEST_CASE("G-optimality at converged optima") {
  const VandermondeMatrix V = testutil::random_instance(25, 2, 2, 901);
  FlowParams p;
  p.alpha = 1.15;
  p.beta = 1.0 / 1.15;
  const FlowResult r = solve_adaptive(V, SqrtDesign::uniform(25), p);
  REQUIRE(r.converged);
  const double maxB = bergman(weighted_onb(V, r.z)).maxCoeff();
  const double N = static_cast<double>(V.cols());
  CHECK(maxB >= N - 1e-6);
  CHECK(maxB <= N + 1e-8);
}

TEST_CASE("fit_convergence_rate distinguishes linear from superlinear tails") {
  FlowTrace linear;
  double r = 1.0;
  for (int k = 1; k <= 20; ++k) {
    r *= 0.45;
    linear.steps.push_back({k, 1.0, r, r, r, 2, 0, 0.0, 0.0});
  }
  CHECK(fit_convergence_rate(linear).kind == RateFit::Kind::kLinear);

  FlowTrace super;
  double s = 0.5;
  r = 0.3;
  for (int k = 1; k <= 12; ++k) {
    super.steps.push_back({k, 1.0, r, r, r, 2, 0, 0.0, 0.0});
    s *= 0.75;   // shrinking ratio: superlinear decay
    r *= s;
  }
  CHECK(fit_convergence_rate(super).kind == RateFit::Kind::kSuperlinear);
}
