#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optdesign/generators.hpp"
#include "optdesign/information.hpp"
#include "test_helpers.hpp"

using namespace optdesign;
using testutil::degree1_line;

TEST_CASE("vandermonde: direct evaluation on the line") {
  const VandermondeMatrix V = degree1_line();
  REQUIRE(V.rows() == 3);
  REQUIRE(V.cols() == 2);
  CHECK(V.values(0, 0) == 1.0);
  CHECK(V.values(0, 1) == -1.0);
  CHECK(V.values(1, 0) == 1.0);
  CHECK(V.values(1, 1) == 0.0);
  CHECK(V.values(2, 0) == 1.0);
  CHECK(V.values(2, 1) == 1.0);
  CHECK(V.rank == 2);
}

TEST_CASE("vandermonde: rank deficiency when N > M") {
  Eigen::MatrixXd pts(2, 1);
  pts << -1, 1;
  const CandidateSet X(pts);
  const BasisSpec basis = BasisSpec::chebyshev_total_degree(2, 1);
  CHECK_THROWS_AS(build_vandermonde(X, basis), RankDeficient);
  try {
    build_vandermonde(X, basis);
  } catch (const RankDeficient& e) {
    CHECK(e.expected == 3);
    CHECK(e.actual <= 2);
  }
}

TEST_CASE("vandermonde: degree-40 grid with model degree 4") {
  const CandidateSet X = gen_chebyshev_lobatto_grid(40, 2);
  REQUIRE(X.size() == 1681);
  const VandermondeMatrix V =
      build_vandermonde(X, BasisSpec::chebyshev_total_degree(4, 2));
  CHECK(V.cols() == 15);
  CHECK(V.rank == 15);
}

TEST_CASE("duplicate detection reports identical points") {
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 1, 1, 0, 0, 2, 2;
  const CandidateSet X(pts);
  const auto groups = X.duplicate_groups();
  REQUIRE(groups.size() == 1);
  CHECK(groups[0] == std::vector<Index>{0, 2});
}

TEST_CASE("gram: square V and uniform weights") {
  // det G = det(V)^2 / N^N for M = N and w = 1/N
  Eigen::MatrixXd pts(2, 1);
  pts << 0.3, -0.7;
  auto basis = BasisSpec::explicit_functions(
      {[](const Eigen::RowVectorXd&) { return 1.0; },
       [](const Eigen::RowVectorXd& x) { return x[0]; }});
  const VandermondeMatrix V = build_vandermonde(CandidateSet(pts), basis);
  const InformationMatrix info = gram_matrix(V, Design::uniform(2));
  const double detV = V.values.determinant();
  CHECK(std::exp(info.logdet) == doctest::Approx(detV * detV / 4.0).epsilon(1e-12));
}

TEST_CASE("gram: hand-evaluated 2x2 at the degree-1 optimum") {
  const VandermondeMatrix V = degree1_line();
  Eigen::VectorXd w(3);
  w << 0.5, 0.0, 0.5;
  const InformationMatrix info = gram_matrix(V, Design(w));
  CHECK(info.G(0, 0) == doctest::Approx(1.0));
  CHECK(info.G(1, 1) == doctest::Approx(1.0));
  CHECK(info.G(0, 1) == doctest::Approx(0.0));
  CHECK(info.logdet == doctest::Approx(0.0));
  CHECK_FALSE(info.singular);
}

TEST_CASE("gram: zero design flags a singular matrix") {
  const VandermondeMatrix V = degree1_line();
  const InformationMatrix info = gram_matrix(V, Design(Eigen::VectorXd::Zero(3)));
  CHECK(info.singular);
  CHECK(info.logdet == -std::numeric_limits<double>::infinity());
}

TEST_CASE("energy: value at the degree-1 optimum") {
  const VandermondeMatrix V = degree1_line();
  Eigen::VectorXd w(3);
  w << 0.5, 0.0, 0.5;
  CHECK(energy_E(V, Design(w)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("energy: +inf on rank-deficient support, negative weight throws") {
  const VandermondeMatrix V = degree1_line();
  Eigen::VectorXd w(3);
  w << 0.0, 1.0, 0.0;  // only the middle point: {1,x} not identifiable
  CHECK(energy_E(V, Design(w)) == std::numeric_limits<double>::infinity());

  w << 0.5, -0.1, 0.6;
  CHECK_THROWS_AS(energy_E(V, Design(w)), NegativeWeight);
}

TEST_CASE("energy: scaling identity E(tw) = E(w) - log t + (t-1)||w||_1") {
  const VandermondeMatrix V = testutil::random_instance(12, 2, 2, 31);
  const Design w(testutil::random_positive_z(12, 77).square());
  const double e0 = energy_E(V, w);
  for (double t : {0.5, 2.0, 3.7}) {
    const double et = energy_E(V, Design(t * w.w));
    CHECK(et == doctest::Approx(e0 - std::log(t) + (t - 1.0) * w.mass())
                    .epsilon(1e-11));
  }
}

TEST_CASE("energy_F: matches E after squaring and is sign-invariant") {
  const VandermondeMatrix V = degree1_line();
  Eigen::VectorXd z(3);
  z << std::sqrt(0.5), 0.0, std::sqrt(0.5);
  CHECK(energy_F(V, SqrtDesign(z)) == doctest::Approx(1.0).epsilon(1e-14));

  const SqrtDesign zr = testutil::random_positive_z(3, 5);
  Eigen::VectorXd zf = zr.z;
  zf[1] = -zf[1];
  CHECK(energy_F(V, SqrtDesign(zf)) == doctest::Approx(energy_F(V, zr)));

  CHECK(energy_F(V, SqrtDesign(Eigen::VectorXd::Zero(3))) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("gram is even in z exactly") {
  const VandermondeMatrix V = testutil::random_instance(9, 1, 2, 4);
  const SqrtDesign z = testutil::random_positive_z(9, 6);
  const InformationMatrix a = gram_matrix(V, z.square());
  const InformationMatrix b = gram_matrix(V, SqrtDesign(-z.z).square());
  CHECK((a.G - b.G).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-route logdet agreement (Cholesky vs QR)") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const VandermondeMatrix V = testutil::random_instance(20, 2, 2, seed);
    const Eigen::VectorXd w = testutil::random_positive_z(20, seed + 100).square().w;
    const double ld_chol = gram_matrix(V, Design(w)).logdet;
    const double ld_qr = testutil::logdet_via_qr(V, w);
    CHECK(std::abs(ld_chol - ld_qr) <=
          1e-10 * std::max(1.0, std::abs(ld_chol)));
  }
}

TEST_CASE("basis dimension: binom(n+d, n)") {
  CHECK(BasisSpec::chebyshev_total_degree(4, 2).size() == 15);
  CHECK(BasisSpec::chebyshev_total_degree(10, 2).size() == 66);
  CHECK(BasisSpec::chebyshev_total_degree(3, 2).size() == 10);
  CHECK(BasisSpec::chebyshev_total_degree(2, 3).size() == 10);
  CHECK(BasisSpec::chebyshev_total_degree(5, 1).size() == 6);
}
