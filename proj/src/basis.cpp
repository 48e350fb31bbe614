#include "optdesign/basis.hpp"

#include <cmath>

namespace optdesign {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<int>> total_degree_multi_indices(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(dim, 0);
  // Graded order: all multi-indices of degree g, lexicographic within g.
  for (int g = 0; g <= degree; ++g) {
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[0] = g;
    while (true) {
      out.push_back(alpha);
      // next composition of g into dim parts, lexicographic descending on
      // the leading parts
      int i = dim - 2;
      while (i >= 0 && alpha[i] == 0) --i;
      if (i < 0) break;
      alpha[i] -= 1;
      int rest = g;
      for (int j = 0; j <= i; ++j) rest -= alpha[j];
      alpha[i + 1] = rest;
      for (int j = i + 2; j < dim; ++j) alpha[j] = 0;
    }
  }
  return out;
}

namespace {

// T_0..T_deg at t, by recurrence.
void chebyshev_values(double t, int deg, std::vector<double>& T) {
  T.resize(deg + 1);
  T[0] = 1.0;
  if (deg >= 1) T[1] = t;
  for (int k = 2; k <= deg; ++k) T[k] = 2.0 * t * T[k - 1] - T[k - 2];
}

}  // namespace

Eigen::MatrixXd BasisSpec::evaluate(const Eigen::MatrixXd& points) const {
  const Index M = points.rows();
  const Index N = size();
  Eigen::MatrixXd V(M, N);

  if (kind_ == BasisKind::kExplicitFunctions) {
    for (Index i = 0; i < M; ++i) {
      const Eigen::RowVectorXd x = points.row(i);
      for (Index j = 0; j < N; ++j) V(i, j) = functions_[j](x);
    }
    return V;
  }

  if (!has_box()) throw InvalidConfig("Chebyshev basis evaluated before its box was frozen");
  if (points.cols() != dim_) throw InvalidConfig("point dimension does not match basis");

  std::vector<std::vector<double>> T(dim_);
  for (Index i = 0; i < M; ++i) {
    for (int c = 0; c < dim_; ++c) {
      const double lo = box_lo_[c], hi = box_hi_[c];
      // Degenerate axes map to 0.
      const double t = (hi > lo) ? (2.0 * points(i, c) - lo - hi) / (hi - lo) : 0.0;
      chebyshev_values(t, degree_, T[c]);
    }
    for (Index j = 0; j < N; ++j) {
      double v = 1.0;
      const auto& alpha = multi_indices_[j];
      for (int c = 0; c < dim_; ++c) v *= T[c][alpha[c]];
      V(i, j) = v;
    }
  }
  return V;
}

}  // namespace optdesign
