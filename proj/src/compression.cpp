#include "optdesign/compression.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "optdesign/errors.hpp"

namespace optdesign {

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                int max_iterations) {
  const Index m = A.rows(), n = A.cols();
  if (max_iterations < 0)
    max_iterations = static_cast<int>(6 * std::max(m, n));

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<Index> pset;

  const double grad_tol = 10.0 * static_cast<double>(std::max(m, n)) *
                          kUnitRoundoff * b.norm();

  auto solve_passive = [&]() -> Eigen::VectorXd {
    Eigen::MatrixXd Ap(m, static_cast<Index>(pset.size()));
    for (size_t j = 0; j < pset.size(); ++j) Ap.col(j) = A.col(pset[j]);
    return Ap.colPivHouseholderQr().solve(b);
  };

  Eigen::VectorXd resid = b;
  int iters = 0;
  while (iters < max_iterations &&
         static_cast<Index>(pset.size()) < std::min(m, n)) {
    const Eigen::VectorXd grad = A.transpose() * resid;
    Index best = -1;
    double best_val = grad_tol;
    for (Index j = 0; j < n; ++j) {
      if (!passive[j] && grad[j] > best_val) {
        best_val = grad[j];
        best = j;  // strict > keeps the smallest index among ties
      }
    }
    if (best < 0) break;
    passive[best] = true;
    pset.push_back(best);

    while (true) {
      ++iters;
      const Eigen::VectorXd s = solve_passive();
      bool all_positive = true;
      for (Index k = 0; k < s.size(); ++k)
        if (s[k] <= 0) { all_positive = false; break; }
      if (all_positive) {
        for (size_t k = 0; k < pset.size(); ++k) out.x[pset[k]] = s[k];
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < pset.size(); ++k) {
        if (s[k] <= 0) {
          const double xk = out.x[pset[k]];
          alpha = std::min(alpha, xk / (xk - s[k]));
        }
      }
      std::vector<Index> kept;
      double xmax = 0.0;
      for (size_t k = 0; k < pset.size(); ++k) {
        out.x[pset[k]] += alpha * (s[k] - out.x[pset[k]]);
        xmax = std::max(xmax, out.x[pset[k]]);
      }
      const double zero_tol = 16.0 * kUnitRoundoff * xmax;
      for (size_t k = 0; k < pset.size(); ++k) {
        if (out.x[pset[k]] > zero_tol && s[k] > 0) {
          kept.push_back(pset[k]);
        } else {
          passive[pset[k]] = false;
          out.x[pset[k]] = 0.0;
        }
      }
      pset = std::move(kept);
      if (pset.empty() || iters >= max_iterations) break;
    }
    resid = b - A * out.x;
  }

  out.iterations = iters;
  out.residual_norm = (b - A * out.x).norm();
  return out;
}

CompressedDesign compress(const Design& w, const Phi2Space& p2) {
  w.check_nonnegative();
  const Index M = w.size();
  if (p2.V2.rows() != M)
    throw InvalidConfig("Phi^2 space does not match the design length");

  const std::vector<Index> sup = w.support();
  CompressedDesign out;
  if (static_cast<Index>(sup.size()) < p2.N2) {
    out.compressed = false;
    out.indices = sup;
    out.weights.resize(static_cast<Index>(sup.size()));
    for (size_t k = 0; k < sup.size(); ++k) out.weights[k] = w.w[sup[k]];
    out.moment_residual = 0.0;
    return out;
  }

  const Eigen::VectorXd m = p2.V2.transpose() * w.w;

  // Equilibrate the moment equations: magnitudes vary wildly across degrees.
  Eigen::VectorXd colscale = p2.V2.colwise().norm();
  for (Index j = 0; j < colscale.size(); ++j)
    if (colscale[j] == 0) colscale[j] = 1.0;
  const Eigen::MatrixXd A =
      colscale.cwiseInverse().asDiagonal() * p2.V2.transpose();
  const Eigen::VectorXd ms = m.cwiseQuotient(colscale);

  const NnlsResult sol = nnls(A, ms);

  // Drop roundoff-level weights, then refine with an equality solve on the
  // retained support columns.
  const double drop = kUnitRoundoff * sol.x.maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < M; ++i)
    if (sol.x[i] > drop) keep.push_back(i);

  Eigen::MatrixXd As(A.rows(), static_cast<Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) As.col(k) = A.col(keep[k]);
  Eigen::VectorXd refined = As.colPivHouseholderQr().solve(ms);

  bool refined_ok = true;
  for (Index k = 0; k < refined.size(); ++k)
    if (refined[k] < 0) { refined_ok = false; break; }
  if (!refined_ok) {
    refined.resize(static_cast<Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) refined[k] = sol.x[keep[k]];
  }

  Eigen::VectorXd w_c = Eigen::VectorXd::Zero(M);
  for (size_t k = 0; k < keep.size(); ++k) w_c[keep[k]] = refined[k];

  const double resid =
      (p2.V2.transpose() * w_c - m).lpNorm<Eigen::Infinity>();
  const double scale = m.lpNorm<Eigen::Infinity>();
  if (resid > 1e-8 * scale) throw MomentMismatch(resid, scale);

  out.compressed = true;
  out.moment_residual = resid;
  Index kept_count = 0;
  for (size_t k = 0; k < keep.size(); ++k)
    if (w_c[keep[k]] > 0) ++kept_count;
  out.weights.resize(kept_count);
  Index pos = 0;
  for (size_t k = 0; k < keep.size(); ++k) {
    if (w_c[keep[k]] > 0) {
      out.indices.push_back(keep[k]);
      out.weights[pos++] = w_c[keep[k]];
    }
  }
  return out;
}

}  // namespace optdesign
