#include "optdesign/information.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace optdesign {

InformationMatrix gram_matrix(const VandermondeMatrix& V, const Design& w) {
  if (w.size() != V.rows())
    throw InvalidConfig("design length does not match candidate count");

  const Index N = V.cols();
  InformationMatrix out;

  // A = diag(sqrt(|w|)) V keeps G symmetric with nonnegative spectrum.
  const Eigen::VectorXd s = w.w.cwiseAbs().cwiseSqrt();
  const Eigen::MatrixXd A = s.asDiagonal() * V.values;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  out.G = G;

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() == Eigen::Success) {
    double ld = 0.0;
    const auto& L = llt.matrixLLT();
    bool ok = true;
    for (Index i = 0; i < N; ++i) {
      if (!(L(i, i) > 0.0)) { ok = false; break; }
      ld += std::log(L(i, i));
    }
    if (ok) {
      out.logdet = 2.0 * ld;
      out.singular = false;
      return out;
    }
  }

  // Fallback: eigenvalue sum; any non-positive eigenvalue flags singularity.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd& ev = es.eigenvalues();
  double ld = 0.0;
  for (Index i = 0; i < N; ++i) {
    if (!(ev[i] > 0.0)) {
      out.singular = true;
      out.logdet = -std::numeric_limits<double>::infinity();
      return out;
    }
    ld += std::log(ev[i]);
  }
  out.logdet = ld;
  out.singular = false;
  return out;
}

double energy_E(const VandermondeMatrix& V, const Design& w) {
  w.check_nonnegative();
  const InformationMatrix info = gram_matrix(V, w);
  if (info.singular) return std::numeric_limits<double>::infinity();
  return -info.logdet / static_cast<double>(V.cols()) + w.mass();
}

double energy_F(const VandermondeMatrix& V, const SqrtDesign& z) {
  return energy_E(V, z.square());
}

}  // namespace optdesign
