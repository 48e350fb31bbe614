// Caratheodory-Tchakaloff support compression via nonnegative least squares.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "optdesign/design.hpp"
#include "optdesign/projector.hpp"

namespace optdesign {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0;
  int iterations = 0;
};

// Lawson-Hanson active-set solver for min ||A x - b||_2 over x >= 0.
// Deterministic: ties in the gradient selection break toward the smallest
// index.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                int max_iterations = -1);

struct CompressedDesign {
  std::vector<Index> indices;   // retained candidate indices, ascending
  Eigen::VectorXd weights;      // positive weights on those indices
  double moment_residual = 0;   // ||V2^t w_c - m||_inf
  bool compressed = false;      // false: guard skipped, design returned as-is

  Design as_full_design(Index M) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(M);
    for (size_t k = 0; k < indices.size(); ++k) w[indices[k]] = weights[k];
    return Design(std::move(w));
  }
};

// Replaces w by a design with the same Phi^2-moments supported on at most N2
// points. Compression is attempted only when |support(w)| >= N2; otherwise
// the design is returned unchanged. Throws MomentMismatch when the final
// residual exceeds 1e-8 ||m||_inf.
CompressedDesign compress(const Design& w, const Phi2Space& p2);

}  // namespace optdesign
