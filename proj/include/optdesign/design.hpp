// Design weight vectors and their signed square roots.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "optdesign/candidate_set.hpp"
#include "optdesign/errors.hpp"

namespace optdesign {

// Reported support keeps weights above this fraction of the largest one.
inline constexpr double kSupportThresholdFactor = 1e-12;

struct Design {
  Eigen::VectorXd w;

  explicit Design(Eigen::VectorXd weights) : w(std::move(weights)) {}

  Index size() const { return w.size(); }
  double mass() const { return w.lpNorm<1>(); }

  double support_threshold() const {
    return kSupportThresholdFactor * w.maxCoeff();
  }

  std::vector<Index> support() const {
    const double thr = support_threshold();
    std::vector<Index> idx;
    for (Index i = 0; i < w.size(); ++i)
      if (w[i] > thr) idx.push_back(i);
    return idx;
  }

  void check_nonnegative() const {
    for (Index i = 0; i < w.size(); ++i)
      if (w[i] < 0.0) throw NegativeWeight(i, w[i]);
  }

  static Design uniform(Index M) {
    return Design(Eigen::VectorXd::Constant(M, 1.0 / static_cast<double>(M)));
  }
};

// Signed square-root coordinates: the coordinate square map s(z) = z.^2
// turns a SqrtDesign into a valid Design.
struct SqrtDesign {
  Eigen::VectorXd z;

  explicit SqrtDesign(Eigen::VectorXd values) : z(std::move(values)) {}

  Index size() const { return z.size(); }
  Design square() const { return Design(z.array().square().matrix()); }

  // Uniform design w = 1/M, i.e. z_i = 1/sqrt(M).
  static SqrtDesign uniform(Index M) {
    return SqrtDesign(
        Eigen::VectorXd::Constant(M, 1.0 / std::sqrt(static_cast<double>(M))));
  }

  static SqrtDesign from_design(const Design& d) {
    d.check_nonnegative();
    return SqrtDesign(d.w.array().sqrt().matrix());
  }
};

}  // namespace optdesign
