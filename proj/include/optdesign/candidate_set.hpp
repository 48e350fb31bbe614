// Finite candidate point sets on which designs live.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "optdesign/errors.hpp"

namespace optdesign {

using Index = Eigen::Index;

// Unit roundoff (half the machine epsilon of double).
inline constexpr double kUnitRoundoff = 1.1102230246251565e-16;

// A finite set of M points in R^n, one point per row. Immutable after
// construction. Duplicate points are allowed; see duplicate_groups().
class CandidateSet {
 public:
  explicit CandidateSet(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1)
      throw InvalidConfig("candidate set must contain at least one point of dimension >= 1");
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::RowVectorXd point(Index i) const { return points_.row(i); }

  // Groups of indices holding bitwise-identical points (only groups of
  // size >= 2 are reported). Duplicates inflate M without changing the model.
  std::vector<std::vector<Index>> duplicate_groups() const;

  // Componentwise bounding box, rows (lo, hi).
  std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> bounding_box() const {
    return {points_.colwise().minCoeff(), points_.colwise().maxCoeff()};
  }

 private:
  Eigen::MatrixXd points_;
};

}  // namespace optdesign
