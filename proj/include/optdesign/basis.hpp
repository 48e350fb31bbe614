// Model bases: tensor Chebyshev polynomials restricted to total degree,
// or an explicit list of functions.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "optdesign/candidate_set.hpp"
#include "optdesign/errors.hpp"

namespace optdesign {

enum class BasisKind { kChebyshevTotalDegree, kExplicitFunctions };

using BasisFunction = std::function<double(const Eigen::RowVectorXd&)>;

// Multi-indices of total degree <= degree in `dim` variables, graded
// lexicographic order (degree-major). Size binom(dim + degree, dim).
std::vector<std::vector<int>> total_degree_multi_indices(int dim, int degree);

long binomial(int n, int k);

// Description of the model space Phi. For the Chebyshev kind the basis is
// the tensor Chebyshev product basis restricted to total degree, evaluated
// on coordinates affinely mapped from a reference box to [-1,1]^n; the box
// is the bounding box of the candidate set and is frozen at Vandermonde
// construction.
class BasisSpec {
 public:
  BasisSpec() = default;  // empty spec; fill through the factories below

  static BasisSpec chebyshev_total_degree(int degree, int dim) {
    if (degree < 0 || dim < 1) throw InvalidConfig("invalid basis degree/dimension");
    BasisSpec b;
    b.kind_ = BasisKind::kChebyshevTotalDegree;
    b.degree_ = degree;
    b.dim_ = dim;
    b.multi_indices_ = total_degree_multi_indices(dim, degree);
    return b;
  }

  static BasisSpec explicit_functions(std::vector<BasisFunction> fns,
                                      std::vector<std::string> names = {}) {
    if (fns.empty()) throw InvalidConfig("explicit basis must contain at least one function");
    BasisSpec b;
    b.kind_ = BasisKind::kExplicitFunctions;
    b.functions_ = std::move(fns);
    b.names_ = std::move(names);
    return b;
  }

  BasisKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  Index size() const {
    return kind_ == BasisKind::kChebyshevTotalDegree
               ? static_cast<Index>(multi_indices_.size())
               : static_cast<Index>(functions_.size());
  }
  const std::vector<std::vector<int>>& multi_indices() const { return multi_indices_; }

  bool has_box() const { return box_lo_.size() > 0; }
  void set_box(Eigen::RowVectorXd lo, Eigen::RowVectorXd hi) {
    box_lo_ = std::move(lo);
    box_hi_ = std::move(hi);
  }
  const Eigen::RowVectorXd& box_lo() const { return box_lo_; }
  const Eigen::RowVectorXd& box_hi() const { return box_hi_; }

  // Evaluate all basis functions at the rows of `points`: returns an
  // (points.rows() x N) matrix. Chebyshev kind requires a frozen box.
  Eigen::MatrixXd evaluate(const Eigen::MatrixXd& points) const;

 private:
  BasisKind kind_ = BasisKind::kChebyshevTotalDegree;
  int degree_ = 0;
  int dim_ = 0;
  std::vector<std::vector<int>> multi_indices_;
  std::vector<BasisFunction> functions_;
  std::vector<std::string> names_;
  Eigen::RowVectorXd box_lo_, box_hi_;
};

}  // namespace optdesign
