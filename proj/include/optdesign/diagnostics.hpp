// KKT residuals, the Titterington multiplicative baseline, well-posedness
// probe, Hessian spectrum, and the residual-based error estimate.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "optdesign/calculus.hpp"
#include "optdesign/design.hpp"
#include "optdesign/onb.hpp"
#include "optdesign/projector.hpp"

namespace optdesign {

struct FlowTrace;  // defined in flow.hpp

struct KKTReport {
  Eigen::VectorXd residual_vector;  // >= 0 componentwise
  double max_residual = 0;
  std::vector<Index> support;
  double mass_error = 0;  // | ||w||_1 - 1 |
};

// res_i = |1 - B_i/N| on the support, max{0, B_i/N - 1} off it.
KKTReport kkt_residual(const Design& w, const WeightedONB& onb);

// One multiplicative update w_i <- w_i B_i / N, renormalized to unit mass.
Design titterington_step(const Design& w, const WeightedONB& onb);

struct TitteringtonStep {
  long iter = 0;
  double kkt = 0;
  double logdet = 0;
  double seconds = 0;
};

struct TitteringtonResult {
  Design w;
  KKTReport kkt;
  std::vector<TitteringtonStep> trace;
  bool converged = false;
  long iters = 0;

  TitteringtonResult() : w(Eigen::VectorXd()) {}
};

// Iterates the multiplicative update until the KKT residual drops below
// `toll` or `n_max` iterations elapse. The iteration computes Bergman values
// through a Cholesky factor of G for speed; the reported KKT residual is
// confirmed through the two-pass QR basis. `record_every` controls trace
// density; `time_budget_seconds` (if > 0) stops the loop on wall clock.
TitteringtonResult titterington_solve(const VandermondeMatrix& V, Design w0,
                                      double toll, long n_max,
                                      long record_every = 100,
                                      double time_budget_seconds = -1);

enum class WellPosedness { kWellPosedEvidence, kIllPosedCertified, kInconclusive };

std::string to_string(WellPosedness v);

struct WellPosednessCertificate {
  WellPosedness verdict = WellPosedness::kInconclusive;
  std::optional<Eigen::VectorXd> witness;  // t * u with w + t u >= 0
  double witness_distance = 0;             // ||t u||_2
  double moment_residual = 0;              // ||V2^t u|| / ||V2||_F
  double energy_gap = 0;                   // |E(w + tu) - E(w)|
};

// Searches for a nonzero kernel direction u with a feasible move
// w_out + t u >= 0. Directions tried: the null space of V2 restricted to the
// support rows (feasible moves live there when off-support weights vanish),
// kernel basis columns, and random unit combinations. A feasible nonzero
// move certifies ill-posedness; d = 0 certifies well-posedness; otherwise
// the probe is inconclusive.
WellPosednessCertificate wellposedness_probe(const VandermondeMatrix& V,
                                             const Design& w_out,
                                             const Phi2Space& p2,
                                             const KernelProjector& proj,
                                             int n_random = 16,
                                             unsigned seed = 7,
                                             Index dense_cap = kDefaultDenseCap);

// Sorted (ascending) eigenvalues of Hess F(z). Throws DenseCapExceeded.
Eigen::VectorXd hessian_spectrum(const VandermondeMatrix& V, const SqrtDesign& z,
                                 Index dense_cap = kDefaultDenseCap);

enum class LojasiewiczCase { kThetaHalf, kUnknown };

struct ErrorEstimate {
  LojasiewiczCase exponent_case = LojasiewiczCase::kUnknown;
  double C_hat = 0;      // estimated constant, lambda_min(Hess F)/2
  double bound = 0;      // ||grad F||_2 / C_hat
  bool has_bound = false;
  double restricted_lambda_min = 0;
  double restricted_lambda_max = 0;
  double off_support_grad_min = 0;
};

// Heuristic a-posteriori estimate: theta = 1/2 is claimed only when the
// support-restricted Hessian of E is positive definite and the off-support
// gradient of E is bounded away from zero. The bound is an estimate, not a
// certificate.
ErrorEstimate error_estimate(const VandermondeMatrix& V, const SqrtDesign& z,
                             Index dense_cap = kDefaultDenseCap);

struct RateFit {
  enum class Kind { kLinear, kSuperlinear, kFlat, kUndetermined };
  Kind kind = Kind::kUndetermined;
  double mean_ratio = 0;             // geometric mean of tail residual ratios
  std::vector<double> tail_ratios;   // successive ||grad||_inf ratios
};

// Classifies the tail of a residual trace (last up-to-10 accepted steps
// above the roundoff floor): decreasing ratios flag superlinear decay, a
// ratio band inside (0,1) flags linear decay.
RateFit fit_convergence_rate(const FlowTrace& trace);

}  // namespace optdesign
