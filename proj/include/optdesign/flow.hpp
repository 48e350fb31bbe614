// Backward-Euler variational steps for the gradient flow of F (and F_eta),
// with the sign-preserving Newton stopping rule and adaptive time steps.
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "optdesign/calculus.hpp"
#include "optdesign/information.hpp"
#include "optdesign/onb.hpp"
#include "optdesign/projector.hpp"

namespace optdesign {

struct FlowParams {
  double tau0 = 1.0;
  double alpha = 1.0;      // step growth on accepted steps (>= 1)
  double beta = 1.0;       // step shrink on restarts (in (0,1]; 1 = fixed step)
  double eps = 1e-4;       // Newton stopping ratio
  int r_max = 5;           // Newton iterations per step
  int n_step = 500;        // outer step cap
  double toll = -1.0;      // residual tolerance; <= 0 means 1e-13 * sqrt(M)
  int max_restarts = 40;
  Index dense_cap = kDefaultDenseCap;

  void validate() const;
  double effective_toll(Index M) const;
};

enum class FlowStatus { kConverged, kMaxStepsReached, kRestartBudgetExhausted };

std::string to_string(FlowStatus s);

struct FlowStep {
  int k = 0;
  double tau = 0;          // time step that produced the accepted state
  double step_norm = 0;    // ||z^{k+1} - z^k||_2
  double grad_inf = 0;     // ||grad of the objective||_inf at z^{k+1}
  double kkt_residual = 0;
  int newton_iters = 0;
  int restarts = 0;
  double energy = 0;       // objective value at z^{k+1} (not serialized)
  double seconds = 0;      // elapsed wall clock since solve start
};

struct FlowTrace {
  std::vector<FlowStep> steps;
};

struct FlowResult {
  SqrtDesign z;
  FlowTrace trace;
  FlowStatus status = FlowStatus::kMaxStepsReached;
  bool converged = false;
  double grad_inf = 0;

  FlowResult() : z(Eigen::VectorXd()) {}
};

// One evaluation of the objective (F or F_eta) at a point.
struct ObjectiveEval {
  WeightedONB onb;
  Eigen::VectorXd B;
  double value = 0;
  Eigen::VectorXd grad;
  Eigen::VectorXd pi_w;  // pi_K(s(z)), empty when unregularized
};

// The flow objective: F(z), or F_eta(z) = F(z) + eta ||pi_K s(z)||^2 when a
// projector and eta > 0 are supplied. Pure functions over immutable inputs.
class DesignObjective {
 public:
  explicit DesignObjective(const VandermondeMatrix& V,
                           Index dense_cap = kDefaultDenseCap)
      : V_(&V), dense_cap_(dense_cap) {}

  DesignObjective(const VandermondeMatrix& V, double eta,
                  const KernelProjector& proj,
                  Index dense_cap = kDefaultDenseCap)
      : V_(&V), eta_(eta), proj_(&proj), dense_cap_(dense_cap) {}

  const VandermondeMatrix& vandermonde() const { return *V_; }
  double eta() const { return eta_; }
  bool regularized() const {
    return eta_ > 0 && proj_ != nullptr && proj_->kernel_dim() > 0;
  }
  Index size() const { return V_->rows(); }

  ObjectiveEval eval(const SqrtDesign& z) const;  // throws SupportRankDeficient

  // Solves (Hess obj(z) + I/tau) step = rhs; SPD solve only.
  // Throws IndefiniteHessian when the factorization (or the matrix-free
  // conjugate-gradient solve) reports a non-SPD system.
  Eigen::VectorXd newton_solve(const SqrtDesign& z, const ObjectiveEval& ev,
                               double tau, const Eigen::VectorXd& rhs) const;

 private:
  const VandermondeMatrix* V_;
  double eta_ = 0;
  const KernelProjector* proj_ = nullptr;
  Index dense_cap_ = kDefaultDenseCap;
};

struct NewtonOutcome {
  SqrtDesign z;
  ObjectiveEval eval;
  int iters = 0;
  bool converged = false;

  NewtonOutcome() : z(Eigen::VectorXd()) {}
};

// Newton iteration for the step objective g(z) = obj(z) + |z - z_old|^2/(2 tau),
// started at z_old. Converged when both |d_i g| <= eps |z_i - z_old_i| for
// all i and signs are preserved (components at zero stay at zero).
NewtonOutcome newton_inner(const DesignObjective& obj, const SqrtDesign& z_old,
                           double tau, const FlowParams& p);

// Fixed time step (requires alpha == beta == 1).
FlowResult solve_fixed_step(const DesignObjective& obj, const SqrtDesign& z0,
                            const FlowParams& p);
FlowResult solve_fixed_step(const VandermondeMatrix& V, const SqrtDesign& z0,
                            const FlowParams& p);

// Adaptive time step: grow tau by alpha on acceptance, shrink by beta and
// restart the step on failure.
FlowResult solve_adaptive(const DesignObjective& obj, const SqrtDesign& z0,
                          const FlowParams& p);
FlowResult solve_adaptive(const VandermondeMatrix& V, const SqrtDesign& z0,
                          const FlowParams& p);

}  // namespace optdesign
