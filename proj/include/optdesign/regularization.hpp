// Regularized energies F_eta and the eta-continuation solve.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "optdesign/flow.hpp"
#include "optdesign/projector.hpp"

namespace optdesign {

// F_eta(z) = F(z) + eta ||pi_K s(z)||^2; eta = 0 reproduces F exactly.
double energy_F_eta(const VandermondeMatrix& V, const SqrtDesign& z, double eta,
                    const KernelProjector& proj);
Eigen::VectorXd grad_F_eta(const VandermondeMatrix& V, const SqrtDesign& z,
                           double eta, const KernelProjector& proj);
Eigen::MatrixXd hess_F_eta(const VandermondeMatrix& V, const SqrtDesign& z,
                           double eta, const KernelProjector& proj,
                           Index dense_cap = kDefaultDenseCap);

struct EtaSchedule {
  double eta0 = 1e-2;
  std::function<double(double)> sigma = [](double eta) { return eta * eta; };
  int n_max_eta = 8;
  double toll_eta = 1e-8;

  void validate() const;
};

struct EtaRound {
  double eta = 0;
  FlowResult result;
  double energy_E_value = 0;  // E(s(z)) at the round's minimizer
  double step_from_previous = 0;
};

struct RegularizedResult {
  SqrtDesign z;
  double eta_final = 0;
  std::vector<EtaRound> rounds;
  bool converged = false;

  RegularizedResult() : z(Eigen::VectorXd()) {}
};

// Warm-started continuation: minimize F_{eta_n} by the adaptive flow, seed
// the next round with the minimizer, stop when consecutive minimizers are
// closer than toll_eta (or after n_max_eta rounds). Inner tolerances are
// relaxed to max(toll, 1e-2 eta_n) so early rounds do not over-solve.
RegularizedResult solve_regularized(const VandermondeMatrix& V,
                                    const Phi2Space& p2,
                                    const KernelProjector& proj,
                                    const SqrtDesign& z0,
                                    const EtaSchedule& sched,
                                    const FlowParams& p);

}  // namespace optdesign
