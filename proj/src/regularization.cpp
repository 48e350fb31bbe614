#include "optdesign/regularization.hpp"

#include <cmath>

#include "optdesign/errors.hpp"
#include "optdesign/information.hpp"

namespace optdesign {

double energy_F_eta(const VandermondeMatrix& V, const SqrtDesign& z, double eta,
                    const KernelProjector& proj) {
  if (eta < 0) throw InvalidConfig("eta must be nonnegative");
  double value = energy_F(V, z);
  if (eta > 0 && proj.kernel_dim() > 0) {
    const Eigen::VectorXd w = z.z.array().square().matrix();
    value += eta * proj.apply(w).squaredNorm();
  }
  return value;
}

Eigen::VectorXd grad_F_eta(const VandermondeMatrix& V, const SqrtDesign& z,
                           double eta, const KernelProjector& proj) {
  const WeightedONB onb = weighted_onb(V, z);
  Eigen::VectorXd g = grad_F(z, onb);
  if (eta > 0 && proj.kernel_dim() > 0) {
    const Eigen::VectorXd w = z.z.array().square().matrix();
    g += 4.0 * eta * z.z.cwiseProduct(proj.apply(w));
  }
  return g;
}

Eigen::MatrixXd hess_F_eta(const VandermondeMatrix& V, const SqrtDesign& z,
                           double eta, const KernelProjector& proj,
                           Index dense_cap) {
  const WeightedONB onb = weighted_onb(V, z);
  Eigen::MatrixXd H = hess_F(z, onb, dense_cap);
  if (eta > 0 && proj.kernel_dim() > 0) {
    const Eigen::VectorXd w = z.z.array().square().matrix();
    H.diagonal() += 4.0 * eta * proj.apply(w);
    H.diagonal() += (8.0 * eta * z.z.array().square()).matrix();
    const Eigen::MatrixXd ZQ = z.z.asDiagonal() * proj.range_basis();
    H -= 8.0 * eta * ZQ * ZQ.transpose();
  }
  return H;
}

void EtaSchedule::validate() const {
  if (!(eta0 > 0)) throw InvalidConfig("eta0 must be positive");
  if (n_max_eta < 1) throw InvalidConfig("n_max_eta must be >= 1");
  if (!(toll_eta > 0)) throw InvalidConfig("toll_eta must be positive");
}

RegularizedResult solve_regularized(const VandermondeMatrix& V,
                                    const Phi2Space& p2,
                                    const KernelProjector& proj,
                                    const SqrtDesign& z0,
                                    const EtaSchedule& sched,
                                    const FlowParams& p) {
  (void)p2;
  sched.validate();
  p.validate();

  RegularizedResult out;
  out.z = z0;
  double eta = sched.eta0;
  const double base_toll = p.effective_toll(z0.size());

  for (int n = 0; n < sched.n_max_eta; ++n) {
    FlowParams pn = p;
    pn.toll = std::max(base_toll, 1e-2 * eta);
    DesignObjective obj(V, eta, proj, p.dense_cap);
    FlowResult r = solve_adaptive(obj, out.z, pn);

    EtaRound round;
    round.eta = eta;
    round.step_from_previous = (r.z.z - out.z.z).norm();
    round.energy_E_value = energy_F(V, r.z);
    out.z = r.z;
    out.converged = r.converged;
    out.eta_final = eta;
    round.result = std::move(r);
    out.rounds.push_back(std::move(round));

    // Trivial kernel: the penalty is inactive for every eta, one round
    // already solves the original problem.
    if (proj.kernel_dim() == 0) break;

    if (n >= 1 && out.rounds.back().step_from_previous <= sched.toll_eta) break;
    eta = sched.sigma(eta);
    if (!(eta > 0) || !std::isfinite(eta))
      throw InvalidConfig("eta schedule left the positive range");
  }
  return out;
}

}  // namespace optdesign
