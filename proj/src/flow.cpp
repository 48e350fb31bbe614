#include "optdesign/flow.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "optdesign/diagnostics.hpp"
#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

bool stopping_satisfied(const Eigen::VectorXd& grad_g, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& z_old, double eps, double tau) {
  // grad g = grad F + (z - z_old)/tau cannot be evaluated below its rounding
  // floor: a few ulps of (1 + 1/tau) scale. Components whose residual sits
  // at that floor are treated as stationary (the degenerate-denominator rule).
  const double floor = 16.0 * kUnitRoundoff *
                       std::max(1.0, z.lpNorm<Eigen::Infinity>()) *
                       (1.0 + 1.0 / tau);
  for (Index i = 0; i < z.size(); ++i) {
    const double dz = z[i] - z_old[i];
    if (std::abs(grad_g[i]) > std::max(eps * std::abs(dz), floor)) return false;
  }
  for (Index i = 0; i < z.size(); ++i) {
    if (sign_of(z[i]) != sign_of(z_old[i])) return false;
  }
  return true;
}

// Jacobi-preconditioned conjugate gradients on a matrix-free SPD operator.
template <typename Apply>
Eigen::VectorXd pcg_solve(const Apply& apply, const Eigen::VectorXd& diag,
                          const Eigen::VectorXd& rhs, Index max_iters,
                          double rtol) {
  const Eigen::VectorXd inv_diag =
      diag.cwiseMax(1e-300).cwiseInverse();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd s = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = s;
  double rs = r.dot(s);
  const double stop2 = std::pow(rtol * rhs.norm(), 2);
  if (rhs.squaredNorm() == 0.0) return x;
  for (Index it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd Ap = apply(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw IndefiniteHessian("negative curvature in CG solve");
    const double a = rs / pAp;
    x += a * p;
    r -= a * Ap;
    if (r.squaredNorm() <= stop2) return x;
    s = inv_diag.cwiseProduct(r);
    const double rs_new = r.dot(s);
    p = s + (rs_new / rs) * p;
    rs = rs_new;
  }
  throw IndefiniteHessian("conjugate-gradient solve stalled");
}

}  // namespace

void FlowParams::validate() const {
  if (!(tau0 > 0)) throw InvalidConfig("tau0 must be positive");
  if (!(alpha >= 1)) throw InvalidConfig("alpha must be >= 1");
  if (!(beta > 0 && beta <= 1)) throw InvalidConfig("beta must be in (0,1]");
  if (!(eps > 0)) throw InvalidConfig("eps must be positive");
  if (r_max < 1) throw InvalidConfig("r_max must be >= 1");
  if (n_step < 1) throw InvalidConfig("n_step must be >= 1");
  if (max_restarts < 0) throw InvalidConfig("max_restarts must be >= 0");
}

double FlowParams::effective_toll(Index M) const {
  return toll > 0 ? toll : 1e-13 * std::sqrt(static_cast<double>(M));
}

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::kConverged: return "converged";
    case FlowStatus::kMaxStepsReached: return "max_steps_reached";
    case FlowStatus::kRestartBudgetExhausted: return "restart_budget_exhausted";
  }
  return "unknown";
}

ObjectiveEval DesignObjective::eval(const SqrtDesign& z) const {
  ObjectiveEval ev;
  ev.onb = weighted_onb(*V_, z);
  ev.B = bergman(ev.onb);
  const double N = static_cast<double>(V_->cols());
  ev.value = -ev.onb.logdet_G / N + z.z.squaredNorm();
  ev.grad = (2.0 * z.z.array() * (1.0 - ev.B.array() / N)).matrix();
  if (regularized()) {
    const Eigen::VectorXd w = z.z.array().square().matrix();
    ev.pi_w = proj_->apply(w);
    ev.value += eta_ * ev.pi_w.squaredNorm();
    ev.grad += 4.0 * eta_ * z.z.cwiseProduct(ev.pi_w);
  }
  return ev;
}

Eigen::VectorXd DesignObjective::newton_solve(const SqrtDesign& z,
                                              const ObjectiveEval& ev,
                                              double tau,
                                              const Eigen::VectorXd& rhs) const {
  const Index M = z.size();
  const double N = static_cast<double>(V_->cols());

  if (M <= dense_cap_) {
    Eigen::MatrixXd H = ev.onb.Vtilde * ev.onb.Vtilde.transpose();
    H = H.cwiseProduct(H) * (4.0 / N);
    H = (z.z * z.z.transpose()).cwiseProduct(H);
    H.diagonal() += (2.0 * (1.0 - ev.B.array() / N)).matrix();
    if (regularized()) {
      H.diagonal() += 4.0 * eta_ * ev.pi_w;
      // 8 eta diag(z) (I - Q Q^t) diag(z)
      H.diagonal() += (8.0 * eta_ * z.z.array().square()).matrix();
      const Eigen::MatrixXd ZQ = z.z.asDiagonal() * proj_->range_basis();
      H.selfadjointView<Eigen::Lower>().rankUpdate(ZQ, -8.0 * eta_);
      H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
    }
    H.diagonal().array() += 1.0 / tau;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
      throw IndefiniteHessian();
    return llt.solve(rhs);
  }

  KernelHessianOperator khess(z, ev.onb);
  Eigen::VectorXd diag = khess.diag_hess_F();
  diag.array() += 1.0 / tau;
  if (regularized()) {
    diag += 4.0 * eta_ * ev.pi_w;
    diag += (8.0 * eta_ * z.z.array().square() * proj_->diagonal().array())
                .matrix();
  }
  const bool reg = regularized();
  auto apply = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd out = khess.apply_hess_F(u);
    out += u / tau;
    if (reg) {
      out += 4.0 * eta_ * ev.pi_w.cwiseProduct(u);
      out += 8.0 * eta_ * z.z.cwiseProduct(proj_->apply(z.z.cwiseProduct(u)));
    }
    return out;
  };
  const Index max_iters = std::max<Index>(400, M / 8);
  return pcg_solve(apply, diag, rhs, max_iters, 1e-12);
}

NewtonOutcome newton_inner(const DesignObjective& obj, const SqrtDesign& z_old,
                           double tau, const FlowParams& p) {
  NewtonOutcome out;
  out.z = z_old;
  out.eval = obj.eval(out.z);
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd grad_g = out.eval.grad + (out.z.z - z_old.z) / tau;
    if (stopping_satisfied(grad_g, out.z.z, z_old.z, p.eps, tau)) {
      out.iters = iter;
      out.converged = true;
      return out;
    }
    if (iter == p.r_max) {
      out.iters = iter;
      out.converged = false;
      return out;
    }
    const Eigen::VectorXd step = obj.newton_solve(out.z, out.eval, tau, grad_g);
    out.z.z -= step;
    // Components that start at zero stay at zero; clean solver roundoff.
    const double zero_scale =
        kUnitRoundoff * out.z.z.lpNorm<Eigen::Infinity>();
    for (Index i = 0; i < out.z.z.size(); ++i) {
      if (z_old.z[i] == 0.0 && std::abs(out.z.z[i]) < zero_scale)
        out.z.z[i] = 0.0;
    }
    out.eval = obj.eval(out.z);
  }
}

namespace {

FlowResult run_flow(const DesignObjective& obj, const SqrtDesign& z0,
                    const FlowParams& p) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  const double toll = p.effective_toll(z0.size());
  FlowResult out;
  out.z = z0;

  ObjectiveEval ev = obj.eval(out.z);
  double res = ev.grad.lpNorm<Eigen::Infinity>();
  if (res == 0.0) throw ZeroGradientStart();
  if (res <= toll) {
    out.converged = true;
    out.status = FlowStatus::kConverged;
    out.grad_inf = res;
    return out;
  }

  double f_cur = ev.value;
  double tau = p.tau0;

  for (int k = 1; k <= p.n_step; ++k) {
    int restarts = 0;
    NewtonOutcome nr;
    double tau_used = tau;
    while (true) {
      tau_used = tau;
      bool accepted = false;
      try {
        nr = newton_inner(obj, out.z, tau, p);
        if (nr.converged) {
          const double dz2 = (nr.z.z - out.z.z).squaredNorm();
          const double slack = p.eps * dz2 / tau +
                               64.0 * kUnitRoundoff * std::max(1.0, std::abs(f_cur));
          accepted = nr.eval.value <= f_cur + slack;
        }
      } catch (const IndefiniteHessian&) {
      } catch (const SupportRankDeficient&) {
      }
      if (accepted) break;
      if (restarts >= p.max_restarts) {
        out.status = FlowStatus::kRestartBudgetExhausted;
        out.converged = false;
        out.grad_inf = res;
        return out;
      }
      ++restarts;
      tau *= p.beta;
    }

    const double step_norm = (nr.z.z - out.z.z).norm();
    out.z = nr.z;
    ev = nr.eval;
    f_cur = ev.value;
    res = ev.grad.lpNorm<Eigen::Infinity>();

    const KKTReport kkt = kkt_residual(out.z.square(), ev.onb);
    out.trace.steps.push_back({k, tau_used, step_norm, res, kkt.max_residual,
                               nr.iters, restarts, f_cur, elapsed()});

    tau *= p.alpha;
    if (res <= toll) {
      out.status = FlowStatus::kConverged;
      out.converged = true;
      out.grad_inf = res;
      return out;
    }
  }
  out.status = FlowStatus::kMaxStepsReached;
  out.converged = false;
  out.grad_inf = res;
  return out;
}

}  // namespace

FlowResult solve_fixed_step(const DesignObjective& obj, const SqrtDesign& z0,
                            const FlowParams& p) {
  if (p.alpha != 1.0 || p.beta != 1.0)
    throw InvalidConfig("solve_fixed_step requires alpha == beta == 1");
  return run_flow(obj, z0, p);
}

FlowResult solve_fixed_step(const VandermondeMatrix& V, const SqrtDesign& z0,
                            const FlowParams& p) {
  return solve_fixed_step(DesignObjective(V, p.dense_cap), z0, p);
}

FlowResult solve_adaptive(const DesignObjective& obj, const SqrtDesign& z0,
                          const FlowParams& p) {
  return run_flow(obj, z0, p);
}

FlowResult solve_adaptive(const VandermondeMatrix& V, const SqrtDesign& z0,
                          const FlowParams& p) {
  return solve_adaptive(DesignObjective(V, p.dense_cap), z0, p);
}

}  // namespace optdesign
