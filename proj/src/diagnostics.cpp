#include "optdesign/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <random>

#include "optdesign/errors.hpp"
#include "optdesign/flow.hpp"
#include "optdesign/information.hpp"

namespace optdesign {

KKTReport kkt_residual(const Design& w, const WeightedONB& onb) {
  const double N = static_cast<double>(onb.Vtilde.cols());
  const Eigen::VectorXd B = bergman(onb);
  const double thr = w.support_threshold();

  KKTReport rep;
  rep.residual_vector.resize(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    const double ratio = B[i] / N;
    if (w.w[i] > thr) {
      rep.residual_vector[i] = std::abs(1.0 - ratio);
      rep.support.push_back(i);
    } else {
      rep.residual_vector[i] = std::max(0.0, ratio - 1.0);
    }
  }
  rep.max_residual = rep.residual_vector.maxCoeff();
  rep.mass_error = std::abs(w.mass() - 1.0);
  return rep;
}

Design titterington_step(const Design& w, const WeightedONB& onb) {
  const double N = static_cast<double>(onb.Vtilde.cols());
  Eigen::VectorXd next = w.w.cwiseProduct(bergman(onb)) / N;
  next /= next.lpNorm<1>();
  return Design(next);
}

namespace {

// Bergman values through a Cholesky factor of G; cheaper than the two-pass
// QR but loses accuracy when cond(G) is large. Returns false on pivot
// breakdown.
bool bergman_cholesky(const VandermondeMatrix& V, const Eigen::VectorXd& w,
                      Eigen::VectorXd& B) {
  const Index N = V.cols();
  const Eigen::VectorXd s = w.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd A = s.asDiagonal() * V.values;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(G.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) return false;
  // B_i = || L^{-1} V_i^t ||^2
  Eigen::MatrixXd T = V.values.transpose();
  llt.matrixL().solveInPlace(T);
  B = T.colwise().squaredNorm();
  return true;
}

double kkt_max_from_B(const Eigen::VectorXd& w, const Eigen::VectorXd& B,
                      double N) {
  const double thr = kSupportThresholdFactor * w.maxCoeff();
  double worst = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    const double ratio = B[i] / N;
    const double r =
        w[i] > thr ? std::abs(1.0 - ratio) : std::max(0.0, ratio - 1.0);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

TitteringtonResult titterington_solve(const VandermondeMatrix& V, Design w0,
                                      double toll, long n_max,
                                      long record_every,
                                      double time_budget_seconds) {
  if (std::abs(w0.mass() - 1.0) > 1e-12)
    throw InvalidConfig("titterington_solve requires a unit-mass start");
  const double N = static_cast<double>(V.cols());
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  TitteringtonResult out;
  Eigen::VectorXd w = w0.w;
  Eigen::VectorXd B;
  for (long k = 1; k <= n_max; ++k) {
    if (!bergman_cholesky(V, w, B)) {
      // fall back to the robust two-pass basis
      const WeightedONB onb = weighted_onb(V, SqrtDesign(w.cwiseSqrt()));
      B = bergman(onb);
    }
    w = w.cwiseProduct(B) / N;
    w /= w.lpNorm<1>();
    out.iters = k;

    const bool record = (record_every > 0 && k % record_every == 0) || k == n_max;
    double kkt = -1.0;
    if (record || k % 256 == 0) {
      kkt = kkt_max_from_B(w, B, N);
      if (record) {
        const InformationMatrix gm = gram_matrix(V, Design(w));
        out.trace.push_back({k, kkt, gm.logdet, elapsed()});
      }
    }
    if (kkt >= 0 && kkt <= toll) {
      // confirm with the accurate basis before declaring convergence
      const WeightedONB onb = weighted_onb(V, SqrtDesign(w.cwiseSqrt()));
      const KKTReport confirm = kkt_residual(Design(w), onb);
      if (confirm.max_residual <= toll) {
        out.converged = true;
        break;
      }
    }
    if (time_budget_seconds > 0 && elapsed() > time_budget_seconds) break;
  }

  out.w = Design(w);
  const WeightedONB onb = weighted_onb(V, SqrtDesign(w.cwiseSqrt()));
  out.kkt = kkt_residual(out.w, onb);
  out.converged = out.converged || out.kkt.max_residual <= toll;
  return out;
}

std::string to_string(WellPosedness v) {
  switch (v) {
    case WellPosedness::kWellPosedEvidence: return "well_posed_evidence";
    case WellPosedness::kIllPosedCertified: return "ill_posed_certified";
    case WellPosedness::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

// Closed-form feasibility interval {t : w + t u >= 0} from componentwise
// ratios.
std::pair<double, double> feasibility_interval(const Eigen::VectorXd& w,
                                               const Eigen::VectorXd& u) {
  double t_max = std::numeric_limits<double>::infinity();
  double t_min = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < w.size(); ++i) {
    if (u[i] < 0) t_max = std::min(t_max, w[i] / -u[i]);
    if (u[i] > 0) t_min = std::max(t_min, -w[i] / u[i]);
  }
  return {t_min, t_max};
}

}  // namespace

WellPosednessCertificate wellposedness_probe(const VandermondeMatrix& V,
                                             const Design& w_out,
                                             const Phi2Space& p2,
                                             const KernelProjector& proj,
                                             int n_random, unsigned seed,
                                             Index dense_cap) {
  WellPosednessCertificate cert;
  if (proj.kernel_dim() == 0) {
    cert.verdict = WellPosedness::kWellPosedEvidence;
    return cert;
  }

  const Index M = w_out.size();
  const double scale = w_out.w.maxCoeff();
  const double thresh = 1e-8 * scale;

  std::vector<Eigen::VectorXd> candidates;

  // Kernel directions supported on supp(w_out): all feasibility constraints
  // then sit on strictly positive weights, so nonzero moves exist whenever
  // the support rows of V2 are linearly dependent.
  const std::vector<Index> sup = w_out.support();
  const Index s = static_cast<Index>(sup.size());
  if (s > 0) {
    Eigen::MatrixXd V2s(s, p2.N2);
    for (Index r = 0; r < s; ++r) V2s.row(r) = p2.V2.row(sup[r]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V2s, Eigen::ComputeFullU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thr = std::max(s, p2.N2) *
                       (sv.size() > 0 ? sv[0] : 0.0) * kUnitRoundoff;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv[i] > thr) ++rank;
    for (Index c = rank; c < s; ++c) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(M);
      for (Index r = 0; r < s; ++r) u[sup[r]] = svd.matrixU()(r, c);
      candidates.push_back(std::move(u));
    }
  }

  // Plain kernel directions (cheap only when the basis can be materialized).
  if (M <= dense_cap) {
    const Eigen::MatrixXd Z = proj.kernel_basis(dense_cap);
    const Index take = std::min<Index>(Z.cols(), 16);
    for (Index c = 0; c < take; ++c) candidates.push_back(Z.col(c));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int r = 0; r < n_random; ++r) {
      Eigen::VectorXd y(Z.cols());
      for (Index i = 0; i < y.size(); ++i) y[i] = gauss(rng);
      Eigen::VectorXd u = Z * y;
      u.normalize();
      candidates.push_back(std::move(u));
    }
  }

  double best_dist = 0.0;
  Eigen::VectorXd best_move;
  for (const auto& u : candidates) {
    const auto [t_min, t_max] = feasibility_interval(w_out.w, u);
    double t = 0.0;
    if (t_max > -t_min) t = std::isfinite(t_max) ? t_max : 1.0;
    else t = std::isfinite(t_min) ? t_min : -1.0;
    const double dist = std::abs(t) * u.norm();
    if (dist > thresh && dist > best_dist) {
      best_dist = dist;
      best_move = t * u;
    }
  }

  if (best_dist > 0) {
    // Validate the witness: moments preserved and E unchanged along the move.
    const double mom =
        (p2.V2.transpose() * best_move).norm() / p2.V2.norm();
    const double e0 = energy_E(V, w_out);
    const double e1 = energy_E(V, Design((w_out.w + best_move).cwiseMax(0.0)));
    cert.moment_residual = mom;
    cert.energy_gap = std::abs(e1 - e0);
    if (mom <= 1e-10 && cert.energy_gap <= 1e-9) {
      cert.verdict = WellPosedness::kIllPosedCertified;
      cert.witness = best_move;
      cert.witness_distance = best_dist;
      return cert;
    }
  }
  cert.verdict = WellPosedness::kInconclusive;
  return cert;
}

Eigen::VectorXd hessian_spectrum(const VandermondeMatrix& V, const SqrtDesign& z,
                                 Index dense_cap) {
  if (V.rows() > dense_cap) throw DenseCapExceeded(V.rows(), dense_cap);
  const WeightedONB onb = weighted_onb(V, z);
  const Eigen::MatrixXd H = hess_F(z, onb, dense_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

ErrorEstimate error_estimate(const VandermondeMatrix& V, const SqrtDesign& z,
                             Index dense_cap) {
  ErrorEstimate est;
  const WeightedONB onb = weighted_onb(V, z);
  const double N = static_cast<double>(V.cols());
  const Eigen::VectorXd B = bergman(onb);
  const Design w = z.square();
  const double thr = w.support_threshold();

  std::vector<Index> sup;
  for (Index i = 0; i < w.size(); ++i)
    if (w.w[i] > thr) sup.push_back(i);

  // (a) support-restricted Hessian of E positive definite
  const Index s = static_cast<Index>(sup.size());
  Eigen::MatrixXd Vs(s, onb.Vtilde.cols());
  for (Index r = 0; r < s; ++r) Vs.row(r) = onb.Vtilde.row(sup[r]);
  Eigen::MatrixXd Ks = Vs * Vs.transpose();
  Ks = Ks.cwiseProduct(Ks) / N;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks, Eigen::EigenvaluesOnly);
  est.restricted_lambda_min = es.eigenvalues().minCoeff();
  est.restricted_lambda_max = es.eigenvalues().maxCoeff();
  const bool hess_ok =
      est.restricted_lambda_min > 1e-8 * est.restricted_lambda_max;

  // (b) off-support gradient of E bounded away from zero
  double off_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < w.size(); ++i) {
    if (w.w[i] > thr) continue;
    off_min = std::min(off_min, std::abs(1.0 - B[i] / N));
  }
  est.off_support_grad_min = std::isfinite(off_min) ? off_min : 0.0;
  const bool grad_ok = sup.size() == static_cast<size_t>(w.size()) ||
                       est.off_support_grad_min > 1e-8;

  if (hess_ok && grad_ok && V.rows() <= dense_cap) {
    const Eigen::VectorXd spec = hessian_spectrum(V, z, dense_cap);
    est.exponent_case = LojasiewiczCase::kThetaHalf;
    est.C_hat = spec.minCoeff() / 2.0;
    const Eigen::VectorXd gF =
        (2.0 * z.z.array() * (1.0 - B.array() / N)).matrix();
    if (est.C_hat > 0) {
      est.bound = gF.norm() / est.C_hat;
      est.has_bound = true;
    }
  }
  return est;
}

RateFit fit_convergence_rate(const FlowTrace& trace) {
  RateFit fit;
  std::vector<double> res;
  for (const auto& s : trace.steps) {
    if (s.grad_inf > 1e-15) res.push_back(s.grad_inf);
  }
  if (res.size() < 4) return fit;
  const size_t tail = std::min<size_t>(res.size(), 11);
  std::vector<double> ratios;
  for (size_t i = res.size() - tail; i + 1 < res.size(); ++i)
    ratios.push_back(res[i + 1] / res[i]);
  fit.tail_ratios = ratios;

  double logsum = 0;
  for (double r : ratios) logsum += std::log(r);
  fit.mean_ratio = std::exp(logsum / static_cast<double>(ratios.size()));

  bool decreasing = true;
  for (size_t i = 0; i + 1 < ratios.size(); ++i)
    if (ratios[i + 1] >= ratios[i]) { decreasing = false; break; }
  bool banded = true;
  for (double r : ratios)
    if (!(r > 0 && r < 1)) { banded = false; break; }

  if (decreasing && ratios.back() < 0.5 * ratios.front())
    fit.kind = RateFit::Kind::kSuperlinear;
  else if (banded)
    fit.kind = RateFit::Kind::kLinear;
  else
    fit.kind = RateFit::Kind::kFlat;
  return fit;
}

}  // namespace optdesign
