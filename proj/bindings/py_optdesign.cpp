// Python bindings for the main solver operations.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optdesign/compression.hpp"
#include "optdesign/diagnostics.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/experiment.hpp"
#include "optdesign/generators.hpp"
#include "optdesign/information.hpp"
#include "optdesign/regularization.hpp"

namespace py = pybind11;
namespace od = optdesign;

namespace {

od::VandermondeMatrix make_vandermonde(const Eigen::MatrixXd& points, int degree) {
  od::CandidateSet X(points);
  return od::build_vandermonde(
      X, od::BasisSpec::chebyshev_total_degree(degree, static_cast<int>(X.dim())));
}

od::FlowParams flow_params(double tau0, double alpha, double beta, double eps,
                           int r_max, int n_step, double toll, int max_restarts) {
  od::FlowParams p;
  p.tau0 = tau0;
  p.alpha = alpha;
  p.beta = beta;
  p.eps = eps;
  p.r_max = r_max;
  p.n_step = n_step;
  p.toll = toll;
  p.max_restarts = max_restarts;
  return p;
}

py::dict trace_to_dict(const od::FlowTrace& trace) {
  const size_t n = trace.steps.size();
  Eigen::VectorXd tau(n), step_norm(n), grad_inf(n), kkt(n);
  Eigen::VectorXi iters(n), restarts(n);
  for (size_t i = 0; i < n; ++i) {
    tau[i] = trace.steps[i].tau;
    step_norm[i] = trace.steps[i].step_norm;
    grad_inf[i] = trace.steps[i].grad_inf;
    kkt[i] = trace.steps[i].kkt_residual;
    iters[i] = trace.steps[i].newton_iters;
    restarts[i] = trace.steps[i].restarts;
  }
  py::dict d;
  d["tau"] = tau;
  d["step_norm"] = step_norm;
  d["grad_inf"] = grad_inf;
  d["kkt_residual"] = kkt;
  d["newton_iters"] = iters;
  d["restarts"] = restarts;
  return d;
}

py::dict flow_result_to_dict(const od::FlowResult& r) {
  py::dict d;
  d["w"] = r.z.square().w;
  d["z"] = r.z.z;
  d["converged"] = r.converged;
  d["status"] = od::to_string(r.status);
  d["grad_inf"] = r.grad_inf;
  d["trace"] = trace_to_dict(r.trace);
  return d;
}

}  // namespace

PYBIND11_MODULE(_optdesign, m) {
  m.doc() = "D-optimal designs on finite candidate sets";

  py::register_exception<od::Error>(m, "OptdesignError");

  m.def("chebyshev_lobatto_grid",
        [](int deg, int n) { return od::gen_chebyshev_lobatto_grid(deg, n).points(); },
        py::arg("deg"), py::arg("n") = 2);
  m.def("uniform_cloud",
        [](od::Index M, std::uint64_t seed, int n) {
          return od::gen_uniform_cloud(M, seed, n).points();
        },
        py::arg("m"), py::arg("seed"), py::arg("n") = 2);
  m.def("gaussian_cloud",
        [](od::Index M, std::uint64_t seed, int n) {
          return od::gen_gaussian_cloud(M, seed, n).points();
        },
        py::arg("m"), py::arg("seed"), py::arg("n") = 2);
  m.def("disk_admissible_mesh",
        [](int deg) { return od::gen_disk_admissible_mesh(deg).points(); },
        py::arg("mesh_degree"));

  m.def("vandermonde",
        [](const Eigen::MatrixXd& points, int degree) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          return py::make_tuple(V.values, V.rank);
        },
        py::arg("points"), py::arg("degree"),
        "Chebyshev total-degree Vandermonde matrix and its numerical rank");

  m.def("logdet",
        [](const Eigen::MatrixXd& points, int degree, const Eigen::VectorXd& w) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          return od::gram_matrix(V, od::Design(w)).logdet;
        },
        py::arg("points"), py::arg("degree"), py::arg("w"));

  m.def("energy",
        [](const Eigen::MatrixXd& points, int degree, const Eigen::VectorXd& w) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          return od::energy_E(V, od::Design(w));
        },
        py::arg("points"), py::arg("degree"), py::arg("w"));

  m.def("bergman",
        [](const Eigen::MatrixXd& points, int degree, const Eigen::VectorXd& w) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          return od::bergman(
              od::weighted_onb(V, od::SqrtDesign::from_design(od::Design(w))));
        },
        py::arg("points"), py::arg("degree"), py::arg("w"));

  m.def("kkt_residual",
        [](const Eigen::MatrixXd& points, int degree, const Eigen::VectorXd& w) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::Design d(w);
          const od::KKTReport rep =
              od::kkt_residual(d, od::weighted_onb(V, od::SqrtDesign::from_design(d)));
          py::dict out;
          out["residual_vector"] = rep.residual_vector;
          out["max_residual"] = rep.max_residual;
          out["support"] = rep.support;
          out["mass_error"] = rep.mass_error;
          return out;
        },
        py::arg("points"), py::arg("degree"), py::arg("w"));

  m.def("solve_fixed_step",
        [](const Eigen::MatrixXd& points, int degree, double tau0, double eps,
           int r_max, int n_step, double toll) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::FlowParams p =
              flow_params(tau0, 1.0, 1.0, eps, r_max, n_step, toll, 10);
          return flow_result_to_dict(
              od::solve_fixed_step(V, od::SqrtDesign::uniform(V.rows()), p));
        },
        py::arg("points"), py::arg("degree"), py::arg("tau0") = 1.0,
        py::arg("eps") = 1e-4, py::arg("r_max") = 50, py::arg("n_step") = 500,
        py::arg("toll") = -1.0);

  m.def("solve_adaptive",
        [](const Eigen::MatrixXd& points, int degree, double tau0, double alpha,
           double beta, double eps, int r_max, int n_step, double toll,
           int max_restarts) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::FlowParams p = flow_params(tau0, alpha, beta, eps, r_max,
                                               n_step, toll, max_restarts);
          return flow_result_to_dict(
              od::solve_adaptive(V, od::SqrtDesign::uniform(V.rows()), p));
        },
        py::arg("points"), py::arg("degree"), py::arg("tau0") = 1.0,
        py::arg("alpha") = 1.15, py::arg("beta") = 1.0 / 1.15,
        py::arg("eps") = 1e-4, py::arg("r_max") = 5, py::arg("n_step") = 500,
        py::arg("toll") = -1.0, py::arg("max_restarts") = 10);

  m.def("solve_regularized",
        [](const Eigen::MatrixXd& points, int degree, double eta0, int n_max_eta,
           double toll_eta, double tau0, double alpha, double beta, double eps,
           int r_max, int n_step, double toll) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::Phi2Space p2 = od::build_phi2(V);
          const od::KernelProjector proj = od::kernel_projector(p2);
          od::EtaSchedule sched;
          sched.eta0 = eta0;
          sched.n_max_eta = n_max_eta;
          sched.toll_eta = toll_eta;
          const od::FlowParams p =
              flow_params(tau0, alpha, beta, eps, r_max, n_step, toll, 10);
          const od::RegularizedResult rr =
              od::solve_regularized(V, p2, proj, od::SqrtDesign::uniform(V.rows()),
                                    sched, p);
          py::dict d;
          d["w"] = rr.z.square().w;
          d["converged"] = rr.converged;
          d["eta_final"] = rr.eta_final;
          d["rounds"] = rr.rounds.size();
          return d;
        },
        py::arg("points"), py::arg("degree"), py::arg("eta0") = 1e-2,
        py::arg("n_max_eta") = 8, py::arg("toll_eta") = 1e-8,
        py::arg("tau0") = 1.0, py::arg("alpha") = 1.5, py::arg("beta") = 1.0 / 1.5,
        py::arg("eps") = 1e-4, py::arg("r_max") = 5, py::arg("n_step") = 300,
        py::arg("toll") = -1.0);

  m.def("titterington_solve",
        [](const Eigen::MatrixXd& points, int degree, double toll, long n_max) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::TitteringtonResult tr = od::titterington_solve(
              V, od::Design::uniform(V.rows()), toll, n_max);
          py::dict d;
          d["w"] = tr.w.w;
          d["converged"] = tr.converged;
          d["iters"] = tr.iters;
          d["kkt_max"] = tr.kkt.max_residual;
          return d;
        },
        py::arg("points"), py::arg("degree"), py::arg("toll") = 1e-8,
        py::arg("n_max") = 100000);

  m.def("compress",
        [](const Eigen::MatrixXd& points, int degree, const Eigen::VectorXd& w) {
          const od::VandermondeMatrix V = make_vandermonde(points, degree);
          const od::Phi2Space p2 = od::build_phi2(V);
          const od::CompressedDesign cd = od::compress(od::Design(w), p2);
          py::dict d;
          d["indices"] = cd.indices;
          d["weights"] = cd.weights;
          d["moment_residual"] = cd.moment_residual;
          d["applied"] = cd.compressed;
          return d;
        },
        py::arg("points"), py::arg("degree"), py::arg("w"));

  m.def("run_preset",
        [](const std::string& name, const std::string& out_dir) {
          od::ExperimentConfig cfg = od::preset(name);
          cfg.out_dir = out_dir;
          const od::ExperimentOutcome res = od::run_experiment(cfg);
          py::dict d;
          d["exit_code"] = res.exit_code;
          d["converged"] = res.converged;
          d["kkt_max"] = res.kkt_max;
          d["support"] = res.support;
          d["diagnostics_path"] = res.diagnostics_path;
          return d;
        },
        py::arg("name"), py::arg("out_dir"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
