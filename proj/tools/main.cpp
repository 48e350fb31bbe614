// optdesign command line: run experiments, compress designs, check designs.
#include <CLI11.hpp>
#include <Eigen/Core>
#include <iostream>
#include <json.hpp>

#include "optdesign/compression.hpp"
#include "optdesign/diagnostics.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/experiment.hpp"
#include "optdesign/information.hpp"
#include "optdesign/io.hpp"

namespace od = optdesign;
using nlohmann::json;

namespace {

// Aligns design weights with the candidate points: either row-for-row, or a
// support subset matched by exact coordinates.
Eigen::VectorXd align_design(const Eigen::MatrixXd& design_pts,
                             const Eigen::VectorXd& design_w,
                             const Eigen::MatrixXd& points) {
  if (design_pts.rows() == points.rows()) return design_w;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(points.rows());
  for (od::Index i = 0; i < design_pts.rows(); ++i) {
    bool found = false;
    for (od::Index j = 0; j < points.rows(); ++j) {
      if (design_pts.row(i) == points.row(j)) {
        w[j] += design_w[i];
        found = true;
        break;
      }
    }
    if (!found)
      throw od::InvalidConfig("design point not present in the candidate set");
  }
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-optimal design solver"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment");
  std::string preset_name, config_path, out_dir;
  std::string algo_override;
  double tau0 = -1, alpha = -1, beta = -1, eps = -1, toll = -1;
  int rmax = -1, nstep = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  run->add_option("--preset", preset_name, "built-in preset (exp1a exp1b exp2 exp3 exp4 exp4b exp5)");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--algo", algo_override, "fixed|adaptive|regularized|titterington");
  run->add_option("--tau0", tau0, "initial time step");
  run->add_option("--alpha", alpha, "step growth factor");
  run->add_option("--beta", beta, "step shrink factor");
  run->add_option("--eps", eps, "Newton stopping ratio");
  run->add_option("--rmax", rmax, "Newton iteration cap per step");
  run->add_option("--toll", toll, "outer residual tolerance");
  run->add_option("--nstep", nstep, "outer step cap");
  run->add_option("--seed", seed, "generator seed")->each([&](const std::string&) { seed_set = true; });

  // compress
  auto* comp = app.add_subcommand("compress", "compress a design");
  std::string c_design, c_points, c_out = "compressed.csv";
  int c_degree = 1;
  comp->add_option("--design", c_design, "design CSV (coords + weight)")->required();
  comp->add_option("--points", c_points, "candidate points CSV")->required();
  comp->add_option("--model-degree", c_degree, "total degree of the model")->required();
  comp->add_option("--out", c_out, "output CSV");

  // check
  auto* chk = app.add_subcommand("check", "diagnostics for a design");
  std::string k_design, k_points, k_out;
  int k_degree = 1;
  chk->add_option("--design", k_design, "design CSV (coords + weight)")->required();
  chk->add_option("--points", k_points, "candidate points CSV")->required();
  chk->add_option("--model-degree", k_degree, "total degree of the model")->required();
  chk->add_option("--out", k_out, "write diagnostics JSON here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      od::ExperimentConfig cfg;
      if (!preset_name.empty() && !config_path.empty())
        throw od::InvalidConfig("--preset and --config are mutually exclusive");
      if (!preset_name.empty()) cfg = od::preset(preset_name);
      else if (!config_path.empty()) cfg = od::load_config_json(config_path);
      else throw od::InvalidConfig("run needs --preset or --config");

      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!algo_override.empty()) {
        od::ExperimentConfig tmp = cfg;
        // reuse the JSON parser's mapping
        if (algo_override == "fixed") tmp.algorithm = od::Algorithm::kFixed;
        else if (algo_override == "adaptive") tmp.algorithm = od::Algorithm::kAdaptive;
        else if (algo_override == "regularized") tmp.algorithm = od::Algorithm::kRegularized;
        else if (algo_override == "titterington") tmp.algorithm = od::Algorithm::kTitterington;
        else throw od::InvalidConfig("unknown algorithm: " + algo_override);
        cfg = tmp;
      }
      if (tau0 > 0) cfg.flow.tau0 = tau0;
      if (alpha > 0) cfg.flow.alpha = alpha;
      if (beta > 0) cfg.flow.beta = beta;
      if (eps > 0) cfg.flow.eps = eps;
      if (rmax > 0) cfg.flow.r_max = rmax;
      if (toll > 0) cfg.flow.toll = toll;
      if (nstep > 0) cfg.flow.n_step = nstep;
      if (seed_set) cfg.generator.seed = seed;

      const od::ExperimentOutcome res = od::run_experiment(cfg);
      if (res.exit_code == 0) {
        std::cout << "converged; kkt=" << res.kkt_max
                  << " support=" << res.support << "\n";
      } else if (res.exit_code == 2) {
        std::cout << "did not converge; kkt=" << res.kkt_max << "\n";
      } else {
        std::cerr << "error; see " << cfg.out_dir << "/error.json\n";
      }
      return res.exit_code;
    }

    if (*comp) {
      const od::CandidateSet X = od::load_points_csv(c_points);
      const auto [dpts, dw] = od::load_design_csv(c_design);
      const Eigen::VectorXd w = align_design(dpts, dw, X.points());
      const od::BasisSpec basis =
          od::BasisSpec::chebyshev_total_degree(c_degree, static_cast<int>(X.dim()));
      const od::VandermondeMatrix V = od::build_vandermonde(X, basis);
      const od::Phi2Space p2 = od::build_phi2(V);
      const od::CompressedDesign cd = od::compress(od::Design(w), p2);
      Eigen::MatrixXd cpts(static_cast<od::Index>(cd.indices.size()), X.dim());
      for (size_t k = 0; k < cd.indices.size(); ++k)
        cpts.row(static_cast<od::Index>(k)) = X.points().row(cd.indices[k]);
      od::write_design_csv(c_out, cpts, cd.weights);
      std::cout << "compressed " << w.size() << " -> " << cd.indices.size()
                << " points (moment residual " << cd.moment_residual << ")\n";
      return 0;
    }

    if (*chk) {
      const od::CandidateSet X = od::load_points_csv(k_points);
      const auto [dpts, dw] = od::load_design_csv(k_design);
      const Eigen::VectorXd w = align_design(dpts, dw, X.points());
      const od::BasisSpec basis =
          od::BasisSpec::chebyshev_total_degree(k_degree, static_cast<int>(X.dim()));
      const od::VandermondeMatrix V = od::build_vandermonde(X, basis);
      const od::Design d(w);
      const od::SqrtDesign z = od::SqrtDesign::from_design(d);
      const od::WeightedONB onb = od::weighted_onb(V, z);
      const od::KKTReport kkt = od::kkt_residual(d, onb);
      const od::InformationMatrix gm = od::gram_matrix(V, d);
      const od::Phi2Space p2 = od::build_phi2(V);
      json j;
      j["schema_version"] = 1;
      j["kkt"] = {{"max_residual", kkt.max_residual},
                  {"mass_error", kkt.mass_error},
                  {"support_cardinality", kkt.support.size()}};
      j["logdet"] = gm.logdet;
      j["g_optimality_max_B"] = od::bergman(onb).maxCoeff();
      j["support_bracket"] = {{"N", V.cols()}, {"N2", p2.N2}};
      if (k_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(k_out);
        out << j.dump(2) << "\n";
      }
      return 0;
    }
  } catch (const od::Error& e) {
    json err;
    err["error"] = {{"type", "optdesign"}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
