#include "optdesign/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "optdesign/compression.hpp"
#include "optdesign/diagnostics.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/generators.hpp"
#include "optdesign/information.hpp"
#include "optdesign/io.hpp"

namespace optdesign {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::kChebyshevLobattoGrid: return "chebyshev_lobatto_grid";
    case GeneratorKind::kUniformCloud: return "uniform_cloud";
    case GeneratorKind::kGaussianCloud: return "gaussian_cloud";
    case GeneratorKind::kDiskAdmissibleMesh: return "disk_admissible_mesh";
    case GeneratorKind::kCsvFile: return "csv_file";
  }
  return "unknown";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kFixed: return "fixed";
    case Algorithm::kAdaptive: return "adaptive";
    case Algorithm::kRegularized: return "regularized";
    case Algorithm::kTitterington: return "titterington";
  }
  return "unknown";
}

namespace {

GeneratorKind generator_kind_from(const std::string& s) {
  if (s == "chebyshev_lobatto_grid") return GeneratorKind::kChebyshevLobattoGrid;
  if (s == "uniform_cloud") return GeneratorKind::kUniformCloud;
  if (s == "gaussian_cloud") return GeneratorKind::kGaussianCloud;
  if (s == "disk_admissible_mesh") return GeneratorKind::kDiskAdmissibleMesh;
  if (s == "csv_file") return GeneratorKind::kCsvFile;
  throw InvalidConfig("unknown generator kind: " + s);
}

Algorithm algorithm_from(const std::string& s) {
  if (s == "fixed") return Algorithm::kFixed;
  if (s == "adaptive") return Algorithm::kAdaptive;
  if (s == "regularized") return Algorithm::kRegularized;
  if (s == "titterington") return Algorithm::kTitterington;
  throw InvalidConfig("unknown algorithm: " + s);
}

}  // namespace

EtaSchedule EtaScheduleConfig::build() const {
  EtaSchedule s;
  s.eta0 = eta0;
  s.n_max_eta = n_max_eta;
  s.toll_eta = toll_eta;
  if (sigma == "square") {
    s.sigma = [](double eta) { return eta * eta; };
  } else if (sigma.rfind("scale:", 0) == 0) {
    const double factor = std::stod(sigma.substr(6));
    if (!(factor > 0) || factor >= 1)
      throw InvalidConfig("sigma scale factor must be in (0,1)");
    s.sigma = [factor](double eta) { return factor * eta; };
  } else {
    throw InvalidConfig("unknown eta schedule: " + sigma);
  }
  return s;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.flow.tau0 = 1.0;
  c.flow.eps = 1e-4;
  c.flow.r_max = 5;

  if (name == "exp1a") {
    c.generator = {GeneratorKind::kChebyshevLobattoGrid, 40, 2};
    c.model_degree = 4;
    c.algorithm = Algorithm::kFixed;
    c.flow.alpha = 1.0;
    c.flow.beta = 1.0;
    c.flow.r_max = 50;
    c.flow.n_step = 500;
    c.flow.toll = 1e-13;
  } else if (name == "exp1b") {
    c.generator = {GeneratorKind::kChebyshevLobattoGrid, 40, 2};
    c.model_degree = 4;
    c.algorithm = Algorithm::kAdaptive;
    c.flow.alpha = 1.15;
    c.flow.beta = 1.0 / 1.15;
    c.flow.n_step = 500;
    c.flow.toll = 1e-13;
  } else if (name == "exp2") {
    c.generator.kind = GeneratorKind::kUniformCloud;
    c.generator.count = 1600;
    c.generator.dim = 2;
    c.model_degree = 10;
    c.algorithm = Algorithm::kAdaptive;
    c.flow.alpha = 1.15;
    c.flow.beta = 1.0 / 1.15;
    c.flow.n_step = 400;
    c.flow.toll = 1e-12;
  } else if (name == "exp3") {
    c.generator = {GeneratorKind::kDiskAdmissibleMesh, 20, 2};
    c.model_degree = 2;
    c.algorithm = Algorithm::kAdaptive;
    c.flow.alpha = 1.15;
    c.flow.beta = 1.0 / 1.15;
    c.flow.n_step = 120;
    c.spectrum = true;
  } else if (name == "exp4" || name == "exp4b") {
    const bool doubled = name == "exp4b";
    c.generator = {GeneratorKind::kDiskAdmissibleMesh, doubled ? 40 : 20, 2};
    c.model_degree = doubled ? 4 : 2;
    c.algorithm = Algorithm::kRegularized;
    c.flow.alpha = 1.5;
    c.flow.beta = 1.0 / 1.5;
    c.flow.n_step = 300;
    c.compress = true;
    c.spectrum = !doubled;
  } else if (name == "exp5") {
    c.generator.kind = GeneratorKind::kGaussianCloud;
    c.generator.count = 10000;
    c.generator.dim = 2;
    c.model_degree = 3;
    c.algorithm = Algorithm::kAdaptive;
    c.flow.alpha = 1.15;
    c.flow.beta = 1.0 / 1.15;
    c.flow.n_step = 300;
    c.compare_titterington = true;
  } else {
    throw InvalidConfig("unknown preset: " + name);
  }
  return c;
}

ExperimentConfig load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig c;
  if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
  if (j.contains("name")) c.name = j.at("name").get<std::string>();

  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    c.generator.kind = generator_kind_from(g.at("kind").get<std::string>());
    if (g.contains("deg")) c.generator.deg = g.at("deg").get<int>();
    if (g.contains("dim")) c.generator.dim = g.at("dim").get<int>();
    if (g.contains("count")) c.generator.count = g.at("count").get<Index>();
    if (g.contains("seed")) c.generator.seed = g.at("seed").get<std::uint64_t>();
    if (g.contains("path")) c.generator.csv_path = g.at("path").get<std::string>();
  }
  if (j.contains("model_degree")) c.model_degree = j.at("model_degree").get<int>();
  if (j.contains("algorithm"))
    c.algorithm = algorithm_from(j.at("algorithm").get<std::string>());
  if (j.contains("flow")) {
    const auto& f = j.at("flow");
    if (f.contains("tau0")) c.flow.tau0 = f.at("tau0").get<double>();
    if (f.contains("alpha")) c.flow.alpha = f.at("alpha").get<double>();
    if (f.contains("beta")) c.flow.beta = f.at("beta").get<double>();
    if (f.contains("eps")) c.flow.eps = f.at("eps").get<double>();
    if (f.contains("r_max")) c.flow.r_max = f.at("r_max").get<int>();
    if (f.contains("n_step")) c.flow.n_step = f.at("n_step").get<int>();
    if (f.contains("toll")) c.flow.toll = f.at("toll").get<double>();
    if (f.contains("max_restarts")) c.flow.max_restarts = f.at("max_restarts").get<int>();
    if (f.contains("dense_cap")) c.flow.dense_cap = f.at("dense_cap").get<Index>();
  }
  if (j.contains("eta")) {
    const auto& e = j.at("eta");
    if (e.contains("eta0")) c.eta.eta0 = e.at("eta0").get<double>();
    if (e.contains("sigma")) c.eta.sigma = e.at("sigma").get<std::string>();
    if (e.contains("n_max_eta")) c.eta.n_max_eta = e.at("n_max_eta").get<int>();
    if (e.contains("toll_eta")) c.eta.toll_eta = e.at("toll_eta").get<double>();
  }
  if (j.contains("compress")) c.compress = j.at("compress").get<bool>();
  if (j.contains("compare_titterington"))
    c.compare_titterington = j.at("compare_titterington").get<bool>();
  if (j.contains("titterington_toll"))
    c.titterington_toll = j.at("titterington_toll").get<double>();
  if (j.contains("titterington_n_max"))
    c.titterington_n_max = j.at("titterington_n_max").get<long>();
  if (j.contains("spectrum")) c.spectrum = j.at("spectrum").get<bool>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

CandidateSet generate_candidates(const GeneratorSpec& gen) {
  switch (gen.kind) {
    case GeneratorKind::kChebyshevLobattoGrid:
      return gen_chebyshev_lobatto_grid(gen.deg, gen.dim);
    case GeneratorKind::kUniformCloud:
      return gen_uniform_cloud(gen.count, gen.seed, gen.dim);
    case GeneratorKind::kGaussianCloud:
      return gen_gaussian_cloud(gen.count, gen.seed, gen.dim);
    case GeneratorKind::kDiskAdmissibleMesh:
      return gen_disk_admissible_mesh(gen.deg);
    case GeneratorKind::kCsvFile:
      return load_points_csv(gen.csv_path);
  }
  throw InvalidConfig("unhandled generator kind");
}

namespace {

void write_kkt_split_csv(const std::string& path, const Design& w,
                         const Eigen::VectorXd& B, double N) {
  std::ofstream out(path);
  out << "index,on_support,grad_E,kkt_residual\n";
  const double thr = w.support_threshold();
  char buf[32];
  for (Index i = 0; i < w.size(); ++i) {
    const double g = 1.0 - B[i] / N;
    const bool on = w.w[i] > thr;
    const double r = on ? std::abs(g) : std::max(0.0, -g);
    out << i << "," << (on ? 1 : 0) << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", g);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r);
    out << buf << "\n";
  }
}

void write_kkt_vs_cpu_csv(const std::string& path,
                          const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  out << "cpu_seconds,kkt_residual\n";
  char buf[32];
  for (const auto& [t, k] : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", k);
    out << buf << "\n";
  }
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome outcome;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  json diag;
  diag["schema_version"] = 1;
  diag["name"] = cfg.name;
  diag["algorithm"] = to_string(cfg.algorithm);

  const auto t_start = std::chrono::steady_clock::now();
  auto seconds_since = [](auto t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  try {
    const CandidateSet X = generate_candidates(cfg.generator);
    const BasisSpec basis =
        BasisSpec::chebyshev_total_degree(cfg.model_degree, static_cast<int>(X.dim()));
    const VandermondeMatrix V = build_vandermonde(X, basis);
    const double N = static_cast<double>(V.cols());
    diag["M"] = X.size();
    diag["N"] = V.cols();
    diag["generator"] = to_string(cfg.generator.kind);
    diag["seed"] = cfg.generator.seed;
    const double t_generate = seconds_since(t_start);

    const Phi2Space p2 = build_phi2(V);
    const KernelProjector proj = kernel_projector(p2);
    diag["N2"] = p2.N2;
    diag["kernel_dim"] = proj.kernel_dim();

    const SqrtDesign z0 = SqrtDesign::uniform(X.size());
    const auto t_solve0 = std::chrono::steady_clock::now();

    Design w_final{Eigen::VectorXd()};
    FlowTrace trace;
    bool converged = false;
    std::string status = "";

    if (cfg.algorithm == Algorithm::kTitterington) {
      TitteringtonResult tr = titterington_solve(
          V, Design::uniform(X.size()), cfg.titterington_toll,
          cfg.titterington_n_max, 100);
      w_final = tr.w;
      converged = tr.converged;
      status = tr.converged ? "converged" : "max_steps_reached";
      diag["iterations"] = tr.iters;
      std::vector<std::pair<double, double>> rows;
      for (const auto& s : tr.trace) rows.push_back({s.seconds, s.kkt});
      write_kkt_vs_cpu_csv((dir / "kkt_vs_cpu_titterington.csv").string(), rows);
    } else if (cfg.algorithm == Algorithm::kRegularized) {
      RegularizedResult rr = solve_regularized(V, p2, proj, z0,
                                               cfg.eta.build(), cfg.flow);
      w_final = rr.z.square();
      converged = rr.converged;
      status = rr.converged ? "converged" : "non_converged";
      trace = rr.rounds.back().result.trace;
      json rounds = json::array();
      for (size_t i = 0; i < rr.rounds.size(); ++i) {
        const auto& r = rr.rounds[i];
        rounds.push_back({{"eta", r.eta},
                          {"steps", r.result.trace.steps.size()},
                          {"status", to_string(r.result.status)},
                          {"energy_E", r.energy_E_value},
                          {"step_from_previous", r.step_from_previous}});
        write_trace_csv((dir / ("trace_eta" + std::to_string(i) + ".csv")).string(),
                        r.result.trace);
      }
      diag["eta_rounds"] = rounds;
      diag["eta_final"] = rr.eta_final;
      const Eigen::VectorXd pi_w = proj.apply(w_final.w);
      diag["kernel_component_norm"] = pi_w.norm();
    } else {
      FlowResult fr = cfg.algorithm == Algorithm::kFixed
                          ? solve_fixed_step(V, z0, cfg.flow)
                          : solve_adaptive(V, z0, cfg.flow);
      w_final = fr.z.square();
      converged = fr.converged;
      status = to_string(fr.status);
      trace = fr.trace;
      if (cfg.compare_titterington) {
        std::vector<std::pair<double, double>> rows;
        for (const auto& s : fr.trace.steps) rows.push_back({s.seconds, s.kkt_residual});
        write_kkt_vs_cpu_csv((dir / "kkt_vs_cpu_adaptive.csv").string(), rows);
        const double budget = std::max(1.0, seconds_since(t_solve0));
        TitteringtonResult tr = titterington_solve(
            V, Design::uniform(X.size()), cfg.titterington_toll,
            cfg.titterington_n_max, 50, budget);
        rows.clear();
        for (const auto& s : tr.trace) rows.push_back({s.seconds, s.kkt});
        write_kkt_vs_cpu_csv((dir / "kkt_vs_cpu_titterington.csv").string(), rows);
        diag["titterington_iterations"] = tr.iters;
        diag["titterington_kkt"] = tr.kkt.max_residual;
      }
    }
    const double t_solve = seconds_since(t_solve0);

    outcome.converged = converged;
    diag["converged"] = converged;
    diag["status"] = status;

    // Diagnostics at the final design.
    const auto t_diag0 = std::chrono::steady_clock::now();
    const SqrtDesign z_final = SqrtDesign::from_design(w_final);
    const WeightedONB onb = weighted_onb(V, z_final);
    const Eigen::VectorXd B = bergman(onb);
    const KKTReport kkt = kkt_residual(w_final, onb);
    outcome.kkt_max = kkt.max_residual;
    outcome.support = static_cast<Index>(kkt.support.size());
    diag["kkt"] = {{"max_residual", kkt.max_residual},
                   {"mass_error", kkt.mass_error},
                   {"support_cardinality", kkt.support.size()}};
    diag["support_bracket"] = {
        {"N", V.cols()},
        {"N2", p2.N2},
        {"ok", static_cast<Index>(kkt.support.size()) >= V.cols() &&
                   static_cast<Index>(kkt.support.size()) <= p2.N2}};
    diag["g_optimality_max_B"] = B.maxCoeff();

    const InformationMatrix gm = gram_matrix(V, w_final);
    outcome.logdet = gm.logdet;
    diag["logdet"] = gm.logdet;

    const WellPosednessCertificate cert =
        wellposedness_probe(V, w_final, p2, proj, 16, 7, cfg.flow.dense_cap);
    diag["wellposedness"] = {{"verdict", to_string(cert.verdict)},
                             {"witness_distance", cert.witness_distance},
                             {"moment_residual", cert.moment_residual},
                             {"energy_gap", cert.energy_gap}};

    if (V.rows() <= cfg.flow.dense_cap) {
      const ErrorEstimate est = error_estimate(V, z_final, cfg.flow.dense_cap);
      diag["error_estimate"] = {
          {"exponent_case",
           est.exponent_case == LojasiewiczCase::kThetaHalf ? "theta_half"
                                                            : "unknown"},
          {"C_hat", est.C_hat},
          {"bound", est.bound},
          {"has_bound", est.has_bound},
          {"restricted_lambda_min", est.restricted_lambda_min},
          {"restricted_lambda_max", est.restricted_lambda_max},
          {"off_support_grad_min", est.off_support_grad_min}};
    } else {
      diag["error_estimate"] = {{"skipped", "dense cap exceeded"}};
    }

    if (cfg.spectrum && V.rows() <= cfg.flow.dense_cap) {
      const Eigen::VectorXd spec =
          hessian_spectrum(V, z_final, cfg.flow.dense_cap);
      diag["hessian_spectrum"] = {{"min", spec.minCoeff()},
                                  {"max", spec.maxCoeff()},
                                  {"near_zero_count",
                                   (spec.array() < 1e-12 * spec.maxCoeff()).count()}};
      std::ofstream spec_out(dir / "spectrum.csv");
      spec_out << "eigenvalue\n";
      char buf[32];
      for (Index i = 0; i < spec.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", spec[i]);
        spec_out << buf << "\n";
      }
    }

    if (!trace.steps.empty()) {
      const RateFit rate = fit_convergence_rate(trace);
      const char* kind = rate.kind == RateFit::Kind::kSuperlinear ? "superlinear"
                         : rate.kind == RateFit::Kind::kLinear    ? "linear"
                         : rate.kind == RateFit::Kind::kFlat      ? "flat"
                                                                  : "undetermined";
      diag["rate_fit"] = {{"kind", kind}, {"mean_ratio", rate.mean_ratio}};
      write_trace_csv((dir / "trace.csv").string(), trace);
    }

    write_design_csv((dir / "design.csv").string(), V.points, w_final.w);
    write_kkt_split_csv((dir / "kkt_split.csv").string(), w_final, B, N);

    if (cfg.compress) {
      const CompressedDesign cd = compress(w_final, p2);
      outcome.compressed_support = static_cast<Index>(cd.indices.size());
      diag["compression"] = {
          {"applied", cd.compressed},
          {"support_before", kkt.support.size()},
          {"support_after", cd.indices.size()},
          {"moment_residual", cd.moment_residual}};
      Eigen::MatrixXd cpts(static_cast<Index>(cd.indices.size()), V.points.cols());
      for (size_t k = 0; k < cd.indices.size(); ++k)
        cpts.row(static_cast<Index>(k)) = V.points.row(cd.indices[k]);
      write_design_csv((dir / "compressed.csv").string(), cpts, cd.weights);
      const InformationMatrix gm_c =
          gram_matrix(V, cd.as_full_design(V.rows()));
      diag["compression"]["logdet_after"] = gm_c.logdet;
      diag["compression"]["logdet_drift"] = std::abs(gm_c.logdet - gm.logdet);
    }

    diag["timings"] = {{"generate_seconds", t_generate},
                       {"solve_seconds", t_solve},
                       {"diagnostics_seconds", seconds_since(t_diag0)}};

    const fs::path diag_path = dir / "diagnostics.json";
    std::ofstream out(diag_path);
    out << diag.dump(2) << "\n";
    outcome.diagnostics_path = diag_path.string();
    outcome.exit_code = converged ? 0 : 2;
    return outcome;
  } catch (const Error& e) {
    json err;
    err["error"] = {{"type", "optdesign"}, {"message", e.what()}};
    std::ofstream out(dir / "error.json");
    out << err.dump(2) << "\n";
    outcome.exit_code = 1;
    return outcome;
  }
}

}  // namespace optdesign
