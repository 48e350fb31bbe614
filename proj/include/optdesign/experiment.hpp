// Experiment configurations, presets, and the end-to-end pipeline.
#pragma once

#include <cstdint>
#include <string>

#include "optdesign/candidate_set.hpp"
#include "optdesign/flow.hpp"
#include "optdesign/regularization.hpp"

namespace optdesign {

enum class GeneratorKind {
  kChebyshevLobattoGrid,
  kUniformCloud,
  kGaussianCloud,
  kDiskAdmissibleMesh,
  kCsvFile,
};

enum class Algorithm { kFixed, kAdaptive, kRegularized, kTitterington };

std::string to_string(GeneratorKind k);
std::string to_string(Algorithm a);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kChebyshevLobattoGrid;
  int deg = 0;          // grid degree / mesh degree
  int dim = 2;
  Index count = 0;      // cloud size
  std::uint64_t seed = 20260809;
  std::string csv_path;
};

struct EtaScheduleConfig {
  double eta0 = 1e-2;
  std::string sigma = "square";  // "square" (eta^2) or "scale:<factor>"
  int n_max_eta = 8;
  double toll_eta = 1e-8;

  EtaSchedule build() const;
};

struct ExperimentConfig {
  std::string name = "custom";
  GeneratorSpec generator;
  int model_degree = 1;
  Algorithm algorithm = Algorithm::kAdaptive;
  FlowParams flow;
  EtaScheduleConfig eta;
  bool compress = false;
  bool compare_titterington = false;
  double titterington_toll = 1e-10;
  long titterington_n_max = 1000000;
  bool spectrum = false;  // full Hess F spectrum in diagnostics (dense cap)
  std::string out_dir = "out";
};

// Built-in presets: exp1a, exp1b, exp2, exp3, exp4, exp4b, exp5.
ExperimentConfig preset(const std::string& name);

// Single JSON file; unknown keys are rejected.
ExperimentConfig load_config_json(const std::string& path);

CandidateSet generate_candidates(const GeneratorSpec& gen);

struct ExperimentOutcome {
  int exit_code = 0;
  bool converged = false;
  double kkt_max = 0;
  Index support = 0;
  Index compressed_support = 0;
  double logdet = 0;
  std::string diagnostics_path;
};

// Runs the full pipeline and writes design/trace/diagnostics artifacts into
// cfg.out_dir. Exit codes: 0 success, 2 solver did not converge, 1 error
// (an error.json with the message is written when possible).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace optdesign
