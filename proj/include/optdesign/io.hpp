// CSV and JSON serialization for designs, traces, and diagnostics.
#pragma once

#include <Eigen/Core>
#include <string>

#include "optdesign/candidate_set.hpp"
#include "optdesign/design.hpp"
#include "optdesign/flow.hpp"

namespace optdesign {

// One point per row, n columns; a non-numeric first line is treated as a
// header and skipped.
CandidateSet load_points_csv(const std::string& path);

// Design CSV schema: x0,...,x{n-1},w (header included).
void write_design_csv(const std::string& path, const Eigen::MatrixXd& points,
                      const Eigen::VectorXd& w);

// Reads a design CSV; returns points and weights.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> load_design_csv(const std::string& path);

// Trace CSV schema: k,tau,step_norm,grad_inf,kkt_residual,newton_iters,restarts.
void write_trace_csv(const std::string& path, const FlowTrace& trace);

}  // namespace optdesign
