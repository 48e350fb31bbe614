#include "optdesign/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    // trim spaces
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

Eigen::MatrixXd load_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.empty()) continue;
    std::vector<double> row;
    bool ok = true;
    for (const auto& c : cells) {
      double v;
      if (!parse_double(c, v)) { ok = false; break; }
      row.push_back(v);
    }
    if (!ok) {
      if (first) { first = false; continue; }  // header line
      throw InvalidConfig("non-numeric CSV row in " + path);
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw InvalidConfig("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidConfig("empty CSV file: " + path);
  Eigen::MatrixXd out(static_cast<Index>(rows.size()),
                      static_cast<Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return out;
}

}  // namespace

CandidateSet load_points_csv(const std::string& path) {
  return CandidateSet(load_numeric_csv(path));
}

void write_design_csv(const std::string& path, const Eigen::MatrixXd& points,
                      const Eigen::VectorXd& w) {
  if (points.rows() != w.size())
    throw InvalidConfig("design CSV: point/weight count mismatch");
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write CSV file: " + path);
  for (Index c = 0; c < points.cols(); ++c) out << "x" << c << ",";
  out << "w\n";
  char buf[32];
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index c = 0; c < points.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", points(i, c));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", w[i]);
    out << buf << "\n";
  }
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> load_design_csv(const std::string& path) {
  const Eigen::MatrixXd all = load_numeric_csv(path);
  if (all.cols() < 2)
    throw InvalidConfig("design CSV needs at least one coordinate and a weight column");
  return {all.leftCols(all.cols() - 1), all.col(all.cols() - 1)};
}

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write CSV file: " + path);
  out << "k,tau,step_norm,grad_inf,kkt_residual,newton_iters,restarts\n";
  char buf[32];
  for (const auto& s : trace.steps) {
    out << s.k << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", s.tau);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", s.step_norm);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", s.grad_inf);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", s.kkt_residual);
    out << buf << ",";
    out << s.newton_iters << "," << s.restarts << "\n";
  }
}

}  // namespace optdesign
