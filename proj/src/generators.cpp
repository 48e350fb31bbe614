#include "optdesign/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace optdesign {

namespace {

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
double next_uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

CandidateSet gen_chebyshev_lobatto_grid(int deg, int n) {
  if (deg < 1 || n < 1) throw InvalidConfig("chebyshev_lobatto_grid requires deg >= 1, n >= 1");
  const Index per_axis = deg + 1;
  Eigen::VectorXd axis(per_axis);
  for (Index k = 0; k < per_axis; ++k)
    axis[k] = std::cos(static_cast<double>(k) * std::numbers::pi / deg);

  Index M = 1;
  for (int c = 0; c < n; ++c) M *= per_axis;
  Eigen::MatrixXd pts(M, n);
  for (Index i = 0; i < M; ++i) {
    Index rest = i;
    for (int c = n - 1; c >= 0; --c) {
      pts(i, c) = axis[rest % per_axis];
      rest /= per_axis;
    }
  }
  return CandidateSet(std::move(pts));
}

CandidateSet gen_uniform_cloud(Index M, std::uint64_t seed, int n) {
  if (M < 1) throw InvalidConfig("uniform cloud requires M >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd pts(M, n);
  for (Index i = 0; i < M; ++i)
    for (int c = 0; c < n; ++c)
      pts(i, c) = 2.0 * next_uniform01(rng) - 1.0;
  return CandidateSet(std::move(pts));
}

CandidateSet gen_gaussian_cloud(Index M, std::uint64_t seed, int n) {
  if (M < 1) throw InvalidConfig("gaussian cloud requires M >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd pts(M, n);
  double spare = 0.0;
  bool has_spare = false;
  auto next_gauss = [&]() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = next_uniform01(rng);
    while (u1 == 0.0) u1 = next_uniform01(rng);
    const double u2 = next_uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
  };
  for (Index i = 0; i < M; ++i)
    for (int c = 0; c < n; ++c) pts(i, c) = next_gauss();
  return CandidateSet(std::move(pts));
}

CandidateSet gen_disk_admissible_mesh(int mesh_degree) {
  if (mesh_degree < 1) throw InvalidConfig("disk mesh requires degree >= 1");
  const int m = mesh_degree;
  const Index n_radii = 2 * m;   // cos(j pi / (4m)), j = 0..2m-1, all > 0
  const Index n_angles = 2 * m;
  Eigen::MatrixXd pts(n_radii * n_angles + 1, 2);
  pts.row(0).setZero();  // center, once
  Index row = 1;
  for (Index j = 0; j < n_radii; ++j) {
    const double r =
        std::cos(static_cast<double>(j) * std::numbers::pi / (4.0 * m));
    for (Index k = 0; k < n_angles; ++k) {
      const double a = static_cast<double>(k) * std::numbers::pi / m;
      pts(row, 0) = r * std::cos(a);
      pts(row, 1) = r * std::sin(a);
      ++row;
    }
  }
  return CandidateSet(std::move(pts));
}

}  // namespace optdesign
