// Candidate-set generators for the shipped experiments.
#pragma once

#include <cstdint>
#include <string>

#include "optdesign/candidate_set.hpp"

namespace optdesign {

// Tensor grid of Chebyshev-Lobatto points cos(k pi / deg), k = 0..deg,
// per axis; M = (deg+1)^n.
CandidateSet gen_chebyshev_lobatto_grid(int deg, int n = 2);

// M i.i.d. uniform points in [-1,1]^n. Reproducible across platforms:
// mt19937_64 with 53-bit mantissa mapping (see rng notes in the README).
CandidateSet gen_uniform_cloud(Index M, std::uint64_t seed, int n = 2);

// M i.i.d. standard normal points (Box-Muller over the same generator).
CandidateSet gen_gaussian_cloud(Index M, std::uint64_t seed, int n = 2);

// Polar mesh for the closed unit disk: radii cos(j pi / (4 m)) for
// j = 0..2m-1, 2m equispaced angles per circle, plus the center once;
// M = 4 m^2 + 1.
CandidateSet gen_disk_admissible_mesh(int mesh_degree);

}  // namespace optdesign
