#include "optdesign/candidate_set.hpp"

#include <algorithm>
#include <numeric>

namespace optdesign {

std::vector<std::vector<Index>> CandidateSet::duplicate_groups() const {
  const Index M = size();
  std::vector<Index> order(M);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index c = 0; c < dim(); ++c) {
      if (points_(a, c) != points_(b, c)) return points_(a, c) < points_(b, c);
    }
    return a < b;
  });

  std::vector<std::vector<Index>> groups;
  Index i = 0;
  while (i < M) {
    Index j = i + 1;
    while (j < M && points_.row(order[j]) == points_.row(order[i])) ++j;
    if (j - i >= 2) {
      std::vector<Index> g(order.begin() + i, order.begin() + j);
      std::sort(g.begin(), g.end());
      groups.push_back(std::move(g));
    }
    i = j;
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

}  // namespace optdesign
