#pragma once

#include <random>
#include <vector>

#include "partdpp/matrix.hpp"
#include "partdpp/rng.hpp"

namespace dpp::testutil {

inline RowMatrixXd random_features_data(std::mt19937_64& gen, Index m, Index n,
                                        double scale = 1.0) {
  RowMatrixXd a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = scale * standard_normal(gen);
  }
  return a;
}

inline FeatureMatrix random_features(std::mt19937_64& gen, Index m, Index n,
                                     double scale = 1.0) {
  return FeatureMatrix(random_features_data(gen, m, n, scale));
}

inline Index uniform_index(std::mt19937_64& gen, Index lo, Index hi) {
  // inclusive range, bias negligible for tiny ranges
  return lo + static_cast<Index>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random partition into p nonempty parts.
inline std::vector<Index> random_labels(std::mt19937_64& gen, Index m, Index p) {
  std::vector<Index> labels(static_cast<size_t>(m));
  while (true) {
    std::vector<char> used(static_cast<size_t>(p), 0);
    for (Index i = 0; i < m; ++i) {
      labels[static_cast<size_t>(i)] = uniform_index(gen, 0, p - 1);
      used[static_cast<size_t>(labels[static_cast<size_t>(i)])] = 1;
    }
    bool all = true;
    for (char u : used) all = all && u;
    if (all) return labels;
  }
}

// Random quotas 0 <= k_l <= m_l with a positive total.
inline PartitionSpec random_partition(std::mt19937_64& gen, Index m, Index p) {
  const std::vector<Index> labels = random_labels(gen, m, p);
  std::vector<Index> sizes(static_cast<size_t>(p), 0);
  for (Index l : labels) ++sizes[static_cast<size_t>(l)];
  while (true) {
    std::vector<Index> quotas(static_cast<size_t>(p));
    Index total = 0;
    for (Index l = 0; l < p; ++l) {
      quotas[static_cast<size_t>(l)] =
          uniform_index(gen, 0, sizes[static_cast<size_t>(l)]);
      total += quotas[static_cast<size_t>(l)];
    }
    if (total >= 1) return PartitionSpec(labels, quotas);
  }
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace dpp::testutil
