#include "partdpp/map_inference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace dpp {

namespace {

Eigen::VectorXd gram_eigenvalues_desc(const FeatureMatrix& a) {
  Eigen::MatrixXd k = a.data() * a.data().transpose();
  k = ((k + k.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

// log det(K_{S,S}) via LDLT; does not overflow for large subsets.
double log_minor_det(const Kernel& kernel, const std::vector<Index>& s) {
  const Index n = static_cast<Index>(s.size());
  Eigen::MatrixXd sub(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      sub(a, b) = kernel.data()(s[static_cast<size_t>(a)], s[static_cast<size_t>(b)]);
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
  return ldlt.vectorD().array().max(0.0).log().sum();
}

}  // namespace

Subset greedy_map(const FeatureMatrix& a, Index k) {
  const Index m = a.rows();
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (k > m) throw RankTooLow("k exceeds the number of rows");
  const double dependent_cut = kDependentRowTol * a.max_row_norm2();
  RowMatrixXd b = a.data();
  std::vector<Index> chosen;
  chosen.reserve(static_cast<size_t>(k));
  for (Index step = 0; step < k; ++step) {
    Index best = 0;
    double best_norm2 = b.row(0).squaredNorm();
    for (Index i = 1; i < m; ++i) {
      const double n2 = b.row(i).squaredNorm();
      if (n2 > best_norm2) {
        best_norm2 = n2;
        best = i;
      }
    }
    if (best_norm2 <= dependent_cut) {
      throw RankTooLow("rank(A) is below k = " + std::to_string(k));
    }
    chosen.push_back(best);
    detail::project_rows_orthogonal_inplace(b, best);
  }
  return Subset(chosen);
}

double kappa(const FeatureMatrix& a, Index k) {
  const Index m = a.rows();
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (k > m) throw RankTooLow("k exceeds the number of rows");
  const Eigen::VectorXd lam = gram_eigenvalues_desc(a);
  double tail = 0.0;
  for (Index t = k - 1; t < m; ++t) tail += std::max(lam[t], 0.0);
  const double count = static_cast<double>(m - k + 1);
  if (tail <= 1e-12 * lam[0] * count) {
    throw RankTooLow("tail eigenvalue mass vanishes at k = " + std::to_string(k));
  }
  return lam[0] / (tail / count);
}

MapResult local_search_map(const FeatureMatrix& a, Index k, double eps, Exec exec) {
  return detail::local_search_map_traced(a, k, eps, exec, nullptr);
}

namespace detail {

MapResult local_search_map_traced(const FeatureMatrix& a, Index k, double eps,
                                  Exec exec, std::vector<SwapRecord>* trace) {
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  const Index m = a.rows();

  std::vector<Index> s = greedy_map(a, k).sorted().indices;
  const Kernel kernel = gram(a);

  const double threshold = 1.0 + eps / static_cast<double>(k);
  const Index cap =
      static_cast<Index>(std::ceil(static_cast<double>(k) * static_cast<double>(k) *
                                   std::log(static_cast<double>(std::max<Index>(k, 2))) /
                                   eps)) +
      k;

  Index swaps = 0;
  // Gains are determinant ratios d(a_j, span(S\i))^2 / d(a_i, span(S\i))^2
  // (Schur), so a sweep costs k residual computations instead of k*m dets.
  std::vector<Eigen::VectorXd> dist2(static_cast<size_t>(k));
  std::vector<char> in_s(static_cast<size_t>(m), 0);
  while (swaps < cap) {
    const bool parallel = exec == Exec::Parallel && k > 1;
#pragma omp parallel for schedule(dynamic) num_threads(max_threads()) if (parallel)
    for (Index pos = 0; pos < k; ++pos) {
      Subset without;
      without.indices.reserve(static_cast<size_t>(k) - 1);
      for (Index q = 0; q < k; ++q) {
        if (q != pos) without.indices.push_back(s[static_cast<size_t>(q)]);
      }
      dist2[static_cast<size_t>(pos)] =
          residual(a, without).data().rowwise().squaredNorm();
    }

    std::fill(in_s.begin(), in_s.end(), 0);
    for (Index q = 0; q < k; ++q) in_s[static_cast<size_t>(s[static_cast<size_t>(q)])] = 1;

    double best_gain = 0.0;
    Index best_pos = -1, best_j = -1;
    for (Index pos = 0; pos < k; ++pos) {
      const Eigen::VectorXd& d2 = dist2[static_cast<size_t>(pos)];
      const double den = d2[s[static_cast<size_t>(pos)]];
      if (!(den > 0.0)) continue;
      for (Index j = 0; j < m; ++j) {
        if (in_s[static_cast<size_t>(j)]) continue;
        const double gain = d2[j] / den;
        if (gain > best_gain) {
          best_gain = gain;
          best_pos = pos;
          best_j = j;
        }
      }
    }

    if (best_pos < 0 || !(best_gain > threshold)) break;
    if (trace) {
      trace->push_back({s[static_cast<size_t>(best_pos)], best_j, best_gain});
    }
    s[static_cast<size_t>(best_pos)] = best_j;
    std::sort(s.begin(), s.end());
    ++swaps;
  }

  MapResult result{Subset(s), log_minor_det(kernel, s), swaps, kappa(a, k)};
  return result;
}

}  // namespace detail

}  // namespace dpp
