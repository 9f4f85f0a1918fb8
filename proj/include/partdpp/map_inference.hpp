#pragma once

#include <vector>

#include "partdpp/matrix.hpp"
#include "partdpp/parallel.hpp"

namespace dpp {

struct MapResult {
  Subset subset;
  double log_det = 0.0;       // log det(A_S A_S^T) of the final subset
  Index swaps_performed = 0;
  double kappa = 0.0;
};

// Greedy volume maximization: k additions of the row with the largest
// residual squared norm; ties break to the lowest index.
Subset greedy_map(const FeatureMatrix& a, Index k);

// Greedy start, then best-swap local search accepting a swap (i in S,
// j not in S) only when it improves det(A_S A_S^T) by a factor greater
// than 1 + eps/k. Halts at stability or at the swap cap
// ceil(k^2 ln(max(k,2)) / eps) + k.
MapResult local_search_map(const FeatureMatrix& a, Index k, double eps = 0.1,
                           Exec exec = Exec::Parallel);

// Conditioning ratio lambda_1(AA^T) over the mean of the tail eigenvalues
// lambda_k..lambda_m (descending, 1-indexed); controls the local-search
// approximation factor min(k, kappa)^k.
double kappa(const FeatureMatrix& a, Index k);

namespace detail {

struct SwapRecord {
  Index removed = 0;
  Index added = 0;
  double gain = 0.0;  // det ratio of the accepted swap
};

// local_search_map with an optional trace of accepted swaps (for tests).
MapResult local_search_map_traced(const FeatureMatrix& a, Index k, double eps,
                                  Exec exec, std::vector<SwapRecord>* trace);

}  // namespace detail

}  // namespace dpp
