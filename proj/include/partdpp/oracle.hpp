#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "partdpp/matrix.hpp"

// Brute-force reference implementations for every quantity the fast paths
// compute. Deliberately independent of the main code paths: determinants
// use cofactor expansion / fraction-free elimination instead of LU, and
// sums run in lexicographic subset order.
namespace dpp::oracle {

// Enumeration guard: instances with more than this many subsets throw
// TooLarge instead of silently grinding.
inline constexpr std::int64_t kMaxSubsets = 1000000;

// All subsets S with |S .. P_l| = k_l, each sorted ascending, listed in
// lexicographic order. Count is the product of binomials C(m_l, k_l).
std::vector<Subset> enumerate_valid_subsets(const PartitionSpec& p);

// Sum of det(K_{S,S}) over the valid subsets.
double brute_partition_function(const Kernel& k, const PartitionSpec& p);

// Normalized distribution det(K_{S,S}) / Z over the valid subsets.
std::map<Subset, double> brute_distribution(const Kernel& k, const PartitionSpec& p);

// Exact Pr(X_{t+1} = i | prefix) by enumerating quota-satisfying
// completions of the ordered prefix.
double brute_marginal(const Kernel& k, const PartitionSpec& p,
                      const std::vector<Index>& prefix, Index i);

// Exhaustive argmax of det(A_S A_S^T) over |S| = k; lexicographic tie-break.
std::pair<Subset, double> brute_map_opt(const FeatureMatrix& a, Index k);

// The mixture-of-per-part-k-DPPs partition function
// sum_l sum_{kap=1..k_l} sum_{|T|=kap, T in P_l} det(K_{T,T}).
// It does not equal the quota-constrained partition function; kept to
// demonstrate the mismatch.
double iyer_mixture_value(const Kernel& k, const PartitionSpec& p);

// Reference determinant: cofactor expansion for n <= 6, fraction-free
// Gaussian elimination above. Exposed so tests can cross-check the LU path.
double reference_det(const Eigen::MatrixXd& m);

}  // namespace dpp::oracle
