#pragma once

#include <vector>

#include "partdpp/charpoly.hpp"
#include "partdpp/matrix.hpp"
#include "partdpp/parallel.hpp"
#include "partdpp/rng.hpp"

namespace dpp {

// Step scores below kProbCutoff times the largest score are clamped to
// zero before the categorical draw.
inline constexpr double kProbCutoff = 1e-12;

// Incremental sampler state: chosen items in draw order, the residual
// matrix B = A - pi_S(A), and per-part counts t_l.
struct SampleState {
  std::vector<Index> chosen;
  FeatureMatrix residual_rows;
  std::vector<Index> part_counts;

  Index step() const { return static_cast<Index>(chosen.size()); }
};

SampleState initial_state(const FeatureMatrix& a, const PartitionSpec& p);

// State after drawing `item`: projects the residual rows orthogonal to the
// item's row and bumps its part count.
SampleState advance_state(const SampleState& state, const PartitionSpec& p,
                          Index item);

// Entry i = Pr(X_{t+1} = i | chosen so far) from the coefficient ratio
// ||b_i||^2 |c'(C_i C_i^T)| / ((k-t) |c''(B B^T)|). Entries for chosen
// items, saturated parts, and numerically zero rows are exactly 0.
std::vector<double> marginal_step_probs(const FeatureMatrix& a,
                                        const PartitionSpec& p,
                                        const SampleState& state,
                                        Exec exec = Exec::Parallel);

// Exact k-DPP sample: Pr(S) proportional to det(A_S A_S^T) over |S| = k.
Subset sample_kdpp(const FeatureMatrix& a, Index k, RngSeed seed,
                   Exec exec = Exec::Parallel);

// Exact sample under partition quotas: Pr(S) proportional to
// det(A_S A_S^T) over subsets with |S .. P_l| = k_l for every part.
Subset sample_partition_dpp(const FeatureMatrix& a, const PartitionSpec& p,
                            RngSeed seed, Exec exec = Exec::Parallel);

// det(A_S A_S^T) / Z for quota-satisfying S, else 0.
double exact_set_probability(const FeatureMatrix& a, const PartitionSpec& p,
                             const Subset& s);

}  // namespace dpp
