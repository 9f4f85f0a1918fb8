#include "partdpp/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace dpp {

namespace {

struct StepScores {
  std::vector<double> raw;  // ||b_i||^2 |c'| per candidate, 0 for invalid
  double denom = 0.0;       // (k - t) |c''|
};

void check_state(const FeatureMatrix& a, const PartitionSpec& p,
                 const SampleState& state) {
  if (a.rows() != p.num_items() ||
      state.residual_rows.rows() != a.rows() ||
      static_cast<Index>(state.part_counts.size()) != p.num_parts()) {
    throw InvalidInput("sample state does not match the instance");
  }
  if (state.step() >= p.total_quota()) {
    throw InvalidInput("sample state already holds k items");
  }
}

// Scores for one step of the chain. c'' is computed once; the per-candidate
// coefficients c' dominate and are scored in parallel.
StepScores score_step(const FeatureMatrix& a, const PartitionSpec& p,
                      const SampleState& state, Exec exec) {
  const Index m = a.rows();
  const Index parts = p.num_parts();
  const Index k = p.total_quota();
  const Index t = state.step();
  const RowMatrixXd& b = state.residual_rows.data();

  // Coefficient index (m_1-k_1+t_1, ..., m_p-k_p+t_p) for c''(B B^T).
  std::vector<Index> base_idx(static_cast<size_t>(parts));
  for (Index l = 0; l < parts; ++l) {
    base_idx[static_cast<size_t>(l)] =
        p.part_sizes()[l] - p.quotas()[l] + state.part_counts[l];
  }
  Eigen::MatrixXd bbt = b * b.transpose();
  bbt = ((bbt + bbt.transpose()) / 2.0).eval();
  const double c2 = detail::abs_coeff(bbt, p, base_idx, exec);

  StepScores scores;
  scores.denom = static_cast<double>(k - t) * c2;
  scores.raw.assign(static_cast<size_t>(m), 0.0);

  const double zero_row_cut = kDependentRowTol * a.max_row_norm2();
  std::vector<Index> candidates;
  candidates.reserve(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Index l = p.part_of(i);
    if (state.part_counts[l] >= p.quotas()[l]) continue;  // saturated part
    if (std::find(state.chosen.begin(), state.chosen.end(), i) !=
        state.chosen.end()) {
      continue;
    }
    if (b.row(i).squaredNorm() <= zero_row_cut) continue;
    candidates.push_back(i);
  }

  const Index n_cand = static_cast<Index>(candidates.size());
  const bool parallel = exec == Exec::Parallel && n_cand > 1;
#pragma omp parallel for schedule(dynamic) num_threads(max_threads()) if (parallel)
  for (Index c = 0; c < n_cand; ++c) {
    const Index i = candidates[static_cast<size_t>(c)];
    const double norm2 = b.row(i).squaredNorm();
    RowMatrixXd ci = b;
    detail::project_rows_orthogonal_inplace(ci, i);
    Eigen::MatrixXd cct = ci * ci.transpose();
    cct = ((cct + cct.transpose()) / 2.0).eval();
    std::vector<Index> idx = base_idx;
    idx[static_cast<size_t>(p.part_of(i))] += 1;
    scores.raw[static_cast<size_t>(i)] =
        norm2 * detail::abs_coeff(cct, p, idx, Exec::Serial);
  }

  // Clamp relatively negligible scores to zero before normalization.
  const double max_raw =
      *std::max_element(scores.raw.begin(), scores.raw.end());
  if (max_raw > 0.0) {
    for (double& v : scores.raw) {
      if (v < kProbCutoff * max_raw) v = 0.0;
    }
  }

#ifndef NDEBUG
  // Normalization identity: sum_i ||b_i||^2 |c'| == (k - t) |c''|.
  if (scores.denom > 0.0) {
    double sum = 0.0;
    for (double v : scores.raw) sum += v;
    assert(std::abs(sum - scores.denom) <= 1e-6 * scores.denom);
  }
#endif
  return scores;
}

Subset sample_chain(const FeatureMatrix& a, const PartitionSpec& p, RngSeed seed,
                    Exec exec) {
  const Index k = p.total_quota();
  std::mt19937_64 rng(seed.value);
  SampleState state = initial_state(a, p);
  for (Index t = 0; t < k; ++t) {
    const StepScores scores = score_step(a, p, state, exec);
    double total = 0.0;
    for (double v : scores.raw) total += v;
    if (!(total > 0.0)) {
      throw DeadEnd("no candidate has positive probability at step " +
                    std::to_string(t));
    }
    const double u = uniform01(rng) * total;
    Index pick = -1;
    double cum = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
      const double v = scores.raw[static_cast<size_t>(i)];
      if (v <= 0.0) continue;
      cum += v;
      pick = i;
      if (u < cum) break;
    }
    state = advance_state(state, p, pick);
  }
  return Subset(state.chosen);
}

}  // namespace

SampleState initial_state(const FeatureMatrix& a, const PartitionSpec& p) {
  if (a.rows() != p.num_items()) {
    throw InvalidInput("feature matrix size does not match the partition");
  }
  return SampleState{{}, a, std::vector<Index>(static_cast<size_t>(p.num_parts()), 0)};
}

SampleState advance_state(const SampleState& state, const PartitionSpec& p,
                          Index item) {
  if (item < 0 || item >= state.residual_rows.rows()) {
    throw IndexOutOfRange("item index out of range");
  }
  if (std::find(state.chosen.begin(), state.chosen.end(), item) !=
      state.chosen.end()) {
    throw InvalidInput("item already chosen");
  }
  const Index l = p.part_of(item);
  if (state.part_counts[static_cast<size_t>(l)] >= p.quotas()[l]) {
    throw InvalidInput("part quota already saturated");
  }
  SampleState next{state.chosen,
                   project_rows_orthogonal(state.residual_rows, item),
                   state.part_counts};
  next.chosen.push_back(item);
  ++next.part_counts[static_cast<size_t>(l)];
  return next;
}

std::vector<double> marginal_step_probs(const FeatureMatrix& a,
                                        const PartitionSpec& p,
                                        const SampleState& state, Exec exec) {
  check_state(a, p, state);
  const StepScores scores = score_step(a, p, state, exec);
  if (!(scores.denom > 0.0)) {
    throw DeadEnd("conditioning coefficient c'' vanished");
  }
  bool any = false;
  std::vector<double> probs(scores.raw.size(), 0.0);
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] = scores.raw[i] / scores.denom;
    any = any || probs[i] > 0.0;
  }
  if (!any) throw DeadEnd("all step probabilities are zero");
  return probs;
}

Subset sample_kdpp(const FeatureMatrix& a, Index k, RngSeed seed, Exec exec) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (k > a.rows()) throw RankTooLow("k exceeds the number of rows");
  try {
    return sample_chain(a, PartitionSpec::single_part(a.rows(), k), seed, exec);
  } catch (const DeadEnd&) {
    throw RankTooLow("k exceeds rank(A): all step scores vanished");
  }
}

Subset sample_partition_dpp(const FeatureMatrix& a, const PartitionSpec& p,
                            RngSeed seed, Exec exec) {
  if (a.rows() != p.num_items()) {
    throw InvalidInput("feature matrix size does not match the partition");
  }
  if (constrained_partition_function(gram(a), p) <= 0.0) {
    throw EmptySupport("no quota-satisfying subset has positive determinant");
  }
  return sample_chain(a, p, seed, exec);
}

double exact_set_probability(const FeatureMatrix& a, const PartitionSpec& p,
                             const Subset& s) {
  detail::validate_subset(s, a.rows());
  if (!p.satisfies(s)) return 0.0;
  const Kernel k = gram(a);
  const double z = constrained_partition_function(k, p);
  if (z <= 0.0) return 0.0;
  return principal_minor_det(k, s) / z;
}

}  // namespace dpp
