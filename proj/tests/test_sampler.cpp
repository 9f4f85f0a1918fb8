#include <doctest.h>

#include <map>
#include <random>

#include "partdpp/oracle.hpp"
#include "partdpp/sampler.hpp"
#include "stat_util.hpp"
#include "test_util.hpp"

using namespace dpp;
using testutil::rel_err;

namespace {

FeatureMatrix identity_features(Index m) {
  return FeatureMatrix(RowMatrixXd::Identity(m, m));
}

// Replays a prefix through advance_state.
SampleState state_after(const FeatureMatrix& a, const PartitionSpec& p,
                        const std::vector<Index>& prefix) {
  SampleState st = initial_state(a, p);
  for (Index i : prefix) st = advance_state(st, p, i);
  return st;
}

std::map<Subset, Index> draw_histogram(const FeatureMatrix& a, const PartitionSpec* p,
                                       Index k, Index n_draws, std::uint64_t seed) {
  std::map<Subset, Index> counts;
  for (Index j = 0; j < n_draws; ++j) {
    const RngSeed s = derive_seed(RngSeed{seed}, static_cast<std::uint64_t>(j));
    const Subset draw = p ? sample_partition_dpp(a, *p, s) : sample_kdpp(a, k, s);
    ++counts[draw.sorted()];
  }
  return counts;
}

double chi_square_pvalue_vs_oracle(const std::map<Subset, Index>& counts,
                                   const std::map<Subset, double>& dist, Index n_draws) {
  std::vector<double> observed, expected;
  Index seen = 0;
  for (const auto& [s, prob] : dist) {
    expected.push_back(prob * static_cast<double>(n_draws));
    const auto it = counts.find(s);
    const Index c = it == counts.end() ? 0 : it->second;
    seen += c;
    observed.push_back(static_cast<double>(c));
  }
  REQUIRE(seen == n_draws);  // every draw lands in the oracle support
  const double stat = dpp::stat::chi_square_stat(observed, expected);
  return dpp::stat::chi_square_sf(stat, static_cast<int>(dist.size()) - 1);
}

}  // namespace

TEST_CASE("marginal_step_probs: uniform identity start") {
  const FeatureMatrix a = identity_features(4);
  const PartitionSpec part({0, 0, 1, 1}, {1, 1});
  const auto probs = marginal_step_probs(a, part, initial_state(a, part));
  REQUIRE(probs.size() == 4);
  for (double p : probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("marginal_step_probs: saturated part gets exact zeros") {
  std::mt19937_64 gen(31);
  const FeatureMatrix a = testutil::random_features(gen, 5, 5);
  const PartitionSpec part({0, 0, 1, 1, 1}, {1, 2});
  const SampleState st = state_after(a, part, {1});  // saturates part 0
  const auto probs = marginal_step_probs(a, part, st);
  CHECK(probs[0] == 0.0);
  CHECK(probs[1] == 0.0);  // already chosen
  CHECK(probs[2] > 0.0);
}

TEST_CASE("marginal_step_probs matches brute_marginal on random reachable states") {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 12; ++trial) {
    const Index m = testutil::uniform_index(gen, 4, 7);
    const FeatureMatrix a = testutil::random_features(gen, m, m + 1);
    const Kernel k = gram(a);
    const PartitionSpec part = testutil::random_partition(gen, m, 2);
    // draw a reachable prefix by sampling a few steps
    const Index t = testutil::uniform_index(gen, 0, part.total_quota() - 1);
    Subset full = sample_partition_dpp(a, part, RngSeed{gen()});
    std::vector<Index> prefix(full.indices.begin(), full.indices.begin() + t);
    const SampleState st = state_after(a, part, prefix);
    const auto probs = marginal_step_probs(a, part, st);
    double total = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (std::find(prefix.begin(), prefix.end(), i) != prefix.end()) {
        CHECK(probs[static_cast<size_t>(i)] == 0.0);
        continue;
      }
      const double expected = oracle::brute_marginal(k, part, prefix, i);
      CHECK(std::abs(probs[static_cast<size_t>(i)] - expected) <= 1e-8);
      total += probs[static_cast<size_t>(i)];
    }
    // normalization identity, phrased on the returned ratios
    CHECK(std::abs(total - 1.0) <= 1e-6);
  }
}

TEST_CASE("sample_kdpp: two-item hand case") {
  RowMatrixXd rows(2, 2);
  rows << 1.0, 0.0, 0.0, std::sqrt(3.0);
  const FeatureMatrix a(rows);
  Index count1 = 0;
  const Index n = 20000;
  for (Index j = 0; j < n; ++j) {
    const Subset s = sample_kdpp(a, 1, derive_seed(RngSeed{9}, static_cast<std::uint64_t>(j)));
    REQUIRE(s.size() == 1);
    if (s.indices[0] == 0) ++count1;
  }
  // Pr({1}) = 1/4; binomial std dev ~ 0.0031
  const double freq = static_cast<double>(count1) / static_cast<double>(n);
  CHECK(std::abs(freq - 0.25) < 0.015);
}

TEST_CASE("sample_kdpp: identity kernel is uniform (chi-square)") {
  const FeatureMatrix a = identity_features(5);
  const Index n = 20000;
  const auto counts = draw_histogram(a, nullptr, 2, n, 77);
  const auto dist =
      oracle::brute_distribution(gram(a), PartitionSpec::single_part(5, 2));
  CHECK(chi_square_pvalue_vs_oracle(counts, dist, n) > 0.001);
}

TEST_CASE("sample_kdpp throws RankTooLow beyond the rank") {
  RowMatrixXd rows(3, 2);
  rows << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;  // rank 2
  CHECK_THROWS_AS(sample_kdpp(FeatureMatrix(rows), 3, RngSeed{1}), RankTooLow);
  CHECK_THROWS_AS(sample_kdpp(identity_features(3), 4, RngSeed{1}), RankTooLow);
}

TEST_CASE("sample_partition_dpp: identity uniform over the four valid sets") {
  const FeatureMatrix a = identity_features(4);
  const PartitionSpec part({0, 0, 1, 1}, {1, 1});
  const Index n = 20000;
  const auto counts = draw_histogram(a, &part, 0, n, 13);
  REQUIRE(counts.size() == 4);
  const auto dist = oracle::brute_distribution(gram(a), part);
  CHECK(chi_square_pvalue_vs_oracle(counts, dist, n) > 0.001);
}

TEST_CASE("every partition draw satisfies the quotas exactly") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = testutil::uniform_index(gen, 4, 8);
    const FeatureMatrix a = testutil::random_features(gen, m, m);
    const PartitionSpec part = testutil::random_partition(gen, m, 2);
    for (int rep = 0; rep < 5; ++rep) {
      const Subset s = sample_partition_dpp(a, part, RngSeed{gen()});
      CHECK(part.satisfies(s));
      CHECK(principal_minor_det(gram(a), s) > 0.0);
    }
  }
}

TEST_CASE("p = 1 partition sampling equals sample_kdpp draw for draw") {
  std::mt19937_64 gen(34);
  const FeatureMatrix a = testutil::random_features(gen, 6, 6);
  const PartitionSpec part = PartitionSpec::single_part(6, 3);
  for (int rep = 0; rep < 50; ++rep) {
    const RngSeed seed{gen()};
    CHECK(sample_partition_dpp(a, part, seed).indices ==
          sample_kdpp(a, 3, seed).indices);
  }
}

TEST_CASE("sampling is reproducible across seeds and execution modes") {
  std::mt19937_64 gen(35);
  const FeatureMatrix a = testutil::random_features(gen, 7, 7);
  const PartitionSpec part({0, 1, 0, 1, 0, 1, 0}, {2, 1});
  for (int rep = 0; rep < 10; ++rep) {
    const RngSeed seed{gen()};
    const Subset s1 = sample_partition_dpp(a, part, seed, Exec::Serial);
    const Subset s2 = sample_partition_dpp(a, part, seed, Exec::Parallel);
    const Subset s3 = sample_partition_dpp(a, part, seed, Exec::Parallel);
    CHECK(s1.indices == s2.indices);
    CHECK(s2.indices == s3.indices);
  }
}

TEST_CASE("sample_partition_dpp throws EmptySupport when Z = 0") {
  // rank-1 features but the quotas demand two independent rows from part 0
  RowMatrixXd rows(3, 2);
  rows << 1.0, 0.0, 2.0, 0.0, 3.0, 0.0;
  const PartitionSpec part({0, 0, 1}, {2, 1});
  CHECK_THROWS_AS(sample_partition_dpp(FeatureMatrix(rows), part, RngSeed{3}),
                  EmptySupport);
}

TEST_CASE("exact_set_probability: hand cases and oracle agreement") {
  const FeatureMatrix a = identity_features(4);
  const PartitionSpec part({0, 0, 1, 1}, {1, 1});
  CHECK(exact_set_probability(a, part, Subset{0, 2}) == doctest::Approx(0.25));
  CHECK(exact_set_probability(a, part, Subset{0, 1}) == 0.0);  // violates quotas

  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 8; ++trial) {
    const Index m = testutil::uniform_index(gen, 4, 7);
    const FeatureMatrix f = testutil::random_features(gen, m, m + 2);
    const PartitionSpec p = testutil::random_partition(gen, m, 2);
    const auto dist = oracle::brute_distribution(gram(f), p);
    for (const auto& [s, prob] : dist) {
      CHECK(rel_err(exact_set_probability(f, p, s), prob) <= 1e-7);
    }
  }
}

TEST_CASE("chain consistency: step-probability product times k! is the set probability") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 8; ++trial) {
    const Index m = testutil::uniform_index(gen, 4, 6);
    const FeatureMatrix a = testutil::random_features(gen, m, m);
    const PartitionSpec part = testutil::random_partition(gen, m, 2);
    const Subset s = sample_partition_dpp(a, part, RngSeed{gen()});

    double chain = 1.0;
    SampleState st = initial_state(a, part);
    for (Index i : s.indices) {
      chain *= marginal_step_probs(a, part, st)[static_cast<size_t>(i)];
      st = advance_state(st, part, i);
    }
    double factorial = 1.0;
    for (Index j = 2; j <= part.total_quota(); ++j) factorial *= static_cast<double>(j);
    CHECK(rel_err(chain * factorial, exact_set_probability(a, part, s)) <= 1e-6);
  }
}

TEST_CASE("label equivariance: permuting items permutes the step probabilities") {
  std::mt19937_64 gen(38);
  const Index m = 6;
  const FeatureMatrix a = testutil::random_features(gen, m, m);
  const std::vector<Index> labels{0, 0, 1, 1, 1, 0};
  const PartitionSpec part(labels, {1, 2});

  const std::vector<Index> perm{3, 0, 5, 1, 4, 2};  // new_index -> old_index
  RowMatrixXd pm(m, a.cols());
  std::vector<Index> plabels(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) {
    pm.row(i) = a.data().row(perm[static_cast<size_t>(i)]);
    plabels[static_cast<size_t>(i)] = labels[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  }
  const FeatureMatrix ap(pm);
  const PartitionSpec partp(plabels, {1, 2});

  const auto probs = marginal_step_probs(a, part, initial_state(a, part));
  const auto probsp = marginal_step_probs(ap, partp, initial_state(ap, partp));
  for (Index i = 0; i < m; ++i) {
    CHECK(probsp[static_cast<size_t>(i)] ==
          doctest::Approx(probs[static_cast<size_t>(perm[static_cast<size_t>(i)])]).epsilon(1e-9));
  }
}

TEST_CASE("random partition draws match the oracle distribution (chi-square)") {
  std::mt19937_64 gen(39);
  const FeatureMatrix a = testutil::random_features(gen, 6, 4);
  const PartitionSpec part({0, 0, 0, 1, 1, 1}, {1, 1});
  const Index n = 20000;
  const auto counts = draw_histogram(a, &part, 0, n, 99);
  const auto dist = oracle::brute_distribution(gram(a), part);
  CHECK(chi_square_pvalue_vs_oracle(counts, dist, n) > 0.001);
}
