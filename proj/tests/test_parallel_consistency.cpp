#include <doctest.h>

#include <random>

#include "partdpp/charpoly.hpp"
#include "partdpp/map_inference.hpp"
#include "partdpp/sampler.hpp"
#include "test_util.hpp"

using namespace dpp;

// The OpenMP kernels fill per-slot results and reduce in fixed index order,
// so the serial reference and the parallel path must agree bit for bit.

TEST_CASE("multichar tensors are bitwise identical across execution modes") {
  std::mt19937_64 gen(91);
  for (int trial = 0; trial < 6; ++trial) {
    const Index m = testutil::uniform_index(gen, 4, 10);
    const Index p = testutil::uniform_index(gen, 1, 3);
    const FeatureMatrix a = testutil::random_features(gen, m, m);
    const Kernel k = gram(a);
    const PartitionSpec part = testutil::random_partition(gen, m, p);
    const CoeffTensor serial = multichar_all_coeffs(k, part, Exec::Serial);
    const CoeffTensor parallel = multichar_all_coeffs(k, part, Exec::Parallel);
    REQUIRE(serial.values().size() == parallel.values().size());
    for (size_t i = 0; i < serial.values().size(); ++i) {
      CHECK(serial.values()[i] == parallel.values()[i]);
    }
  }
}

TEST_CASE("step probabilities are bitwise identical across execution modes") {
  std::mt19937_64 gen(92);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = testutil::uniform_index(gen, 5, 9);
    const FeatureMatrix a = testutil::random_features(gen, m, m);
    const PartitionSpec part = testutil::random_partition(gen, m, 2);
    const SampleState st = initial_state(a, part);
    const auto serial = marginal_step_probs(a, part, st, Exec::Serial);
    const auto parallel = marginal_step_probs(a, part, st, Exec::Parallel);
    CHECK(serial == parallel);
  }
}

TEST_CASE("whole draws are identical across execution modes") {
  std::mt19937_64 gen(93);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = testutil::uniform_index(gen, 5, 9);
    const FeatureMatrix a = testutil::random_features(gen, m, m);
    const PartitionSpec part = testutil::random_partition(gen, m, 3);
    const RngSeed seed{gen()};
    CHECK(sample_partition_dpp(a, part, seed, Exec::Serial).indices ==
          sample_partition_dpp(a, part, seed, Exec::Parallel).indices);
  }
}

TEST_CASE("local search is identical across execution modes") {
  std::mt19937_64 gen(94);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureMatrix a = testutil::random_features(gen, 10, 7);
    const MapResult serial = local_search_map(a, 3, 0.1, Exec::Serial);
    const MapResult parallel = local_search_map(a, 3, 0.1, Exec::Parallel);
    CHECK(serial.subset.indices == parallel.subset.indices);
    CHECK(serial.log_det == parallel.log_det);
    CHECK(serial.swaps_performed == parallel.swaps_performed);
  }
}
