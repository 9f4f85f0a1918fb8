// Compares the serial reference implementations of the data-parallel
// kernels against their OpenMP versions: coefficient-tensor interpolation,
// one sampler step, and a local-search run. The two paths are required to
// produce bit-identical results; this reports their timings.

#include <chrono>
#include <cstdio>
#include <random>

#include "partdpp/charpoly.hpp"
#include "partdpp/map_inference.hpp"
#include "partdpp/parallel.hpp"
#include "partdpp/rng.hpp"
#include "partdpp/sampler.hpp"

namespace {

using Clock = std::chrono::steady_clock;

dpp::FeatureMatrix random_features(std::uint64_t seed, dpp::Index m, dpp::Index n) {
  std::mt19937_64 gen(seed);
  dpp::RowMatrixXd a(m, n);
  for (dpp::Index i = 0; i < m; ++i) {
    for (dpp::Index j = 0; j < n; ++j) a(i, j) = dpp::standard_normal(gen);
  }
  return dpp::FeatureMatrix(std::move(a));
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    f();
    const std::chrono::duration<double> d = Clock::now() - start;
    if (d.count() < best) best = d.count();
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-36s serial %9.4fs  parallel %9.4fs  speedup %.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", dpp::max_threads());

  {
    // n = 2m keeps the spectrum away from zero so the full tensor stays
    // recoverable; the grid evaluation is what we are timing.
    const dpp::FeatureMatrix a = random_features(11, 24, 48);
    const dpp::Kernel k = dpp::gram(a);
    std::vector<dpp::Index> labels(24);
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<dpp::Index>(i % 3);
    const dpp::PartitionSpec part(labels, {3, 3, 3});
    const double s = best_of(5, [&] { dpp::multichar_all_coeffs(k, part, dpp::Exec::Serial); });
    const double p = best_of(5, [&] { dpp::multichar_all_coeffs(k, part, dpp::Exec::Parallel); });
    report("multichar tensor m=24 p=3", s, p);
  }

  {
    const dpp::FeatureMatrix a = random_features(12, 30, 30);
    std::vector<dpp::Index> labels(30);
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<dpp::Index>(i % 3);
    const dpp::PartitionSpec part(labels, {2, 2, 2});
    const dpp::SampleState st = dpp::initial_state(a, part);
    const double s =
        best_of(3, [&] { dpp::marginal_step_probs(a, part, st, dpp::Exec::Serial); });
    const double p =
        best_of(3, [&] { dpp::marginal_step_probs(a, part, st, dpp::Exec::Parallel); });
    report("sampler step m=30 p=3", s, p);
  }

  {
    const dpp::FeatureMatrix a = random_features(13, 220, 160);
    const double s =
        best_of(3, [&] { dpp::local_search_map(a, 40, 0.05, dpp::Exec::Serial); });
    const double p =
        best_of(3, [&] { dpp::local_search_map(a, 40, 0.05, dpp::Exec::Parallel); });
    report("local search m=220 k=40", s, p);
  }
  return 0;
}
