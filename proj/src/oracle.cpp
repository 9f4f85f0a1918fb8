#include "partdpp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpp::oracle {

namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (Index i = 0; i < k; ++i) {
    v = v * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return v;
}

void check_subset_budget(double count, const char* what) {
  if (count > static_cast<double>(kMaxSubsets)) {
    throw TooLarge(std::string(what) + " would enumerate " +
                   std::to_string(count) + " subsets (limit " +
                   std::to_string(kMaxSubsets) + ")");
  }
}

double cofactor_det(const Eigen::MatrixXd& m) {
  const Index n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double det = 0.0;
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 1; r < n; ++r) {
      Index mc = 0;
      for (Index cc = 0; cc < n; ++cc) {
        if (cc == c) continue;
        minor(r - 1, mc++) = m(r, cc);
      }
    }
    const double sign = c % 2 == 0 ? 1.0 : -1.0;
    det += sign * m(0, c) * cofactor_det(minor);
  }
  return det;
}

// Bareiss fraction-free elimination with partial pivoting.
double bareiss_det(Eigen::MatrixXd m) {
  const Index n = m.rows();
  double sign = 1.0;
  double prev = 1.0;
  for (Index k = 0; k < n - 1; ++k) {
    Index pivot = k;
    for (Index r = k + 1; r < n; ++r) {
      if (std::abs(m(r, k)) > std::abs(m(pivot, k))) pivot = r;
    }
    if (m(pivot, k) == 0.0) return 0.0;
    if (pivot != k) {
      m.row(pivot).swap(m.row(k));
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i) {
      for (Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0.0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& k, const std::vector<Index>& s) {
  const Index n = static_cast<Index>(s.size());
  Eigen::MatrixXd sub(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      sub(a, b) = k(s[static_cast<size_t>(a)], s[static_cast<size_t>(b)]);
    }
  }
  return sub;
}

double minor_det(const Eigen::MatrixXd& k, const std::vector<Index>& s) {
  if (s.empty()) return 1.0;
  return reference_det(submatrix(k, s));
}

// All ways to pick `count` members from `pool` (ascending), lexicographic.
std::vector<std::vector<Index>> combinations(const std::vector<Index>& pool,
                                             Index count) {
  std::vector<std::vector<Index>> out;
  const Index n = static_cast<Index>(pool.size());
  if (count < 0 || count > n) return out;
  std::vector<Index> pick(static_cast<size_t>(count));
  // iterative combination enumeration over positions in `pool`
  std::vector<Index> pos(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) pos[static_cast<size_t>(i)] = i;
  while (true) {
    for (Index i = 0; i < count; ++i) {
      pick[static_cast<size_t>(i)] = pool[static_cast<size_t>(pos[static_cast<size_t>(i)])];
    }
    out.push_back(pick);
    if (count == 0) break;
    Index i = count - 1;
    while (i >= 0 && pos[static_cast<size_t>(i)] == n - count + i) --i;
    if (i < 0) break;
    ++pos[static_cast<size_t>(i)];
    for (Index j = i + 1; j < count; ++j) {
      pos[static_cast<size_t>(j)] = pos[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return out;
}

// Subsets drawing counts[l] items from pools[l], merged and sorted, then
// listed lexicographically.
std::vector<Subset> enumerate_with_counts(
    const std::vector<std::vector<Index>>& pools, const std::vector<Index>& counts,
    const char* what) {
  double total = 1.0;
  for (size_t l = 0; l < pools.size(); ++l) {
    total *= binomial(static_cast<Index>(pools[l].size()), counts[l]);
  }
  check_subset_budget(total, what);
  if (total == 0.0) return {};

  std::vector<std::vector<std::vector<Index>>> per_part;
  per_part.reserve(pools.size());
  for (size_t l = 0; l < pools.size(); ++l) {
    per_part.push_back(combinations(pools[l], counts[l]));
  }
  std::vector<Subset> out;
  out.reserve(static_cast<size_t>(total));
  std::vector<size_t> cursor(pools.size(), 0);
  while (true) {
    std::vector<Index> merged;
    for (size_t l = 0; l < pools.size(); ++l) {
      const auto& c = per_part[l][cursor[l]];
      merged.insert(merged.end(), c.begin(), c.end());
    }
    std::sort(merged.begin(), merged.end());
    out.push_back(Subset(std::move(merged)));
    size_t l = pools.size();
    while (l > 0) {
      --l;
      if (++cursor[l] < per_part[l].size()) break;
      cursor[l] = 0;
      if (l == 0) {
        std::sort(out.begin(), out.end());
        return out;
      }
    }
  }
}

}  // namespace

double reference_det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant needs a square matrix");
  if (m.rows() == 0) return 1.0;
  if (m.rows() <= 6) return cofactor_det(m);
  return bareiss_det(m);
}

std::vector<Subset> enumerate_valid_subsets(const PartitionSpec& p) {
  std::vector<std::vector<Index>> pools = p.part_members();
  return enumerate_with_counts(pools, p.quotas(), "enumerate_valid_subsets");
}

double brute_partition_function(const Kernel& k, const PartitionSpec& p) {
  if (k.size() != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  double z = 0.0;
  for (const Subset& s : enumerate_valid_subsets(p)) {
    z += minor_det(k.data(), s.indices);
  }
  return z;
}

std::map<Subset, double> brute_distribution(const Kernel& k, const PartitionSpec& p) {
  if (k.size() != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  std::map<Subset, double> masses;
  double z = 0.0;
  for (const Subset& s : enumerate_valid_subsets(p)) {
    const double d = minor_det(k.data(), s.indices);
    masses[s] = d;
    z += d;
  }
  if (!(z > 0.0)) throw EmptySupport("partition function is zero");
  for (auto& [s, mass] : masses) mass /= z;
  return masses;
}

double brute_marginal(const Kernel& k, const PartitionSpec& p,
                      const std::vector<Index>& prefix, Index i) {
  const Index m = k.size();
  if (m != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  detail::validate_subset(Subset(prefix), m);
  if (i < 0 || i >= m) throw IndexOutOfRange("item index out of range");
  if (std::find(prefix.begin(), prefix.end(), i) != prefix.end()) {
    throw InvalidInput("item already in the prefix");
  }
  const Index t = static_cast<Index>(prefix.size());
  const Index k_total = p.total_quota();
  if (t >= k_total) throw InvalidInput("prefix already holds k items");

  std::vector<Index> t_counts(static_cast<size_t>(p.num_parts()), 0);
  for (Index x : prefix) ++t_counts[static_cast<size_t>(p.part_of(x))];

  // Pools exclude the prefix; the numerator additionally excludes item i.
  std::vector<std::vector<Index>> den_pools(static_cast<size_t>(p.num_parts()));
  std::vector<std::vector<Index>> num_pools(static_cast<size_t>(p.num_parts()));
  for (Index x = 0; x < m; ++x) {
    if (std::find(prefix.begin(), prefix.end(), x) != prefix.end()) continue;
    den_pools[static_cast<size_t>(p.part_of(x))].push_back(x);
    if (x != i) num_pools[static_cast<size_t>(p.part_of(x))].push_back(x);
  }
  std::vector<Index> den_counts(static_cast<size_t>(p.num_parts()));
  std::vector<Index> num_counts(static_cast<size_t>(p.num_parts()));
  bool feasible = true;
  for (Index l = 0; l < p.num_parts(); ++l) {
    den_counts[static_cast<size_t>(l)] = p.quotas()[l] - t_counts[static_cast<size_t>(l)];
    num_counts[static_cast<size_t>(l)] = den_counts[static_cast<size_t>(l)];
    if (den_counts[static_cast<size_t>(l)] < 0) feasible = false;
  }
  if (!feasible) throw InvalidInput("prefix violates the quotas");
  num_counts[static_cast<size_t>(p.part_of(i))] -= 1;
  if (num_counts[static_cast<size_t>(p.part_of(i))] < 0) return 0.0;

  double den = 0.0;
  for (const Subset& completion :
       enumerate_with_counts(den_pools, den_counts, "brute_marginal")) {
    std::vector<Index> full = prefix;
    full.insert(full.end(), completion.indices.begin(), completion.indices.end());
    std::sort(full.begin(), full.end());
    den += minor_det(k.data(), full);
  }
  if (!(den > 0.0)) throw EmptySupport("prefix has no completion with positive mass");

  double num = 0.0;
  for (const Subset& completion :
       enumerate_with_counts(num_pools, num_counts, "brute_marginal")) {
    std::vector<Index> full = prefix;
    full.push_back(i);
    full.insert(full.end(), completion.indices.begin(), completion.indices.end());
    std::sort(full.begin(), full.end());
    num += minor_det(k.data(), full);
  }
  return num / (static_cast<double>(k_total - t) * den);
}

std::pair<Subset, double> brute_map_opt(const FeatureMatrix& a, Index k) {
  const Index m = a.rows();
  if (k < 1 || k > m) throw InvalidInput("k out of range");
  check_subset_budget(binomial(m, k), "brute_map_opt");
  std::vector<Index> all(static_cast<size_t>(m));
  for (Index x = 0; x < m; ++x) all[static_cast<size_t>(x)] = x;

  Subset best;
  double best_det = -1.0;
  for (const auto& pick : combinations(all, k)) {
    // Gram of the picked rows via direct dot products.
    Eigen::MatrixXd g(k, k);
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) {
        g(r, c) = a.data().row(pick[static_cast<size_t>(r)])
                      .dot(a.data().row(pick[static_cast<size_t>(c)]));
      }
    }
    const double d = reference_det(g);
    if (d > best_det) {
      best_det = d;
      best = Subset(pick);
    }
  }
  return {best, best_det};
}

double iyer_mixture_value(const Kernel& k, const PartitionSpec& p) {
  if (k.size() != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  double total_count = 0.0;
  for (Index l = 0; l < p.num_parts(); ++l) {
    for (Index kap = 1; kap <= p.quotas()[l]; ++kap) {
      total_count += binomial(p.part_sizes()[l], kap);
    }
  }
  check_subset_budget(total_count, "iyer_mixture_value");

  double value = 0.0;
  for (Index l = 0; l < p.num_parts(); ++l) {
    for (Index kap = 1; kap <= p.quotas()[l]; ++kap) {
      for (const auto& t : combinations(p.part_members()[l], kap)) {
        value += minor_det(k.data(), t);
      }
    }
  }
  return value;
}

}  // namespace dpp::oracle
