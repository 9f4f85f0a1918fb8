#pragma once

#include <Eigen/Dense>

#include <compare>
#include <initializer_list>
#include <vector>

#include "partdpp/errors.hpp"

namespace dpp {

using Index = Eigen::Index;
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Relative tolerance for the symmetry check on kernel construction.
inline constexpr double kSymmetryTol = 1e-10;
// Eigenvalues of a kernel must satisfy lambda >= -kPsdTol * lambda_max.
inline constexpr double kPsdTol = 1e-8;
// A row whose squared norm falls below kDependentRowTol times the largest
// squared row norm is treated as linearly dependent / numerically zero.
inline constexpr double kDependentRowTol = 1e-12;

// Dense m x n matrix of item feature vectors, one item per row.
// Immutable after construction; all entries finite.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(RowMatrixXd data);

  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }
  const RowMatrixXd& data() const { return data_; }

  double row_norm2(Index i) const;
  // Largest squared row norm, cached at construction. Dependence and
  // zero-row thresholds are relative to this.
  double max_row_norm2() const { return max_row_norm2_; }

 private:
  RowMatrixXd data_;
  double max_row_norm2_ = 0.0;
};

// Symmetric positive semidefinite similarity matrix. Construction
// symmetrizes by averaging (i,j) and (j,i) and validates the spectrum;
// eigenvalues are kept (sorted descending).
class Kernel {
 public:
  explicit Kernel(Eigen::MatrixXd data, double psd_tol = kPsdTol);

  Index size() const { return data_.rows(); }
  const Eigen::MatrixXd& data() const { return data_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double lambda_max() const { return eigenvalues_.size() ? eigenvalues_[0] : 0.0; }

 private:
  Eigen::MatrixXd data_;
  Eigen::VectorXd eigenvalues_;
};

// Ordered list of distinct item indices (0-based).
struct Subset {
  std::vector<Index> indices;

  Subset() = default;
  Subset(std::initializer_list<Index> init) : indices(init) {}
  explicit Subset(std::vector<Index> init) : indices(std::move(init)) {}

  Index size() const { return static_cast<Index>(indices.size()); }
  bool contains(Index i) const;
  Subset sorted() const;

  friend auto operator<=>(const Subset&, const Subset&) = default;
};

// Disjoint partition of the m items into p parts together with a quota
// vector (k_1, ..., k_p). Immutable after construction.
class PartitionSpec {
 public:
  // part_of[i] is the 0-based part label of item i.
  PartitionSpec(std::vector<Index> part_of, std::vector<Index> quotas);

  static PartitionSpec single_part(Index m, Index k);

  Index num_items() const { return static_cast<Index>(part_of_.size()); }
  Index num_parts() const { return static_cast<Index>(part_sizes_.size()); }
  Index part_of(Index item) const;
  const std::vector<Index>& part_sizes() const { return part_sizes_; }
  const std::vector<Index>& quotas() const { return quotas_; }
  // Members of each part, ascending.
  const std::vector<std::vector<Index>>& part_members() const { return members_; }
  // k = sum of quotas.
  Index total_quota() const { return total_quota_; }

  // True iff |S .. P_l| == k_l for every part.
  bool satisfies(const Subset& s) const;

 private:
  std::vector<Index> part_of_;
  std::vector<Index> part_sizes_;
  std::vector<Index> quotas_;
  std::vector<std::vector<Index>> members_;
  Index total_quota_ = 0;
};

// K = A A^T, exactly symmetric by construction.
Kernel gram(const FeatureMatrix& a);

// Spectral factor A with A A^T == K up to a 1e-8 relative Frobenius error.
// Eigenvalues in [-tol * lambda_max, 0] are clipped to zero; anything more
// negative throws NotPsd.
FeatureMatrix factor_kernel(const Kernel& k, double tol = kPsdTol);

// det(K_{S,S}); 1 for the empty subset.
double principal_minor_det(const Kernel& k, const Subset& s);

// Projects every row of B orthogonal to row i. Row i of the result is
// exactly zero. Throws ZeroRow when row i is numerically zero.
FeatureMatrix project_rows_orthogonal(const FeatureMatrix& b, Index i);

// B = A - pi_S(A): iterated row projections over a maximal linearly
// independent subset of S's rows; dependent rows are skipped.
FeatureMatrix residual(const FeatureMatrix& a, const Subset& s);

namespace detail {
// Shared projection step; row i of m becomes exactly zero.
void project_rows_orthogonal_inplace(RowMatrixXd& m, Index i);
// Distinctness + range validation; throws IndexOutOfRange / InvalidInput.
void validate_subset(const Subset& s, Index m);
}  // namespace detail

}  // namespace dpp
