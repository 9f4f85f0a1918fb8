#include "partdpp/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace dpp {

FeatureMatrix::FeatureMatrix(RowMatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidInput("feature matrix must have at least one row and one column");
  }
  if (!data_.allFinite()) {
    throw InvalidInput("feature matrix contains non-finite entries");
  }
  max_row_norm2_ = data_.rowwise().squaredNorm().maxCoeff();
}

double FeatureMatrix::row_norm2(Index i) const {
  if (i < 0 || i >= rows()) throw IndexOutOfRange("row index out of range");
  return data_.row(i).squaredNorm();
}

Kernel::Kernel(Eigen::MatrixXd data, double psd_tol) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.rows() != data_.cols()) {
    throw InvalidInput("kernel must be a square matrix with at least one row");
  }
  if (!data_.allFinite()) {
    throw InvalidInput("kernel contains non-finite entries");
  }
  const Index m = data_.rows();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const double a = data_(i, j), b = data_(j, i);
      if (std::abs(a - b) > kSymmetryTol * (1.0 + std::abs(a))) {
        throw InvalidInput("kernel is not symmetric at entry (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  // Remove I/O roundoff before the spectral validation.
  data_ = ((data_ + data_.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(data_, Eigen::EigenvaluesOnly);
  Eigen::VectorXd asc = solver.eigenvalues();
  eigenvalues_ = asc.reverse();
  const double lam_max = std::max(eigenvalues_[0], 0.0);
  const double lam_min = eigenvalues_[m - 1];
  if (lam_min < -psd_tol * lam_max) {
    throw NotPsd("kernel has eigenvalue " + std::to_string(lam_min) +
                 " below the PSD tolerance");
  }
}

bool Subset::contains(Index i) const {
  return std::find(indices.begin(), indices.end(), i) != indices.end();
}

Subset Subset::sorted() const {
  Subset out = *this;
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

PartitionSpec::PartitionSpec(std::vector<Index> part_of, std::vector<Index> quotas)
    : part_of_(std::move(part_of)), quotas_(std::move(quotas)) {
  const Index m = num_items();
  if (m < 1) throw InvalidInput("partition needs at least one item");
  const Index p = static_cast<Index>(quotas_.size());
  if (p < 1) throw InvalidInput("partition needs at least one part");
  part_sizes_.assign(p, 0);
  members_.assign(p, {});
  for (Index i = 0; i < m; ++i) {
    const Index l = part_of_[i];
    if (l < 0 || l >= p) {
      throw InvalidInput("item " + std::to_string(i) + " has part label " +
                         std::to_string(l) + " outside [0," + std::to_string(p) + ")");
    }
    ++part_sizes_[l];
    members_[l].push_back(i);
  }
  for (Index l = 0; l < p; ++l) {
    if (quotas_[l] < 0 || quotas_[l] > part_sizes_[l]) {
      throw InvalidInput("quota " + std::to_string(quotas_[l]) + " for part " +
                         std::to_string(l) + " exceeds its size " +
                         std::to_string(part_sizes_[l]));
    }
    total_quota_ += quotas_[l];
  }
  if (total_quota_ < 1) throw InvalidInput("total quota must be at least 1");
}

PartitionSpec PartitionSpec::single_part(Index m, Index k) {
  return PartitionSpec(std::vector<Index>(static_cast<size_t>(m), 0), {k});
}

Index PartitionSpec::part_of(Index item) const {
  if (item < 0 || item >= num_items()) throw IndexOutOfRange("item index out of range");
  return part_of_[item];
}

bool PartitionSpec::satisfies(const Subset& s) const {
  detail::validate_subset(s, num_items());
  std::vector<Index> counts(static_cast<size_t>(num_parts()), 0);
  for (Index i : s.indices) ++counts[part_of_[i]];
  for (Index l = 0; l < num_parts(); ++l) {
    if (counts[l] != quotas_[l]) return false;
  }
  return true;
}

namespace detail {

void validate_subset(const Subset& s, Index m) {
  std::unordered_set<Index> seen;
  for (Index i : s.indices) {
    if (i < 0 || i >= m) throw IndexOutOfRange("subset index out of range");
    if (!seen.insert(i).second) throw InvalidInput("subset indices must be distinct");
  }
}

void project_rows_orthogonal_inplace(RowMatrixXd& m, Index i) {
  const double n2 = m.row(i).squaredNorm();
  const Eigen::RowVectorXd dir = m.row(i);
  const Eigen::VectorXd coeffs = (m * dir.transpose()) / n2;
  m.noalias() -= coeffs * dir;
  m.row(i).setZero();
}

}  // namespace detail

Kernel gram(const FeatureMatrix& a) {
  Eigen::MatrixXd k = a.data() * a.data().transpose();
  return Kernel(((k + k.transpose()) / 2.0).eval());
}

FeatureMatrix factor_kernel(const Kernel& k, double tol) {
  const Index m = k.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.data());
  const Eigen::VectorXd& lam = solver.eigenvalues();  // ascending
  const double lam_max = std::max(lam[m - 1], 0.0);
  if (lam[0] < -tol * lam_max) {
    throw NotPsd("kernel eigenvalue " + std::to_string(lam[0]) +
                 " below -tol * lambda_max; cannot factor");
  }
  std::vector<Index> keep;
  for (Index j = m - 1; j >= 0; --j) {
    if (lam[j] > 0.0) keep.push_back(j);
  }
  const Index n = std::max<Index>(1, static_cast<Index>(keep.size()));
  RowMatrixXd a = RowMatrixXd::Zero(m, n);
  for (size_t c = 0; c < keep.size(); ++c) {
    const Index j = keep[c];
    a.col(static_cast<Index>(c)) = solver.eigenvectors().col(j) * std::sqrt(lam[j]);
  }
  return FeatureMatrix(std::move(a));
}

double principal_minor_det(const Kernel& k, const Subset& s) {
  detail::validate_subset(s, k.size());
  const Index n = s.size();
  if (n == 0) return 1.0;
  Eigen::MatrixXd sub(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      sub(a, b) = k.data()(s.indices[a], s.indices[b]);
    }
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
}

FeatureMatrix project_rows_orthogonal(const FeatureMatrix& b, Index i) {
  if (i < 0 || i >= b.rows()) throw IndexOutOfRange("row index out of range");
  const double n2 = b.row_norm2(i);
  if (n2 <= kDependentRowTol * b.max_row_norm2()) {
    throw ZeroRow("row " + std::to_string(i) + " is numerically zero");
  }
  RowMatrixXd c = b.data();
  detail::project_rows_orthogonal_inplace(c, i);
  return FeatureMatrix(std::move(c));
}

FeatureMatrix residual(const FeatureMatrix& a, const Subset& s) {
  detail::validate_subset(s, a.rows());
  RowMatrixXd b = a.data();
  const double dependent_cut = kDependentRowTol * a.max_row_norm2();
  for (Index i : s.indices) {
    if (b.row(i).squaredNorm() <= dependent_cut) continue;  // dependent row
    detail::project_rows_orthogonal_inplace(b, i);
  }
  return FeatureMatrix(std::move(b));
}

}  // namespace dpp
