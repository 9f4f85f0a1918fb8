#pragma once

#include <span>
#include <vector>

#include "partdpp/matrix.hpp"
#include "partdpp/parallel.hpp"

namespace dpp {

// An imaginary residual above kImagResidualTol * (1 + max|coeff|) after the
// inverse DFT means the interpolation broke down numerically.
inline constexpr double kImagResidualTol = 1e-6;
// Coefficients at or below kCoeffZeroTol * max|coeff| are snapped to zero.
inline constexpr double kCoeffZeroTol = 1e-10;

// Coefficients c_{i_1,...,i_p} of det(K - x_1 I_1 - ... - x_p I_p) where
// I_l is the diagonal indicator of part l. Shape (m_1+1) x ... x (m_p+1),
// stored flat with the last index fastest. For p = 1 this is the plain
// coefficient list c_0..c_m of det(K - xI).
class CoeffTensor {
 public:
  // Quotas carried by `partition` are not used by the tensor itself.
  CoeffTensor(PartitionSpec partition, std::vector<double> values);

  const PartitionSpec& partition() const { return partition_; }
  const std::vector<Index>& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }

  double at(std::span<const Index> idx) const;
  Index flat_index(std::span<const Index> idx) const;

 private:
  PartitionSpec partition_;
  std::vector<Index> shape_;
  std::vector<double> values_;
};

// Coefficients of det(K - xI) from the eigenvalues of K through the
// elementary symmetric recurrence: c_{m-j} = (-1)^{m-j} e_j(lambda).
// Cheap and exact-sign; the sampler's univariate hot path.
CoeffTensor char_coeffs_univariate(const Kernel& k);

// Full multivariate coefficient tensor by evaluation/interpolation:
// evaluate det(K - sum x_l I_l) on a per-part scaled roots-of-unity grid,
// then recover coefficients with per-dimension inverse DFTs.
CoeffTensor multichar_all_coeffs(const Kernel& k, const PartitionSpec& p,
                                 Exec exec = Exec::Parallel);

// Single entry of multichar_all_coeffs.
double multichar_coeff(const Kernel& k, const PartitionSpec& p,
                       std::span<const Index> idx);

// Sum of det(K_{S,S}) over subsets S meeting the quotas:
// |c_{m_1-k_1, ..., m_p-k_p}|.
double constrained_partition_function(const Kernel& k, const PartitionSpec& p);

namespace detail {

// e_0..e_m of the given values; stable for nonnegative inputs.
std::vector<double> elementary_symmetric(const Eigen::VectorXd& values);

// Tensor from a raw symmetric PSD matrix; skips Kernel validation so the
// sampler can call it per candidate.
CoeffTensor multichar_tensor(const Eigen::MatrixXd& m, const PartitionSpec& p,
                             Exec exec);

// One coefficient with per-entry reliability checks. The full-tensor op
// rejects instances whose coefficient range is too wide to recover in
// doubles, but any single coefficient is fine as long as its own error is
// small; this is what the sampler consumes at large m.
double tensor_entry(const Eigen::MatrixXd& m, const PartitionSpec& p,
                    std::span<const Index> idx, Exec exec);

// |c_idx| of the matrix's multivariate characteristic polynomial, with the
// p == 1 case dispatched to the eigenvalue path.
double abs_coeff(const Eigen::MatrixXd& m, const PartitionSpec& p,
                 std::span<const Index> idx, Exec exec);

// Per-part interpolation radii: mean diagonal entry of the part, with
// global-mean and unit fallbacks for degenerate traces.
std::vector<double> interpolation_radii(const Eigen::MatrixXd& m,
                                        const PartitionSpec& p);

}  // namespace detail

}  // namespace dpp
