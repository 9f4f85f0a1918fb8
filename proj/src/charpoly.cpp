#include "partdpp/charpoly.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

namespace dpp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

std::vector<Index> tensor_shape(const PartitionSpec& p) {
  std::vector<Index> shape(p.part_sizes().size());
  for (size_t l = 0; l < shape.size(); ++l) shape[l] = p.part_sizes()[l] + 1;
  return shape;
}

// Raw interpolation output: unscaled complex coefficients plus the grid
// magnitude that sets the per-entry noise floor.
struct ComplexCoeffs {
  std::vector<Index> shape;
  std::vector<std::complex<double>> values;
  std::vector<double> radii;
  double max_grid_abs = 0.0;

  Index flat_index(std::span<const Index> idx) const {
    Index flat = 0;
    for (size_t l = 0; l < shape.size(); ++l) flat = flat * shape[l] + idx[l];
    return flat;
  }

  // r_1^{i_1} ... r_p^{i_p}: the scale the entry was divided by; errors of
  // the grid evaluation enter an entry attenuated by exactly this factor.
  double scale_at(std::span<const Index> idx) const {
    double s = 1.0;
    for (size_t l = 0; l < shape.size(); ++l) {
      s *= std::pow(radii[l], static_cast<double>(idx[l]));
    }
    return s;
  }
};

// Evaluate det(K - sum_l x_l I_l) on the scaled roots-of-unity grid and
// run per-dimension inverse DFTs. No reliability checks here.
ComplexCoeffs interpolate(const Eigen::MatrixXd& m, const PartitionSpec& p,
                          Exec exec) {
  const Index parts = p.num_parts();
  ComplexCoeffs out;
  out.shape = tensor_shape(p);
  out.radii = detail::interpolation_radii(m, p);
  Index total = 1;
  for (Index g : out.shape) total *= g;

  std::vector<std::complex<double>> vals(static_cast<size_t>(total));
  const Eigen::MatrixXcd base = m.cast<std::complex<double>>();
  const bool parallel = exec == Exec::Parallel && total > 1;
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (parallel)
  for (Index flat = 0; flat < total; ++flat) {
    Eigen::MatrixXcd shifted = base;
    Index rest = flat;
    for (Index l = parts - 1; l >= 0; --l) {
      const Index g = rest % out.shape[l];
      rest /= out.shape[l];
      const std::complex<double> x =
          std::polar(out.radii[static_cast<size_t>(l)],
                     kTwoPi * static_cast<double>(g) / static_cast<double>(out.shape[l]));
      for (Index i : p.part_members()[l]) shifted(i, i) -= x;
    }
    vals[static_cast<size_t>(flat)] =
        Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).determinant();
  }
  double max_grid = 0.0;
  for (const auto& v : vals) max_grid = std::max(max_grid, std::abs(v));
  out.max_grid_abs = max_grid;

  // Per-dimension inverse DFT: a_j = (1/G) sum_g V_g exp(-2*pi*i*j*g/G).
  std::vector<std::complex<double>> line, dft;
  Index stride = 1;
  for (Index l = parts - 1; l >= 0; --l) {
    const Index g_count = out.shape[l];
    std::vector<std::complex<double>> twiddle(static_cast<size_t>(g_count));
    for (Index t = 0; t < g_count; ++t) {
      twiddle[static_cast<size_t>(t)] = std::polar(
          1.0, -kTwoPi * static_cast<double>(t) / static_cast<double>(g_count));
    }
    line.resize(static_cast<size_t>(g_count));
    dft.resize(static_cast<size_t>(g_count));
    const Index block = g_count * stride;
    for (Index base_outer = 0; base_outer < total; base_outer += block) {
      for (Index inner = 0; inner < stride; ++inner) {
        const Index start = base_outer + inner;
        for (Index g = 0; g < g_count; ++g) {
          line[static_cast<size_t>(g)] = vals[static_cast<size_t>(start + g * stride)];
        }
        for (Index j = 0; j < g_count; ++j) {
          std::complex<double> acc(0.0, 0.0);
          for (Index g = 0; g < g_count; ++g) {
            acc += line[static_cast<size_t>(g)] *
                   twiddle[static_cast<size_t>((j * g) % g_count)];
          }
          dft[static_cast<size_t>(j)] = acc / static_cast<double>(g_count);
        }
        for (Index j = 0; j < g_count; ++j) {
          vals[static_cast<size_t>(start + j * stride)] = dft[static_cast<size_t>(j)];
        }
      }
    }
    stride *= g_count;
  }

  // Unscale by r_l^{i_l}.
  std::vector<std::vector<double>> rpow(static_cast<size_t>(parts));
  for (Index l = 0; l < parts; ++l) {
    rpow[static_cast<size_t>(l)].resize(static_cast<size_t>(out.shape[l]));
    double pw = 1.0;
    for (Index j = 0; j < out.shape[l]; ++j) {
      rpow[static_cast<size_t>(l)][static_cast<size_t>(j)] = pw;
      pw *= out.radii[static_cast<size_t>(l)];
    }
  }
  for (Index flat = 0; flat < total; ++flat) {
    Index rest = flat;
    double scale = 1.0;
    for (Index l = parts - 1; l >= 0; --l) {
      const Index j = rest % out.shape[l];
      rest /= out.shape[l];
      scale *= rpow[static_cast<size_t>(l)][static_cast<size_t>(j)];
    }
    vals[static_cast<size_t>(flat)] /= scale;
  }
  out.values = std::move(vals);
  return out;
}

}  // namespace

CoeffTensor::CoeffTensor(PartitionSpec partition, std::vector<double> values)
    : partition_(std::move(partition)),
      shape_(tensor_shape(partition_)),
      values_(std::move(values)) {
  Index total = 1;
  for (Index g : shape_) total *= g;
  if (static_cast<Index>(values_.size()) != total) {
    throw InvalidInput("coefficient tensor size does not match the partition");
  }
}

Index CoeffTensor::flat_index(std::span<const Index> idx) const {
  if (idx.size() != shape_.size()) {
    throw IndexOutOfRange("coefficient index has wrong arity");
  }
  Index flat = 0;
  for (size_t l = 0; l < shape_.size(); ++l) {
    if (idx[l] < 0 || idx[l] >= shape_[l]) {
      throw IndexOutOfRange("coefficient index out of range in dimension " +
                            std::to_string(l));
    }
    flat = flat * shape_[l] + idx[l];
  }
  return flat;
}

double CoeffTensor::at(std::span<const Index> idx) const {
  return values_[static_cast<size_t>(flat_index(idx))];
}

namespace detail {

std::vector<double> elementary_symmetric(const Eigen::VectorXd& values) {
  const Index m = values.size();
  std::vector<double> e(static_cast<size_t>(m) + 1, 0.0);
  e[0] = 1.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = std::min<Index>(i + 1, m); j >= 1; --j) {
      e[j] += values[i] * e[j - 1];
    }
  }
  return e;
}

std::vector<double> interpolation_radii(const Eigen::MatrixXd& m,
                                        const PartitionSpec& p) {
  const double global_mean = m.diagonal().mean();
  std::vector<double> radii(static_cast<size_t>(p.num_parts()), 1.0);
  for (Index l = 0; l < p.num_parts(); ++l) {
    double part_sum = 0.0;
    for (Index i : p.part_members()[l]) part_sum += m(i, i);
    const double part_mean =
        p.part_sizes()[l] > 0 ? part_sum / static_cast<double>(p.part_sizes()[l]) : 0.0;
    if (part_mean > 0.0) {
      radii[static_cast<size_t>(l)] = part_mean;
    } else if (global_mean > 0.0) {
      radii[static_cast<size_t>(l)] = global_mean;
    }
  }
  return radii;
}

CoeffTensor multichar_tensor(const Eigen::MatrixXd& m, const PartitionSpec& p,
                             Exec exec) {
  if (m.rows() != p.num_items()) {
    throw InvalidInput("matrix size does not match the partition");
  }
  const ComplexCoeffs raw = interpolate(m, p, exec);

  double max_abs = 0.0, max_imag = 0.0;
  std::vector<double> coeffs(raw.values.size());
  for (size_t i = 0; i < raw.values.size(); ++i) {
    coeffs[i] = raw.values[i].real();
    max_abs = std::max(max_abs, std::abs(coeffs[i]));
    max_imag = std::max(max_imag, std::abs(raw.values[i].imag()));
  }
  if (max_imag > kImagResidualTol * (1.0 + max_abs)) {
    throw InterpolationResidual(
        "imaginary residual " + std::to_string(max_imag) +
        " exceeds tolerance; the coefficient range of this instance is too "
        "wide for a full-tensor recovery");
  }
  const double zero_cut = kCoeffZeroTol * max_abs;
  for (double& c : coeffs) {
    if (std::abs(c) <= zero_cut) c = 0.0;
  }
  return CoeffTensor(p, std::move(coeffs));
}

double tensor_entry(const Eigen::MatrixXd& m, const PartitionSpec& p,
                    std::span<const Index> idx, Exec exec) {
  if (m.rows() != p.num_items()) {
    throw InvalidInput("matrix size does not match the partition");
  }
  const ComplexCoeffs raw = interpolate(m, p, exec);
  const std::complex<double> c =
      raw.values[static_cast<size_t>(raw.flat_index(idx))];
  // The entry's own imaginary part tracks its error; entries outside the
  // recoverable range fail loudly instead of returning noise.
  if (std::abs(c.imag()) > kImagResidualTol * (1.0 + std::abs(c.real()))) {
    throw InterpolationResidual("coefficient at the requested index has "
                                "imaginary residual " +
                                std::to_string(std::abs(c.imag())));
  }
  // Noise floor for this entry: grid roundoff attenuated by its unscaling
  // factor. Anything at or below it is a structural zero.
  const double noise = kCoeffZeroTol * raw.max_grid_abs / raw.scale_at(idx);
  if (std::abs(c.real()) <= noise) return 0.0;
  return c.real();
}

double abs_coeff(const Eigen::MatrixXd& m, const PartitionSpec& p,
                 std::span<const Index> idx, Exec exec) {
  if (p.num_parts() == 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    Eigen::VectorXd lam = solver.eigenvalues().cwiseMax(0.0);
    const std::vector<double> e = elementary_symmetric(lam);
    return e[static_cast<size_t>(m.rows() - idx[0])];
  }
  return std::abs(tensor_entry(m, p, idx, exec));
}

}  // namespace detail

CoeffTensor char_coeffs_univariate(const Kernel& k) {
  const Index m = k.size();
  const std::vector<double> e = detail::elementary_symmetric(k.eigenvalues());
  std::vector<double> coeffs(static_cast<size_t>(m) + 1);
  for (Index j = 0; j <= m; ++j) {
    const double sign = (m - j) % 2 == 0 ? 1.0 : -1.0;
    coeffs[static_cast<size_t>(m - j)] = sign * e[static_cast<size_t>(j)];
  }
  return CoeffTensor(PartitionSpec::single_part(m, 1), std::move(coeffs));
}

CoeffTensor multichar_all_coeffs(const Kernel& k, const PartitionSpec& p, Exec exec) {
  if (k.size() != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  return detail::multichar_tensor(k.data(), p, exec);
}

double multichar_coeff(const Kernel& k, const PartitionSpec& p,
                       std::span<const Index> idx) {
  if (k.size() != p.num_items()) {
    throw InvalidInput("kernel size does not match the partition");
  }
  if (idx.size() != static_cast<size_t>(p.num_parts())) {
    throw IndexOutOfRange("coefficient index has wrong arity");
  }
  for (size_t l = 0; l < idx.size(); ++l) {
    if (idx[l] < 0 || idx[l] > p.part_sizes()[static_cast<Index>(l)]) {
      throw IndexOutOfRange("coefficient index out of range in dimension " +
                            std::to_string(l));
    }
  }
  return detail::tensor_entry(k.data(), p, idx, Exec::Parallel);
}

double constrained_partition_function(const Kernel& k, const PartitionSpec& p) {
  std::vector<Index> idx(static_cast<size_t>(p.num_parts()));
  for (Index l = 0; l < p.num_parts(); ++l) {
    idx[static_cast<size_t>(l)] = p.part_sizes()[l] - p.quotas()[l];
  }
  return std::abs(multichar_coeff(k, p, idx));
}

}  // namespace dpp
