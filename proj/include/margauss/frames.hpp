#pragma once

#include "margauss/core.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace margauss {

struct SimplexGeometry;

enum class FrameKind { walsh, haar, coordinate, custom };

std::string to_string(FrameKind kind);
FrameKind parse_frame_kind(const std::string& name);

/// k orthonormal rows theta_1..theta_k in R^n.
struct Frame {
  Matrix rows;  // k x n
  FrameKind kind = FrameKind::custom;

  int k() const { return static_cast<int>(rows.rows()); }
  int n() const { return static_cast<int>(rows.cols()); }
};

struct FrameFunctionals {
  double l4_sum = 0.0;  // sum_i ||theta_i||_4^2
  double l3_sum = 0.0;  // sum_i ||theta_i||_3^2
  std::optional<double> simplex_quartic;  // sum_i sqrt(sum_l <theta_i, v_l>^4)
  std::optional<double> simplex_cubic;    // sum_l |<theta_1, v_l>|^3, k = 1
};

inline bool is_power_of_two(long long m) { return m >= 1 && (m & (m - 1)) == 0; }

/// Largest power of two not exceeding n.
inline int largest_power_of_two(int n) {
  int m = 1;
  while (m <= n / 2) m *= 2;
  return m;
}

/// Sylvester-ordered Hadamard matrix of order m. Instantiate with an integer
/// scalar for exact arithmetic.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sylvester_hadamard(int m) {
  if (!is_power_of_two(m))
    throw std::invalid_argument("sylvester_hadamard: order " + std::to_string(m) +
                                " is not a power of 2");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h(m, m);
  h(0, 0) = Scalar(1);
  for (int size = 1; size < m; size *= 2) {
    h.block(0, size, size, size) = h.block(0, 0, size, size);
    h.block(size, 0, size, size) = h.block(0, 0, size, size);
    h.block(size, size, size, size) = -h.block(0, 0, size, size);
  }
  return h;
}

/// max_{i,j} |<r_i, r_j> - delta_ij| over the rows of `rows`.
template <typename Derived>
double orthonormality_residual(const Eigen::MatrixBase<Derived>& rows) {
  const auto gram = (rows * rows.transpose()).eval();
  return (gram - Matrix::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
}

/// First k Sylvester rows of order m = 2^floor(log2 n), scaled by m^{-1/2} and
/// zero-padded to length n.
Frame walsh_frame(int n, int k);

/// Orthonormalized iid Gaussian rows (Haar-distributed k-frame).
Frame haar_frame(int n, int k, RandomStream& stream);

/// Standard basis vectors e_1..e_k.
Frame coordinate_frame(int n, int k);

/// Wraps user-supplied rows; throws unless they are orthonormal to 1e-10.
Frame custom_frame(Matrix rows);

Frame make_frame(FrameKind kind, int n, int k, RandomStream& stream);

/// W_i = <x, theta_i>.
Vector project(const Frame& frame, const Eigen::Ref<const Vector>& x);
/// Row-wise projection of a batch of points (N x n) to N x k.
PointMatrix project_batch(const Frame& frame, const PointMatrix& points);

/// `want_cubic` requests the k = 1 simplex cubic functional.
FrameFunctionals frame_functionals(const Frame& frame, const SimplexGeometry* geom = nullptr,
                                   bool want_cubic = false);

}  // namespace margauss
