#pragma once

#include "margauss/core.hpp"

#include <limits>
#include <string>
#include <vector>

namespace margauss {

enum class BodyKind { product_uniform, product_laplace, product_gaussian, lp_ball, simplex };

/// Isotropic log-concave distribution to sample from.
///
/// Product kinds and lp-balls are 1-unconditional; the simplex is uniform on
/// the regular simplex sqrt(n(n+2)) conv{v_1..v_{n+1}}. `p` is only read for
/// lp_ball and may be +infinity (the cube).
struct BodySpec {
  BodyKind kind = BodyKind::product_gaussian;
  int n = 2;
  double p = 2.0;

  bool unconditional() const { return kind != BodyKind::simplex; }
  bool is_product() const {
    return kind == BodyKind::product_uniform || kind == BodyKind::product_laplace ||
           kind == BodyKind::product_gaussian;
  }
};

/// "product-uniform", "product-laplace", "product-gaussian", "simplex",
/// "lp-ball:P" (P a real >= 1 or "inf").
BodySpec parse_body(const std::string& name, int n);
std::string body_name(const BodySpec& spec);

/// Unit vertices of a centered regular simplex in R^n.
struct SimplexGeometry {
  int n = 0;
  Matrix vertices;  // (n+1) x n, row i is v_i
  double scale = 0.0;  // sqrt(n(n+2))

  int vertex_count() const { return n + 1; }
  /// u_ij = sqrt(n / (2(n+1))) (v_i - v_j); indices are 0-based.
  Vector edge_direction(int i, int j) const;
};

/// Vertices sqrt((n+1)/n) (e_i - 1/(n+1)) expressed in the Helmert basis of
/// the hyperplane orthogonal to (1,...,1) in R^{n+1}.
SimplexGeometry regular_simplex(int n);

/// x^{ij} = <x, u_ij> with 0-based vertex indices.
double edge_functional(const SimplexGeometry& geom, const Eigen::Ref<const Vector>& x, int i,
                       int j);

/// Barycentric weights of x with respect to the scaled vertices.
Vector barycentric(const SimplexGeometry& geom, const Eigen::Ref<const Vector>& x);

/// Largest absolute deviation over the simplex invariants (sum of vertices,
/// unit norms, Gram entries -1/n). The tight-frame identity is checked
/// separately against sample vectors.
double simplex_invariant_residual(const SimplexGeometry& geom);

struct SampleBatch {
  BodySpec body;
  PointMatrix points;  // N x n
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// `geom` may be passed to reuse a simplex geometry; it is built otherwise.
SampleBatch sample_body(const BodySpec& spec, RandomStream& stream, std::size_t count,
                        const SimplexGeometry* geom = nullptr);

/// Coordinate variance of the uniform law on the unit l_p ball in R^n:
/// Gamma(3/p) Gamma(n/p) n / (Gamma(1/p) Gamma((n+2)/p) (n+2)).
double lp_ball_coordinate_variance(int n, double p);

struct IsotropyReport {
  double max_mean_deviation = 0.0;
  double max_mean_z = 0.0;  // in units of its standard error
  double max_cov_deviation = 0.0;
  double max_cov_z = 0.0;
  Estimate squared_norm;  // E|X|^2
  bool pass = true;       // every deviation within 4 SE
};

IsotropyReport isotropy_report(const SampleBatch& batch);

struct KlartagCheck {
  double lhs_est = 0.0;  // Var(sum a_l X_l^2)
  double lhs_se = 0.0;
  double rhs = 0.0;  // 32 sum a_l^2
};

KlartagCheck klartag_variance_check(const BodySpec& spec, const Vector& coefficients,
                                    std::size_t samples, RandomStream& stream);

struct MomentRow {
  std::string label;
  double exact = 0.0;  // exact value, or the upper bound for "abs-third"
  double mc = 0.0;
  double se = 0.0;
};

/// Rows: "disjoint", "overlap-1", "overlap-2" for E (X^{lm})^2 (X^{pq})^2 and
/// "abs-third" for E|X^{12}|^3 against its bound 3 sqrt(2).
std::vector<MomentRow> simplex_moment_check(int n, std::size_t samples, RandomStream& stream);

/// (n+1)(n+2) / ((n+3)(n+4)) times {1, 3, 6} by pair overlap.
double simplex_pair_moment(int n, int overlap);

struct ThirdMomentCheck {
  std::vector<Estimate> per_coordinate;  // E|X_l|^3
  double bound = 0.0;                    // 3 sqrt(2) / 2
};

ThirdMomentCheck third_abs_moment_check(const BodySpec& spec, std::size_t samples,
                                        RandomStream& stream);

}  // namespace margauss
