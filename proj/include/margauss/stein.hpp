#pragma once

#include "margauss/bodies.hpp"
#include "margauss/frames.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace margauss {

/// Exchangeable-pair setup: reflections in coordinate hyperplanes for
/// unconditional bodies, vertex transpositions for the simplex. lambda = 2/n
/// for both.
struct PairSpec {
  BodySpec body;
  Frame frame;
  std::optional<SimplexGeometry> geom;  // present iff body is the simplex
  double lambda = 0.0;

  int n() const { return body.n; }
  int k() const { return frame.k(); }
};

PairSpec make_pair_spec(const BodySpec& body, Frame frame);

struct PairStatistics {
  Estimate term_E;   // (1/lambda) E sqrt(sum_ij E_ij^2)
  Estimate term_M3;  // E|W' - W|^3
  // Var E[(W'-W)^2 | X]; an upper bound for the W-conditioned variance. k = 1.
  std::optional<Estimate> condvar_proxy;
  std::size_t N = 0;
  int k = 0;
  int n = 0;
};

struct BoundReport {
  std::string source;  // thm1 | thm2 | thm3 | cor-wass-tv | cor-tv-univ | prop-cm-d2 | prop-stein
  std::optional<double> d1_bound;
  std::optional<double> dtv_bound;
  // cor-wass-tv only: the TV bound before absorbing constants, with c_smooth
  // as the smoothing constant.
  std::optional<double> dtv_explicit;
  std::optional<double> d2_bound;
  // prop-stein only: bound over test functions with |g|, |g'| <= 1.
  std::optional<double> dbl_bound;
  ConstantsConfig constants;
};

/// Returns (W, W') for the reflection X' = X - 2 X_I e_I (0-based I).
std::pair<Vector, Vector> reflect_pair(const Eigen::Ref<const Vector>& x, int index,
                                       const Frame& frame);

/// Returns (W, W') for X' = X - 2 X^{IJ} u_IJ (0-based vertex indices).
std::pair<Vector, Vector> transpose_pair(const Eigen::Ref<const Vector>& x, int i, int j,
                                         const SimplexGeometry& geom, const Frame& frame);

/// E[(W'-W)(W'-W)^T | X = x] - 2 lambda I from the closed forms:
/// (4/n)(sum_l theta_i^l theta_j^l x_l^2 - delta_ij) for reflections and
/// (4/n)((1/(n+1)) sum_{l != m} theta_i^{lm} theta_j^{lm} (x^{lm})^2 - delta_ij)
/// for transpositions.
Matrix stein_error_matrix(const Eigen::Ref<const Vector>& x, const PairSpec& spec);

struct ConditionalResiduals {
  double linearity = 0.0;      // max_i |E[W'_i - W_i | X] + lambda W_i|
  double second_moment = 0.0;  // max_ij |E[dW_i dW_j | X] - 2 lambda delta_ij - E_ij|
};

/// Averages the increment over every symmetry index exactly (n reflections or
/// n(n+1) ordered transpositions) and compares with the closed forms.
ConditionalResiduals conditional_checks(const Eigen::Ref<const Vector>& x, const PairSpec& spec);

/// term_E from the closed-form E_ij(X); term_M3 from one sampled symmetry
/// index per sample. Requires N >= 10^4.
PairStatistics estimate_pair_terms(const PairSpec& spec, std::size_t samples,
                                   RandomStream& stream);

enum class Theorem { unconditional, simplex, simplex_univariate };

/// Closed-form theorem bounds from the frame functionals.
BoundReport theorem_bounds(Theorem which, const Frame& frame, const SimplexGeometry* geom,
                           const ConstantsConfig& constants);

/// Every theorem that applies to the body and k.
std::vector<BoundReport> applicable_theorem_bounds(const PairSpec& spec,
                                                   const ConstantsConfig& constants);

/// Semi-empirical bounds: cor-wass-tv, prop-cm-d2 and, when k = 1,
/// cor-tv-univ and prop-stein.
std::vector<BoundReport> corollary_bounds(const PairStatistics& stats, double lambda,
                                          const ConstantsConfig& constants);

/// Univariate TV bound from the X-conditioned variance proxy. Throws for k > 1.
BoundReport tv_univariate_bound(const PairStatistics& stats, double lambda,
                                const ConstantsConfig& constants);

/// d1 <= term_E + k^{1/4} sqrt((2 / (3 lambda)) term_M3).
double wasserstein_corollary_d1(double term_E, double term_M3, int k, double lambda);

}  // namespace margauss
