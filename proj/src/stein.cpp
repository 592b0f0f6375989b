#include "margauss/stein.hpp"

#include <cmath>
#include <stdexcept>

namespace margauss {

namespace {

// Closed-form E(x) with the simplex projections <theta_i, v_l> precomputed.
//
// For the transposition pair the double sum over vertex pairs collapses to
// power sums: with p_l = <theta_i, v_l>, q_l = <theta_j, v_l>, r_l = <x, v_l>
// and S[f] = sum_l f_l,
//   sum_{l,m} (p_l - p_m)(q_l - q_m)(r_l - r_m)^2
//     = 2 ((n+1) S[pqr^2] + S[pq] S[r^2] - 2 S[pqr] S[r]
//          - S[pr^2] S[q] - S[p] S[qr^2] + 2 S[pr] S[qr]).
class ErrorMatrixKernel {
 public:
  explicit ErrorMatrixKernel(const PairSpec& spec) : spec_(spec) {
    if (spec.geom) {
      vertex_proj_ = spec.frame.rows * spec.geom->vertices.transpose();  // k x (n+1)
      const double n = spec.n();
      edge_scale_ = std::sqrt(n / (2.0 * (n + 1.0)));
    }
  }

  bool simplex() const { return spec_.geom.has_value(); }
  const Matrix& vertex_proj() const { return vertex_proj_; }
  double edge_scale() const { return edge_scale_; }

  // r = V x is supplied by the caller for the simplex (batched GEMM).
  Matrix compute(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& r) const {
    const int k = spec_.k();
    const double n = spec_.n();
    Matrix out(k, k);
    if (!simplex()) {
      const Vector x2 = x.array().square();
      out.noalias() = spec_.frame.rows * x2.asDiagonal() * spec_.frame.rows.transpose();
    } else {
      const double vertices = n + 1.0;
      const Eigen::ArrayXd r1 = r.array();
      const Eigen::ArrayXd r2 = r1.square();
      const double sr = r1.sum();
      const double sr2 = r2.sum();
      const double c4 = edge_scale_ * edge_scale_ * edge_scale_ * edge_scale_;
      for (int i = 0; i < k; ++i) {
        const Eigen::ArrayXd p = vertex_proj_.row(i).transpose().array();
        for (int j = i; j < k; ++j) {
          const Eigen::ArrayXd q = vertex_proj_.row(j).transpose().array();
          const Eigen::ArrayXd pq = p * q;
          const double total =
              2.0 * (vertices * (pq * r2).sum() + pq.sum() * sr2 - 2.0 * (pq * r1).sum() * sr -
                     (p * r2).sum() * q.sum() - p.sum() * (q * r2).sum() +
                     2.0 * (p * r1).sum() * (q * r1).sum());
          out(i, j) = out(j, i) = c4 * total / vertices;
        }
      }
    }
    out.diagonal().array() -= 1.0;
    return (4.0 / n) * out;
  }

 private:
  const PairSpec& spec_;
  Matrix vertex_proj_;
  double edge_scale_ = 0.0;
};

void check_point(const PairSpec& spec, Eigen::Index size) {
  if (size != spec.n()) throw std::invalid_argument("pair: point dimension mismatch");
}

}  // namespace

PairSpec make_pair_spec(const BodySpec& body, Frame frame) {
  if (frame.n() != body.n)
    throw std::invalid_argument("make_pair_spec: frame dimension " + std::to_string(frame.n()) +
                                " does not match body dimension " + std::to_string(body.n));
  PairSpec spec{body, std::move(frame), std::nullopt, 2.0 / body.n};
  if (body.kind == BodyKind::simplex) spec.geom = regular_simplex(body.n);
  return spec;
}

std::pair<Vector, Vector> reflect_pair(const Eigen::Ref<const Vector>& x, int index,
                                       const Frame& frame) {
  if (x.size() != frame.n()) throw std::invalid_argument("reflect_pair: dimension mismatch");
  if (index < 0 || index >= frame.n())
    throw std::invalid_argument("reflect_pair: index " + std::to_string(index) +
                                " out of range");
  Vector w = frame.rows * x;
  Vector w_prime = w - 2.0 * x[index] * frame.rows.col(index);
  return {std::move(w), std::move(w_prime)};
}

std::pair<Vector, Vector> transpose_pair(const Eigen::Ref<const Vector>& x, int i, int j,
                                         const SimplexGeometry& geom, const Frame& frame) {
  if (x.size() != frame.n() || geom.n != frame.n())
    throw std::invalid_argument("transpose_pair: dimension mismatch");
  const Vector u = geom.edge_direction(i, j);  // rejects i == j
  Vector w = frame.rows * x;
  Vector w_prime = w - 2.0 * x.dot(u) * (frame.rows * u);
  return {std::move(w), std::move(w_prime)};
}

Matrix stein_error_matrix(const Eigen::Ref<const Vector>& x, const PairSpec& spec) {
  check_point(spec, x.size());
  const ErrorMatrixKernel kernel(spec);
  if (kernel.simplex()) return kernel.compute(x, spec.geom->vertices * x);
  return kernel.compute(x, x);
}

ConditionalResiduals conditional_checks(const Eigen::Ref<const Vector>& x, const PairSpec& spec) {
  check_point(spec, x.size());
  const int k = spec.k();
  const int n = spec.n();
  Vector mean_step = Vector::Zero(k);
  Matrix mean_outer = Matrix::Zero(k, k);
  Vector w = spec.frame.rows * x;
  std::size_t count = 0;
  auto accumulate = [&](const std::pair<Vector, Vector>& pair) {
    const Vector d = pair.second - pair.first;
    mean_step += d;
    mean_outer.noalias() += d * d.transpose();
    ++count;
  };
  if (spec.geom) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        if (i != j) accumulate(transpose_pair(x, i, j, *spec.geom, spec.frame));
  } else {
    for (int i = 0; i < n; ++i) accumulate(reflect_pair(x, i, spec.frame));
  }
  mean_step /= static_cast<double>(count);
  mean_outer /= static_cast<double>(count);
  Matrix expected = stein_error_matrix(x, spec);
  expected.diagonal().array() += 2.0 * spec.lambda;
  ConditionalResiduals out;
  out.linearity = (mean_step + spec.lambda * w).cwiseAbs().maxCoeff();
  out.second_moment = (mean_outer - expected).cwiseAbs().maxCoeff();
  return out;
}

PairStatistics estimate_pair_terms(const PairSpec& spec, std::size_t samples,
                                   RandomStream& stream) {
  if (samples < 10000) throw std::invalid_argument("estimate_pair_terms: need N >= 10^4");
  const int k = spec.k();
  const int n = spec.n();
  const bool univariate = k == 1;
  const ErrorMatrixKernel kernel(spec);
  const auto sizes = batch_sizes(samples, kDefaultBatches);

  struct Part {
    double sum_E = 0.0;
    double sum_M3 = 0.0;
    double sum_v = 0.0;
    double sum_v2 = 0.0;
    double var_v = 0.0;
  };
  const auto parts = ordered_map<Part>(sizes.size(), [&](std::size_t b) {
    RandomStream draw = stream.split(2 * b);
    RandomStream pick = stream.split(2 * b + 1);
    const SampleBatch batch =
        sample_body(spec.body, draw, sizes[b], spec.geom ? &*spec.geom : nullptr);
    const auto& pts = batch.points;
    PointMatrix vertex_coords;
    if (kernel.simplex()) vertex_coords = pts * spec.geom->vertices.transpose();
    Part part;
    std::vector<double> vs;
    if (univariate) vs.reserve(sizes[b]);
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      const Vector x = pts.row(r).transpose();
      Vector step(k);
      Matrix e;
      if (kernel.simplex()) {
        const Vector rv = vertex_coords.row(r).transpose();
        e = kernel.compute(x, rv);
        const int vertices = n + 1;
        const int i = static_cast<int>(pick.index(vertices));
        int j = static_cast<int>(pick.index(vertices - 1));
        if (j >= i) ++j;
        const double c = kernel.edge_scale();
        const double x_ij = c * (rv[i] - rv[j]);
        step = -2.0 * x_ij * c * (kernel.vertex_proj().col(i) - kernel.vertex_proj().col(j));
      } else {
        e = kernel.compute(x, x);
        const int i = static_cast<int>(pick.index(n));
        step = -2.0 * x[i] * spec.frame.rows.col(i);
      }
      part.sum_E += e.norm();
      part.sum_M3 += std::pow(step.norm(), 3);
      if (univariate) {
        const double v = e(0, 0);
        part.sum_v += v;
        part.sum_v2 += v * v;
        vs.push_back(v);
      }
    }
    if (univariate) {
      const double m = part.sum_v / static_cast<double>(vs.size());
      double ss = 0.0;
      for (double v : vs) ss += (v - m) * (v - m);
      part.var_v = ss / static_cast<double>(vs.size() - 1);
    }
    return part;
  });

  std::vector<double> sums_E, sums_M3, vars;
  double sum_v = 0.0, sum_v2 = 0.0;
  for (const auto& p : parts) {
    sums_E.push_back(p.sum_E);
    sums_M3.push_back(p.sum_M3);
    vars.push_back(p.var_v);
    sum_v += p.sum_v;
    sum_v2 += p.sum_v2;
  }
  PairStatistics stats;
  stats.N = samples;
  stats.k = k;
  stats.n = n;
  const double inv_lambda = 1.0 / spec.lambda;
  stats.term_E = combine_batch_means(sums_E, sizes);
  stats.term_E.value *= inv_lambda;
  stats.term_E.se *= inv_lambda;
  stats.term_M3 = combine_batch_means(sums_M3, sizes);
  if (univariate) {
    const double N = static_cast<double>(samples);
    const double mean = sum_v / N;
    const double var = std::max(0.0, (sum_v2 - N * mean * mean) / (N - 1.0));
    stats.condvar_proxy = Estimate{var, standard_error(vars)};
  }
  return stats;
}

BoundReport theorem_bounds(Theorem which, const Frame& frame, const SimplexGeometry* geom,
                           const ConstantsConfig& constants) {
  constants.validate();
  const double k = frame.k();
  BoundReport rep;
  rep.constants = constants;
  switch (which) {
    case Theorem::unconditional: {
      const double l4 = frame_functionals(frame).l4_sum;
      rep.source = "thm1";
      rep.d1_bound = 14.0 * std::sqrt(k * l4);
      rep.dtv_bound = constants.C_tv_multi * std::pow(k, 5.0 / 6.0) * std::cbrt(l4);
      break;
    }
    case Theorem::simplex: {
      if (geom == nullptr) throw std::invalid_argument("theorem_bounds: simplex needs geometry");
      const double sq = *frame_functionals(frame, geom).simplex_quartic;
      rep.source = "thm2";
      rep.d1_bound = 20.0 * std::sqrt(k * sq);
      rep.dtv_bound = constants.C_tv_multi * std::pow(k, 5.0 / 6.0) * std::cbrt(sq);
      break;
    }
    case Theorem::simplex_univariate: {
      if (geom == nullptr) throw std::invalid_argument("theorem_bounds: simplex needs geometry");
      if (frame.k() != 1)
        throw std::invalid_argument("theorem_bounds: the univariate simplex bound needs k = 1");
      const double cubic = *frame_functionals(frame, geom, true).simplex_cubic;
      rep.source = "thm3";
      rep.dtv_bound = constants.C_tv_simplex1d * std::sqrt(cubic);
      break;
    }
  }
  return rep;
}

std::vector<BoundReport> applicable_theorem_bounds(const PairSpec& spec,
                                                   const ConstantsConfig& constants) {
  std::vector<BoundReport> out;
  if (spec.geom) {
    out.push_back(theorem_bounds(Theorem::simplex, spec.frame, &*spec.geom, constants));
    if (spec.k() == 1)
      out.push_back(
          theorem_bounds(Theorem::simplex_univariate, spec.frame, &*spec.geom, constants));
  } else {
    out.push_back(theorem_bounds(Theorem::unconditional, spec.frame, nullptr, constants));
  }
  return out;
}

BoundReport tv_univariate_bound(const PairStatistics& stats, double lambda,
                                const ConstantsConfig& constants) {
  if (stats.k != 1) throw std::invalid_argument("tv_univariate_bound: needs k = 1");
  if (!stats.condvar_proxy)
    throw std::invalid_argument("tv_univariate_bound: missing conditional variance proxy");
  BoundReport tv;
  tv.source = "cor-tv-univ";
  tv.constants = constants;
  tv.dtv_bound = std::sqrt(stats.condvar_proxy->value) / lambda +
                 2.0 * std::sqrt(stats.term_M3.value / lambda);
  return tv;
}

double wasserstein_corollary_d1(double term_E, double term_M3, int k, double lambda) {
  return term_E + std::pow(static_cast<double>(k), 0.25) * std::sqrt(2.0 * term_M3 / (3.0 * lambda));
}

std::vector<BoundReport> corollary_bounds(const PairStatistics& stats, double lambda,
                                          const ConstantsConfig& constants) {
  constants.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("corollary_bounds: lambda must be positive");
  const double k = stats.k;
  const double term_E = stats.term_E.value;
  const double m3 = stats.term_M3.value;
  std::vector<BoundReport> out;

  BoundReport wass;
  wass.source = "cor-wass-tv";
  wass.constants = constants;
  wass.d1_bound = wasserstein_corollary_d1(term_E, m3, stats.k, lambda);
  wass.dtv_bound = constants.C_tv_multi * std::cbrt(k * term_E + k * k / lambda * m3);
  {
    // min_t (A + 2B/(ck)) / t^2 + ckt = 3 * 2^{-2/3} P^{1/3} Q^{2/3}.
    const double pi = 3.14159265358979323846;
    const double a = std::sqrt(pi) / (12.0 * lambda) * m3;
    const double b = std::sqrt(2.0) / pi * term_E;
    const double q = constants.c_smooth * k;
    const double p = a + 2.0 * b / q;
    wass.dtv_explicit = 3.0 * std::pow(2.0, -2.0 / 3.0) * std::cbrt(p) * std::cbrt(q * q);
  }
  out.push_back(wass);

  BoundReport d2;
  d2.source = "prop-cm-d2";
  d2.constants = constants;
  d2.d2_bound = term_E + std::sqrt(2.0 * 3.14159265358979323846) / (24.0 * lambda) * m3;
  out.push_back(d2);

  if (stats.k == 1 && stats.condvar_proxy) {
    out.push_back(tv_univariate_bound(stats, lambda, constants));
    BoundReport stein;
    stein.source = "prop-stein";
    stein.constants = constants;
    stein.dbl_bound = std::sqrt(stats.condvar_proxy->value) / lambda + m3 / (4.0 * lambda);
    out.push_back(stein);
  }
  return out;
}

}  // namespace margauss
