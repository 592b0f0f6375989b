#include "margauss/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace margauss {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void require_dimension(int n) {
  if (n < 1) throw std::invalid_argument("body dimension must be >= 1");
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double p = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad lp-ball exponent '" + text + "'");
  return p;
}

void sample_simplex(const SimplexGeometry& geom, RandomStream& stream, PointMatrix& out) {
  const int vertices = geom.vertex_count();
  PointMatrix weights(out.rows(), vertices);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double total = 0.0;
    for (int i = 0; i < vertices; ++i) {
      weights(r, i) = stream.exponential();
      total += weights(r, i);
    }
    weights.row(r) /= total;
  }
  out.noalias() = geom.scale * (weights * geom.vertices);
}

void sample_lp_ball(int n, double p, RandomStream& stream, PointMatrix& out) {
  if (std::isinf(p)) {
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (int c = 0; c < n; ++c) out(r, c) = kSqrt3 * (2.0 * stream.uniform() - 1.0);
    return;
  }
  // g_i with density proportional to exp(-|t|^p): |g_i|^p ~ Gamma(1/p).
  // (g_1..g_n) / (sum |g_i|^p + E)^{1/p} is uniform on the unit l_p ball.
  const double scale = 1.0 / std::sqrt(lp_ball_coordinate_variance(n, p));
  const double shape = 1.0 / p;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double total = 0.0;
    for (int c = 0; c < n; ++c) {
      const double g = stream.gamma(shape);
      const double sign = stream.uniform() < 0.5 ? -1.0 : 1.0;
      out(r, c) = sign * std::pow(g, shape);
      total += g;
    }
    total += stream.exponential();
    out.row(r) *= scale / std::pow(total, shape);
  }
}

}  // namespace

BodySpec parse_body(const std::string& name, int n) {
  require_dimension(n);
  BodySpec spec;
  spec.n = n;
  if (name == "product-uniform") {
    spec.kind = BodyKind::product_uniform;
  } else if (name == "product-laplace") {
    spec.kind = BodyKind::product_laplace;
  } else if (name == "product-gaussian") {
    spec.kind = BodyKind::product_gaussian;
  } else if (name == "simplex") {
    spec.kind = BodyKind::simplex;
    if (n < 2) throw std::invalid_argument("simplex body needs n >= 2");
  } else if (name.rfind("lp-ball:", 0) == 0) {
    spec.kind = BodyKind::lp_ball;
    spec.p = parse_p(name.substr(8));
    if (!(spec.p >= 1.0)) throw std::invalid_argument("lp-ball needs p >= 1");
  } else {
    throw std::invalid_argument("unknown body kind '" + name + "'");
  }
  return spec;
}

std::string body_name(const BodySpec& spec) {
  switch (spec.kind) {
    case BodyKind::product_uniform: return "product-uniform";
    case BodyKind::product_laplace: return "product-laplace";
    case BodyKind::product_gaussian: return "product-gaussian";
    case BodyKind::simplex: return "simplex";
    case BodyKind::lp_ball: {
      if (std::isinf(spec.p)) return "lp-ball:inf";
      char buf[64];
      std::snprintf(buf, sizeof buf, "lp-ball:%g", spec.p);
      return buf;
    }
  }
  return "unknown";
}

Vector SimplexGeometry::edge_direction(int i, int j) const {
  if (i < 0 || j < 0 || i > n || j > n)
    throw std::invalid_argument("edge_direction: vertex index out of range");
  if (i == j) throw std::invalid_argument("edge_direction: i and j must differ");
  const double c = std::sqrt(static_cast<double>(n) / (2.0 * (n + 1)));
  return c * (vertices.row(i) - vertices.row(j)).transpose();
}

SimplexGeometry regular_simplex(int n) {
  if (n < 2) throw std::invalid_argument("regular_simplex: n must be >= 2");
  SimplexGeometry geom;
  geom.n = n;
  geom.scale = std::sqrt(static_cast<double>(n) * (n + 2));
  geom.vertices = Matrix::Zero(n + 1, n);
  const double stretch = std::sqrt(static_cast<double>(n + 1) / n);
  // Helmert row h_c = (1,..,1, -c, 0,..,0) / sqrt(c(c+1)) with c ones.
  for (int c = 1; c <= n; ++c) {
    const double norm = std::sqrt(static_cast<double>(c) * (c + 1));
    for (int i = 0; i < c; ++i) geom.vertices(i, c - 1) = stretch / norm;
    geom.vertices(c, c - 1) = -stretch * c / norm;
  }
  return geom;
}

double edge_functional(const SimplexGeometry& geom, const Eigen::Ref<const Vector>& x, int i,
                       int j) {
  if (x.size() != geom.n) throw std::invalid_argument("edge_functional: dimension mismatch");
  return x.dot(geom.edge_direction(i, j));
}

Vector barycentric(const SimplexGeometry& geom, const Eigen::Ref<const Vector>& x) {
  if (x.size() != geom.n) throw std::invalid_argument("barycentric: dimension mismatch");
  // <x, v_j> = scale (c_j (n+1)/n - 1/n)
  const double n = geom.n;
  return ((n / geom.scale) * (geom.vertices * x).array() + 1.0) / (n + 1.0);
}

double simplex_invariant_residual(const SimplexGeometry& geom) {
  const double n = geom.n;
  double worst = geom.vertices.colwise().sum().cwiseAbs().maxCoeff();
  Matrix gram = geom.vertices * geom.vertices.transpose();
  gram.diagonal().array() -= 1.0 + 1.0 / n;
  gram.array() += 1.0 / n;
  return std::max(worst, gram.cwiseAbs().maxCoeff());
}

double lp_ball_coordinate_variance(int n, double p) {
  require_dimension(n);
  if (!(p >= 1.0)) throw std::invalid_argument("lp_ball_coordinate_variance: p must be >= 1");
  if (std::isinf(p)) return 1.0 / 3.0;
  const double log_value = std::lgamma(3.0 / p) + std::lgamma(n / p) - std::lgamma(1.0 / p) -
                           std::lgamma((n + 2.0) / p);
  return std::exp(log_value) * n / (n + 2.0);
}

SampleBatch sample_body(const BodySpec& spec, RandomStream& stream, std::size_t count,
                        const SimplexGeometry* geom) {
  if (count < 1) throw std::invalid_argument("sample_body: count must be >= 1");
  require_dimension(spec.n);
  SampleBatch batch{spec, PointMatrix(static_cast<Eigen::Index>(count), spec.n), stream.seed(),
                    stream.stream_id()};
  auto& pts = batch.points;
  switch (spec.kind) {
    case BodyKind::product_uniform:
      for (Eigen::Index r = 0; r < pts.rows(); ++r)
        for (int c = 0; c < spec.n; ++c) pts(r, c) = kSqrt3 * (2.0 * stream.uniform() - 1.0);
      break;
    case BodyKind::product_laplace: {
      const double b = 1.0 / std::sqrt(2.0);
      for (Eigen::Index r = 0; r < pts.rows(); ++r)
        for (int c = 0; c < spec.n; ++c) {
          const double e = b * stream.exponential();
          pts(r, c) = stream.uniform() < 0.5 ? -e : e;
        }
      break;
    }
    case BodyKind::product_gaussian:
      for (Eigen::Index r = 0; r < pts.rows(); ++r)
        for (int c = 0; c < spec.n; ++c) pts(r, c) = stream.normal();
      break;
    case BodyKind::lp_ball:
      if (!(spec.p >= 1.0)) throw std::invalid_argument("sample_body: lp-ball needs p >= 1");
      sample_lp_ball(spec.n, spec.p, stream, pts);
      break;
    case BodyKind::simplex: {
      if (geom != nullptr) {
        if (geom->n != spec.n) throw std::invalid_argument("sample_body: geometry mismatch");
        sample_simplex(*geom, stream, pts);
      } else {
        sample_simplex(regular_simplex(spec.n), stream, pts);
      }
      break;
    }
  }
  return batch;
}

IsotropyReport isotropy_report(const SampleBatch& batch) {
  const auto& x = batch.points;
  const Eigen::Index count = x.rows();
  if (count < 100) throw std::invalid_argument("isotropy_report: need at least 100 samples");
  const double N = static_cast<double>(count);
  IsotropyReport rep;
  const int n = static_cast<int>(x.cols());
  for (int i = 0; i < n; ++i) {
    const auto col = x.col(i).array();
    const double mean = col.mean();
    const double sd = std::sqrt((col - mean).square().sum() / (N - 1.0));
    const double dev = std::abs(mean);
    rep.max_mean_deviation = std::max(rep.max_mean_deviation, dev);
    rep.max_mean_z = std::max(rep.max_mean_z, sd > 0 ? dev / (sd / std::sqrt(N)) : 0.0);
    for (int j = i; j < n; ++j) {
      const Eigen::ArrayXd prod = col * x.col(j).array();
      const double m = prod.mean();
      const double psd = std::sqrt((prod - m).square().sum() / (N - 1.0));
      const double cdev = std::abs(m - (i == j ? 1.0 : 0.0));
      rep.max_cov_deviation = std::max(rep.max_cov_deviation, cdev);
      const double z = psd > 0 ? cdev / (psd / std::sqrt(N)) : (cdev > 0 ? INFINITY : 0.0);
      rep.max_cov_z = std::max(rep.max_cov_z, z);
    }
  }
  const Eigen::ArrayXd sq = x.rowwise().squaredNorm().array();
  const double m = sq.mean();
  rep.squared_norm = {m, std::sqrt((sq - m).square().sum() / (N - 1.0) / N)};
  rep.pass = rep.max_mean_z <= 4.0 && rep.max_cov_z <= 4.0;
  return rep;
}

KlartagCheck klartag_variance_check(const BodySpec& spec, const Vector& coefficients,
                                    std::size_t samples, RandomStream& stream) {
  if (!spec.unconditional())
    throw std::invalid_argument("klartag_variance_check: body must be unconditional");
  if (samples < 10000) throw std::invalid_argument("klartag_variance_check: need N >= 10^4");
  if (coefficients.size() != spec.n)
    throw std::invalid_argument("klartag_variance_check: coefficient length mismatch");
  const auto sizes = batch_sizes(samples, kDefaultBatches);
  struct Part {
    Eigen::ArrayXd values;
  };
  const auto parts = ordered_map<Part>(sizes.size(), [&](std::size_t b) {
    RandomStream s = stream.split(b);
    const auto batch = sample_body(spec, s, sizes[b]);
    return Part{(batch.points.array().square().matrix() * coefficients).array()};
  });
  double total = 0.0;
  for (const auto& part : parts) total += part.values.sum();
  const double mean = total / static_cast<double>(samples);
  double ss = 0.0;
  std::vector<double> batch_vars;
  for (const auto& part : parts) {
    ss += (part.values - mean).square().sum();
    const double bm = part.values.mean();
    batch_vars.push_back((part.values - bm).square().sum() /
                         static_cast<double>(part.values.size() - 1));
  }
  KlartagCheck out;
  out.lhs_est = ss / static_cast<double>(samples - 1);
  out.lhs_se = standard_error(batch_vars);
  out.rhs = 32.0 * coefficients.squaredNorm();
  return out;
}

double simplex_pair_moment(int n, int overlap) {
  static constexpr double kFactor[] = {1.0, 3.0, 6.0};
  if (overlap < 0 || overlap > 2) throw std::invalid_argument("overlap must be 0, 1 or 2");
  const double nn = n;
  return (nn + 1) * (nn + 2) / ((nn + 3) * (nn + 4)) * kFactor[overlap];
}

std::vector<MomentRow> simplex_moment_check(int n, std::size_t samples, RandomStream& stream) {
  if (n < 4) throw std::invalid_argument("simplex_moment_check: need n >= 4");
  if (samples < 100000) throw std::invalid_argument("simplex_moment_check: need N >= 10^5");
  const auto geom = regular_simplex(n);
  const BodySpec spec{BodyKind::simplex, n};
  Matrix dirs(n, 3);
  dirs.col(0) = geom.edge_direction(0, 1);
  dirs.col(1) = geom.edge_direction(2, 3);
  dirs.col(2) = geom.edge_direction(0, 2);
  const auto sizes = batch_sizes(samples, kDefaultBatches);
  using Sums = Eigen::Array4d;
  const auto sums = ordered_map<Sums>(sizes.size(), [&](std::size_t b) {
    RandomStream s = stream.split(b);
    const auto batch = sample_body(spec, s, sizes[b], &geom);
    const Eigen::ArrayXXd q = (batch.points * dirs).array();
    const auto q01 = q.col(0), q23 = q.col(1), q02 = q.col(2);
    Sums out;
    out << (q01.square() * q23.square()).sum(), (q01.square() * q02.square()).sum(),
        q01.square().square().sum(), q01.abs().cube().sum();
    return out;
  });
  static const char* kLabels[] = {"disjoint", "overlap-1", "overlap-2", "abs-third"};
  std::vector<MomentRow> rows;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> s;
    for (const auto& part : sums) s.push_back(part[c]);
    const auto est = combine_batch_means(s, sizes);
    const double exact = c < 3 ? simplex_pair_moment(n, c) : 3.0 * std::sqrt(2.0);
    rows.push_back({kLabels[c], exact, est.value, est.se});
  }
  return rows;
}

ThirdMomentCheck third_abs_moment_check(const BodySpec& spec, std::size_t samples,
                                        RandomStream& stream) {
  if (!spec.is_product())
    throw std::invalid_argument("third_abs_moment_check: product bodies only");
  const auto sizes = batch_sizes(samples, kDefaultBatches);
  const auto sums = ordered_map<Eigen::ArrayXd>(sizes.size(), [&](std::size_t b) {
    RandomStream s = stream.split(b);
    const auto batch = sample_body(spec, s, sizes[b]);
    return Eigen::ArrayXd(batch.points.array().abs().cube().colwise().sum().transpose());
  });
  ThirdMomentCheck out;
  out.bound = 1.5 * std::sqrt(2.0);
  for (int c = 0; c < spec.n; ++c) {
    std::vector<double> s;
    for (const auto& part : sums) s.push_back(part[c]);
    out.per_coordinate.push_back(combine_batch_means(s, sizes));
  }
  return out;
}

}  // namespace margauss
