#include "margauss/frames.hpp"

#include "margauss/bodies.hpp"

namespace margauss {

namespace {

constexpr double kOrthoTol = 1e-10;

void check_dims(int n, int k, const char* who) {
  if (k < 1 || n < 1 || k > n)
    throw std::invalid_argument(std::string(who) + ": need 1 <= k <= n (got n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

// Modified Gram-Schmidt with a second orthogonalization pass. Returns false if
// a row collapses numerically.
bool orthonormalize_rows(Matrix& rows) {
  for (int i = 0; i < rows.rows(); ++i) {
    const double original = rows.row(i).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) rows.row(i) -= rows.row(i).dot(rows.row(j)) * rows.row(j);
    }
    const double norm = rows.row(i).norm();
    if (!(norm > 1e-8 * original)) return false;
    rows.row(i) /= norm;
  }
  return true;
}

}  // namespace

std::string to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::walsh: return "walsh";
    case FrameKind::haar: return "haar";
    case FrameKind::coordinate: return "coordinate";
    case FrameKind::custom: return "custom";
  }
  return "custom";
}

FrameKind parse_frame_kind(const std::string& name) {
  if (name == "walsh") return FrameKind::walsh;
  if (name == "haar") return FrameKind::haar;
  if (name == "coordinate") return FrameKind::coordinate;
  if (name == "custom") return FrameKind::custom;
  throw std::invalid_argument("unknown frame kind '" + name + "'");
}

Frame walsh_frame(int n, int k) {
  if (n < 1) throw std::invalid_argument("walsh_frame: n must be >= 1");
  const int m = largest_power_of_two(n);
  if (k < 1 || k > m)
    throw std::invalid_argument("walsh_frame: k=" + std::to_string(k) +
                                " exceeds the Walsh order m=" + std::to_string(m) +
                                " available for n=" + std::to_string(n));
  const auto h = sylvester_hadamard<double>(m);
  Frame f{Matrix::Zero(k, n), FrameKind::walsh};
  f.rows.leftCols(m) = h.topRows(k) / std::sqrt(static_cast<double>(m));
  return f;
}

Frame haar_frame(int n, int k, RandomStream& stream) {
  check_dims(n, k, "haar_frame");
  for (int attempt = 0; attempt < 2; ++attempt) {
    Matrix rows(k, n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) rows(i, j) = stream.normal();
    if (orthonormalize_rows(rows)) return {std::move(rows), FrameKind::haar};
  }
  throw std::runtime_error("haar_frame: Gaussian draw was numerically rank deficient twice");
}

Frame coordinate_frame(int n, int k) {
  check_dims(n, k, "coordinate_frame");
  return {Matrix::Identity(k, n), FrameKind::coordinate};
}

Frame custom_frame(Matrix rows) {
  check_dims(static_cast<int>(rows.cols()), static_cast<int>(rows.rows()), "custom_frame");
  if (orthonormality_residual(rows) >= kOrthoTol)
    throw std::invalid_argument("custom_frame: rows are not orthonormal");
  return {std::move(rows), FrameKind::custom};
}

Frame make_frame(FrameKind kind, int n, int k, RandomStream& stream) {
  switch (kind) {
    case FrameKind::walsh: return walsh_frame(n, k);
    case FrameKind::haar: return haar_frame(n, k, stream);
    case FrameKind::coordinate: return coordinate_frame(n, k);
    case FrameKind::custom: break;
  }
  throw std::invalid_argument("make_frame: custom frames need explicit rows");
}

Vector project(const Frame& frame, const Eigen::Ref<const Vector>& x) {
  if (x.size() != frame.n())
    throw std::invalid_argument("project: point has dimension " + std::to_string(x.size()) +
                                ", frame expects " + std::to_string(frame.n()));
  return frame.rows * x;
}

PointMatrix project_batch(const Frame& frame, const PointMatrix& points) {
  if (points.cols() != frame.n())
    throw std::invalid_argument("project_batch: batch has dimension " +
                                std::to_string(points.cols()) + ", frame expects " +
                                std::to_string(frame.n()));
  return points * frame.rows.transpose();
}

FrameFunctionals frame_functionals(const Frame& frame, const SimplexGeometry* geom,
                                   bool want_cubic) {
  FrameFunctionals out;
  const Matrix abs_rows = frame.rows.cwiseAbs();
  for (int i = 0; i < frame.k(); ++i) {
    out.l4_sum += std::sqrt(abs_rows.row(i).array().pow(4).sum());
    out.l3_sum += std::pow(abs_rows.row(i).array().cube().sum(), 2.0 / 3.0);
  }
  if (want_cubic && geom == nullptr)
    throw std::invalid_argument("frame_functionals: simplex functionals need a geometry");
  if (geom != nullptr) {
    if (geom->n != frame.n())
      throw std::invalid_argument("frame_functionals: simplex dimension mismatch");
    // k x (n+1): <theta_i, v_l>
    const Matrix inner = frame.rows * geom->vertices.transpose();
    double quartic = 0.0;
    for (int i = 0; i < frame.k(); ++i) quartic += std::sqrt(inner.row(i).array().pow(4).sum());
    out.simplex_quartic = quartic;
    if (want_cubic) {
      if (frame.k() != 1)
        throw std::invalid_argument("frame_functionals: simplex_cubic is defined for k = 1 only");
      out.simplex_cubic = inner.row(0).cwiseAbs().array().cube().sum();
    }
  }
  return out;
}

}  // namespace margauss
