#include "margauss/metrics.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace margauss {

namespace {

constexpr std::size_t kMatchingCap = 2048;

double sorted_w1(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const double N = static_cast<double>(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    total += std::abs(values[i] - normal_quantile((static_cast<double>(i) + 0.5) / N));
  return total / N;
}

double sorted_ks(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const double N = static_cast<double>(values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double phi = normal_cdf(values[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / N - phi,
                      phi - static_cast<double>(i) / N});
  }
  return worst;
}

// Estimator on the full sample, SE from contiguous batches.
template <typename Fn>
Estimate batched(std::span<const double> samples, Fn&& estimator) {
  std::vector<double> all(samples.begin(), samples.end());
  const double value = estimator(all);
  const auto sizes = batch_sizes(samples.size(), kDefaultBatches);
  std::vector<double> per_batch;
  std::size_t offset = 0;
  for (std::size_t size : sizes) {
    std::vector<double> part(samples.begin() + offset, samples.begin() + offset + size);
    per_batch.push_back(estimator(part));
    offset += size;
  }
  return {value, standard_error(per_batch)};
}

Vector random_direction(RandomStream& stream, int k) {
  Vector d = gaussian_vector(stream, k);
  return d / d.norm();
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

DistanceEstimate w1_1d(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("w1_1d: need N >= 100");
  const auto est = batched(samples, sorted_w1);
  return {"w1-1d", est.value, est.se, "", samples.size(), 1};
}

DistanceEstimate ks_1d(std::span<const double> samples) {
  if (samples.size() < static_cast<std::size_t>(kDefaultBatches))
    throw std::invalid_argument("ks_1d: need at least 20 samples");
  const auto est = batched(samples, sorted_ks);
  return {"ks", est.value, est.se, "", samples.size(), 1};
}

DistanceEstimate tv_hist_1d(std::span<const double> samples, int bins, double lo, double hi) {
  if (samples.empty()) throw std::invalid_argument("tv_hist_1d: no samples");
  if (bins < 40) throw std::invalid_argument("tv_hist_1d: need at least 40 bins");
  if (!(lo <= -6.0 && hi >= 6.0)) throw std::invalid_argument("tv_hist_1d: range must cover [-6, 6]");
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  std::size_t outside = 0;
  for (double x : samples) {
    if (x < lo || x >= hi) {
      ++outside;
      continue;
    }
    const auto b = std::min<std::size_t>(static_cast<std::size_t>((x - lo) / width),
                                         static_cast<std::size_t>(bins) - 1);
    counts[b] += 1.0;
  }
  const double N = static_cast<double>(samples.size());
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double ref = normal_cdf(lo + (b + 1) * width) - normal_cdf(lo + b * width);
    total += std::abs(counts[static_cast<std::size_t>(b)] / N - ref);
  }
  const double tail = normal_cdf(lo) + (1.0 - normal_cdf(hi));
  total += std::abs(static_cast<double>(outside) / N - tail);
  return {"tv-hist", total, 0.0,
          "histogram estimate: biased up by O(sqrt(bins/N)) sampling noise, down by binning",
          samples.size(), 1};
}

std::vector<int> solve_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("solve_assignment: cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = cost(r - 1, c - 1) - u[r] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (int c = 1; c <= n; ++c) assignment[static_cast<std::size_t>(match[c] - 1)] = c - 1;
  return assignment;
}

DistanceEstimate w1_matching(const PointMatrix& a, const PointMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("w1_matching: samples must have equal shape");
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("w1_matching: empty samples");
  if (static_cast<std::size_t>(a.rows()) > kMatchingCap)
    throw std::invalid_argument("w1_matching: N=" + std::to_string(a.rows()) +
                                " exceeds the exact-matching cap of 2048; use w1_sliced");
  const Eigen::Index n = a.rows();
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  const auto assignment = solve_assignment(cost);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += cost(i, assignment[static_cast<std::size_t>(i)]);
  return {"w1-matching", total / static_cast<double>(n), 0.0, "exact assignment",
          static_cast<std::size_t>(n), static_cast<int>(a.cols())};
}

DistanceEstimate w1_sliced(const PointMatrix& samples, int directions, RandomStream& stream) {
  if (directions < 16) throw std::invalid_argument("w1_sliced: need at least 16 directions");
  const int k = static_cast<int>(samples.cols());
  std::vector<double> per_direction;
  for (int l = 0; l < directions; ++l) {
    const Vector d = random_direction(stream, k);
    std::vector<double> proj(static_cast<std::size_t>(samples.rows()));
    Eigen::Map<Vector>(proj.data(), samples.rows()) = samples * d;
    per_direction.push_back(sorted_w1(proj));
  }
  return {"w1-sliced", mean_of(per_direction), standard_error(per_direction),
          "lower-bound proxy for the k-dimensional W1", static_cast<std::size_t>(samples.rows()),
          k};
}

DistanceEstimate w1_sliced(const PointMatrix& a, const PointMatrix& b, int directions,
                           RandomStream& stream) {
  if (directions < 16) throw std::invalid_argument("w1_sliced: need at least 16 directions");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("w1_sliced: samples must have equal shape");
  const int k = static_cast<int>(a.cols());
  std::vector<double> per_direction;
  for (int l = 0; l < directions; ++l) {
    const Vector d = random_direction(stream, k);
    Vector pa = a * d;
    Vector pb = b * d;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    per_direction.push_back((pa - pb).cwiseAbs().mean());
  }
  return {"w1-sliced", mean_of(per_direction), standard_error(per_direction),
          "lower-bound proxy for the k-dimensional W1", static_cast<std::size_t>(a.rows()), k};
}

}  // namespace margauss
