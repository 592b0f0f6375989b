#pragma once

#include "margauss/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace margauss {

/// Empirical distance to the standard Gaussian (or between two samples).
struct DistanceEstimate {
  std::string metric;  // w1-1d | w1-matching | w1-sliced | ks | tv-hist
  double value = 0.0;
  double se = 0.0;  // batch-means SE; 0 when the estimator is deterministic
  std::string note;
  std::size_t N = 0;
  int k = 1;
};

double normal_cdf(double x);
double normal_quantile(double p);

/// Mean of |x_(i) - Phi^{-1}((i - 1/2)/N)| over the order statistics.
/// SE from 20 contiguous batches. Requires N >= 100.
DistanceEstimate w1_1d(std::span<const double> samples);

/// Exact min-cost perfect matching under Euclidean cost, divided by N.
/// Rows of `a` and `b` are points; equal counts, N <= 2048.
DistanceEstimate w1_matching(const PointMatrix& a, const PointMatrix& b);

/// Optimal assignment for a square cost matrix; returns the column assigned
/// to each row. O(N^3) shortest augmenting paths with potentials.
std::vector<int> solve_assignment(const Matrix& cost);

/// Average over L uniform directions of the 1-D W1 between the projected
/// sample and N(0,1). A lower-bound proxy for the k-dimensional W1.
DistanceEstimate w1_sliced(const PointMatrix& samples, int directions, RandomStream& stream);

/// Sliced W1 between two equal-size samples (sorted pairing per direction).
/// Never exceeds w1_matching on the same pair.
DistanceEstimate w1_sliced(const PointMatrix& a, const PointMatrix& b, int directions,
                           RandomStream& stream);

/// sup_x |F_N(x) - Phi(x)|, evaluated on both sides of every sample point.
DistanceEstimate ks_1d(std::span<const double> samples);

/// Histogram L1 distance to N(0,1) plus the Gaussian mass outside [lo, hi].
/// Requires bins >= 40 and [lo, hi] covering [-6, 6].
DistanceEstimate tv_hist_1d(std::span<const double> samples, int bins = 60, double lo = -8.0,
                            double hi = 8.0);

}  // namespace margauss
