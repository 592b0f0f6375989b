#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace margauss {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// One point per row. Row-major so that per-sample access is contiguous.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// SplitMix64 finalizer, used to derive substream labels.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable 64-bit FNV-1a hash of a label string.
std::uint64_t label_hash(const std::string& label) noexcept;

/// Deterministic random stream identified by (seed, stream_id).
///
/// The engine is seeded from both halves of the seed and of the stream id, so
/// any two labels give unrelated sequences. Streams are values: copying one
/// copies its position, and a copy evolves independently of the original.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream whose id is derived from this stream's id and `label`.
  /// Does not advance this stream.
  RandomStream split(std::uint64_t label) const;

  double uniform();      ///< [0, 1)
  double normal();       ///< N(0, 1)
  double exponential();  ///< Exp(1)
  double gamma(double shape);
  /// Uniform integer in [0, count).
  std::size_t index(std::size_t count);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

RandomStream substream(std::uint64_t seed, std::uint64_t stream_id);

/// iid standard normal vector.
Vector gaussian_vector(RandomStream& stream, int dim);

/// Seed taken from MG_SEED when set, `fallback` otherwise.
std::uint64_t seed_from_env(std::uint64_t fallback);
std::optional<std::uint64_t> env_seed();

/// The unnamed universal constants of the TV bounds.
struct ConstantsConfig {
  double C_tv_multi = 1.0;
  double c_smooth = 1.0;
  double C_tv_simplex1d = 1.0;

  void validate() const;
};

/// Reads a flat JSON object with any subset of the three constant keys.
ConstantsConfig load_constants(const std::string& path);
ConstantsConfig constants_from_json_text(const std::string& text);

/// Monte-Carlo estimate with a batch-means standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

inline constexpr int kDefaultBatches = 20;

/// Splits `total` items into `batches` contiguous chunks whose sizes differ by
/// at most one. Returns the chunk sizes.
std::vector<std::size_t> batch_sizes(std::size_t total, int batches);

/// Mean over all samples plus SE from the spread of per-batch means.
Estimate combine_batch_means(const std::vector<double>& sums,
                             const std::vector<std::size_t>& counts);

/// Standard error of the mean of `values` (sample sd / sqrt(size)).
double standard_error(const std::vector<double>& values);
double mean_of(const std::vector<double>& values);

/// Runs fn(b) for b in [0, count) and returns the results in index order.
/// Uses worker threads when more than one hardware thread is available.
template <typename Result, typename Fn>
std::vector<Result> ordered_map(std::size_t count, Fn&& fn);

}  // namespace margauss

#include "margauss/detail/ordered_map.hpp"
