#include "margauss/core.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace margauss {

std::uint64_t label_hash(const std::string& label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x6d67u};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

RandomStream RandomStream::split(std::uint64_t label) const {
  return RandomStream(seed_, mix64(stream_id_ ^ mix64(label + 0x5bd1e995ULL)));
}

double RandomStream::uniform() { return std::generate_canonical<double, 64>(engine_); }

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::exponential() { return exponential_(engine_); }

double RandomStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

std::size_t RandomStream::index(std::size_t count) {
  std::uniform_int_distribution<std::size_t> dist(0, count - 1);
  return dist(engine_);
}

RandomStream substream(std::uint64_t seed, std::uint64_t stream_id) {
  return RandomStream(seed, stream_id);
}

Vector gaussian_vector(RandomStream& stream, int dim) {
  if (dim < 1) throw std::invalid_argument("gaussian_vector: dim must be >= 1");
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = stream.normal();
  return z;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("MG_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0' || *raw == '-')
    throw std::invalid_argument(std::string("MG_SEED is not a decimal 64-bit integer: ") + raw);
  return static_cast<std::uint64_t>(value);
}

std::uint64_t seed_from_env(std::uint64_t fallback) { return env_seed().value_or(fallback); }

void ConstantsConfig::validate() const {
  if (!(C_tv_multi > 0.0) || !(c_smooth > 0.0) || !(C_tv_simplex1d > 0.0))
    throw std::invalid_argument("constants must be strictly positive");
}

ConstantsConfig constants_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("constants: expected a JSON object");
  ConstantsConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "C_tv_multi")
      c.C_tv_multi = value.get<double>();
    else if (key == "c_smooth")
      c.c_smooth = value.get<double>();
    else if (key == "C_tv_simplex1d")
      c.C_tv_simplex1d = value.get<double>();
    else
      throw std::invalid_argument("constants: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ConstantsConfig load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constants file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return constants_from_json_text(buffer.str());
}

std::vector<std::size_t> batch_sizes(std::size_t total, int batches) {
  if (batches < 1) throw std::invalid_argument("batch_sizes: batches must be >= 1");
  const auto b = static_cast<std::size_t>(batches);
  if (total < b) throw std::invalid_argument("batch_sizes: fewer items than batches");
  std::vector<std::size_t> sizes(b, total / b);
  for (std::size_t i = 0; i < total % b; ++i) ++sizes[i];
  return sizes;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_error(const std::vector<double>& values) {
  const std::size_t m = values.size();
  if (m < 2) return 0.0;
  const double mu = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
}

Estimate combine_batch_means(const std::vector<double>& sums,
                             const std::vector<std::size_t>& counts) {
  if (sums.size() != counts.size() || sums.empty())
    throw std::invalid_argument("combine_batch_means: mismatched batches");
  double total = 0.0;
  std::size_t n = 0;
  std::vector<double> means;
  means.reserve(sums.size());
  for (std::size_t b = 0; b < sums.size(); ++b) {
    total += sums[b];
    n += counts[b];
    means.push_back(sums[b] / static_cast<double>(counts[b]));
  }
  return {total / static_cast<double>(n), standard_error(means)};
}

}  // namespace margauss
