#include "margauss/harness.hpp"

#include "margauss/bodies.hpp"
#include "margauss/frames.hpp"
#include "margauss/metrics.hpp"
#include "margauss/stein.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace margauss {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kChunkRows = 5000;
constexpr int kSlicedDirections = 64;
constexpr std::size_t kMinPairSamples = 10000;

std::uint64_t row_label(const std::string& body, int n, int k, const std::string& frame) {
  return label_hash(body + "|" + std::to_string(n) + "|" + std::to_string(k) + "|" + frame);
}

bool wants(const std::vector<std::string>& metrics, const char* name) {
  return std::find(metrics.begin(), metrics.end(), name) != metrics.end();
}

void validate_metrics(const std::vector<std::string>& metrics) {
  for (const auto& m : metrics)
    if (m != "w1" && m != "ks" && m != "tv")
      throw std::invalid_argument("unknown metric '" + m + "' (expected w1, ks or tv)");
}

// Projected sample W (N x k), generated in chunks so that N x n never lives
// in memory at once.
PointMatrix projected_sample(const PairSpec& spec, std::size_t samples, const RandomStream& base) {
  PointMatrix w(static_cast<Eigen::Index>(samples), spec.k());
  const SimplexGeometry* geom = spec.geom ? &*spec.geom : nullptr;
  std::size_t offset = 0;
  for (std::uint64_t chunk = 0; offset < samples; ++chunk) {
    const std::size_t size = std::min(kChunkRows, samples - offset);
    RandomStream s = base.split(chunk);
    const auto batch = sample_body(spec.body, s, size, geom);
    w.middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(size)) =
        project_batch(spec.frame, batch.points);
    offset += size;
  }
  return w;
}

double seconds_per_sample(const BodySpec& body, const SimplexGeometry* geom) {
  constexpr std::size_t pilot = 2000;
  RandomStream s = substream(0, 0);
  const auto start = Clock::now();
  sample_body(body, s, pilot, geom);
  return std::chrono::duration<double>(Clock::now() - start).count() / pilot;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("bad real '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real(s);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("experiment config: expected a JSON object");
  static const std::set<std::string> known = {"bodies", "ns",      "ks",        "frames",
                                              "samples", "seeds",  "metrics",   "constants",
                                              "record_runtime", "row_time_budget_ms"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("experiment config: unknown key '" + key + "'");
  ExperimentConfig c;
  c.bodies = j.at("bodies").get<std::vector<std::string>>();
  c.ns = j.at("ns").get<std::vector<int>>();
  c.ks = j.at("ks").get<std::vector<int>>();
  c.frames = j.at("frames").get<std::vector<std::string>>();
  c.samples = j.at("samples").get<std::size_t>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.metrics = j.value("metrics", std::vector<std::string>{});
  if (j.contains("constants")) c.constants = constants_from_json_text(j.at("constants").dump());
  c.record_runtime = j.value("record_runtime", false);
  if (j.contains("row_time_budget_ms")) c.row_time_budget_ms = j.at("row_time_budget_ms").get<double>();
  if (c.seeds.empty()) throw std::invalid_argument("experiment config: at least one seed is required");
  validate_metrics(c.metrics);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

ResultRow run_row(const std::string& body, int n, int k, const std::string& frame,
                  std::uint64_t seed, std::size_t samples, const std::vector<std::string>& metrics,
                  const ConstantsConfig& constants) {
  validate_metrics(metrics);
  if (samples < kMinPairSamples)
    throw std::invalid_argument("samples must be >= 10^4 for the pair statistics");
  const BodySpec spec_body = parse_body(body, n);
  const RandomStream base = substream(seed, row_label(body, n, k, frame));
  RandomStream frame_stream = base.split(1);
  const PairSpec spec =
      make_pair_spec(spec_body, make_frame(parse_frame_kind(frame), n, k, frame_stream));

  ResultRow row;
  row.body = body;
  row.n = n;
  row.k = k;
  row.frame = frame;
  row.seed = seed;
  row.N = samples;
  const auto functionals = frame_functionals(spec.frame, spec.geom ? &*spec.geom : nullptr);
  row.l4_sum = functionals.l4_sum;
  row.simplex_quartic = functionals.simplex_quartic;

  const auto theorems = applicable_theorem_bounds(spec, constants);
  row.bound_d1_thm = *theorems.front().d1_bound;
  row.bound_dtv_thm = *theorems.front().dtv_bound;
  for (const auto& t : theorems) row.bound_dtv_thm = std::min(row.bound_dtv_thm, *t.dtv_bound);

  RandomStream pair_stream = base.split(2);
  const auto stats = estimate_pair_terms(spec, samples, pair_stream);
  const auto cor = corollary_bounds(stats, spec.lambda, constants).front();
  row.bound_d1_cor = *cor.d1_bound;
  row.bound_dtv_cor = *cor.dtv_bound;

  if (!metrics.empty()) {
    const PointMatrix w = projected_sample(spec, samples, base.split(3));
    if (k == 1) {
      const std::span<const double> values(w.data(), static_cast<std::size_t>(w.rows()));
      if (wants(metrics, "w1")) {
        const auto d = w1_1d(values);
        row.emp_w1 = d.value;
        row.emp_w1_se = d.se;
      }
      if (wants(metrics, "ks")) row.emp_ks = ks_1d(values).value;
      if (wants(metrics, "tv")) row.emp_tv = tv_hist_1d(values).value;
    } else if (wants(metrics, "w1")) {
      RandomStream slice_stream = base.split(4);
      const auto d = w1_sliced(w, kSlicedDirections, slice_stream);
      row.emp_w1 = d.value;
      row.emp_w1_se = d.se;
    }
  }
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.constants.validate();
  validate_metrics(config.metrics);
  using Key = std::tuple<std::string, int, int, std::string, std::uint64_t>;
  std::set<Key> keys;
  for (const auto& b : config.bodies)
    for (int n : config.ns)
      for (int k : config.ks)
        for (const auto& f : config.frames)
          for (auto s : config.seeds) keys.emplace(b, n, k, f, s);
  const std::vector<Key> ordered(keys.begin(), keys.end());

  struct Outcome {
    std::optional<ResultRow> row;
    std::vector<std::string> notes;
  };
  const auto outcomes = ordered_map<Outcome>(ordered.size(), [&](std::size_t i) {
    const auto& [body, n, k, frame, seed] = ordered[i];
    const std::string where = "body=" + body + " n=" + std::to_string(n) +
                              " k=" + std::to_string(k) + " frame=" + frame +
                              " seed=" + std::to_string(seed);
    Outcome out;
    try {
      std::size_t samples = config.samples;
      if (config.row_time_budget_ms) {
        const auto spec = parse_body(body, n);
        const auto geom = spec.kind == BodyKind::simplex ? std::optional(regular_simplex(n))
                                                         : std::nullopt;
        // Pair statistics and the empirical sample each draw N points.
        const double per_sample_ms = 1e3 * seconds_per_sample(spec, geom ? &*geom : nullptr);
        const double projected = 3.0 * per_sample_ms * static_cast<double>(samples);
        if (projected > *config.row_time_budget_ms) {
          const auto capped = static_cast<std::size_t>(*config.row_time_budget_ms /
                                                       (3.0 * per_sample_ms));
          samples = std::max(kMinPairSamples, capped - capped % kDefaultBatches);
          out.notes.push_back("capped " + where + ": N " + std::to_string(config.samples) +
                              " -> " + std::to_string(samples) + " (projected " +
                              std::to_string(static_cast<long long>(projected)) + " ms)");
        }
      }
      const auto start = Clock::now();
      ResultRow row = run_row(body, n, k, frame, seed, samples, config.metrics, config.constants);
      if (config.record_runtime)
        row.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      if (k > 1 && (wants(config.metrics, "ks") || wants(config.metrics, "tv")))
        out.notes.push_back("no ks/tv for " + where + ": estimators are univariate");
      out.row = std::move(row);
    } catch (const std::invalid_argument& e) {
      out.notes.push_back("skipped " + where + ": " + e.what());
    }
    return out;
  });

  ExperimentResult result;
  for (const auto& o : outcomes) {
    if (o.row) result.rows.push_back(*o.row);
    result.notes.insert(result.notes.end(), o.notes.begin(), o.notes.end());
  }
  return result;
}

DecayFit fit_decay(const std::vector<double>& ns, const std::vector<double>& values) {
  if (ns.size() != values.size()) throw std::invalid_argument("fit_decay: size mismatch");
  if (std::set<double>(ns.begin(), ns.end()).size() < 3)
    throw std::invalid_argument("fit_decay: need at least 3 distinct n values");
  const Eigen::Index m = static_cast<Eigen::Index>(ns.size());
  Vector x(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(ns[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_decay: n and values must be positive");
    x[i] = std::log(ns[i]);
    y[i] = std::log(values[i]);
  }
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_tot = (y.array() - my).square().sum();
  const double ss_res = (y.array() - fit.intercept - fit.slope * x.array()).square().sum();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

DecayFit fit_decay(const std::vector<ResultRow>& rows) {
  std::vector<double> ns, values;
  for (const auto& r : rows) {
    if (!r.emp_w1) continue;
    ns.push_back(r.n);
    values.push_back(*r.emp_w1);
  }
  return fit_decay(ns, values);
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    const std::vector<std::string> fields = {r.body,
                                             std::to_string(r.n),
                                             std::to_string(r.k),
                                             r.frame,
                                             std::to_string(r.seed),
                                             std::to_string(r.N),
                                             format_real(r.l4_sum),
                                             format_optional(r.simplex_quartic),
                                             format_real(r.bound_d1_thm),
                                             format_real(r.bound_dtv_thm),
                                             format_real(r.bound_d1_cor),
                                             format_real(r.bound_dtv_cor),
                                             format_optional(r.emp_w1),
                                             format_optional(r.emp_w1_se),
                                             format_optional(r.emp_ks),
                                             format_optional(r.emp_tv),
                                             format_optional(r.runtime_ms)};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("parse_csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 17)
      throw std::invalid_argument("parse_csv: expected 17 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.body = f[0];
    r.n = std::stoi(f[1]);
    r.k = std::stoi(f[2]);
    r.frame = f[3];
    r.seed = std::stoull(f[4]);
    r.N = std::stoull(f[5]);
    r.l4_sum = parse_real(f[6]);
    r.simplex_quartic = parse_optional(f[7]);
    r.bound_d1_thm = parse_real(f[8]);
    r.bound_dtv_thm = parse_real(f[9]);
    r.bound_d1_cor = parse_real(f[10]);
    r.bound_dtv_cor = parse_real(f[11]);
    r.emp_w1 = parse_optional(f[12]);
    r.emp_w1_se = parse_optional(f[13]);
    r.emp_ks = parse_optional(f[14]);
    r.emp_tv = parse_optional(f[15]);
    r.runtime_ms = parse_optional(f[16]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "': " + std::strerror(errno));
  const std::string text = to_csv(rows);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write to '" + path + "' failed: " + std::strerror(errno));
}

}  // namespace margauss
