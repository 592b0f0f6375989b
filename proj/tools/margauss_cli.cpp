// Command-line front end for the margauss library.
#include "margauss/bodies.hpp"
#include "margauss/frames.hpp"
#include "margauss/gauss.hpp"
#include "margauss/harness.hpp"
#include "margauss/metrics.hpp"
#include "margauss/stein.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace margauss;

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

struct Target {
  std::string body;
  int n = 0;
  int k = 1;
  std::string frame = "walsh";
  std::uint64_t seed = 0;

  void add_to(CLI::App* app, bool with_k = true) {
    app->add_option("--body", body, "product-uniform | product-laplace | product-gaussian | "
                                    "lp-ball:P | simplex")
        ->required();
    app->add_option("--n", n, "ambient dimension")->required();
    if (with_k) {
      app->add_option("--k", k, "marginal dimension")->capture_default_str();
      app->add_option("--frame", frame, "walsh | haar | coordinate")->capture_default_str();
    }
    app->add_option("--seed", seed, "base seed (MG_SEED overrides)")->capture_default_str();
  }

  std::uint64_t resolved_seed() const { return seed_from_env(seed); }

  PairSpec pair_spec() const {
    auto s = substream(resolved_seed(), label_hash("frame"));
    return make_pair_spec(parse_body(body, n), make_frame(parse_frame_kind(frame), n, k, s));
  }
};

int cmd_frames(const std::string& kind, int n, int k, std::uint64_t seed, bool header) {
  auto s = substream(seed_from_env(seed), label_hash("frame"));
  const auto frame = make_frame(parse_frame_kind(kind), n, k, s);
  std::optional<SimplexGeometry> geom;
  if (n >= 2) geom = regular_simplex(n);
  const auto f = frame_functionals(frame, geom ? &*geom : nullptr, geom && k == 1);
  if (header) std::cout << "kind,n,k,l4_sum,l3_sum,simplex_quartic,simplex_cubic\n";
  std::cout << kind << ',' << n << ',' << k << ',' << format_real(f.l4_sum) << ','
            << format_real(f.l3_sum) << ',' << opt(f.simplex_quartic) << ','
            << opt(f.simplex_cubic) << '\n';
  return 0;
}

int cmd_sample(const Target& t, std::size_t count, const std::string& out) {
  auto s = substream(t.resolved_seed(), label_hash("sample"));
  const auto batch = sample_body(parse_body(t.body, t.n), s, count);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + out + "' for writing");
  for (Eigen::Index r = 0; r < batch.points.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.points.cols(); ++c) {
      if (c) file << ',';
      file << format_real(batch.points(r, c));
    }
    file << '\n';
  }
  if (!file) throw std::runtime_error("write to '" + out + "' failed");
  return 0;
}

int cmd_verify_pair(const Target& t, std::size_t samples) {
  const auto spec = t.pair_spec();
  auto s = substream(t.resolved_seed(), label_hash("verify"));
  const auto batch = sample_body(spec.body, s, samples, spec.geom ? &*spec.geom : nullptr);
  ConditionalResiduals worst;
  for (Eigen::Index r = 0; r < batch.points.rows(); ++r) {
    const auto res = conditional_checks(batch.points.row(r).transpose(), spec);
    worst.linearity = std::max(worst.linearity, res.linearity);
    worst.second_moment = std::max(worst.second_moment, res.second_moment);
  }
  const bool pass = worst.linearity < 1e-10 && worst.second_moment < 1e-10;
  std::cout << "construction,samples,linearity_residual,second_moment_residual,status\n"
            << (spec.geom ? "transposition" : "reflection") << ',' << samples << ','
            << format_real(worst.linearity) << ',' << format_real(worst.second_moment) << ','
            << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

int cmd_bounds(const Target& t, std::size_t samples, const std::string& constants_path) {
  const auto constants = constants_path.empty() ? ConstantsConfig{} : load_constants(constants_path);
  const auto spec = t.pair_spec();
  std::vector<BoundReport> reports = applicable_theorem_bounds(spec, constants);
  auto s = substream(t.resolved_seed(), label_hash("pair"));
  const auto stats = estimate_pair_terms(spec, samples, s);
  for (auto& r : corollary_bounds(stats, spec.lambda, constants)) reports.push_back(r);
  std::cout << "source,d1_bound,dtv_bound,dtv_explicit,d2_bound,dbl_bound,C_tv_multi,c_smooth,"
               "C_tv_simplex1d\n";
  for (const auto& r : reports)
    std::cout << r.source << ',' << opt(r.d1_bound) << ',' << opt(r.dtv_bound) << ','
              << opt(r.dtv_explicit) << ',' << opt(r.d2_bound) << ',' << opt(r.dbl_bound) << ','
              << format_real(r.constants.C_tv_multi) << ',' << format_real(r.constants.c_smooth)
              << ',' << format_real(r.constants.C_tv_simplex1d) << '\n';
  std::cerr << "term_E=" << format_real(stats.term_E.value) << " (se "
            << format_real(stats.term_E.se) << "), term_M3=" << format_real(stats.term_M3.value)
            << " (se " << format_real(stats.term_M3.se) << ")";
  if (stats.condvar_proxy)
    std::cerr << ", condvar_proxy[X-conditioned]=" << format_real(stats.condvar_proxy->value);
  std::cerr << '\n';
  return 0;
}

int cmd_smoothing(const std::string& density, double t) {
  const auto f = shipped_density(density);
  const double lhs = convolve_l1(f, t).distance;
  const double bound = 2.0 * std::sqrt(2.0) * t;
  std::cout << "density,t,lhs,bound,ratio,ledoux_rhs\n"
            << density << ',' << format_real(t) << ',' << format_real(lhs) << ','
            << format_real(bound) << ',' << format_real(lhs / bound) << ','
            << (f.continuous ? format_real(ledoux_check(f, t).rhs) : std::string()) << '\n';
  return 0;
}

int cmd_distance(const std::string& metric, const Target& t, std::size_t samples) {
  const auto spec = t.pair_spec();
  auto s = substream(t.resolved_seed(), label_hash("distance"));
  const auto batch = sample_body(spec.body, s, samples, spec.geom ? &*spec.geom : nullptr);
  const PointMatrix w = project_batch(spec.frame, batch.points);
  const std::span<const double> values(w.data(), static_cast<std::size_t>(w.rows()));
  DistanceEstimate d;
  if (metric == "w1") {
    auto slices = s.split(1);
    d = t.k == 1 ? w1_1d(values) : w1_sliced(w, 64, slices);
  } else if (metric == "ks" || metric == "tv") {
    if (t.k != 1) throw std::invalid_argument(metric + " is only estimated for k = 1");
    d = metric == "ks" ? ks_1d(values) : tv_hist_1d(values);
  } else {
    throw std::invalid_argument("unknown metric '" + metric + "'");
  }
  std::cout << "metric,value,se,note,N,k\n"
            << d.metric << ',' << format_real(d.value) << ',' << format_real(d.se) << ",\""
            << d.note << "\"," << d.N << ',' << d.k << '\n';
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out,
                   const std::string& constants_path) {
  auto config = load_experiment_config(config_path);
  if (!constants_path.empty()) config.constants = load_constants(constants_path);
  if (const auto seed = env_seed()) config.seeds = {*seed};
  const auto result = run_experiment(config);
  emit_csv(result.rows, out);
  for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
  std::cerr << result.rows.size() << " rows written to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"margauss: body samplers, exchangeable pairs, normal approximation bounds, distances"};
  app.require_subcommand(1);
  int status = 0;

  auto* frames = app.add_subcommand("frames", "frame functionals as one CSV row");
  std::string frame_kind;
  int fn = 0, fk = 1;
  std::uint64_t fseed = 0;
  bool header = false;
  frames->add_option("--kind", frame_kind, "walsh | haar | coordinate")->required();
  frames->add_option("--n", fn)->required();
  frames->add_option("--k", fk)->required();
  frames->add_option("--seed", fseed);
  frames->add_flag("--header", header, "print a header line");
  frames->callback([&] { status = cmd_frames(frame_kind, fn, fk, fseed, header); });

  auto* sample = app.add_subcommand("sample", "write body samples as CSV");
  Target st;
  std::size_t count = 0;
  std::string sample_out;
  st.add_to(sample, false);
  sample->add_option("--count", count)->required();
  sample->add_option("--out", sample_out)->required();
  sample->callback([&] { status = cmd_sample(st, count, sample_out); });

  auto* verify = app.add_subcommand("verify", "exact checks");
  verify->require_subcommand(1);
  auto* pair = verify->add_subcommand("pair", "Stein conditions by exhaustive enumeration");
  Target vt;
  std::size_t vsamples = 100;
  vt.add_to(pair);
  pair->add_option("--samples", vsamples)->capture_default_str();
  pair->callback([&] { status = cmd_verify_pair(vt, vsamples); });

  auto* bounds = app.add_subcommand("bounds", "theorem and corollary bounds as CSV");
  Target bt;
  std::size_t bsamples = 100000;
  std::string bconstants;
  bt.add_to(bounds);
  bounds->add_option("--samples", bsamples, "Monte Carlo size for the pair terms")
      ->capture_default_str();
  bounds->add_option("--constants", bconstants, "JSON file with universal constants");
  bounds->callback([&] { status = cmd_bounds(bt, bsamples, bconstants); });

  auto* smoothing = app.add_subcommand("smoothing", "||f * phi_t - f||_1 against its bound");
  std::string density;
  double t = 0.1;
  smoothing->add_option("--density", density, "uniform | laplace | gaussian")->required();
  smoothing->add_option("--t", t)->required();
  smoothing->callback([&] { status = cmd_smoothing(density, t); });

  auto* distance = app.add_subcommand("distance", "empirical distance to N(0, I_k)");
  Target dt;
  std::string metric;
  std::size_t dsamples = 100000;
  distance->add_option("--metric", metric, "w1 | ks | tv")->required();
  dt.add_to(distance);
  distance->add_option("--samples", dsamples)->capture_default_str();
  distance->callback([&] { status = cmd_distance(metric, dt, dsamples); });

  auto* experiment = app.add_subcommand("experiment", "run a sweep and write the CSV table");
  std::string config_path, exp_out, exp_constants;
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--out", exp_out)->required();
  experiment->add_option("--constants", exp_constants, "overrides the constants block");
  experiment->callback([&] { status = cmd_experiment(config_path, exp_out, exp_constants); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
