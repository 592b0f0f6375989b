#pragma once

#include "margauss/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace margauss {

/// Sweep description. JSON keys match the field names; `constants` is an
/// object with the ConstantsConfig keys. `record_runtime` and
/// `row_time_budget_ms` are optional and default to off, because both make
/// the output depend on wall-clock time.
struct ExperimentConfig {
  std::vector<std::string> bodies;
  std::vector<int> ns;
  std::vector<int> ks;
  std::vector<std::string> frames;
  std::size_t samples = 100000;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> metrics;  // any of w1, ks, tv
  ConstantsConfig constants;
  bool record_runtime = false;
  std::optional<double> row_time_budget_ms;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string body;
  int n = 0;
  int k = 0;
  std::string frame;
  std::uint64_t seed = 0;
  std::size_t N = 0;
  double l4_sum = 0.0;
  std::optional<double> simplex_quartic;
  double bound_d1_thm = 0.0;
  double bound_dtv_thm = 0.0;
  double bound_d1_cor = 0.0;
  double bound_dtv_cor = 0.0;
  std::optional<double> emp_w1;
  std::optional<double> emp_w1_se;
  std::optional<double> emp_ks;
  std::optional<double> emp_tv;
  std::optional<double> runtime_ms;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  // Skipped combinations and sample-count caps, one line each.
  std::vector<std::string> notes;
};

/// One row per valid (body, n, k, frame, seed), ordered by that key.
/// Rows are a pure function of the config unless runtime recording or the
/// time budget is enabled.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Computes a single row; throws std::invalid_argument for invalid
/// combinations.
ResultRow run_row(const std::string& body, int n, int k, const std::string& frame,
                  std::uint64_t seed, std::size_t samples, const std::vector<std::string>& metrics,
                  const ConstantsConfig& constants);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(value) on log(n). Needs >= 3 distinct n.
DecayFit fit_decay(const std::vector<double>& ns, const std::vector<double>& values);
/// Uses (n, emp_w1) from rows that carry emp_w1.
DecayFit fit_decay(const std::vector<ResultRow>& rows);

inline constexpr const char* kCsvHeader =
    "body,n,k,frame,seed,N,l4_sum,simplex_quartic,bound_d1_thm,bound_dtv_thm,bound_d1_cor,"
    "bound_dtv_cor,emp_w1,emp_w1_se,emp_ks,emp_tv,runtime_ms";

/// %.17g formatting, so parse_csv(to_csv(rows)) reproduces every double.
std::string format_real(double value);
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace margauss
