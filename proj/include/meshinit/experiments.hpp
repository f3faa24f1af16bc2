#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace meshinit::experiments {

/// Acceptance tolerances. The defaults equal config/thresholds.json.
struct Thresholds {
  double send_sigmas = 4.0;
  double connectivity_plus_min = 0.90;   // connected fraction when omega > 0
  double connectivity_minus_max = 0.50;  // connected fraction when omega < 0
  double degree_slack = 0.35;
  double slack_hops = 10.0;
  double diameter_fraction = 0.95;
  double degree_fraction = 0.94;
  double connected_fraction = 0.98;
  double lens_tolerance = 0.01;
  double init_relative = 0.05;
  double failure_tolerance = 0.02;
  double slope_min = 1.3;
  double slope_max = 1.8;
  double sfr_fraction = 0.90;
};

/// Reads a JSON object of the fields above; missing keys keep their default.
/// Throws std::runtime_error on malformed input or unknown keys.
Thresholds thresholds_from_json(const std::string& text);
Thresholds load_thresholds(const std::string& path);

struct ExperimentRecord {
  std::int64_t trial = 0;
  std::vector<double> values;  // aligned with ExperimentReport::columns; NaN = not applicable
  double measured = 0.0;
  double oracle = 0.0;
  bool pass = false;
};

struct ExperimentSummary {
  std::int64_t trials = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  double fraction_within = 0.0;
};

/// Summarizes `measured` over the records; fraction_within counts pass flags.
ExperimentSummary summarize(const std::vector<ExperimentRecord>& records);

struct SummaryRow {
  std::vector<double> values;
  ExperimentSummary summary;
  double oracle = 0.0;
  bool pass = false;
};

struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<ExperimentRecord> records;
  std::vector<SummaryRow> summaries;  // the last row covers the whole experiment
  std::vector<Check> checks;

  bool passed() const;
};

/// Header, one row per record, then the summary rows flagged summary=1.
/// Decimals carry 12 significant digits.
void write_csv(std::ostream& out, const ExperimentReport& report);
void write_checks(std::ostream& out, const ExperimentReport& report);
std::string format_decimal(double v);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

ExperimentReport exp_send(int T, int d, double base, int trials, std::uint64_t seed,
                          const Thresholds& th = {});

/// Density-one network of n nodes at r_connectivity(omega).
ExperimentReport exp_connectivity(int n, double omega, int trials, std::uint64_t seed,
                                  const Thresholds& th = {});

ExperimentReport exp_degree_diameter(int n, double ell, int trials, std::uint64_t seed,
                                     const Thresholds& th = {});

/// Each trial places both lens shapes at one random spot of a fresh network.
ExperimentReport exp_lens_occupancy(int n, double ell, int trials, std::uint64_t seed,
                                    const Thresholds& th = {});

ExperimentReport exp_equipartition_init(int n, int k, int trials, std::uint64_t seed,
                                        const Thresholds& th = {});

/// EQUIPARTITION calls over m stations until `rounds` rounds have run.
ExperimentReport exp_equipartition_failure(int m, int k, int rounds, std::uint64_t seed,
                                           const Thresholds& th = {});

ExperimentReport exp_pipeline_scaling(const std::vector<int>& ns, double ell, double epsilon,
                                      int trials, std::uint64_t seed, const Thresholds& th = {});

/// SFR on density-one networks with r_max = side.
ExperimentReport exp_sfr(int n, double epsilon, int trials, std::uint64_t seed,
                         const Thresholds& th = {});

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace meshinit::experiments
