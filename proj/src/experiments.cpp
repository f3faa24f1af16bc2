#include "meshinit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "meshinit/geomnet.hpp"
#include "meshinit/initialization.hpp"
#include "meshinit/limits.hpp"
#include "meshinit/pipeline.hpp"
#include "meshinit/rng.hpp"
#include "meshinit/send_broadcast.hpp"
#include "meshinit/sfr.hpp"

namespace meshinit::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent stream for a second purpose within one trial.
std::uint64_t substream(std::uint64_t trial_seed, std::uint64_t purpose) {
  return splitmix64(trial_seed ^ (purpose * 0xa0761d6478bd642fULL));
}

Check range_check(std::string name, double value, double lo, double hi) {
  Check c{std::move(name), value, lo, hi, false};
  c.pass = value >= lo && value <= hi;
  return c;
}

double fraction_of(const std::vector<ExperimentRecord>& records, std::size_t column) {
  if (records.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.values[column] > 0.5;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::size_t column_index(const ExperimentReport& report, const std::string& name) {
  const auto it = std::find(report.columns.begin(), report.columns.end(), name);
  if (it == report.columns.end()) throw std::logic_error("unknown column " + name);
  return static_cast<std::size_t>(it - report.columns.begin());
}

SummaryRow summary_row(const ExperimentReport& report, std::vector<double> values, double oracle) {
  SummaryRow row;
  row.values = std::move(values);
  row.values.resize(report.columns.size(), kNaN);
  row.summary = summarize(report.records);
  row.oracle = oracle;
  return row;
}

void require_trials(int trials, int minimum, const char* what) {
  if (trials < minimum)
    throw std::invalid_argument(std::string(what) + ": trials must be >= " + std::to_string(minimum));
}

}  // namespace

Thresholds thresholds_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("thresholds: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("thresholds: top level must be an object");
  Thresholds th;
  const std::map<std::string, double*> fields = {
      {"send_sigmas", &th.send_sigmas},
      {"connectivity_plus_min", &th.connectivity_plus_min},
      {"connectivity_minus_max", &th.connectivity_minus_max},
      {"degree_slack", &th.degree_slack},
      {"slack_hops", &th.slack_hops},
      {"diameter_fraction", &th.diameter_fraction},
      {"degree_fraction", &th.degree_fraction},
      {"connected_fraction", &th.connected_fraction},
      {"lens_tolerance", &th.lens_tolerance},
      {"init_relative", &th.init_relative},
      {"failure_tolerance", &th.failure_tolerance},
      {"slope_min", &th.slope_min},
      {"slope_max", &th.slope_max},
      {"sfr_fraction", &th.sfr_fraction},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw std::runtime_error("thresholds: unknown key '" + key + "'");
    if (!value.is_number()) throw std::runtime_error("thresholds: '" + key + "' must be a number");
    *it->second = value.get<double>();
  }
  return th;
}

Thresholds load_thresholds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("thresholds: cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return thresholds_from_json(buf.str());
}

ExperimentSummary summarize(const std::vector<ExperimentRecord>& records) {
  ExperimentSummary s;
  s.trials = static_cast<std::int64_t>(records.size());
  if (records.empty()) return s;
  double sum = 0.0;
  std::size_t count = 0, passed = 0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    passed += r.pass;
    if (std::isnan(r.measured)) continue;
    sum += r.measured;
    ++count;
    s.min = std::min(s.min, r.measured);
    s.max = std::max(s.max, r.measured);
  }
  s.fraction_within = static_cast<double>(passed) / static_cast<double>(records.size());
  if (count == 0) {
    s.mean = s.sd = s.min = s.max = kNaN;
    return s;
  }
  s.mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (const auto& r : records)
    if (!std::isnan(r.measured)) ss += (r.measured - s.mean) * (r.measured - s.mean);
  s.sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  return s;
}

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string format_decimal(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "experiment,summary,trial";
  for (const auto& c : report.columns) out << ',' << c;
  out << ",measured,oracle,pass,trials,mean,sd,min,max,fraction_within\n";
  for (const auto& r : report.records) {
    out << report.name << ",0," << r.trial;
    for (double v : r.values) out << ',' << format_decimal(v);
    out << ',' << format_decimal(r.measured) << ',' << format_decimal(r.oracle) << ',' << (r.pass ? 1 : 0)
        << ",,,,,,\n";
  }
  for (const auto& s : report.summaries) {
    out << report.name << ",1,";
    for (double v : s.values) out << ',' << format_decimal(v);
    out << ",," << format_decimal(s.oracle) << ',' << (s.pass ? 1 : 0) << ',' << s.summary.trials << ','
        << format_decimal(s.summary.mean) << ',' << format_decimal(s.summary.sd) << ','
        << format_decimal(s.summary.min) << ',' << format_decimal(s.summary.max) << ','
        << format_decimal(s.summary.fraction_within) << '\n';
  }
}

void write_checks(std::ostream& out, const ExperimentReport& report) {
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << report.name << ' ' << c.name << " = " << format_decimal(c.value)
        << " (allowed [" << format_decimal(c.lo) << ", " << format_decimal(c.hi) << "])\n";
  }
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ExperimentReport exp_send(int T, int d, double base, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 100, "exp_send");
  ExperimentReport report;
  report.name = "send";
  report.columns = {"T", "d", "base", "success"};
  const double p = limits::send_success_probability(T, d, base);
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const auto res = protocols::run_star_send(d, T, base, derive_seed(seed, report.name, t));
    auto& r = report.records[t];
    r.trial = static_cast<std::int64_t>(t);
    r.values = {double(T), double(d), base, res.center_heard ? 1.0 : 0.0};
    r.measured = res.center_heard ? 1.0 : 0.0;
    r.oracle = p;
    r.pass = res.center_heard;
  });
  auto row = summary_row(report, {double(T), double(d), base, kNaN}, p);
  const double tol = th.send_sigmas * std::sqrt(p * (1.0 - p) / trials);
  report.checks.push_back(range_check("empirical_success", row.summary.mean, p - tol, p + tol));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_connectivity(int n, double omega, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 1, "exp_connectivity");
  if (n < 2) throw std::invalid_argument("exp_connectivity: n must be >= 2");
  ExperimentReport report;
  report.name = "connectivity";
  report.columns = {"n", "omega", "radius", "connected", "isolated"};
  const double side = std::sqrt(double(n));
  const double radius = limits::r_connectivity({double(n), side * side, 0.0, omega});
  const double gumbel = std::exp(-std::exp(-omega));
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const auto net = generate_network(n, side, radius, derive_seed(seed, report.name, t));
    const auto stats = graph_stats(net, StatsOptions{false, false});
    auto& r = report.records[t];
    r.trial = static_cast<std::int64_t>(t);
    r.values = {double(n), omega, radius, stats.connected ? 1.0 : 0.0, double(stats.isolated_count)};
    r.measured = stats.connected ? 1.0 : 0.0;
    r.oracle = gumbel;
    r.pass = stats.connected;
  });
  auto row = summary_row(report, {double(n), omega, radius}, gumbel);
  if (omega >= 0.0) {
    report.checks.push_back(range_check("connected_fraction", row.summary.mean, th.connectivity_plus_min, 1.0));
  } else {
    report.checks.push_back(range_check("connected_fraction", row.summary.mean, 0.0, th.connectivity_minus_max));
  }
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_degree_diameter(int n, double ell, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 1, "exp_degree_diameter");
  if (n < 100) throw std::invalid_argument("exp_degree_diameter: n must be >= 100");
  ExperimentReport report;
  report.name = "degree-diameter";
  report.columns = {"n", "ell", "radius", "degree_slack", "slack_hops", "connected", "min_degree",
                    "max_degree", "diameter", "diameter_bound", "coverage_min", "low_ok", "high_ok",
                    "diameter_ok", "coverage_ok"};
  const double side = std::sqrt(double(n));
  const double radius = limits::r_superconnectivity({double(n), side * side, ell, 0.0});
  const double ln_n = std::log(double(n));
  const auto coeff = limits::degree_bounds(ell);
  const double bound = limits::diameter_bound(n, ell);
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const auto net = generate_network(n, side, radius, derive_seed(seed, report.name, t));
    const auto s = graph_stats(net, StatsOptions{true, true});
    const bool low_ok = double(s.min_degree) >= coeff.low_coeff * ln_n * (1.0 - th.degree_slack);
    const bool high_ok = double(s.max_degree) <= coeff.high_coeff * ln_n * (1.0 + th.degree_slack);
    const bool diam_ok = s.connected && double(*s.diameter_hops) <= bound + th.slack_hops;
    const bool cover_ok = s.coverage_min >= 1;
    const double diam = s.diameter_hops ? double(*s.diameter_hops) : kNaN;
    auto& r = report.records[t];
    r.trial = static_cast<std::int64_t>(t);
    r.values = {double(n),        ell,          radius,          th.degree_slack,   th.slack_hops,
                double(s.connected), double(s.min_degree), double(s.max_degree), diam, bound,
                double(s.coverage_min), double(low_ok), double(high_ok), double(diam_ok), double(cover_ok)};
    r.measured = diam;
    r.oracle = bound + th.slack_hops;
    r.pass = diam_ok;
  });
  auto row = summary_row(report, {double(n), ell, radius, th.degree_slack, th.slack_hops}, bound + th.slack_hops);
  const std::size_t low = column_index(report, "low_ok"), cover = column_index(report, "coverage_ok");
  std::size_t degree_hits = 0;
  for (const auto& r : report.records) degree_hits += r.values[low] > 0.5 && r.values[cover] > 0.5;
  const double degree_frac = double(degree_hits) / double(report.records.size());
  row.values[column_index(report, "connected")] = fraction_of(report.records, column_index(report, "connected"));
  row.values[low] = fraction_of(report.records, low);
  row.values[column_index(report, "high_ok")] = fraction_of(report.records, column_index(report, "high_ok"));
  row.values[cover] = fraction_of(report.records, cover);
  row.values[column_index(report, "diameter_bound")] = bound;
  report.checks.push_back(range_check("diameter_fraction", row.summary.fraction_within, th.diameter_fraction, 1.0));
  report.checks.push_back(range_check("connected_fraction", row.values[column_index(report, "connected")],
                                      th.connected_fraction, 1.0));
  report.checks.push_back(range_check("degree_coverage_fraction", degree_frac, th.degree_fraction, 1.0));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_lens_occupancy(int n, double ell, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 1, "exp_lens_occupancy");
  if (n < 100) throw std::invalid_argument("exp_lens_occupancy: n must be >= 100");
  ExperimentReport report;
  report.name = "lens";
  report.columns = {"n", "ell", "radius", "l1_area", "l2_area", "l1_empty", "l2_empty", "l1_oracle", "l2_oracle"};
  const double side = std::sqrt(double(n));
  const double area = side * side;
  const double r = limits::r_superconnectivity({double(n), area, ell, 0.0});
  if (2.0 * r >= side) throw std::invalid_argument("exp_lens_occupancy: radius too large for the square");
  const double a1 = limits::lens_area(limits::Lens::L1, r);
  const double a2 = limits::lens_area(limits::Lens::L2, r);
  const double o1 = std::pow(1.0 - a1 / area, n);
  const double o2 = std::pow(1.0 - a2 / area, n);
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, report.name, t);
    const auto net = generate_network(n, side, r, s);
    std::mt19937_64 gen(substream(s, 1));
    const auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    // Any lens point is within r of the midpoint, so the lens stays inside the square.
    const Point mid{r + unit() * (side - 2.0 * r), r + unit() * (side - 2.0 * r)};
    const double theta = unit() * 2.0 * limits::kPi;
    const auto empty = [&](double dist) {
      const Point a{mid.x + 0.5 * dist * std::cos(theta), mid.y + 0.5 * dist * std::sin(theta)};
      const Point b{mid.x - 0.5 * dist * std::cos(theta), mid.y - 0.5 * dist * std::sin(theta)};
      for (const Point& p : net.nodes())
        if (squared_distance(p, a) <= r * r && squared_distance(p, b) <= r * r) return false;
      return true;
    };
    const bool e1 = empty(r);
    const bool e2 = empty(std::sqrt(2.0) * r);
    auto& rec = report.records[t];
    rec.trial = static_cast<std::int64_t>(t);
    rec.values = {double(n), ell, r, a1, a2, double(e1), double(e2), o1, o2};
    rec.measured = double(e1);
    rec.oracle = o1;
    rec.pass = true;
  });
  auto row = summary_row(report, {double(n), ell, r, a1, a2}, o1);
  const double f1 = fraction_of(report.records, 5), f2 = fraction_of(report.records, 6);
  row.values[5] = f1;
  row.values[6] = f2;
  row.values[7] = o1;
  row.values[8] = o2;
  report.checks.push_back(range_check("l1_empty_fraction", f1, o1 - th.lens_tolerance, o1 + th.lens_tolerance));
  report.checks.push_back(range_check("l2_empty_fraction", f2, o2 - th.lens_tolerance, o2 + th.lens_tolerance));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_equipartition_init(int n, int k, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 1, "exp_equipartition_init");
  ExperimentReport report;
  report.name = "init";
  report.columns = {"n", "k", "slots", "rounds", "split_calls", "failures", "expected_failures",
                    "expected_rounds", "bijection"};
  const double oracle = k == 3 ? limits::kInitSlotsPerStation : kNaN;
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const auto res = protocols::initialize_single_hop(n, k, derive_seed(seed, report.name, t));
    double calls = 0.0, failures = 0.0, exp_fail = 0.0, exp_rounds = 0.0;
    for (const auto& call : res.calls) {
      if (call.m < 2) continue;
      const double q = std::pow(double(k), 1.0 - double(call.m));
      calls += 1.0;
      failures += double(call.rounds - 1);
      exp_fail += q / (1.0 - q);
      exp_rounds += 1.0 / (1.0 - q);
    }
    const bool ok = res.bijection && res.status == radiosim::RunStatus::terminated;
    auto& r = report.records[t];
    r.trial = static_cast<std::int64_t>(t);
    r.values = {double(n), double(k), double(res.slots), double(res.rounds), calls, failures, exp_fail, exp_rounds,
                double(ok)};
    r.measured = double(res.slots) / n;
    r.oracle = oracle;
    r.pass = ok;
  });
  auto row = summary_row(report, {double(n), double(k)}, oracle);
  double slots = 0, calls = 0, fails = 0, efail = 0, erounds = 0;
  for (const auto& r : report.records) {
    slots += r.values[2];
    calls += r.values[4];
    fails += r.values[5];
    efail += r.values[6];
    erounds += r.values[7];
  }
  row.values[2] = slots / double(report.records.size());
  row.values[4] = calls;
  row.values[5] = fails;
  row.values[6] = efail;
  row.values[7] = erounds;
  row.values[8] = row.summary.fraction_within;
  report.checks.push_back(range_check("bijection_fraction", row.summary.fraction_within, 1.0, 1.0));
  if (k == 3) {
    report.checks.push_back(range_check("slots_per_station", row.summary.mean, oracle * (1.0 - th.init_relative),
                                        oracle * (1.0 + th.init_relative)));
  }
  if (calls > 0) {
    // per-round failure rate over all splits against sum of k^(1-m) geometric expectations
    const double rate = fails / (fails + calls), expected = efail / erounds;
    report.checks.push_back(range_check("split_failure_rate", rate, expected - th.failure_tolerance,
                                        expected + th.failure_tolerance));
  }
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_equipartition_failure(int m, int k, int rounds, std::uint64_t seed, const Thresholds& th) {
  if (m < 2 || k < 2) throw std::invalid_argument("exp_equipartition_failure: needs m >= 2 and k >= 2");
  require_trials(rounds, 1, "exp_equipartition_failure");
  ExperimentReport report;
  report.name = "equipartition";
  report.columns = {"m", "k", "rounds", "failures"};
  const double q = std::pow(double(k), 1.0 - double(m));
  std::int64_t total = 0, failures = 0;
  for (std::int64_t call = 0; total < rounds; ++call) {
    const auto res = protocols::equipartition(m, k, 1, derive_seed(seed, report.name, call));
    total += res.rounds;
    failures += res.rounds - 1;
    ExperimentRecord r;
    r.trial = call;
    r.values = {double(m), double(k), double(res.rounds), double(res.rounds - 1)};
    r.measured = double(res.rounds);
    r.oracle = 1.0 / (1.0 - q);
    r.pass = true;
    report.records.push_back(std::move(r));
  }
  const double freq = double(failures) / double(total);
  auto row = summary_row(report, {double(m), double(k), double(total), double(failures)}, q);
  report.checks.push_back(range_check("failure_frequency", freq, q - th.failure_tolerance, q + th.failure_tolerance));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_pipeline_scaling(const std::vector<int>& ns, double ell, double epsilon, int trials,
                                      std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 5, "exp_pipeline_scaling");
  if (ns.size() < 2) throw std::invalid_argument("exp_pipeline_scaling: needs at least two node counts");
  for (int n : ns)
    if (n < 100) throw std::invalid_argument("exp_pipeline_scaling: every n must be >= 100");
  ExperimentReport report;
  report.name = "pipeline-scaling";
  report.columns = {"n", "ell", "epsilon", "sfr_slots", "attempts", "p_hat", "sfr_agreed", "bijection", "slope"};
  const std::size_t per_n = static_cast<std::size_t>(trials);
  report.records.resize(ns.size() * per_n);
  parallel_for(report.records.size(), [&](std::size_t i) {
    const int n = ns[i / per_n];
    const double side = std::sqrt(double(n));
    const double radius = limits::r_superconnectivity({double(n), side * side, ell, 0.0});
    const std::uint64_t s = derive_seed(seed, report.name, i);
    const auto net = generate_network(n, side, radius, s);
    auto& r = report.records[i];
    r.trial = static_cast<std::int64_t>(i % per_n);
    r.oracle = std::pow(double(n), 1.5) * std::log(double(n)) * std::log(double(n));
    try {
      const auto res = protocols::initialize_multihop(net, epsilon, substream(s, 1));
      const bool ok = protocols::is_bijection(res.ids);
      r.values = {double(n), ell, epsilon, double(res.sfr_slots), double(res.attempts.size()), double(res.p_hat),
                  double(res.sfr_agreed), double(ok), kNaN};
      r.measured = double(res.total_slots);
      r.pass = ok;
    } catch (const std::runtime_error&) {
      r.values = {double(n), ell, epsilon, kNaN, kNaN, kNaN, 0.0, 0.0, kNaN};
      r.measured = kNaN;
      r.pass = false;
    }
  });
  std::vector<double> xs, ys;
  const auto all = report.records;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const std::vector<ExperimentRecord> group(all.begin() + j * per_n, all.begin() + (j + 1) * per_n);
    SummaryRow row;
    row.values.assign(report.columns.size(), kNaN);
    row.values[0] = ns[j];
    row.values[1] = ell;
    row.values[2] = epsilon;
    row.summary = summarize(group);
    row.oracle = group.front().oracle;
    row.values[7] = row.summary.fraction_within;
    row.pass = row.summary.fraction_within == 1.0;
    xs.push_back(ns[j]);
    ys.push_back(row.summary.mean);
    report.summaries.push_back(std::move(row));
  }
  const bool finite = std::all_of(ys.begin(), ys.end(), [](double y) { return std::isfinite(y) && y > 0; });
  const double slope = finite ? log_log_slope(xs, ys) : kNaN;
  auto row = summary_row(report, {kNaN, ell, epsilon}, 1.5);
  row.values[8] = slope;
  row.values[7] = row.summary.fraction_within;
  report.checks.push_back(range_check("slope", finite ? slope : -1.0, th.slope_min, th.slope_max));
  report.checks.push_back(range_check("bijection_fraction", row.summary.fraction_within, 1.0, 1.0));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

ExperimentReport exp_sfr(int n, double epsilon, int trials, std::uint64_t seed, const Thresholds& th) {
  require_trials(trials, 1, "exp_sfr");
  if (n < 2) throw std::invalid_argument("exp_sfr: n must be >= 2");
  ExperimentReport report;
  report.name = "sfr";
  report.columns = {"n", "epsilon", "p0", "p_hat", "agreed", "bound_ok", "near_p0", "isolated", "failed_nodes", "slots"};
  const double side = std::sqrt(double(n));
  const int p0 = static_cast<int>(std::floor(std::log2(double(n))));
  report.records.resize(static_cast<std::size_t>(trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, report.name, t);
    const auto net = generate_network(n, side, side, s);
    const auto res = protocols::run_sfr(net, epsilon, side, substream(s, 1));
    const double p_hat = res.p_hat ? double(*res.p_hat) : kNaN;
    const bool bound_ok = res.p_hat && std::ldexp(1.0, *res.p_hat + 1) >= double(n);
    const bool near = res.p_hat && std::abs(*res.p_hat - p0) <= 1;
    std::size_t isolated = 0;
    for (auto v : res.isolated) isolated += v;
    auto& r = report.records[t];
    r.trial = static_cast<std::int64_t>(t);
    r.values = {double(n), epsilon, double(p0), p_hat, double(res.agreed), double(bound_ok), double(near),
                double(isolated), double(res.failed_nodes), double(res.slots)};
    r.measured = p_hat;
    r.oracle = p0;
    r.pass = res.agreed && bound_ok;
  });
  auto row = summary_row(report, {double(n), epsilon, double(p0)}, p0);
  row.values[4] = fraction_of(report.records, 4);
  row.values[5] = fraction_of(report.records, 5);
  row.values[6] = fraction_of(report.records, 6);
  report.checks.push_back(range_check("agreed_and_bounded", row.summary.fraction_within, th.sfr_fraction, 1.0));
  row.pass = report.passed();
  report.summaries.push_back(std::move(row));
  return report;
}

}  // namespace meshinit::experiments
