#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshinit/experiments.hpp"
#include "meshinit/geomnet.hpp"
#include "meshinit/initialization.hpp"
#include "meshinit/limits.hpp"
#include "meshinit/network_io.hpp"
#include "meshinit/pipeline.hpp"
#include "meshinit/send_broadcast.hpp"
#include "meshinit/sfr.hpp"

namespace meshinit::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read network file " + path);
  try {
    return read_network(in);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  body(file);
  file.flush();
  if (!file) throw IoError("write failed for " + path);
}

std::string decimal(double v) { return experiments::format_decimal(v); }

void write_ids(std::ostream& out, const std::vector<std::int64_t>& ids) {
  out << "node\tid\n";
  for (std::size_t v = 0; v < ids.size(); ++v) out << v << '\t' << ids[v] << '\n';
}

void maybe_trace(const std::string& path, const radiosim::ProtocolTrace& trace) {
  if (path.empty()) return;
  write_file(path, [&](std::ostream& f) { radiosim::write_trace(f, trace); });
}

struct Options {
  // generate
  std::size_t n = 0;
  double side = 0.0;
  std::optional<double> ell;
  std::optional<double> radius;
  std::string out_path;
  // shared
  std::uint64_t seed = 0;
  std::string net_path;
  std::string trace_path;
  double epsilon = 0.0;
  // simulate
  int d = 0;
  int T = 0;
  double base = 2.0;
  std::int64_t delta = 0;
  std::int64_t n_bound = 0;
  NodeId initiator = 0;
  std::optional<std::int64_t> max_slots;
  double r_max = 0.0;
  std::optional<double> r_max_opt;
  std::optional<int> p_cap;
  int k = 3;
  // experiment
  int trials = 0;
  std::string csv_path;
  std::string thresholds_path;
  double omega = 0.0;
  int m = 2;
  int rounds = 0;
  std::vector<int> ns;
};

int cmd_generate(const Options& o, std::ostream& out) {
  if (o.n < 1) throw UsageError("--n must be >= 1");
  if (!(o.side > 0.0)) throw UsageError("--side must be > 0");
  double radius = 0.0;
  if (o.ell) {
    if (o.n < 2) throw UsageError("--ell needs --n >= 2");
    radius = limits::r_superconnectivity({double(o.n), o.side * o.side, *o.ell, 0.0});
  } else {
    radius = *o.radius;
  }
  if (!(radius >= 0.0)) throw UsageError("radius must be >= 0");
  const Network net = generate_network(o.n, o.side, radius, o.seed);
  write_file(o.out_path, [&](std::ostream& f) { write_network(f, net); });
  out << "nodes " << net.size() << '\n';
  out << "radius " << decimal(radius) << '\n';
  if (o.n >= 2) {
    const double scaled = limits::kPi * (double(o.n) / net.area()) * radius * radius / std::log(double(o.n));
    out << "density_over_ln_n " << decimal(scaled) << '\n';
  }
  return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const Network net = load_network(o.net_path);
  const GraphStats s = graph_stats(net, StatsOptions{true, true});
  out << "nodes " << net.size() << '\n';
  out << "side " << decimal(net.side()) << '\n';
  out << "radius " << decimal(net.radius()) << '\n';
  out << "connected " << (s.connected ? 1 : 0) << '\n';
  out << "min_degree " << s.min_degree << '\n';
  out << "max_degree " << s.max_degree << '\n';
  out << "isolated " << s.isolated_count << '\n';
  out << "diameter " << (s.diameter_hops ? std::to_string(*s.diameter_hops) : std::string("inf")) << '\n';
  out << "coverage_min " << s.coverage_min << '\n';
  if (net.size() < 2) return kOk;
  const double n = double(net.size());
  const double ell = limits::implied_ell(n, net.area(), net.radius());
  out << "implied_ell " << decimal(ell) << '\n';
  if (!(ell > 0.0)) {
    out << "bounds n/a (implied ell <= 0)\n";
    return kOk;
  }
  const auto coeff = limits::degree_bounds(ell);
  const double ln_n = std::log(n);
  const double low = coeff.low_coeff * ln_n, high = coeff.high_coeff * ln_n;
  const double diam = limits::diameter_bound(n, ell);
  const auto verdict = [](bool ok) { return ok ? " pass" : " fail"; };
  out << "degree_low_bound " << decimal(low) << verdict(double(s.min_degree) >= low) << '\n';
  out << "degree_high_bound " << decimal(high) << verdict(double(s.max_degree) <= high) << '\n';
  out << "diameter_coefficient " << limits::diameter_coefficient(ell) << '\n';
  out << "diameter_bound " << decimal(diam) << verdict(s.diameter_hops && double(*s.diameter_hops) <= diam)
      << '\n';
  return kOk;
}

int sim_send(const Options& o, std::ostream& out) {
  if (o.d < 1 || o.T < 0) throw UsageError("--d must be >= 1 and --T >= 0");
  radiosim::ProtocolTrace trace;
  const auto res = protocols::run_star_send(o.d, o.T, o.base, o.seed, o.trace_path.empty() ? nullptr : &trace);
  maybe_trace(o.trace_path, trace);
  out << "success " << (res.center_heard ? 1 : 0) << '\n';
  out << "slots " << res.slots << '\n';
  out << "exact_probability " << decimal(limits::send_success_probability(o.T, o.d, o.base)) << '\n';
  return kOk;
}

int sim_broadcast(const Options& o, std::ostream& out) {
  const Network net = load_network(o.net_path);
  const protocols::BroadcastConfig cfg{o.epsilon, o.delta, o.n_bound};
  const std::int64_t cap =
      o.max_slots.value_or(4 * std::int64_t(cfg.k()) * (std::int64_t(net.size()) + cfg.tau()));
  radiosim::ProtocolTrace trace;
  const auto res = protocols::run_broadcast(net, cfg, {o.initiator}, o.seed, cap,
                                            o.trace_path.empty() ? nullptr : &trace);
  maybe_trace(o.trace_path, trace);
  out << "k " << cfg.k() << "\ntau " << cfg.tau() << '\n';
  out << "informed " << res.informed << '/' << net.size() << '\n';
  out << "last_informed_slot " << res.last_informed << '\n';
  out << "slots " << res.slots << '\n';
  out << "aligned " << (res.aligned ? 1 : 0) << '\n';
  return res.status == radiosim::RunStatus::terminated ? kOk : kNonTermination;
}

int sim_sfr(const Options& o, std::ostream& out) {
  const Network net = load_network(o.net_path);
  radiosim::ProtocolTrace trace;
  protocols::SfrOptions options;
  options.p_cap = o.p_cap;
  options.max_slots = o.max_slots;
  if (!o.trace_path.empty()) options.trace = &trace;
  const auto res = protocols::run_sfr(net, o.epsilon, o.r_max, o.seed, options);
  maybe_trace(o.trace_path, trace);
  std::size_t isolated = 0;
  for (auto v : res.isolated) isolated += v;
  out << "slots " << res.slots << '\n';
  out << "agreed " << (res.agreed ? 1 : 0) << '\n';
  out << "isolated " << isolated << '\n';
  out << "cap_exceeded " << res.failed_nodes << '\n';
  if (res.p_hat) {
    const auto b = limits::upper_bounds_from_p0(std::max(*res.p_hat, 2));
    out << "learned_p0 " << *res.p_hat << '\n';
    out << "n_max " << b.n_max << "\ndelta_max " << b.delta_max << "\ndiam_max " << b.diam_max << '\n';
  } else {
    out << "learned_p0 none\n";
  }
  const bool ok = res.status == radiosim::RunStatus::terminated && res.failed_nodes == 0;
  return ok ? kOk : kNonTermination;
}

int sim_init_single(const Options& o, std::ostream& out) {
  if (o.n < 1 || o.k < 2) throw UsageError("--n must be >= 1 and --k >= 2");
  radiosim::ProtocolTrace trace;
  const auto res = protocols::initialize_single_hop(o.n, o.k, o.seed, o.max_slots,
                                                    o.trace_path.empty() ? nullptr : &trace);
  maybe_trace(o.trace_path, trace);
  out << "slots " << res.slots << "\nrounds " << res.rounds << "\nbijection " << (res.bijection ? 1 : 0) << '\n';
  write_ids(out, res.ids);
  return res.status == radiosim::RunStatus::terminated ? kOk : kNonTermination;
}

int sim_init_multi(const Options& o, std::ostream& out) {
  const Network net = load_network(o.net_path);
  protocols::PipelineOptions options;
  options.r_max = o.r_max_opt;
  options.sfr.p_cap = o.p_cap;
  const auto res = protocols::initialize_multihop(net, o.epsilon, o.seed, options);
  out << "learned_p0 " << res.p_hat << "\nsfr_agreed " << (res.sfr_agreed ? 1 : 0) << '\n';
  out << "sfr_slots " << res.sfr_slots << "\nattempts " << res.attempts.size() << '\n';
  out << "total_slots " << res.total_slots << '\n';
  write_ids(out, res.ids);
  return kOk;
}

int run_experiment(const std::string& name, const Options& o, std::ostream& out) {
  experiments::Thresholds th;
  if (!o.thresholds_path.empty()) {
    try {
      th = experiments::load_thresholds(o.thresholds_path);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  }
  experiments::ExperimentReport report;
  if (name == "send") {
    report = experiments::exp_send(o.T, o.d, o.base, o.trials, o.seed, th);
  } else if (name == "connectivity") {
    report = experiments::exp_connectivity(int(o.n), o.omega, o.trials, o.seed, th);
  } else if (name == "degree-diameter") {
    report = experiments::exp_degree_diameter(int(o.n), *o.ell, o.trials, o.seed, th);
  } else if (name == "lens") {
    report = experiments::exp_lens_occupancy(int(o.n), *o.ell, o.trials, o.seed, th);
  } else if (name == "init") {
    report = experiments::exp_equipartition_init(int(o.n), o.k, o.trials, o.seed, th);
  } else if (name == "equipartition") {
    report = experiments::exp_equipartition_failure(o.m, o.k, o.rounds, o.seed, th);
  } else if (name == "pipeline-scaling") {
    report = experiments::exp_pipeline_scaling(o.ns, *o.ell, o.epsilon, o.trials, o.seed, th);
  } else if (name == "sfr") {
    report = experiments::exp_sfr(int(o.n), o.epsilon, o.trials, o.seed, th);
  } else {
    throw UsageError("unknown experiment " + name);
  }
  write_file(o.csv_path, [&](std::ostream& f) { experiments::write_csv(f, report); });
  experiments::write_checks(out, report);
  return report.passed() ? kOk : kThresholdFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random geometric radio networks: generation, protocol simulation and Monte-Carlo checks"};
  app.name("meshinit");
  app.require_subcommand(1);
  Options o;
  std::function<int()> action;

  const auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "master random seed (integer, required)")->required();
  };

  auto* gen = app.add_subcommand("generate", "write a random network file");
  gen->add_option("--n", o.n, "node count")->required();
  gen->add_option("--side", o.side, "square side length (meters)")->required();
  auto* ell_opt = gen->add_option("--ell", o.ell, "superconnectivity margin; radius = sqrt((1+ell) ln n |X| / (pi n))");
  auto* radius_opt = gen->add_option("--radius", o.radius, "transmission radius (meters)");
  ell_opt->excludes(radius_opt);
  add_seed(gen);
  gen->add_option("--out", o.out_path, "output network file (JSON)")->required();
  gen->callback([&] {
    if (!o.ell && !o.radius) throw CLI::ValidationError("generate", "exactly one of --ell, --radius is required");
    action = [&] { return cmd_generate(o, out); };
  });

  auto* analyze = app.add_subcommand("analyze", "print graph statistics and analytic bounds of a network file");
  analyze->add_option("--net", o.net_path, "network file (JSON)")->required();
  analyze->callback([&] { action = [&] { return cmd_analyze(o, out); }; });

  auto* sim = app.add_subcommand("simulate", "run one protocol once");
  sim->require_subcommand(1);
  const auto add_trace = [&](CLI::App* cmd) {
    cmd->add_option("--trace", o.trace_path, "write the per-slot trace: time, transmitters, S/M/C per node");
  };

  auto* s_send = sim->add_subcommand("send", "SEND on a star: d leaves transmit, the center listens");
  s_send->add_option("--d", o.d, "number of transmitting neighbors")->required();
  s_send->add_option("--T", o.T, "last trial index; SEND runs T + 1 slots")->required();
  s_send->add_option("--base", o.base, "transmission probability base a > 1 (slot i uses a^-i)")->capture_default_str();
  add_seed(s_send);
  add_trace(s_send);
  s_send->callback([&] { action = [&] { return sim_send(o, out); }; });

  auto* s_bc = sim->add_subcommand("broadcast", "BROADCAST from one initiator over a network file");
  s_bc->add_option("--net", o.net_path, "network file (JSON)")->required();
  s_bc->add_option("--epsilon", o.epsilon, "failure probability in (0, 1)")->required();
  s_bc->add_option("--delta", o.delta, "upper bound on the maximum degree (>= 2)")->required();
  s_bc->add_option("--nbound", o.n_bound, "upper bound on the node count (>= 2)")->required();
  s_bc->add_option("--initiator", o.initiator, "index of the initiating node")->capture_default_str();
  s_bc->add_option("--max-slots", o.max_slots, "slot cap (slots)");
  add_seed(s_bc);
  add_trace(s_bc);
  s_bc->callback([&] { action = [&] { return sim_broadcast(o, out); }; });

  auto* s_sfr = sim->add_subcommand("sfr", "search-for-range over a network file");
  s_sfr->add_option("--net", o.net_path, "network file (JSON)")->required();
  s_sfr->add_option("--epsilon", o.epsilon, "failure probability in (0, 1/2)")->required();
  s_sfr->add_option("--rmax", o.r_max, "maximum transmission range (meters)")->required();
  s_sfr->add_option("--p-cap", o.p_cap, "largest p before reporting non-termination");
  s_sfr->add_option("--max-slots", o.max_slots, "slot cap (slots)");
  add_seed(s_sfr);
  add_trace(s_sfr);
  s_sfr->callback([&] { action = [&] { return sim_sfr(o, out); }; });

  auto* s_init = sim->add_subcommand("init-single", "single-hop INITIALIZATION with collision detection");
  s_init->add_option("--n", o.n, "station count")->required();
  s_init->add_option("--k", o.k, "subsets per EQUIPARTITION round")->capture_default_str();
  s_init->add_option("--max-slots", o.max_slots, "slot cap (slots)");
  add_seed(s_init);
  add_trace(s_init);
  s_init->callback([&] { action = [&] { return sim_init_single(o, out); }; });

  auto* s_multi = sim->add_subcommand("init-multi", "SFR, emulated single-hop INITIALIZATION and verification");
  s_multi->add_option("--net", o.net_path, "network file (JSON)")->required();
  s_multi->add_option("--epsilon", o.epsilon, "failure probability in (0, 1/2)")->required();
  s_multi->add_option("--rmax", o.r_max_opt, "maximum transmission range (meters; default the side)");
  s_multi->add_option("--p-cap", o.p_cap, "largest p SFR may reach");
  add_seed(s_multi);
  s_multi->callback([&] { action = [&] { return sim_init_multi(o, out); }; });

  auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiment; writes CSV, exit 5 if a threshold fails");
  exp->require_subcommand(1);
  const auto add_common = [&](CLI::App* cmd, bool trials) {
    if (trials) cmd->add_option("--trials", o.trials, "number of independent trials")->required();
    add_seed(cmd);
    cmd->add_option("--csv", o.csv_path, "output CSV path")->required();
    cmd->add_option("--thresholds", o.thresholds_path, "JSON file of acceptance tolerances (default: built in)");
  };
  const auto bind = [&](CLI::App* cmd, std::string name) {
    cmd->callback([&, name] { action = [&, name] { return run_experiment(name, o, out); }; });
  };

  auto* e_send = exp->add_subcommand("send", "SEND success on a star vs the exact product");
  e_send->add_option("--T", o.T, "last trial index (slots - 1)")->required();
  e_send->add_option("--d", o.d, "number of transmitting neighbors")->required();
  e_send->add_option("--base", o.base, "transmission probability base a > 1")->capture_default_str();
  add_common(e_send, true);
  bind(e_send, "send");

  auto* e_conn = exp->add_subcommand("connectivity", "connectivity at r = sqrt((ln n + omega) |X| / (pi n)), density 1");
  e_conn->add_option("--n", o.n, "node count")->required();
  e_conn->add_option("--omega", o.omega, "slack added to ln n")->required();
  add_common(e_conn, true);
  bind(e_conn, "connectivity");

  auto* e_dd = exp->add_subcommand("degree-diameter", "degrees, coverage and hop diameter at r_superconnectivity");
  e_dd->add_option("--n", o.n, "node count (>= 100); side = sqrt(n) meters")->required();
  e_dd->add_option("--ell", o.ell, "superconnectivity margin")->required();
  add_common(e_dd, true);
  bind(e_dd, "degree-diameter");

  auto* e_lens = exp->add_subcommand("lens", "emptiness of the two lens regions vs (1 - |L|/|X|)^n");
  e_lens->add_option("--n", o.n, "node count (>= 100); side = sqrt(n) meters")->required();
  e_lens->add_option("--ell", o.ell, "superconnectivity margin")->required();
  add_common(e_lens, true);
  bind(e_lens, "lens");

  auto* e_init = exp->add_subcommand("init", "single-hop INITIALIZATION slot count per station");
  e_init->add_option("--n", o.n, "station count")->required();
  e_init->add_option("--k", o.k, "subsets per EQUIPARTITION round")->capture_default_str();
  add_common(e_init, true);
  bind(e_init, "init");

  auto* e_eq = exp->add_subcommand("equipartition", "EQUIPARTITION per-round failure frequency vs k^(1-m)");
  e_eq->add_option("--m", o.m, "stations taking part (>= 2)")->capture_default_str();
  e_eq->add_option("--k", o.k, "subsets per round")->capture_default_str();
  e_eq->add_option("--rounds", o.rounds, "rounds to simulate in total")->required();
  add_common(e_eq, false);
  bind(e_eq, "equipartition");

  auto* e_pipe = exp->add_subcommand("pipeline-scaling", "charged slots of the multihop pipeline vs n (log-log slope)");
  e_pipe->add_option("--ns", o.ns, "comma-separated node counts, each >= 100")->delimiter(',')->required();
  e_pipe->add_option("--ell", o.ell, "superconnectivity margin of the generated networks")->required();
  e_pipe->add_option("--epsilon", o.epsilon, "failure probability in (0, 1/2)")->required();
  add_common(e_pipe, true);
  bind(e_pipe, "pipeline-scaling");

  auto* e_sfr = exp->add_subcommand("sfr", "SFR agreement and 2^(p+1) >= n on density-one networks");
  e_sfr->add_option("--n", o.n, "node count; side = sqrt(n) meters, rmax = side")->required();
  e_sfr->add_option("--epsilon", o.epsilon, "failure probability in (0, 1/2)")->required();
  add_common(e_sfr, true);
  bind(e_sfr, "sfr");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kNonTermination;
  }
}

}  // namespace meshinit::cli
