#include "megcom/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "megcom/cfp.hpp"
#include "megcom/energy.hpp"
#include "megcom/lfp.hpp"
#include "megcom/oracles.hpp"
#include "megcom/steiner.hpp"

namespace megcom {

const char* to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::Lfp: return "LFP";
    case Algorithm::Cfp: return "CFP";
    case Algorithm::Cap: return "CAP";
    case Algorithm::Spt: return "SPT";
    case Algorithm::Kmb: return "KMB";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& text) {
  for (auto alg : {Algorithm::Lfp, Algorithm::Cfp, Algorithm::Cap, Algorithm::Spt, Algorithm::Kmb}) {
    if (text == to_string(alg)) return alg;
  }
  throw PreconditionError("unknown algorithm '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw PreconditionError("n must be at least 2");
  if (density <= 0 || tx_range <= 0) throw PreconditionError("density and tx_range must be positive");
  if (member_fraction <= 0 || member_fraction > 1) {
    throw PreconditionError("member_fraction must be in (0, 1]");
  }
  if (packet_lo < 1 || packet_hi < packet_lo) throw PreconditionError("bad packet range");
  if (instances < 1) throw PreconditionError("instances must be at least 1");
  if (algorithms.empty()) throw PreconditionError("no algorithms selected");
  if (oracle_checks && n > kOracleMaxNodes) {
    throw PreconditionError("oracle checks need n <= " + std::to_string(kOracleMaxNodes));
  }
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw PreconditionError("not a boolean: " + v);
}

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw PreconditionError("not a number: " + s);
  }
  return x;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "n") cfg.n = std::stoi(value);
      else if (key == "density") cfg.density = parse_double(value);
      else if (key == "tx_range") cfg.tx_range = parse_double(value);
      else if (key == "member_fraction") cfg.member_fraction = parse_double(value);
      else if (key == "packet_lo") cfg.packet_lo = std::stoi(value);
      else if (key == "packet_hi") cfg.packet_hi = std::stoi(value);
      else if (key == "eps_s") cfg.eps_s = parse_double(value);
      else if (key == "eps_r") cfg.eps_r = parse_double(value);
      else if (key == "power_mode") cfg.power_mode = power_mode_from_string(value);
      else if (key == "alpha") cfg.alpha = parse_double(value);
      else if (key == "instances") cfg.instances = std::stoi(value);
      else if (key == "base_seed") cfg.base_seed = std::stoull(value);
      else if (key == "oracle_checks") cfg.oracle_checks = parse_bool(value);
      else if (key == "algorithms") {
        cfg.algorithms.clear();
        std::istringstream list(value);
        std::string item;
        while (std::getline(list, item, ',')) cfg.algorithms.push_back(algorithm_from_string(trim(item)));
      } else {
        throw PreconditionError("unknown key '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      throw PreconditionError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

double ratio_bound(Algorithm alg, const NetworkMetrics& metrics) {
  switch (alg) {
    case Algorithm::Lfp:
      if (metrics.max_degree < 1) throw PreconditionError("max degree must be at least 1");
      return 4.0 * std::log(metrics.max_degree + 1.0) + 7.0;
    case Algorithm::Cfp: return 13.0;
    case Algorithm::Cap: return 145.0;
    default: break;
  }
  throw PreconditionError(std::string("no proven ratio for ") + to_string(alg));
}

namespace {

struct InstanceOutput {
  InstanceInfo info;
  std::vector<ResultRow> rows;
  std::vector<OracleCheck> checks;
};

ResultRow describe(std::uint64_t seed, Algorithm alg, const MulticastTree& tree, double psi_total) {
  ResultRow row;
  row.seed = seed;
  row.algorithm = alg;
  row.psi = psi_total;
  row.nd = static_cast<int>(tree.nodes().size());
  row.internal = static_cast<int>(tree.internal().size());
  row.leaves = static_cast<int>(tree.leaves().size());
  return row;
}

void add_counters(ResultRow& row, const SimCounters& c) {
  row.rounds_s1 = c.rounds_stage1;
  row.rounds_s2 = c.rounds_stage2;
  row.msgs_s1 = c.messages_stage1;
  row.msgs_s2 = c.messages_stage2;
}

InstanceOutput run_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  InstanceOutput out;
  const EnergyParams params{cfg.eps_s, cfg.eps_r, cfg.alpha};
  Network net = generate_network(cfg.n, cfg.density, cfg.tx_range, cfg.power_mode, cfg.alpha, seed,
                                 cfg.eps_s);
  GroupSpec group = select_group(net, cfg.member_fraction, cfg.packet_lo, cfg.packet_hi, seed);
  ShortestPaths paths(net);
  out.info = {seed, group.size(), compute_metrics(net)};

  KernelOptions kernel;
  kernel.record_trace = false;
  std::optional<Network> adjustable;
  std::optional<ShortestPaths> adjustable_paths;
  std::optional<OracleResult> opt, opt_adjustable;

  for (Algorithm alg : cfg.algorithms) {
    const Network* eval_net = &net;
    PowerMode mode = cfg.power_mode;
    ResultRow row;
    switch (alg) {
      case Algorithm::Lfp: {
        LfpOptions opts;
        opts.kernel = kernel;
        auto run = run_lfp(net, paths, group, seed, opts);
        row = describe(seed, alg, run.tree, psi(run.tree, net, group, params, mode).total);
        add_counters(row, run.outcome.counters);
        break;
      }
      case Algorithm::Cfp: {
        CfpOptions opts;
        opts.kernel = kernel;
        auto run = run_cfp(net, paths, group, seed, opts);
        row = describe(seed, alg, run.tree, psi(run.tree, net, group, params, mode).total);
        add_counters(row, run.outcome.counters);
        break;
      }
      case Algorithm::Cap: {
        if (cfg.power_mode == PowerMode::Adjustable) {
          eval_net = &net;
        } else {
          if (!adjustable) {
            adjustable = Network::from_positions(net.positions(), cfg.tx_range,
                                                 PowerMode::Adjustable, cfg.alpha);
            adjustable_paths.emplace(*adjustable);
          }
          eval_net = &*adjustable;
        }
        mode = PowerMode::Adjustable;
        const ShortestPaths& p = eval_net == &net ? paths : *adjustable_paths;
        auto run = cap_tree(*eval_net, p, group, seed, kernel);
        row = describe(seed, alg, run.tree, psi(run.tree, *eval_net, group, params, mode).total);
        add_counters(row, run.outcome.counters);
        break;
      }
      case Algorithm::Spt: {
        auto tree = spt_baseline(paths, group, seed);
        row = describe(seed, alg, tree, psi(tree, net, group, params, mode).total);
        break;
      }
      case Algorithm::Kmb: {
        std::set<NodeId> terminals(group.members().begin(), group.members().end());
        auto tree = kmb_centralized(paths, terminals);
        row = describe(seed, alg, tree, psi(tree, net, group, params, mode).total);
        break;
      }
    }
    out.rows.push_back(row);

    if (cfg.oracle_checks && alg != Algorithm::Spt && alg != Algorithm::Kmb) {
      std::optional<OracleResult>& slot = mode == cfg.power_mode ? opt : opt_adjustable;
      if (!slot) slot = brute_opt_tree(*eval_net, group, params, mode);
      out.checks.push_back(
          {seed, alg, row.psi / slot->objective, ratio_bound(alg, out.info.metrics)});
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int parallel) {
  config.validate();
  const int count = config.instances;
  std::vector<InstanceOutput> outputs(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        outputs[i] = run_instance(config, config.base_seed + i);
      } catch (const std::exception& e) {
        try {
          throw AlgorithmError("instance seed " + std::to_string(config.base_seed + i) + ": " +
                               e.what());
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }
  };
  const int threads = std::max(1, std::min(parallel, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  ExperimentResult result;
  result.config = config;
  for (auto& o : outputs) {
    result.instances.push_back(o.info);
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    result.checks.insert(result.checks.end(), o.checks.begin(), o.checks.end());
  }
  return result;
}

std::vector<SummaryRow> summarize(const ExperimentResult& result) {
  std::vector<SummaryRow> out;
  std::map<Algorithm, size_t> index;
  for (Algorithm alg : result.config.algorithms) {
    index[alg] = out.size();
    SummaryRow row;
    row.algorithm = alg;
    out.push_back(row);
  }
  for (const auto& row : result.rows) {
    SummaryRow& s = out[index.at(row.algorithm)];
    ++s.instances;
    s.mean_psi += row.psi;
    s.mean_internal += row.internal;
    s.mean_nd += row.nd;
  }
  for (auto& s : out) {
    if (s.instances == 0) continue;
    s.mean_psi /= s.instances;
    s.mean_internal /= s.instances;
    s.mean_nd /= s.instances;
  }
  auto mean_of = [&](Algorithm alg) -> std::optional<double> {
    auto it = index.find(alg);
    if (it == index.end()) return std::nullopt;
    return out[it->second].mean_psi;
  };
  auto spt = mean_of(Algorithm::Spt);
  auto kmb = mean_of(Algorithm::Kmb);
  for (auto& s : out) {
    if (spt && *spt > 0) s.saving_vs_spt = (*spt - s.mean_psi) / *spt;
    if (kmb && *kmb > 0) s.saving_vs_kmb = (*kmb - s.mean_psi) / *kmb;
  }
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kRowsHeader << '\n';
  for (const auto& r : rows) {
    out << r.seed << ',' << to_string(r.algorithm) << ',' << fmt(r.psi) << ',' << r.nd << ','
        << r.internal << ',' << r.leaves << ',' << r.rounds_s1 << ',' << r.rounds_s2 << ','
        << r.msgs_s1 << ',' << r.msgs_s2 << '\n';
  }
}

std::vector<ResultRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRowsHeader) {
    throw PreconditionError("rows file does not start with the expected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) f.push_back(trim(cell));
    if (f.size() != 10) throw PreconditionError("malformed row: " + line);
    ResultRow r;
    r.seed = std::stoull(f[0]);
    r.algorithm = algorithm_from_string(f[1]);
    r.psi = parse_double(f[2]);
    r.nd = std::stoi(f[3]);
    r.internal = std::stoi(f[4]);
    r.leaves = std::stoi(f[5]);
    r.rounds_s1 = std::stoi(f[6]);
    r.rounds_s2 = std::stoi(f[7]);
    r.msgs_s1 = std::stoll(f[8]);
    r.msgs_s2 = std::stoll(f[9]);
    rows.push_back(r);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "algorithm,instances,mean_psi,saving_vs_spt,saving_vs_kmb,mean_internal,mean_nd\n";
  for (const auto& s : summary) {
    out << to_string(s.algorithm) << ',' << s.instances << ',' << fmt(s.mean_psi) << ','
        << (s.saving_vs_spt ? fmt(*s.saving_vs_spt) : "") << ','
        << (s.saving_vs_kmb ? fmt(*s.saving_vs_kmb) : "") << ',' << fmt(s.mean_internal) << ','
        << fmt(s.mean_nd) << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  {
    auto out = open_out(out_dir / "rows.csv");
    write_rows_csv(out, result.rows);
  }
  {
    auto out = open_out(out_dir / "summary.csv");
    write_summary_csv(out, summarize(result));
  }
  auto out = open_out(out_dir / "bounds.txt");
  NetworkMetrics worst;
  for (const auto& info : result.instances) {
    worst.max_degree = std::max(worst.max_degree, info.metrics.max_degree);
    worst.diameter = std::max(worst.diameter, info.metrics.diameter);
  }
  out << "# proven approximation ratios; LFP evaluated at the largest max degree seen\n";
  out << "max_degree " << worst.max_degree << '\n';
  for (Algorithm alg : result.config.algorithms) {
    if (alg == Algorithm::Spt || alg == Algorithm::Kmb) continue;
    if (alg == Algorithm::Lfp && worst.max_degree < 1) continue;
    out << to_string(alg) << ' ' << fmt(ratio_bound(alg, worst)) << '\n';
  }
  if (!result.checks.empty()) {
    std::map<Algorithm, double> observed;
    int violations = 0;
    for (const auto& c : result.checks) {
      observed[c.algorithm] = std::max(observed[c.algorithm], c.ratio);
      violations += c.ok() ? 0 : 1;
    }
    for (const auto& [alg, r] : observed) {
      out << "observed_max_ratio " << to_string(alg) << ' ' << fmt(r) << '\n';
    }
    out << "violations " << violations << '\n';
  }
}

std::vector<std::string> preset_names() {
  return {"fig5-300", "fig5-500", "fig5-700", "fig6-300", "fig6-500", "fig6-700", "ratios"};
}

Sweep preset(const std::string& name) {
  Sweep sweep;
  sweep.name = name;
  if (name.rfind("fig5-", 0) == 0 || name.rfind("fig6-", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(5));
    } catch (const std::logic_error&) {
      throw PreconditionError("unknown preset '" + name + "'");
    }
    if (n != 300 && n != 500 && n != 700) throw PreconditionError("unknown preset '" + name + "'");
    ExperimentConfig base;
    base.n = n;
    if (name[3] == '5') {
      sweep.x_label = "member_fraction";
      for (int i = 1; i <= 9; ++i) {
        ExperimentConfig c = base;
        c.member_fraction = i / 10.0;
        sweep.xs.push_back(c.member_fraction);
        sweep.points.push_back(c);
      }
    } else {
      sweep.x_label = "density";
      base.member_fraction = 0.6;
      base.algorithms = {Algorithm::Lfp, Algorithm::Cfp, Algorithm::Kmb};
      for (int i = 0; i <= 8; ++i) {
        ExperimentConfig c = base;
        c.density = 1.0 + 0.5 * i;
        sweep.xs.push_back(c.density);
        sweep.points.push_back(c);
      }
    }
    return sweep;
  }
  if (name == "ratios") {
    sweep.x_label = "n";
    for (int n = 6; n <= 9; ++n) {
      ExperimentConfig c;
      c.n = n;
      c.tx_range = 1.5;
      c.member_fraction = 0.5;
      c.instances = 50;
      c.algorithms = {Algorithm::Lfp, Algorithm::Cfp, Algorithm::Cap, Algorithm::Spt, Algorithm::Kmb};
      c.oracle_checks = true;
      sweep.xs.push_back(n);
      sweep.points.push_back(c);
    }
    return sweep;
  }
  throw PreconditionError("unknown preset '" + name + "'");
}

void write_plot(std::ostream& out, const Sweep& sweep, const std::vector<ExperimentResult>& results) {
  if (results.empty()) return;
  out << "# " << sweep.x_label;
  for (Algorithm alg : results.front().config.algorithms) out << ' ' << to_string(alg);
  out << '\n';
  for (size_t i = 0; i < results.size(); ++i) {
    out << fmt(sweep.xs.at(i));
    for (const auto& s : summarize(results[i])) out << ' ' << fmt(s.mean_psi);
    out << '\n';
  }
}

std::vector<ExperimentResult> run_sweep(const Sweep& sweep, const std::filesystem::path& out_dir,
                                        int parallel) {
  std::vector<ExperimentResult> results;
  for (size_t i = 0; i < sweep.points.size(); ++i) {
    results.push_back(run_experiment(sweep.points[i], parallel));
    emit_report(results.back(), out_dir / ("point_" + std::to_string(i)));
  }
  auto out = open_out(out_dir / ("plot_" + sweep.name + ".dat"));
  write_plot(out, sweep, results);
  return results;
}

}  // namespace megcom
