#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "megcom/harness.hpp"
#include "megcom/lfp.hpp"
#include "megcom/oracles.hpp"

using namespace megcom;

namespace {

void apply_seed(std::vector<ExperimentConfig>& points, const std::optional<std::uint64_t>& flag) {
  std::optional<std::uint64_t> seed = flag;
  if (!seed) {
    if (const char* env = std::getenv("MEGCOM_SEED")) seed = std::stoull(env);
  }
  if (!seed) return;
  for (auto& p : points) p.base_seed = *seed;
}

int cmd_run(const std::string& preset_name, const std::string& config_file, const std::string& out,
            std::optional<std::uint64_t> seed, int parallel) {
  if (!preset_name.empty()) {
    Sweep sweep = preset(preset_name);
    apply_seed(sweep.points, seed);
    auto results = run_sweep(sweep, out, parallel);
    for (size_t i = 0; i < results.size(); ++i) {
      std::cout << sweep.x_label << '=' << sweep.xs[i];
      for (const auto& s : summarize(results[i])) std::cout << ' ' << to_string(s.algorithm) << '=' << s.mean_psi;
      std::cout << '\n';
    }
    return 0;
  }
  std::ifstream in(config_file);
  if (!in) throw std::runtime_error("cannot read " + config_file);
  std::vector<ExperimentConfig> points{parse_config(in)};
  apply_seed(points, seed);
  auto result = run_experiment(points.front(), parallel);
  emit_report(result, out);
  for (const auto& s : summarize(result)) {
    std::cout << to_string(s.algorithm) << " mean_psi=" << s.mean_psi;
    if (s.saving_vs_spt) std::cout << " saving_vs_spt=" << *s.saving_vs_spt;
    if (s.saving_vs_kmb) std::cout << " saving_vs_kmb=" << *s.saving_vs_kmb;
    std::cout << '\n';
  }
  return 0;
}

int cmd_verify(const std::string& preset_name, const std::string& out,
               std::optional<std::uint64_t> seed, int parallel) {
  Sweep sweep = preset(preset_name);
  apply_seed(sweep.points, seed);
  for (auto& p : sweep.points) p.oracle_checks = true;
  std::vector<ExperimentResult> results;
  if (out.empty()) {
    for (const auto& p : sweep.points) results.push_back(run_experiment(p, parallel));
  } else {
    results = run_sweep(sweep, out, parallel);
  }
  std::map<Algorithm, double> worst;
  std::map<Algorithm, int> checked;
  int violations = 0;
  for (const auto& r : results) {
    for (const auto& c : r.checks) {
      worst[c.algorithm] = std::max(worst[c.algorithm], c.ratio);
      ++checked[c.algorithm];
      if (!c.ok()) {
        ++violations;
        std::cout << "VIOLATION seed=" << c.seed << ' ' << to_string(c.algorithm)
                  << " ratio=" << c.ratio << " bound=" << c.bound << '\n';
      }
    }
  }
  for (const auto& [alg, r] : worst) {
    std::cout << to_string(alg) << " checked=" << checked[alg] << " max_ratio=" << r << '\n';
  }
  std::cout << "violations=" << violations << '\n';
  return violations == 0 ? 0 : 1;
}

int cmd_oracle(const std::string& file, double eps_s, double eps_r) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file);
  Instance inst = read_instance(in, eps_s);
  const EnergyParams params{eps_s, eps_r, inst.net.alpha()};
  Network fixed = Network::from_positions(inst.net.positions(), inst.net.tx_range(),
                                          PowerMode::Fixed, inst.net.alpha(), eps_s);
  Network adjustable = Network::from_positions(inst.net.positions(), inst.net.tx_range(),
                                               PowerMode::Adjustable, inst.net.alpha());
  const auto& group = inst.group;
  std::set<NodeId> terminals(group.members().begin(), group.members().end());
  std::cout << "psi_opt_fixed " << brute_opt_tree(fixed, group, params, PowerMode::Fixed).objective << '\n';
  std::cout << "psi_opt_adjustable "
            << brute_opt_tree(adjustable, group, params, PowerMode::Adjustable).objective << '\n';
  std::cout << "min_internal " << brute_min_internal_tree(fixed, group).objective << '\n';
  std::cout << "min_theta " << brute_min_theta_tree(adjustable, group).objective << '\n';
  std::cout << "min_guardians " << brute_min_guardian(fixed, group, GuardianPool::Buddies).objective << '\n';
  try {
    std::cout << "min_member_guardians "
              << brute_min_guardian(fixed, group, GuardianPool::Members).objective << '\n';
  } catch (const AlgorithmError&) {
    std::cout << "min_member_guardians none\n";
  }
  std::cout << "min_steiner_fixed " << brute_min_steiner(fixed, terminals).objective << '\n';
  std::cout << "min_steiner_adjustable " << brute_min_steiner(adjustable, terminals).objective << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-energy group multicast simulator"};
  app.require_subcommand(1);

  std::string preset_name, config_file, out;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  auto* run = app.add_subcommand("run", "Run an experiment or a preset sweep");
  auto* preset_opt = run->add_option("--preset", preset_name, "Preset sweep name");
  auto* config_opt = run->add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--seed", seed, "Base seed (overrides MEGCOM_SEED and the config)");
  run->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  std::string verify_preset, verify_out;
  auto* verify = app.add_subcommand("verify", "Check observed ratios against proven bounds");
  verify->add_option("--preset", verify_preset, "Preset sweep name")->required();
  verify->add_option("--out", verify_out, "Optional output directory");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  std::string instance_file;
  double eps_s = 200.0, eps_r = 20.0;
  auto* oracle = app.add_subcommand("oracle", "Print exhaustive optima for a small instance");
  oracle->add_option("--instance", instance_file, "Instance file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--eps-s", eps_s, "Transmit energy per packet");
  oracle->add_option("--eps-r", eps_r, "Receive energy per packet");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) {
      if (preset_name.empty() == config_file.empty()) {
        std::cerr << "run: exactly one of --preset or --config is required\n";
        return 2;
      }
      return cmd_run(preset_name, config_file, out, seed, parallel);
    }
    if (*verify) return cmd_verify(verify_preset, verify_out, seed, parallel);
    if (*oracle) return cmd_oracle(instance_file, eps_s, eps_r);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
