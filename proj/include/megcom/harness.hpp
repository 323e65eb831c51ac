#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "megcom/network.hpp"

namespace megcom {

enum class Algorithm { Lfp, Cfp, Cap, Spt, Kmb };
const char* to_string(Algorithm alg);
Algorithm algorithm_from_string(const std::string& text);

struct ExperimentConfig {
  int n = 300;
  double density = 1.0;
  double tx_range = 2.0;
  double member_fraction = 0.9;
  int packet_lo = 1;
  int packet_hi = 100;
  double eps_s = 200.0;
  double eps_r = 20.0;
  PowerMode power_mode = PowerMode::Fixed;
  double alpha = 2.0;
  int instances = 100;
  std::uint64_t base_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::Lfp, Algorithm::Cfp, Algorithm::Spt, Algorithm::Kmb};
  bool oracle_checks = false;

  /// Throws PreconditionError on an unusable configuration.
  void validate() const;
};

/// Flat `key = value` lines; `#` starts a comment. Keys mirror the fields.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});

struct ResultRow {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Lfp;
  double psi = 0.0;
  int nd = 0;
  int internal = 0;
  int leaves = 0;
  int rounds_s1 = 0;
  int rounds_s2 = 0;
  long long msgs_s1 = 0;
  long long msgs_s2 = 0;
  bool operator==(const ResultRow&) const = default;
};

struct InstanceInfo {
  std::uint64_t seed = 0;
  int members = 0;
  NetworkMetrics metrics;
};

/// One observed approximation ratio against the exhaustive optimum.
struct OracleCheck {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Lfp;
  double ratio = 0.0;
  double bound = 0.0;
  bool ok() const { return ratio <= bound; }
};

struct SummaryRow {
  Algorithm algorithm = Algorithm::Lfp;
  int instances = 0;
  double mean_psi = 0.0;
  std::optional<double> saving_vs_spt;
  std::optional<double> saving_vs_kmb;
  double mean_internal = 0.0;
  double mean_nd = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<InstanceInfo> instances;
  std::vector<ResultRow> rows;  // instance-major, algorithms in config order
  std::vector<OracleCheck> checks;
};

/// Instance i uses seed base_seed + i for placement, membership, scan
/// phases and the SPT root. CAP always runs on the adjustable-power view of
/// the same placement; everything else uses the configured mode.
ExperimentResult run_experiment(const ExperimentConfig& config, int parallel = 1);

std::vector<SummaryRow> summarize(const ExperimentResult& result);

/// Proven approximation ratio; only LFP, CFP and CAP have one.
double ratio_bound(Algorithm alg, const NetworkMetrics& metrics);

inline constexpr const char* kRowsHeader =
    "seed,algorithm,psi,nd,internal,leaves,rounds_s1,rounds_s2,msgs_s1,msgs_s2";

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_rows_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

/// rows.csv, summary.csv and bounds.txt for one experiment.
void emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// A named list of configurations varying one parameter.
struct Sweep {
  std::string name;
  std::string x_label;
  std::vector<double> xs;
  std::vector<ExperimentConfig> points;
};

/// fig5-300/500/700, fig6-300/500/700, ratios.
Sweep preset(const std::string& name);
std::vector<std::string> preset_names();

/// Runs every point, writes point_<i>/ reports and plot_<name>.dat with one
/// mean-psi column per algorithm.
std::vector<ExperimentResult> run_sweep(const Sweep& sweep, const std::filesystem::path& out_dir,
                                        int parallel = 1);

void write_plot(std::ostream& out, const Sweep& sweep, const std::vector<ExperimentResult>& results);

}  // namespace megcom
