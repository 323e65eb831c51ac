#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "megcom/harness.hpp"
#include "megcom/oracles.hpp"

using namespace megcom;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 40;
  c.member_fraction = 0.4;
  c.instances = 4;
  c.base_seed = 17;
  c.algorithms = {Algorithm::Lfp, Algorithm::Cfp, Algorithm::Cap, Algorithm::Spt, Algorithm::Kmb};
  return c;
}

std::string rows_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_rows_csv(out, r.rows);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("one instance of one algorithm yields one row") {
  ExperimentConfig c;
  c.n = 30;
  c.instances = 1;
  c.algorithms = {Algorithm::Spt};
  auto r = run_experiment(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].algorithm == Algorithm::Spt);
  std::istringstream lines(rows_text(r));
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 2);
}

TEST_CASE("runs are deterministic and independent of parallelism") {
  auto c = small_config();
  auto a = rows_text(run_experiment(c, 1));
  auto b = rows_text(run_experiment(c, 1));
  auto d = rows_text(run_experiment(c, 4));
  CHECK(a == b);
  CHECK(a == d);
}

TEST_CASE("rows round-trip through CSV") {
  auto r = run_experiment(small_config());
  std::istringstream in(rows_text(r));
  CHECK(read_rows_csv(in) == r.rows);
  std::istringstream bad("seed,alg\n1,LFP\n");
  CHECK_THROWS_AS(read_rows_csv(bad), PreconditionError);
}

TEST_CASE("summary recomputes from rows") {
  auto r = run_experiment(small_config());
  auto summary = summarize(r);
  REQUIRE(summary.size() == r.config.algorithms.size());
  double spt = 0.0, kmb = 0.0;
  for (const auto& s : summary) {
    double total = 0.0;
    int count = 0;
    for (const auto& row : r.rows) {
      if (row.algorithm == s.algorithm) {
        total += row.psi;
        ++count;
      }
    }
    CHECK(count == s.instances);
    CHECK(s.mean_psi == doctest::Approx(total / count));
    if (s.algorithm == Algorithm::Spt) spt = s.mean_psi;
    if (s.algorithm == Algorithm::Kmb) kmb = s.mean_psi;
  }
  for (const auto& s : summary) {
    REQUIRE(s.saving_vs_spt);
    REQUIRE(s.saving_vs_kmb);
    CHECK(*s.saving_vs_spt == doctest::Approx((spt - s.mean_psi) / spt));
    CHECK(*s.saving_vs_kmb == doctest::Approx((kmb - s.mean_psi) / kmb));
  }
}

TEST_CASE("proven ratios") {
  NetworkMetrics m;
  m.max_degree = 10;
  CHECK(ratio_bound(Algorithm::Lfp, m) == doctest::Approx(4.0 * std::log(11.0) + 7.0));
  CHECK(ratio_bound(Algorithm::Lfp, m) == doctest::Approx(16.592).epsilon(1e-4));
  CHECK(ratio_bound(Algorithm::Cfp, m) == 13.0);
  CHECK(ratio_bound(Algorithm::Cap, m) == 145.0);
  CHECK_THROWS_AS(ratio_bound(Algorithm::Spt, m), PreconditionError);
  CHECK_THROWS_AS(ratio_bound(Algorithm::Kmb, m), PreconditionError);
  m.max_degree = 0;
  CHECK_THROWS_AS(ratio_bound(Algorithm::Lfp, m), PreconditionError);
}

TEST_CASE("plot data has one row per point and one column per algorithm") {
  Sweep sweep;
  sweep.name = "tiny";
  sweep.x_label = "member_fraction";
  std::vector<ExperimentResult> results;
  for (double f : {0.3, 0.5, 0.7}) {
    ExperimentConfig c;
    c.n = 25;
    c.instances = 2;
    c.member_fraction = f;
    c.algorithms = {Algorithm::Lfp, Algorithm::Kmb};
    sweep.xs.push_back(f);
    sweep.points.push_back(c);
    results.push_back(run_experiment(c));
  }
  std::ostringstream out;
  write_plot(out, sweep, results);
  std::istringstream lines(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind('#', 0) == 0) continue;
    std::istringstream cols(line);
    int n = 0;
    for (std::string tok; cols >> tok;) ++n;
    CHECK(n == 3);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("report files") {
  auto dir = std::filesystem::temp_directory_path() / "megcom_harness_report";
  std::filesystem::remove_all(dir);
  auto r = run_experiment(small_config());
  emit_report(r, dir);
  CHECK(std::filesystem::exists(dir / "rows.csv"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "bounds.txt"));
  CHECK(slurp(dir / "rows.csv") == rows_text(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("golden rows") {
  auto golden = std::filesystem::path(MEGCOM_TEST_DATA) / "golden_rows.csv";
  std::ifstream cfg_in(std::filesystem::path(MEGCOM_TEST_DATA) / "golden.cfg");
  REQUIRE(cfg_in);
  auto cfg = parse_config(cfg_in);
  CHECK(rows_text(run_experiment(cfg)) == slurp(golden));
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "n = 12\n"
      "density = 1.5\n"
      "member_fraction=0.25\n"
      "power_mode = adjustable\n"
      "algorithms = LFP, CAP\n"
      "oracle_checks = false\n"
      "base_seed = 99\n");
  auto c = parse_config(in);
  CHECK(c.n == 12);
  CHECK(c.density == 1.5);
  CHECK(c.member_fraction == 0.25);
  CHECK(c.power_mode == PowerMode::Adjustable);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::Lfp, Algorithm::Cap});
  CHECK(c.base_seed == 99);

  std::istringstream unknown("colour = red\n");
  CHECK_THROWS_AS(parse_config(unknown), PreconditionError);
  std::istringstream garbage("n 12\n");
  CHECK_THROWS_AS(parse_config(garbage), PreconditionError);
  std::istringstream bad_alg("algorithms = LFP, XYZ\n");
  CHECK_THROWS_AS(parse_config(bad_alg), PreconditionError);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.instances = 0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.oracle_checks = true;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.member_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
}

TEST_CASE("presets") {
  auto names = preset_names();
  for (const char* want : {"fig5-300", "fig5-500", "fig5-700", "fig6-300", "fig6-500", "fig6-700",
                           "ratios"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
  auto f5 = preset("fig5-500");
  REQUIRE(f5.points.size() == 9);
  CHECK(f5.points.front().member_fraction == doctest::Approx(0.1));
  CHECK(f5.points.back().member_fraction == doctest::Approx(0.9));
  CHECK(f5.points.front().n == 500);
  auto f6 = preset("fig6-300");
  REQUIRE(f6.points.size() == 9);
  CHECK(f6.points.back().density == 5.0);
  CHECK(f6.points.front().member_fraction == 0.6);
  auto ratios = preset("ratios");
  int total = 0;
  for (const auto& p : ratios.points) {
    CHECK(p.oracle_checks);
    CHECK(p.n <= kOracleMaxNodes);
    total += p.instances;
  }
  CHECK(total >= 200);
  CHECK_THROWS_AS(preset("fig7-300"), PreconditionError);
}

TEST_CASE("oracle checks stay within the proven ratios") {
  ExperimentConfig c = preset("ratios").points.front();
  c.instances = 10;
  auto r = run_experiment(c);
  CHECK_FALSE(r.checks.empty());
  for (const auto& check : r.checks) CHECK(check.ok());
}
