// Scans seeded 7-node instances for one where the LFP tree uses strictly
// less session energy than the KMB tree, and prints it as an instance file.
#include <CLI11.hpp>
#include <iostream>

#include "megcom/energy.hpp"
#include "megcom/lfp.hpp"
#include "megcom/steiner.hpp"

int main(int argc, char** argv) {
  using namespace megcom;
  CLI::App app{"search for a small instance where LFP beats KMB"};
  std::uint64_t first = 1;
  int limit = 100000;
  int nodes = 7;
  app.add_option("--first", first, "first seed");
  app.add_option("--limit", limit, "seeds to try");
  app.add_option("--nodes", nodes, "network size");
  CLI11_PARSE(app, argc, argv);

  const EnergyParams params{200.0, 20.0, 2.0};
  for (std::uint64_t seed = first; seed < first + static_cast<std::uint64_t>(limit); ++seed) {
    Instance inst;
    inst.seed = seed;
    inst.net = generate_network(nodes, 1.0, 1.5, PowerMode::Fixed, 2.0, seed);
    inst.group = select_group(inst.net, 0.6, 1, 100, seed);
    ShortestPaths sp(inst.net);
    std::set<NodeId> terms(inst.group.members().begin(), inst.group.members().end());
    double lfp = psi(run_lfp(inst.net, sp, inst.group, seed).tree, inst.net, inst.group, params,
                     PowerMode::Fixed).total;
    double kmb = psi(kmb_centralized(sp, terms), inst.net, inst.group, params,
                     PowerMode::Fixed).total;
    if (lfp < kmb) {
      std::cerr << "seed " << seed << ": LFP " << lfp << " < KMB " << kmb << '\n';
      write_instance(std::cout, inst);
      return 0;
    }
  }
  std::cerr << "no instance found\n";
  return 1;
}
