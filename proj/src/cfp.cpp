#include "megcom/cfp.hpp"

namespace megcom {

namespace {

ProtocolConfig cfp_config(const CfpOptions& options, bool stage2) {
  ProtocolConfig config;
  config.stage1 = Stage1::Cfp;
  config.cfp_all_neighbors = options.all_neighbors;
  config.run_stage2 = stage2;
  return config;
}

}  // namespace

ProtocolRun cfp_stage1(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                       std::uint64_t seed, const CfpOptions& options) {
  return run_megcom(net, paths, group, seed, cfp_config(options, false), options.kernel);
}

ProtocolRun run_cfp(const Network& net, const ShortestPaths& paths, const GroupSpec& group,
                    std::uint64_t seed, const CfpOptions& options) {
  return run_megcom(net, paths, group, seed, cfp_config(options, true), options.kernel);
}

bool independent(const Network& net, const std::set<NodeId>& nodes) {
  for (NodeId v : nodes) {
    for (const auto& nb : net.neighbors(v)) {
      if (nodes.count(nb.id)) return false;
    }
  }
  return true;
}

}  // namespace megcom
