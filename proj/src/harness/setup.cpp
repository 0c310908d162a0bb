#include "lightpath/harness/setup.hpp"

#include <cstdlib>
#include <stdexcept>

#include "lightpath/agent/checkpoint.hpp"

#ifndef LIGHTPATH_DATA_DIR
#define LIGHTPATH_DATA_DIR "data"
#endif

namespace lightpath::harness {

std::filesystem::path DataDir() {
  const char* env = std::getenv("LIGHTPATH_DATA_DIR");
  if (env != nullptr && *env != '\0') return env;
  return LIGHTPATH_DATA_DIR;
}

std::filesystem::path ResolveTopology(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (direct.extension() == ".json") {
    if (!std::filesystem::exists(direct)) throw std::invalid_argument("topology file not found: " + name_or_path);
    return direct;
  }
  std::string name = name_or_path;
  const std::string suffix = "_undirected";
  if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
    name.resize(name.size() - suffix.size());
  }
  const auto file = DataDir() / (name + ".json");
  if (!std::filesystem::exists(file)) throw std::invalid_argument("unknown topology '" + name_or_path + "'");
  return file;
}

std::filesystem::path ResolveNsr(const std::filesystem::path& topology_file, const std::string& explicit_nsr) {
  if (!explicit_nsr.empty()) {
    const std::filesystem::path direct(explicit_nsr);
    if (std::filesystem::exists(direct)) return direct;
    const auto bundled = DataDir() / (explicit_nsr + ".json");
    if (std::filesystem::exists(bundled)) return bundled;
    throw std::invalid_argument("NSR file not found: " + explicit_nsr);
  }
  auto sibling = topology_file;
  sibling.replace_filename(topology_file.stem().string() + "_nsr.json");
  if (std::filesystem::exists(sibling)) return sibling;
  return DataDir() / "gn_default.json";
}

Lab BuildLab(const LabConfig& config) {
  const auto topo_file = ResolveTopology(config.topology);
  Lab lab;
  lab.topology = std::make_shared<const Topology>(LoadTopology(topo_file));
  lab.nsr = LoadNsrModel(ResolveNsr(topo_file, config.nsr), *lab.topology);
  lab.transmission = TransmissionConfig::ForChannels(config.channels, lab.transmission.channel_width_ghz);
  lab.table = PathTable::Build(lab.topology, config.k, config.ordering, lab.nsr, lab.transmission, config.request_size_gbps);
  return lab;
}

std::unique_ptr<Policy> MakePolicy(const std::string& spec, const PathTable& table) {
  if (spec == "ksp_ff" || spec == "ksp-ff") return std::make_unique<HeuristicPolicy>(HeuristicKind::kKspFf);
  if (spec == "ff_ksp" || spec == "ff-ksp") return std::make_unique<HeuristicPolicy>(HeuristicKind::kFfKsp);
  if (spec == "random") return std::make_unique<RandomValidPolicy>();
  std::string path = spec.rfind("ckpt:", 0) == 0 ? spec.substr(5) : spec;
  auto mode = agent::ActorCritic::Mode::kGreedy;
  const std::string sample = "@sample";
  if (path.size() > sample.size() && path.compare(path.size() - sample.size(), sample.size(), sample) == 0) {
    path.resize(path.size() - sample.size());
    mode = agent::ActorCritic::Mode::kSample;
  }
  if (!std::filesystem::exists(path)) throw std::invalid_argument("unknown policy '" + spec + "' (ksp_ff|ff_ksp|random|<checkpoint>)");
  auto loaded = agent::LoadCheckpoint(path, table);
  return std::make_unique<AgentPolicy>(std::shared_ptr<agent::ActorCritic>(std::move(loaded.agent)),
                                       std::filesystem::path(path).stem().string(), mode);
}

}  // namespace lightpath::harness
