#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "lightpath/harness/episode.hpp"
#include "lightpath/physical_layer.hpp"

namespace lightpath::harness {

// Directory holding the bundled topologies and NSR files. LIGHTPATH_DATA_DIR
// in the environment overrides the build-time location.
std::filesystem::path DataDir();

// Accepts a JSON path or a bundled topology name ("nsfnet_deeprmsa",
// "nsfnet_deeprmsa_undirected", "ring5").
std::filesystem::path ResolveTopology(const std::string& name_or_path);
// An explicit NSR file wins; otherwise <topology>_nsr.json next to the
// topology, then the bundled closed-form GN defaults.
std::filesystem::path ResolveNsr(const std::filesystem::path& topology_file, const std::string& explicit_nsr);

struct LabConfig {
  std::string topology = "nsfnet_deeprmsa";
  std::string nsr;
  int k = 5;
  PathOrdering ordering = PathOrdering::kHops;
  int channels = 100;
  double request_size_gbps = 100.0;
};

struct Lab {
  std::shared_ptr<const Topology> topology;
  NsrModel nsr = NsrModel::ClosedForm(ClosedFormGnParams{});
  TransmissionConfig transmission;
  std::shared_ptr<const PathTable> table;
};

Lab BuildLab(const LabConfig& config);

// "ksp_ff", "ff_ksp", "random", or a checkpoint file (optionally prefixed
// "ckpt:"); "@sample" appended to a checkpoint samples instead of argmax.
std::unique_ptr<Policy> MakePolicy(const std::string& spec, const PathTable& table);

}  // namespace lightpath::harness
