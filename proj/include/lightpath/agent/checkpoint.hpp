#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>

#include "lightpath/agent/policy.hpp"
#include "lightpath/agent/ppo.hpp"

namespace lightpath::agent {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The checkpoint is bound to the path table it was trained on: loading
// against a table with a different fingerprint throws CheckpointError.
struct Checkpoint {
  AgentConfig agent;
  PpoHyperparams ppo;
  std::uint64_t table_fingerprint = 0;
  std::int64_t env_steps = 0;
};

void SaveCheckpoint(const std::filesystem::path& path, const ActorCritic& agent, const PathTable& table,
                    const PpoHyperparams& ppo, std::int64_t env_steps);

struct LoadedAgent {
  Checkpoint meta;
  std::unique_ptr<ActorCritic> agent;
};

LoadedAgent LoadCheckpoint(const std::filesystem::path& path, const PathTable& table);

}  // namespace lightpath::agent
