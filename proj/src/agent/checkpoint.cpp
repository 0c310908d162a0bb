#include "lightpath/agent/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lightpath::agent {

namespace {

using nlohmann::json;

std::string Hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

json AgentToJson(const AgentConfig& c) {
  return json{{"latent", c.latent},
              {"message_passing_steps", c.message_passing_steps},
              {"mlp_layers", c.mlp_layers},
              {"capacity_features", c.observation.capacity_features},
              {"share_gnn", c.share_gnn}};
}

AgentConfig AgentFromJson(const json& j) {
  AgentConfig c;
  c.latent = j.at("latent").get<int>();
  c.message_passing_steps = j.at("message_passing_steps").get<int>();
  c.mlp_layers = j.at("mlp_layers").get<int>();
  c.observation.capacity_features = j.at("capacity_features").get<bool>();
  c.share_gnn = j.at("share_gnn").get<bool>();
  return c;
}

json PpoToJson(const PpoHyperparams& h) {
  return json{{"gamma", h.gamma},
              {"gae_lambda", h.gae_lambda},
              {"learning_rate", h.learning_rate},
              {"update_epochs", h.update_epochs},
              {"rollout_length", h.rollout_length},
              {"num_envs", h.num_envs},
              {"total_timesteps", h.total_timesteps},
              {"minibatches", h.minibatches},
              {"micro_batch", h.micro_batch},
              {"clip_epsilon", h.clip_epsilon},
              {"value_coef", h.value_coef},
              {"entropy_coef", h.entropy_coef},
              {"max_grad_norm", h.max_grad_norm},
              {"adam_epsilon", h.adam_epsilon},
              {"action_masking", h.action_masking},
              {"lr_schedule", h.lr_schedule == LrScheduleKind::kConstant ? "constant" : "warmup_cosine"},
              {"warmup_steps_fraction", h.warmup_steps_fraction},
              {"warmup_peak_multiplier", h.warmup_peak_multiplier},
              {"warmup_end_fraction", h.warmup_end_fraction}};
}

PpoHyperparams PpoFromJson(const json& j) {
  PpoHyperparams h;
  h.gamma = j.at("gamma").get<double>();
  h.gae_lambda = j.at("gae_lambda").get<double>();
  h.learning_rate = j.at("learning_rate").get<double>();
  h.update_epochs = j.at("update_epochs").get<int>();
  h.rollout_length = j.at("rollout_length").get<int>();
  h.num_envs = j.at("num_envs").get<int>();
  h.total_timesteps = j.at("total_timesteps").get<std::int64_t>();
  h.minibatches = j.at("minibatches").get<int>();
  h.micro_batch = j.at("micro_batch").get<int>();
  h.clip_epsilon = j.at("clip_epsilon").get<double>();
  h.value_coef = j.at("value_coef").get<double>();
  h.entropy_coef = j.at("entropy_coef").get<double>();
  h.max_grad_norm = j.at("max_grad_norm").get<double>();
  h.adam_epsilon = j.at("adam_epsilon").get<double>();
  h.action_masking = j.at("action_masking").get<bool>();
  h.lr_schedule = j.at("lr_schedule").get<std::string>() == "constant" ? LrScheduleKind::kConstant : LrScheduleKind::kWarmupCosine;
  h.warmup_steps_fraction = j.at("warmup_steps_fraction").get<double>();
  h.warmup_peak_multiplier = j.at("warmup_peak_multiplier").get<double>();
  h.warmup_end_fraction = j.at("warmup_end_fraction").get<double>();
  return h;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const ActorCritic& agent, const PathTable& table,
                    const PpoHyperparams& ppo, std::int64_t env_steps) {
  json params = json::array();
  for (const Parameter& p : agent.params()) {
    params.push_back({{"name", p.name},
                      {"rows", p.value.rows()},
                      {"cols", p.value.cols()},
                      {"data", std::vector<double>(p.value.data(), p.value.data() + p.value.size())}});
  }
  const json doc{{"format", "lightpath-checkpoint"},
                 {"version", kCheckpointVersion},
                 {"table_fingerprint", Hex(table.Fingerprint())},
                 {"env_steps", env_steps},
                 {"agent", AgentToJson(agent.config())},
                 {"ppo", PpoToJson(ppo)},
                 {"params", params}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << doc.dump();
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

LoadedAgent LoadCheckpoint(const std::filesystem::path& path, const PathTable& table) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
  LoadedAgent loaded;
  try {
    if (doc.at("format").get<std::string>() != "lightpath-checkpoint") throw CheckpointError("not a checkpoint file");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    loaded.meta.table_fingerprint = std::stoull(doc.at("table_fingerprint").get<std::string>(), nullptr, 16);
    if (loaded.meta.table_fingerprint != table.Fingerprint()) {
      throw CheckpointError("checkpoint was trained on a different path table (hash " + Hex(loaded.meta.table_fingerprint) +
                            ", current " + Hex(table.Fingerprint()) + ")");
    }
    loaded.meta.env_steps = doc.at("env_steps").get<std::int64_t>();
    loaded.meta.agent = AgentFromJson(doc.at("agent"));
    loaded.meta.ppo = PpoFromJson(doc.at("ppo"));
    loaded.agent = std::make_unique<ActorCritic>(table, loaded.meta.agent, 0);
    const json& params = doc.at("params");
    ParameterStore& store = loaded.agent->params();
    if (params.size() != store.size()) throw CheckpointError("parameter count mismatch");
    std::size_t i = 0;
    for (Parameter& p : store) {
      const json& jp = params.at(i++);
      if (jp.at("name").get<std::string>() != p.name || jp.at("rows").get<Eigen::Index>() != p.value.rows() ||
          jp.at("cols").get<Eigen::Index>() != p.value.cols()) {
        throw CheckpointError("parameter layout mismatch at " + p.name);
      }
      const auto data = jp.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != p.value.size()) throw CheckpointError("parameter size mismatch at " + p.name);
      std::copy(data.begin(), data.end(), p.value.data());
    }
    if (!store.AllFinite()) throw CheckpointError("non-finite parameters in checkpoint");
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return loaded;
}

}  // namespace lightpath::agent
