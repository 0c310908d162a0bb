// lightpath-lab: command-line front end for the RWA-LR simulator, heuristic
// benchmarks and PPO training.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lightpath/agent/checkpoint.hpp"
#include "lightpath/agent/ppo.hpp"
#include "lightpath/harness/csv.hpp"
#include "lightpath/harness/plot.hpp"
#include "lightpath/harness/setup.hpp"
#include "lightpath/harness/sweep.hpp"
#include "lightpath/harness/training_curve.hpp"

namespace fs = std::filesystem;
using namespace lightpath;
using namespace lightpath::harness;

namespace {

struct LabFlags {
  std::string topology = "nsfnet_deeprmsa";
  std::string nsr;
  int k = 5;
  std::string ordering = "hops";
  int channels = 100;
  double values_bw = 100.0;

  void Register(CLI::App* app, bool with_k = true) {
    app->add_option("--topology,--topology_name", topology, "Topology name or JSON file")->capture_default_str();
    app->add_option("--nsr", nsr, "NSR model JSON (default: <topology>_nsr.json or closed-form GN)");
    if (with_k) app->add_option("--k", k, "Candidate paths per node pair")->capture_default_str();
    if (with_k) app->add_option("--ordering", ordering, "Path ordering: hops|length")->capture_default_str();
    app->add_option("--channels,--link_resources", channels, "WDM channels per link")->capture_default_str();
    app->add_option("--request-size,--values_bw", values_bw, "Service size in Gbps")->capture_default_str();
  }

  LabConfig Config() const {
    LabConfig c;
    c.topology = topology;
    c.nsr = nsr;
    c.k = k;
    c.ordering = ParsePathOrdering(ordering);
    c.channels = channels;
    c.request_size_gbps = values_bw;
    return c;
  }
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

EpisodeConfig EpisodeFromLength(const std::string& length) {
  const EpisodeLength l = EpisodeLength::Parse(length);
  EpisodeConfig c;
  if (l.first_blocking()) {
    c.request_count = kFirstBlockingCap;
    c.termination = Termination::kFirstBlocking;
  } else {
    c.request_count = l.requests;
  }
  return c;
}

void PrintSummary(const std::string& label, const Summary& s) {
  std::cout << std::fixed << std::setprecision(1) << label << ": mean " << s.mean << "  median " << s.median << "  std "
            << s.std << "  min " << s.min << "  max " << s.max << "  (n=" << s.count << ")\n";
}

int RunPaths(const LabFlags& flags, const std::string& src, const std::string& dst, bool fingerprint) {
  const Lab lab = BuildLab(flags.Config());
  const Topology& topo = *lab.topology;
  if (fingerprint) {
    std::cout << std::hex << lab.table->Fingerprint() << std::dec << '\n';
    return 0;
  }
  std::cout << "pair,rank,hops,length_km,capacity_gbps,max_services,nodes\n";
  for (PairIndex p = 0; p < lab.table->pair_count(); ++p) {
    const auto [a, b] = topo.pair_nodes(p);
    if (!src.empty() && !dst.empty()) {
      const auto s = topo.find(src);
      const auto d = topo.find(dst);
      if (!s || !d) throw std::invalid_argument("unknown node name");
      if (!((a == *s && b == *d) || (a == *d && b == *s))) continue;
    }
    const auto paths = lab.table->paths(p);
    for (std::size_t r = 0; r < paths.size(); ++r) {
      const CandidatePath& path = paths[r];
      std::cout << topo.name(a) << '-' << topo.name(b) << ',' << r << ',' << path.hops() << ',' << path.length_km << ','
                << std::setprecision(6) << path.capacity_gbps << ',' << path.max_services << ',';
      for (std::size_t i = 0; i < path.nodes.size(); ++i) std::cout << (i ? "-" : "") << topo.name(path.nodes[i]);
      std::cout << '\n';
    }
  }
  return 0;
}

int RunEval(const LabFlags& flags, const std::string& policy_spec, int seeds, const std::string& length, int threads,
            const std::string& out, const std::string& trace) {
  const Lab lab = BuildLab(flags.Config());
  const auto policy = MakePolicy(policy_spec, *lab.table);
  const EpisodeConfig base = EpisodeFromLength(length);
  const auto seed_list = CampaignSeeds(seeds);
  const auto results = EvaluatePolicy(*policy, lab.table, base, seed_list, threads);
  std::vector<double> accepted;
  for (const auto& r : results) accepted.push_back(r.accepted);
  PrintSummary(policy->id() + " accepted", Describe(accepted));
  if (!out.empty()) {
    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot write " + out);
    csv << "seed,policy,accepted,blocked,first_block_step,throughput_gbps\n";
    for (const auto& r : results) {
      csv << r.seed << ',' << r.policy << ',' << r.accepted << ',' << r.blocked << ',';
      if (r.first_block_step) csv << *r.first_block_step;
      csv << ',' << r.throughput_gbps << '\n';
    }
  }
  if (!trace.empty()) {
    std::vector<TraceStep> steps;
    EpisodeConfig c = base;
    c.seed = seed_list.front();
    auto p = policy->Clone();
    RunEpisode(*p, lab.table, c, &steps);
    WriteTraceCsv(trace, steps);
  }
  return 0;
}

int RunBench(const LabFlags& flags, const std::string& methods, const std::string& k_values, const std::string& orderings,
             const std::string& lengths, int seeds, int threads, const std::string& out_dir) {
  LabConfig cfg = flags.Config();
  const Lab lab = BuildLab(cfg);
  SweepSpec spec;
  spec.topology = lab.topology;
  spec.nsr = lab.nsr;
  spec.transmission = lab.transmission;
  spec.request_size_gbps = cfg.request_size_gbps;
  for (const auto& m : SplitList(methods)) spec.methods.push_back(ParseHeuristicKind(m == "ksp-ff" ? "ksp_ff" : m == "ff-ksp" ? "ff_ksp" : m));
  for (const auto& k : SplitList(k_values)) spec.k_values.push_back(std::stoi(k));
  for (const auto& o : SplitList(orderings)) spec.orderings.push_back(ParsePathOrdering(o));
  for (const auto& l : SplitList(lengths)) spec.lengths.push_back(EpisodeLength::Parse(l));
  spec.seeds = CampaignSeeds(seeds);
  spec.threads = threads;

  const auto rows = RunSweep(spec);
  const auto cells = SummarizeSweep(rows);
  fs::create_directories(out_dir);
  WriteSweepCsv(fs::path(out_dir) / "sweep.csv", rows);
  WriteSweepSummaryCsv(fs::path(out_dir) / "summary.csv", cells);

  std::cout << "method,ordering,k";
  for (const auto& l : spec.lengths) std::cout << ',' << l.label();
  std::cout << '\n';
  std::map<std::tuple<std::string, std::string, int>, std::map<std::string, double>> pivot;
  for (const auto& [key, s] : cells) pivot[{key.method, key.ordering, key.k}][key.episode_length] = s.mean;
  for (const auto& [key, by_length] : pivot) {
    std::cout << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key);
    for (const auto& l : spec.lengths) std::cout << ',' << std::fixed << std::setprecision(1) << by_length.at(l.label());
    std::cout << '\n';
  }
  for (const auto& l : spec.lengths) {
    std::vector<std::pair<std::string, Summary>> boxes;
    for (const auto& [key, s] : cells) {
      if (key.episode_length == l.label()) boxes.emplace_back(key.method + " " + key.ordering + " K=" + std::to_string(key.k), s);
    }
    WriteBoxplotSvg(fs::path(out_dir) / ("boxplot_" + l.label() + ".svg"), boxes, "Accepted services, " + l.label(),
                    "accepted services");
  }
  std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << '\n';
  return 0;
}

int RunPair(const LabFlags& flags, const std::string& a, const std::string& b, int seeds, const std::string& length,
            int threads, const std::string& out_dir) {
  const Lab lab = BuildLab(flags.Config());
  const auto pa = MakePolicy(a, *lab.table);
  const auto pb = MakePolicy(b, *lab.table);
  const auto summary = PairedEval(*pa, *pb, lab.table, EpisodeFromLength(length), CampaignSeeds(seeds), threads);
  fs::create_directories(out_dir);
  WritePairedCsv(fs::path(out_dir) / "paired.csv", summary.rows);
  std::vector<int> deltas;
  for (const auto& r : summary.rows) deltas.push_back(r.delta);
  WriteWaterfallSvg(fs::path(out_dir) / "waterfall.svg", deltas, pa->id() + " vs " + pb->id());
  std::cout << std::fixed << std::setprecision(2) << pa->id() << " vs " << pb->id() << ": mean delta " << summary.mean_delta
            << " services (" << summary.mean_throughput_gain_gbps / 1000.0 << " Tbps), wins " << summary.wins << '/'
            << summary.rows.size() << ", losses " << summary.losses << ", ties " << summary.ties << '\n';
  return 0;
}

nlohmann::json ReadRunConfig(const fs::path& dir) {
  std::ifstream in(dir / "run.json");
  if (!in) throw std::runtime_error("missing " + (dir / "run.json").string());
  return nlohmann::json::parse(in);
}

LabFlags FlagsFromRun(const nlohmann::json& run) {
  LabFlags f;
  f.topology = run.at("topology").get<std::string>();
  f.nsr = run.at("nsr").get<std::string>();
  f.k = run.at("k").get<int>();
  f.ordering = run.at("ordering").get<std::string>();
  f.channels = run.at("channels").get<int>();
  f.values_bw = run.at("values_bw").get<double>();
  return f;
}

double BaselineMean(const LabFlags& flags, const std::string& policy, int episode_length, int seeds, int threads) {
  const Lab lab = BuildLab(flags.Config());
  EpisodeConfig c;
  c.request_count = episode_length;
  const auto results = EvaluatePolicy(*MakePolicy(policy, *lab.table), lab.table, c, CampaignSeeds(seeds), threads);
  double sum = 0.0;
  for (const auto& r : results) sum += r.accepted;
  return sum / static_cast<double>(results.size());
}

int RunCurve(const std::string& run_dir, const std::string& baseline_policy, int baseline_seeds, int threads) {
  std::optional<double> baseline;
  std::string label;
  if (!baseline_policy.empty() && baseline_policy != "none") {
    const auto run = ReadRunConfig(run_dir);
    baseline = BaselineMean(FlagsFromRun(run), baseline_policy, run.at("training_episode_length").get<int>(), baseline_seeds,
                            threads);
    label = baseline_policy + " mean";
  }
  const auto series = TrainingCurve(run_dir, baseline, label);
  std::cout << "curve points: " << series.x.size() << ", final mean accepted " << series.mean.back();
  if (baseline) std::cout << ", " << label << ' ' << *baseline;
  std::cout << "\nwrote " << (fs::path(run_dir) / "curve.svg").string() << '\n';
  return 0;
}

struct TrainFlags {
  std::string env_type = "rwa_lightpath_reuse";
  bool incremental_loading = true;
  int max_requests = 10000;
  double scale_factor = 0.2;
  agent::PpoHyperparams ppo;
  std::string lr_schedule = "warmup_cosine";
  bool use_gnn = true;
  agent::AgentConfig net;
  bool no_capacity_features = false;
  std::uint64_t seed = 0;
  std::string out = "runs/train";
  std::int64_t max_updates = 0;
  int checkpoint_every = 0;
  int eval_seeds = 0;
  int threads = DefaultThreads();
};

int RunTrain(const LabFlags& flags, TrainFlags tf) {
  if (tf.env_type != "rwa_lightpath_reuse") throw std::invalid_argument("only --env_type rwa_lightpath_reuse is supported");
  if (!tf.incremental_loading) throw std::invalid_argument("only incremental loading is supported");
  if (!tf.use_gnn) throw std::invalid_argument("only the GNN policy is implemented (--USE_GNN)");
  if (tf.lr_schedule == "warmup_cosine") {
    tf.ppo.lr_schedule = agent::LrScheduleKind::kWarmupCosine;
  } else if (tf.lr_schedule == "constant") {
    tf.ppo.lr_schedule = agent::LrScheduleKind::kConstant;
  } else {
    throw std::invalid_argument("--LR_SCHEDULE must be warmup_cosine or constant");
  }
  tf.net.observation.capacity_features = !tf.no_capacity_features;

  const Lab lab = BuildLab(flags.Config());
  agent::TrainingConfig config;
  config.ppo = tf.ppo;
  config.agent = tf.net;
  config.episode_length = ScaledEpisodeLength(tf.max_requests, tf.scale_factor);
  config.seed = tf.seed;
  agent::PpoTrainer trainer(lab.table, config);

  const fs::path out(tf.out);
  fs::create_directories(out);
  {
    nlohmann::json run{{"topology", flags.topology},       {"nsr", flags.nsr},
                       {"k", flags.k},                     {"ordering", flags.ordering},
                       {"channels", flags.channels},       {"values_bw", flags.values_bw},
                       {"max_requests", tf.max_requests},  {"scale_factor", tf.scale_factor},
                       {"training_episode_length", config.episode_length},
                       {"seed", tf.seed},                  {"total_timesteps", tf.ppo.total_timesteps},
                       {"num_updates", tf.ppo.NumUpdates()}};
    std::ofstream(out / "run.json") << run.dump(2) << '\n';
  }
  TrainingLogWriter writer(out);
  std::cout << "training: " << config.episode_length << " requests per episode, " << tf.ppo.NumUpdates() << " updates of "
            << tf.ppo.num_envs * tf.ppo.rollout_length << " steps, " << trainer.agent().params().scalar_count()
            << " parameters\n";
  const auto start = std::chrono::steady_clock::now();
  const std::optional<std::int64_t> limit = tf.max_updates > 0 ? std::optional(tf.max_updates) : std::nullopt;
  trainer.Train(
      [&](const agent::UpdateLog& log) {
        writer.Append(log);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "update " << log.update << " steps " << log.env_steps << std::fixed << std::setprecision(2)
                  << " episodes " << log.episode_accepted.size() << " accepted " << log.mean_accepted << " +- "
                  << log.std_accepted << " reward " << std::setprecision(3) << log.mean_reward << " entropy "
                  << log.diagnostics.loss.entropy << " kl " << std::setprecision(5) << log.diagnostics.loss.approx_kl
                  << " lr " << std::scientific << log.diagnostics.learning_rate << std::fixed << std::setprecision(1)
                  << " [" << secs << "s]\n";
        if (tf.checkpoint_every > 0 && log.update % tf.checkpoint_every == 0) {
          agent::SaveCheckpoint(out / ("checkpoint_" + std::to_string(log.update) + ".json"), trainer.agent(), *lab.table,
                                tf.ppo, log.env_steps);
        }
      },
      limit);
  const fs::path ckpt = out / "checkpoint.json";
  agent::SaveCheckpoint(ckpt, trainer.agent(), *lab.table, tf.ppo, trainer.updates_done() * tf.ppo.num_envs * tf.ppo.rollout_length);
  std::cout << "wrote " << ckpt.string() << '\n';

  if (tf.eval_seeds > 0) {
    EpisodeConfig c;
    c.request_count = tf.max_requests;
    const auto seeds = CampaignSeeds(tf.eval_seeds);
    const auto agent_policy = MakePolicy(ckpt.string(), *lab.table);
    const HeuristicPolicy ksp(HeuristicKind::kKspFf);
    const auto summary = PairedEval(*agent_policy, ksp, lab.table, c, seeds, tf.threads);
    std::cout << std::fixed << std::setprecision(2) << "agent vs ksp_ff over " << tf.eval_seeds << " episodes of "
              << tf.max_requests << ": mean delta " << summary.mean_delta << ", wins " << summary.wins << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lightpath-lab: RWA with lightpath reuse simulator, heuristics and PPO training"};
  app.require_subcommand(1);

  LabFlags paths_flags;
  std::string src;
  std::string dst;
  bool fingerprint = false;
  auto* paths = app.add_subcommand("paths", "List candidate paths with GN capacities");
  paths_flags.Register(paths);
  paths->add_option("--src", src, "Source node name");
  paths->add_option("--dst", dst, "Destination node name");
  paths->add_flag("--fingerprint", fingerprint, "Print the path-table hash only");

  LabFlags eval_flags;
  std::string eval_policy = "ksp_ff";
  int eval_seeds = 100;
  std::string eval_length = "10000";
  int eval_threads = DefaultThreads();
  std::string eval_out;
  std::string eval_trace;
  auto* eval = app.add_subcommand("eval", "Evaluate one policy over seeded episodes");
  eval_flags.Register(eval);
  eval->add_option("--policy", eval_policy, "ksp_ff|ff_ksp|random|<checkpoint.json>[@sample]")->capture_default_str();
  eval->add_option("--seeds", eval_seeds, "Episodes (seeds base..base+n-1)")->capture_default_str();
  eval->add_option("--length,--max_requests", eval_length, "Requests per episode or first_blocking")->capture_default_str();
  eval->add_option("--threads", eval_threads, "Worker threads")->capture_default_str();
  eval->add_option("--out", eval_out, "Per-episode CSV");
  eval->add_option("--trace", eval_trace, "Per-step CSV trace of the first seed");

  LabFlags bench_flags;
  std::string methods = "ksp_ff,ff_ksp";
  std::string k_values = "1,2,3,4,5";
  std::string orderings = "hops";
  std::string lengths = "first_blocking,10000,15000,20000,25000";
  int bench_seeds = 100;
  int bench_threads = DefaultThreads();
  std::string bench_out = "bench";
  auto* bench = app.add_subcommand("bench", "Heuristic sweep over K, ordering and episode length");
  bench_flags.Register(bench, false);
  bench->add_option("--methods", methods, "Comma list of ksp_ff,ff_ksp")->capture_default_str();
  bench->add_option("--k-values", k_values, "Comma list of K")->capture_default_str();
  bench->add_option("--orderings", orderings, "Comma list of hops,length")->capture_default_str();
  bench->add_option("--lengths", lengths, "Comma list of request counts or first_blocking")->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "Episodes per cell")->capture_default_str();
  bench->add_option("--threads", bench_threads, "Worker threads")->capture_default_str();
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();

  LabFlags pair_flags;
  std::string policy_a;
  std::string policy_b = "ksp_ff";
  int pair_seeds = 100;
  std::string pair_length = "10000";
  int pair_threads = DefaultThreads();
  std::string pair_out = "pair";
  auto* pair = app.add_subcommand("pair", "Paired comparison on identical request sequences");
  pair_flags.Register(pair);
  pair->add_option("--a", policy_a, "Policy A")->required();
  pair->add_option("--b", policy_b, "Policy B")->capture_default_str();
  pair->add_option("--seeds", pair_seeds, "Episodes")->capture_default_str();
  pair->add_option("--length,--max_requests", pair_length, "Requests per episode or first_blocking")->capture_default_str();
  pair->add_option("--threads", pair_threads, "Worker threads")->capture_default_str();
  pair->add_option("--out", pair_out, "Output directory")->capture_default_str();

  std::string run_dir;
  std::string baseline_policy = "ksp_ff";
  int baseline_seeds = 20;
  int curve_threads = DefaultThreads();
  auto* curve = app.add_subcommand("curve", "Learning curve from a training run directory");
  curve->add_option("--run", run_dir, "Training output directory")->required();
  curve->add_option("--baseline", baseline_policy, "Heuristic baseline to overlay, or none")->capture_default_str();
  curve->add_option("--baseline-seeds", baseline_seeds, "Episodes for the baseline mean")->capture_default_str();
  curve->add_option("--threads", curve_threads, "Worker threads")->capture_default_str();

  LabFlags train_flags;
  TrainFlags tf;
  auto* train = app.add_subcommand("train", "PPO + GAT training");
  train_flags.Register(train);
  train->add_option("--env_type", tf.env_type)->capture_default_str();
  train->add_flag("--incremental_loading,!--no_incremental_loading", tf.incremental_loading);
  train->add_option("--max_requests", tf.max_requests, "Evaluation episode length")->capture_default_str();
  train->add_option("--scale_factor", tf.scale_factor, "Training episode length / max_requests")->capture_default_str();
  train->add_option("--TOTAL_TIMESTEPS", tf.ppo.total_timesteps)->capture_default_str();
  train->add_option("--UPDATE_EPOCHS", tf.ppo.update_epochs)->capture_default_str();
  train->add_option("--ROLLOUT_LENGTH", tf.ppo.rollout_length)->capture_default_str();
  train->add_option("--NUM_ENVS", tf.ppo.num_envs)->capture_default_str();
  train->add_flag("--ACTION_MASKING,!--NO_ACTION_MASKING", tf.ppo.action_masking);
  train->add_option("--LR_SCHEDULE", tf.lr_schedule, "warmup_cosine|constant")->capture_default_str();
  train->add_option("--WARMUP_STEPS_FRACTION", tf.ppo.warmup_steps_fraction)->capture_default_str();
  train->add_option("--WARMUP_PEAK_MULTIPLIER", tf.ppo.warmup_peak_multiplier)->capture_default_str();
  train->add_option("--WARMUP_END_FRACTION", tf.ppo.warmup_end_fraction)->capture_default_str();
  train->add_flag("--USE_GNN,!--NO_USE_GNN", tf.use_gnn);
  train->add_option("--gnn_latent", tf.net.latent)->capture_default_str();
  train->add_option("--message_passing_steps", tf.net.message_passing_steps)->capture_default_str();
  train->add_option("--gnn_mlp_layers", tf.net.mlp_layers)->capture_default_str();
  train->add_option("--GAMMA", tf.ppo.gamma)->capture_default_str();
  train->add_option("--GAE_LAMBDA", tf.ppo.gae_lambda)->capture_default_str();
  train->add_option("--LR", tf.ppo.learning_rate)->capture_default_str();
  train->add_option("--NUM_MINIBATCHES", tf.ppo.minibatches)->capture_default_str();
  train->add_option("--CLIP_EPS", tf.ppo.clip_epsilon)->capture_default_str();
  train->add_option("--VF_COEF", tf.ppo.value_coef)->capture_default_str();
  train->add_option("--ENT_COEF", tf.ppo.entropy_coef)->capture_default_str();
  train->add_option("--MAX_GRAD_NORM", tf.ppo.max_grad_norm)->capture_default_str();
  train->add_option("--micro_batch", tf.ppo.micro_batch, "Graphs per forward/backward pass")->capture_default_str();
  train->add_flag("--share_gnn", tf.net.share_gnn, "Value head reads the policy GAT");
  train->add_flag("--no_capacity_features", tf.no_capacity_features, "Occupancy-only edge features");
  train->add_option("--seed", tf.seed)->capture_default_str();
  train->add_option("--out", tf.out, "Run directory")->capture_default_str();
  train->add_option("--max_updates", tf.max_updates, "Stop after this many updates (0 = all)")->capture_default_str();
  train->add_option("--checkpoint_every", tf.checkpoint_every, "Updates between checkpoints (0 = final only)");
  train->add_option("--eval_seeds", tf.eval_seeds, "Paired evaluation vs ksp_ff after training")->capture_default_str();
  train->add_option("--threads", tf.threads, "Worker threads for evaluation")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*paths) return RunPaths(paths_flags, src, dst, fingerprint);
    if (*eval) return RunEval(eval_flags, eval_policy, eval_seeds, eval_length, eval_threads, eval_out, eval_trace);
    if (*bench) return RunBench(bench_flags, methods, k_values, orderings, lengths, bench_seeds, bench_threads, bench_out);
    if (*pair) return RunPair(pair_flags, policy_a, policy_b, pair_seeds, pair_length, pair_threads, pair_out);
    if (*curve) return RunCurve(run_dir, baseline_policy, baseline_seeds, curve_threads);
    if (*train) return RunTrain(train_flags, tf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
