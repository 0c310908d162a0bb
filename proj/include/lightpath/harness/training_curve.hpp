#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "lightpath/agent/ppo.hpp"
#include "lightpath/harness/plot.hpp"

namespace lightpath::harness {

inline constexpr const char* kTrainingLogName = "training_log.csv";

// Appends one row per PPO update to <dir>/training_log.csv.
class TrainingLogWriter {
 public:
  explicit TrainingLogWriter(const std::filesystem::path& dir);
  void Append(const agent::UpdateLog& log);

 private:
  std::ofstream out_;
};

struct CurvePoint {
  std::int64_t update = 0;
  std::int64_t env_steps = 0;
  int episodes = 0;
  double mean_accepted = 0.0;
  double std_accepted = 0.0;
  double mean_reward = 0.0;
};

// Throws std::runtime_error when the log is missing or malformed.
std::vector<CurvePoint> ReadTrainingLog(const std::filesystem::path& dir);

// Updates in which at least one episode finished, as a plottable series.
CurveSeries CurveFromLog(const std::vector<CurvePoint>& points);

// Writes <dir>/curve.csv and <dir>/curve.svg; returns the series.
CurveSeries TrainingCurve(const std::filesystem::path& dir, std::optional<double> baseline, const std::string& baseline_label);

}  // namespace lightpath::harness
