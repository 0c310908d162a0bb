#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lightpath/harness/stats.hpp"

namespace lightpath::harness {

// Static SVG charts.

void WriteBoxplotSvg(const std::filesystem::path& path, const std::vector<std::pair<std::string, Summary>>& boxes,
                     const std::string& title, const std::string& y_label);

// Per-seed bars sorted from largest to smallest delta.
void WriteWaterfallSvg(const std::filesystem::path& path, std::vector<int> deltas, const std::string& title);

struct CurveSeries {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
};

void WriteCurveSvg(const std::filesystem::path& path, const CurveSeries& curve, std::optional<double> baseline,
                   const std::string& baseline_label, const std::string& title);

}  // namespace lightpath::harness
