#include "lightpath/heuristics.hpp"

#include <string>

namespace lightpath {

std::string_view ToString(HeuristicKind kind) { return kind == HeuristicKind::kKspFf ? "ksp_ff" : "ff_ksp"; }

HeuristicKind ParseHeuristicKind(std::string_view text) {
  if (text == "ksp_ff") return HeuristicKind::kKspFf;
  if (text == "ff_ksp") return HeuristicKind::kFfKsp;
  throw ParseError("unknown heuristic '" + std::string(text) + "' (expected ksp_ff|ff_ksp)");
}

std::optional<Action> KspFf(const ActionMask& mask) {
  for (int k = 0; k < mask.k(); ++k) {
    const auto s = mask.row(k).find_first();
    if (s != boost::dynamic_bitset<>::npos) return Action{k, static_cast<int>(s)};
  }
  return std::nullopt;
}

std::optional<Action> FfKsp(const ActionMask& mask) {
  std::optional<Action> best;
  for (int k = 0; k < mask.k(); ++k) {
    const auto s = mask.row(k).find_first();
    if (s == boost::dynamic_bitset<>::npos) continue;
    // Strict comparison keeps the lowest rank on channel ties.
    if (!best || static_cast<int>(s) < best->channel) best = Action{k, static_cast<int>(s)};
  }
  return best;
}

std::optional<Action> RunHeuristic(HeuristicKind kind, const ActionMask& mask) {
  return kind == HeuristicKind::kKspFf ? KspFf(mask) : FfKsp(mask);
}

}  // namespace lightpath
