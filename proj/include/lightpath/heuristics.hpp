#pragma once

#include <optional>
#include <string_view>

#include "lightpath/environment.hpp"

namespace lightpath {

enum class HeuristicKind { kKspFf, kFfKsp };

std::string_view ToString(HeuristicKind kind);
HeuristicKind ParseHeuristicKind(std::string_view text);

// Path-major first fit: the best-ranked path with any valid channel, then its
// lowest valid channel. Reuse cells count as fits. nullopt means block.
std::optional<Action> KspFf(const ActionMask& mask);

// Channel-major first fit: the lowest channel valid on any path, then the
// best-ranked path valid on it.
std::optional<Action> FfKsp(const ActionMask& mask);

std::optional<Action> RunHeuristic(HeuristicKind kind, const ActionMask& mask);

}  // namespace lightpath
