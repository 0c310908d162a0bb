#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lightpath/harness/sweep.hpp"

namespace lightpath::harness {

// Parses one comma-separated line. Fields never contain commas or quotes.
std::vector<std::string> SplitCsvLine(const std::string& line);

void WriteSweepCsv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> ReadSweepCsv(const std::filesystem::path& path);

// Per-cell summary table; records the quartile method in a leading comment.
void WriteSweepSummaryCsv(const std::filesystem::path& path, const std::vector<std::pair<CellKey, Summary>>& cells);

void WritePairedCsv(const std::filesystem::path& path, const std::vector<PairedRow>& rows);
std::vector<PairedRow> ReadPairedCsv(const std::filesystem::path& path);

}  // namespace lightpath::harness
