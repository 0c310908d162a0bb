#include "lightpath/harness/csv.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lightpath::harness {

namespace {

const char* const kSweepHeader = "method,ordering,k,episode_length,seed,accepted,blocked,first_block_step";
const char* const kPairedHeader = "seed,accepted_a,accepted_b,delta";

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::vector<std::string>> ReadTable(const std::filesystem::path& path, const std::string& header, std::size_t width) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  if (line != header) throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != width) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void WriteSweepCsv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = OpenOut(path);
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.method << ',' << r.ordering << ',' << r.k << ',' << r.episode_length << ',' << r.seed << ',' << r.accepted << ','
        << r.blocked << ',';
    if (r.first_block_step) out << *r.first_block_step;
    out << '\n';
  }
}

std::vector<SweepRow> ReadSweepCsv(const std::filesystem::path& path) {
  std::vector<SweepRow> rows;
  for (const auto& f : ReadTable(path, kSweepHeader, 8)) {
    SweepRow r;
    r.method = f[0];
    r.ordering = f[1];
    r.k = std::stoi(f[2]);
    r.episode_length = f[3];
    r.seed = std::stoull(f[4]);
    r.accepted = std::stoi(f[5]);
    r.blocked = std::stoi(f[6]);
    if (!f[7].empty()) r.first_block_step = std::stoi(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteSweepSummaryCsv(const std::filesystem::path& path, const std::vector<std::pair<CellKey, Summary>>& cells) {
  auto out = OpenOut(path);
  out << "# quartiles: " << kQuartileMethod << " interpolation; std: population; whiskers: 1.5 IQR\n";
  out << "method,ordering,k,episode_length,n,mean,median,std,q1,q3,whisker_low,whisker_high,min,max\n";
  out << std::setprecision(10);
  for (const auto& [key, s] : cells) {
    out << key.method << ',' << key.ordering << ',' << key.k << ',' << key.episode_length << ',' << s.count << ',' << s.mean
        << ',' << s.median << ',' << s.std << ',' << s.q1 << ',' << s.q3 << ',' << s.whisker_low << ',' << s.whisker_high
        << ',' << s.min << ',' << s.max << '\n';
  }
}

void WritePairedCsv(const std::filesystem::path& path, const std::vector<PairedRow>& rows) {
  auto out = OpenOut(path);
  out << kPairedHeader << '\n';
  for (const PairedRow& r : rows) out << r.seed << ',' << r.accepted_a << ',' << r.accepted_b << ',' << r.delta << '\n';
}

std::vector<PairedRow> ReadPairedCsv(const std::filesystem::path& path) {
  std::vector<PairedRow> rows;
  for (const auto& f : ReadTable(path, kPairedHeader, 4)) {
    rows.push_back(PairedRow{std::stoull(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3])});
  }
  return rows;
}

}  // namespace lightpath::harness
