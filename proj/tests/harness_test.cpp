#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "lightpath/harness/csv.hpp"
#include "lightpath/harness/episode.hpp"
#include "lightpath/harness/setup.hpp"
#include "lightpath/harness/stats.hpp"
#include "lightpath/harness/sweep.hpp"
#include "lightpath/harness/training_curve.hpp"
#include "test_util.hpp"

namespace lightpath::harness {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lightpath_harness_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(StatsTest, ConstantSample) {
  const std::vector<double> v{5, 5, 5};
  const Summary s = Describe(v);
  EXPECT_DOUBLE_EQ(s.mean, 5);
  EXPECT_DOUBLE_EQ(s.std, 0);
  EXPECT_DOUBLE_EQ(s.whisker_low, 5);
  EXPECT_DOUBLE_EQ(s.whisker_high, 5);
}

TEST(StatsTest, OneToHundred) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const Summary s = Describe(v);
  EXPECT_DOUBLE_EQ(s.median, 50.5);
  EXPECT_DOUBLE_EQ(s.q1, 25.75);
  EXPECT_DOUBLE_EQ(s.q3, 75.25);
  EXPECT_DOUBLE_EQ(s.mean, 50.5);
  EXPECT_NEAR(s.std, std::sqrt((100.0 * 100.0 - 1) / 12.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.whisker_low, 1);
  EXPECT_DOUBLE_EQ(s.whisker_high, 100);
}

TEST(StatsTest, OutlierOutsideWhiskers) {
  const std::vector<double> v{1, 2, 3, 4, 100};
  const Summary s = Describe(v);
  EXPECT_DOUBLE_EQ(s.q1, 2);
  EXPECT_DOUBLE_EQ(s.q3, 4);
  EXPECT_DOUBLE_EQ(s.whisker_high, 4);
  EXPECT_DOUBLE_EQ(s.max, 100);
}

TEST(StatsTest, SingleValueAndEmpty) {
  const std::vector<double> one{7};
  const Summary s = Describe(one);
  EXPECT_DOUBLE_EQ(s.q1, 7);
  EXPECT_DOUBLE_EQ(s.whisker_high, 7);
  EXPECT_THROW(Describe(std::vector<double>{}), std::invalid_argument);
}

TEST(CsvTest, SweepRoundTrip) {
  const fs::path dir = TempDir("sweep");
  std::vector<SweepRow> rows{{"ksp_ff", "hops", 3, "10000", 4, 9000, 1000, 17},
                             {"ff_ksp", "length", 1, "first_blocking", 5, 120, 1, std::nullopt}};
  WriteSweepCsv(dir / "s.csv", rows);
  EXPECT_EQ(ReadSweepCsv(dir / "s.csv"), rows);
  std::vector<PairedRow> paired{{1, 10, 8, 2}, {2, 5, 7, -2}};
  WritePairedCsv(dir / "p.csv", paired);
  EXPECT_EQ(ReadPairedCsv(dir / "p.csv"), paired);
  EXPECT_EQ(SplitCsvLine("a,,b"), (std::vector<std::string>{"a", "", "b"}));
}

TEST(CsvTest, SummaryRecordsQuartileMethod) {
  const fs::path dir = TempDir("summary");
  const std::vector<SweepRow> rows{{"ksp_ff", "hops", 3, "10", 0, 8, 2, 4}, {"ksp_ff", "hops", 3, "10", 1, 6, 4, 2}};
  const auto cells = SummarizeSweep(rows);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(cells[0].second.mean, 7);
  WriteSweepSummaryCsv(dir / "summary.csv", cells);
  std::ifstream in(dir / "summary.csv");
  std::string first;
  std::getline(in, first);
  EXPECT_NE(first.find(kQuartileMethod), std::string::npos);
}

TEST(EpisodeTest, PairedIdenticalPoliciesGiveZeroDelta) {
  const auto table = testing::MakeTable(testing::House(), 3, 4);
  const HeuristicPolicy p(HeuristicKind::kKspFf);
  const PairedSummary s = PairedEval(p, p, table, EpisodeConfig{300, Termination::kFixedLength, 0}, {1, 2, 3, 4}, 2);
  ASSERT_EQ(s.rows.size(), 4u);
  for (const auto& r : s.rows) EXPECT_EQ(r.delta, 0);
  EXPECT_EQ(s.ties, 4);
  EXPECT_DOUBLE_EQ(s.mean_delta, 0);
}

TEST(EpisodeTest, KEqualsOneMethodsCoincide) {
  const auto table = testing::MakeTable(testing::House(), 1, 4);
  const auto a = EvaluatePolicy(HeuristicPolicy(HeuristicKind::kKspFf), table,
                                EpisodeConfig{400, Termination::kFixedLength, 0}, {7, 8, 9});
  const auto b = EvaluatePolicy(HeuristicPolicy(HeuristicKind::kFfKsp), table,
                                EpisodeConfig{400, Termination::kFixedLength, 0}, {7, 8, 9});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].accepted, b[i].accepted);
    EXPECT_EQ(a[i].request_hash, b[i].request_hash);
  }
}

TEST(EpisodeTest, PrefixesMatchSeparateEpisodes) {
  const auto table = testing::MakeTable(testing::House(), 2, 3);
  HeuristicPolicy p(HeuristicKind::kKspFf);
  const auto prefixes = RunEpisodePrefixes(p, table, {50, 200}, 12);
  ASSERT_EQ(prefixes.size(), 2u);
  for (const auto& r : prefixes) {
    const auto single = RunEpisode(p, table, EpisodeConfig{r.processed(), Termination::kFixedLength, 12});
    EXPECT_EQ(single.accepted, r.accepted);
    EXPECT_EQ(single.request_hash, r.request_hash);
  }
}

TEST(EpisodeTest, RandomPolicyReplaysPerSeed) {
  const auto table = testing::MakeTable(testing::House(), 2, 3);
  RandomValidPolicy p;
  const EpisodeConfig cfg{300, Termination::kFixedLength, 3};
  std::vector<TraceStep> t1, t2;
  RunEpisode(p, table, cfg, &t1);
  RunEpisode(p, table, cfg, &t2);
  ASSERT_EQ(t1.size(), 300u);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    EXPECT_EQ(t1[i].path, t2[i].path);
    EXPECT_EQ(t1[i].channel, t2[i].channel);
  }
}

TEST(SweepTest, ParallelMatchesSerial) {
  SweepSpec spec;
  spec.topology = testing::House();
  spec.nsr = NsrModel::UniformPerKm(0.002);
  spec.transmission = TransmissionConfig::ForChannels(3);
  spec.methods = {HeuristicKind::kKspFf, HeuristicKind::kFfKsp};
  spec.k_values = {1, 2};
  spec.orderings = {PathOrdering::kHops};
  spec.lengths = {EpisodeLength{0}, EpisodeLength{100}};
  spec.seeds = {0, 1, 2};
  const auto serial = RunSweep(spec);
  spec.threads = 3;
  EXPECT_EQ(RunSweep(spec), serial);
  EXPECT_EQ(serial.size(), 2u * 2 * 2 * 3);
  EXPECT_EQ(EpisodeLength::Parse("first_blocking").requests, 0);
  EXPECT_EQ(EpisodeLength::Parse("15000").requests, 15000);
}

TEST(TrainingLogTest, MissingAndCorruptLogsThrow) {
  const fs::path dir = TempDir("log");
  EXPECT_THROW(ReadTrainingLog(dir), std::runtime_error);
  {
    std::ofstream out(dir / kTrainingLogName);
    out << "update,env_steps\n1,abc\n";
  }
  EXPECT_THROW(ReadTrainingLog(dir), std::runtime_error);
}

TEST(TrainingLogTest, RoundTrip) {
  const fs::path dir = TempDir("log_ok");
  {
    TrainingLogWriter w(dir);
    agent::UpdateLog log;
    log.update = 1;
    log.env_steps = 500;
    log.episode_accepted = {40, 44};
    log.mean_accepted = 42;
    log.std_accepted = 2;
    w.Append(log);
    log.update = 2;
    log.episode_accepted.clear();
    w.Append(log);
  }
  const auto points = ReadTrainingLog(dir);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].episodes, 2);
  const CurveSeries c = CurveFromLog(points);
  ASSERT_EQ(c.x.size(), 1u);
  EXPECT_DOUBLE_EQ(c.mean[0], 42);
}

TEST(SetupTest, SeedBaseFromEnvironment) {
  ::setenv("LIGHTPATH_LAB_SEED_BASE", "1000", 1);
  EXPECT_EQ(CampaignSeeds(3), (std::vector<std::uint64_t>{1000, 1001, 1002}));
  ::unsetenv("LIGHTPATH_LAB_SEED_BASE");
  EXPECT_EQ(SeedBase(), 0u);
}

TEST(SetupTest, ResolvesBundledFiles) {
  EXPECT_TRUE(fs::exists(ResolveTopology("nsfnet_deeprmsa_undirected")));
  const fs::path ring = ResolveTopology("ring5");
  EXPECT_EQ(ResolveNsr(ring, "").filename(), "ring5_nsr.json");
  EXPECT_EQ(ResolveNsr(ResolveTopology("nsfnet_deeprmsa"), "").filename(), "gn_default.json");
  EXPECT_THROW(MakePolicy("nonexistent.json", *BuildLab({"ring5", "", 2}).table), std::exception);
}

}  // namespace
}  // namespace lightpath::harness
