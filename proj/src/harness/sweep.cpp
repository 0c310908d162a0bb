#include "lightpath/harness/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace lightpath::harness {

int DefaultThreads() { return std::max(1u, std::thread::hardware_concurrency()); }

void ParallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EpisodeLength EpisodeLength::Parse(const std::string& text) {
  if (text == "first_blocking" || text == "fb" || text == "FirstBlocking") return EpisodeLength{0};
  std::size_t used = 0;
  const int n = std::stoi(text, &used);
  if (used != text.size() || n < 1) throw std::invalid_argument("bad episode length: " + text);
  return EpisodeLength{n};
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec) {
  if (spec.methods.empty() || spec.k_values.empty() || spec.orderings.empty() || spec.lengths.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("RunSweep: every grid axis needs at least one value");
  }
  std::vector<int> fixed;
  bool first_blocking = false;
  for (const EpisodeLength& l : spec.lengths) {
    if (l.first_blocking()) {
      first_blocking = true;
    } else {
      fixed.push_back(l.requests);
    }
  }

  std::vector<SweepRow> rows;
  for (HeuristicKind method : spec.methods) {
    for (PathOrdering ordering : spec.orderings) {
      for (int k : spec.k_values) {
        const auto table = PathTable::Build(spec.topology, k, ordering, spec.nsr, spec.transmission, spec.request_size_gbps);
        const std::size_t n = spec.seeds.size();
        std::vector<std::vector<EpisodeResult>> prefix(n);
        std::vector<EpisodeResult> fb(n);
        ParallelFor(n, spec.threads, [&](std::size_t i) {
          HeuristicPolicy policy(method);
          if (!fixed.empty()) prefix[i] = RunEpisodePrefixes(policy, table, fixed, spec.seeds[i]);
          if (first_blocking) {
            EpisodeConfig c;
            c.request_count = kFirstBlockingCap;
            c.termination = Termination::kFirstBlocking;
            c.seed = spec.seeds[i];
            fb[i] = RunEpisode(policy, table, c);
          }
        });
        for (const EpisodeLength& l : spec.lengths) {
          for (std::size_t i = 0; i < n; ++i) {
            const EpisodeResult* r = &fb[i];
            if (!l.first_blocking()) {
              const auto at = std::find(fixed.begin(), fixed.end(), l.requests) - fixed.begin();
              r = &prefix[i][static_cast<std::size_t>(at)];
            }
            rows.push_back(SweepRow{std::string(ToString(method)), std::string(ToString(ordering)), k, l.label(),
                                    spec.seeds[i], r->accepted, r->blocked, r->first_block_step});
          }
        }
      }
    }
  }
  return rows;
}

std::vector<std::pair<CellKey, Summary>> SummarizeSweep(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<CellKey, std::vector<double>>> cells;
  for (const SweepRow& r : rows) {
    CellKey key{r.method, r.ordering, r.k, r.episode_length};
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) { return c.first == key; });
    if (it == cells.end()) {
      cells.emplace_back(key, std::vector<double>{});
      it = cells.end() - 1;
    }
    it->second.push_back(r.accepted);
  }
  std::vector<std::pair<CellKey, Summary>> out;
  for (const auto& [key, values] : cells) out.emplace_back(key, Describe(values));
  return out;
}

std::vector<EpisodeResult> EvaluatePolicy(const Policy& policy, std::shared_ptr<const PathTable> table,
                                          const EpisodeConfig& base, const std::vector<std::uint64_t>& seeds, int threads) {
  std::vector<EpisodeResult> out(seeds.size());
  ParallelFor(seeds.size(), threads, [&](std::size_t i) {
    auto p = policy.Clone();
    EpisodeConfig c = base;
    c.seed = seeds[i];
    out[i] = RunEpisode(*p, table, c);
  });
  return out;
}

PairedSummary PairedEval(const Policy& a, const Policy& b, std::shared_ptr<const PathTable> table,
                         const EpisodeConfig& base, const std::vector<std::uint64_t>& seeds, int threads) {
  const auto ra = EvaluatePolicy(a, table, base, seeds, threads);
  const auto rb = EvaluatePolicy(b, table, base, seeds, threads);
  PairedSummary s;
  double sum = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    // First-blocking episodes stop at different steps, so only fixed-length
    // traces are comparable end to end.
    if (base.termination == Termination::kFixedLength && ra[i].request_hash != rb[i].request_hash) {
      throw std::logic_error("paired runs consumed different request sequences for seed " + std::to_string(seeds[i]));
    }
    PairedRow row{seeds[i], ra[i].accepted, rb[i].accepted, ra[i].accepted - rb[i].accepted};
    sum += row.delta;
    if (row.delta > 0) {
      ++s.wins;
    } else if (row.delta < 0) {
      ++s.losses;
    } else {
      ++s.ties;
    }
    s.rows.push_back(row);
  }
  if (!seeds.empty()) s.mean_delta = sum / static_cast<double>(seeds.size());
  s.mean_throughput_gain_gbps = s.mean_delta * table->request_size_gbps();
  return s;
}

}  // namespace lightpath::harness
