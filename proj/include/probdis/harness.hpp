#pragma once

#include "probdis/environments.hpp"
#include "probdis/rng.hpp"
#include "probdis/scenario_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace probdis {

struct ExperimentConfig {
  EnvMode mode = EnvMode::planar2d;
  std::vector<int> counts = {1, 10, 30, 50};
  int trials = 100;
  std::vector<Method> methods = {Method::probabilistic(), Method::hard(0.01), Method::hard(0.02),
                                 Method::epsilon(0.2), Method::epsilon(0.4)};
  int budget = kDefaultBudget;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: one per hardware thread
  int resamples = 1000;
  double level = 0.95;
  DisentangleOptions options;
  std::optional<JointConfig> start;  // overrides the mode's default start
  std::optional<JointConfig> goal;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (budget < 1) throw std::invalid_argument("budget must be at least 1");
    if (counts.empty()) throw std::invalid_argument("need at least one obstacle count");
    if (methods.empty()) throw std::invalid_argument("need at least one method");
    for (int c : counts) {
      if (c < 0) throw std::invalid_argument("obstacle counts must be non-negative");
    }
    if (resamples < 1) throw std::invalid_argument("resamples must be at least 1");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");
    options.planner.validate();
    options.epsilon.validate();
  }
};

/// One row of the raw trial log.
struct TrialRecord {
  EnvMode mode = EnvMode::planar2d;
  int count = 0;
  std::string method;
  int trial = 0;
  std::uint64_t scenario_seed = 0;
  std::uint64_t run_seed = 0;
  int redraws = 0;  // infeasible scenario draws skipped before this one
  bool success = false;
  int paths_executed = 0;
  int collisions = 0;
  double plan_seconds = 0.0;
  double wall_seconds = 0.0;
};

/// Success within b executed paths for one (mode, count, method) cell.
/// An empty `count` marks the row pooled over every count.
struct ResultRow {
  EnvMode mode = EnvMode::planar2d;
  std::optional<int> count;
  std::string method;
  int b = 1;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> mean_paths_success;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;  // ordered by (count, method, trial)
  std::vector<ResultRow> rows;
};

// ---------------------------------------------------------------------------
// Seeds

/// Scenario seed for (count, trial). Every method sees the same world, so
/// comparisons between methods are paired.
inline std::uint64_t scenario_seed(std::uint64_t base, int count, int trial, int attempt) {
  return mix_seed({base, 0x73636e72ull, static_cast<std::uint64_t>(count), static_cast<std::uint64_t>(trial),
                   static_cast<std::uint64_t>(attempt)});
}

/// Child seed for (count, method, trial).
inline std::uint64_t run_seed(std::uint64_t base, int count, const Method& method, int trial) {
  return mix_seed({base, static_cast<std::uint64_t>(count), stable_hash(method.label()),
                   static_cast<std::uint64_t>(trial)});
}

// ---------------------------------------------------------------------------
// Statistics

/// Linear-interpolation quantile of sorted values, q in [0, 1].
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Percentile bootstrap interval for the mean of 0/1 outcomes.
inline std::pair<double, double> bootstrap_ci(const std::vector<int>& outcomes, int resamples = 1000,
                                              double level = 0.95, std::uint64_t seed = 0) {
  if (outcomes.empty()) throw std::invalid_argument("bootstrap needs at least one outcome");
  if (resamples < 1) throw std::invalid_argument("resamples must be at least 1");
  Rng rng(seed);
  const std::size_t n = outcomes.size();
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    long sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += outcomes[rng.below(n)];
    means.push_back(static_cast<double>(sum) / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  return {sorted_quantile(means, tail), sorted_quantile(means, 1.0 - tail)};
}

namespace detail {

inline ResultRow make_row(EnvMode mode, std::optional<int> count, const std::string& method, int b,
                          const std::vector<const TrialRecord*>& recs, const ExperimentConfig& cfg) {
  ResultRow row;
  row.mode = mode;
  row.count = count;
  row.method = method;
  row.b = b;
  row.trials = static_cast<int>(recs.size());
  std::vector<int> outcomes;
  long paths = 0;
  for (const auto* r : recs) {
    const bool ok = r->success && r->paths_executed <= b;
    outcomes.push_back(ok ? 1 : 0);
    if (ok) {
      ++row.successes;
      paths += r->paths_executed;
    }
  }
  row.rate = static_cast<double>(row.successes) / static_cast<double>(row.trials);
  const std::uint64_t ci_seed = mix_seed({cfg.seed, 0x62737472ull, static_cast<std::uint64_t>(count.value_or(-1)),
                                          stable_hash(method), static_cast<std::uint64_t>(b)});
  auto [lo, hi] = bootstrap_ci(outcomes, cfg.resamples, cfg.level, ci_seed);
  // Interpolated percentiles can land a hair off the sample mean; keep it inside.
  row.ci_lo = std::min(lo, row.rate);
  row.ci_hi = std::max(hi, row.rate);
  if (row.successes > 0) row.mean_paths_success = static_cast<double>(paths) / row.successes;
  return row;
}

}  // namespace detail

/// Success-within-b rows for every count (ascending) and a pooled row per
/// method, in method order, for b = 1..budget.
inline std::vector<ResultRow> aggregate(const std::vector<TrialRecord>& trials, const ExperimentConfig& cfg) {
  std::vector<int> counts = cfg.counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  std::vector<ResultRow> rows;
  auto emit = [&](std::optional<int> count, const std::string& label) {
    std::vector<const TrialRecord*> recs;
    for (const auto& t : trials) {
      if (t.method == label && (!count || t.count == *count)) recs.push_back(&t);
    }
    if (recs.empty()) return;
    for (int b = 1; b <= cfg.budget; ++b) rows.push_back(detail::make_row(cfg.mode, count, label, b, recs, cfg));
  };
  for (int c : counts) {
    for (const auto& m : cfg.methods) emit(c, m.label());
  }
  if (counts.size() > 1) {
    for (const auto& m : cfg.methods) emit(std::nullopt, m.label());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Running

struct RunHooks {
  /// Trials (by count and trial index) whose scenario and traces are dumped.
  std::function<bool(int count, int trial)> dump;
  std::function<void(const Environment&, int count, int trial)> on_scenario;
  std::function<void(const TrialRecord&, const TrialTrace&, const Method&)> on_trace;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

namespace detail {

inline Environment draw_scenario(const ExperimentConfig& cfg, int count, int trial, int* redraws,
                                 std::uint64_t* seed_out) {
  ScenarioSpec spec;
  spec.mode = cfg.mode;
  spec.obstacles = count;
  spec.start = cfg.start;
  spec.goal = cfg.goal;
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s = scenario_seed(cfg.seed, count, trial, attempt);
    try {
      Environment env = generate_scenario(spec, s);
      *redraws = attempt;
      *seed_out = s;
      return env;
    } catch (const InfeasibleScenario&) {
      if (attempt >= 100) throw;
    }
  }
}

}  // namespace detail

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Every (count, method, trial) runs on a worker pool; results land in fixed
/// slots so the output never depends on scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunHooks& hooks = {}) {
  cfg.validate();
  struct World {
    Environment env;
    int redraws = 0;
    std::uint64_t seed = 0;
  };
  std::vector<std::vector<World>> worlds(cfg.counts.size());
  for (std::size_t ci = 0; ci < cfg.counts.size(); ++ci) {
    for (int t = 0; t < cfg.trials; ++t) {
      World w;
      w.env = detail::draw_scenario(cfg, cfg.counts[ci], t, &w.redraws, &w.seed);
      if (hooks.on_scenario && hooks.dump && hooks.dump(cfg.counts[ci], t)) hooks.on_scenario(w.env, cfg.counts[ci], t);
      worlds[ci].push_back(std::move(w));
    }
  }

  const std::size_t per_count = cfg.methods.size() * static_cast<std::size_t>(cfg.trials);
  const std::size_t total = cfg.counts.size() * per_count;
  std::vector<TrialRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex hook_mu;
  std::exception_ptr error;

  auto work = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t ci = job / per_count;
      const std::size_t mi = (job % per_count) / static_cast<std::size_t>(cfg.trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(cfg.trials));
      try {
        const int count = cfg.counts[ci];
        const Method& m = cfg.methods[mi];
        const World& w = worlds[ci][static_cast<std::size_t>(trial)];
        const bool dump = hooks.on_trace && hooks.dump && hooks.dump(count, trial);
        TrialTrace trace;
        const std::uint64_t seed = run_seed(cfg.seed, count, m, trial);
        const TrialResult r = run_disentangle(w.env, m, cfg.budget, seed, cfg.options, dump ? &trace : nullptr);
        TrialRecord& rec = records[job];
        rec.mode = cfg.mode;
        rec.count = count;
        rec.method = m.label();
        rec.trial = trial;
        rec.scenario_seed = w.seed;
        rec.run_seed = seed;
        rec.redraws = w.redraws;
        rec.success = r.success;
        rec.paths_executed = r.paths_executed;
        rec.collisions = r.collisions;
        rec.plan_seconds = r.plan_time;
        rec.wall_seconds = r.wall_time;
        const std::size_t d = done.fetch_add(1) + 1;
        if (dump || hooks.progress) {
          std::lock_guard<std::mutex> lock(hook_mu);
          if (dump) hooks.on_trace(rec, trace, m);
          if (hooks.progress) hooks.progress(d, total);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(hook_mu);
        if (!error) error = std::current_exception();
        next.store(total);
        return;
      }
    }
  };

  const int n_threads = std::min<int>(resolve_threads(cfg.threads), static_cast<int>(total));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  ExperimentResult out;
  out.trials = std::move(records);
  out.rows = aggregate(out.trials, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kResultsHeader = "# probdis results v1";
inline constexpr const char* kTrialsHeader = "# probdis trials v1";
inline constexpr const char* kTimingHeader = "# probdis timing v1";

namespace detail {

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

/// Reads a versioned CSV: checks the version line and column header, returns rows.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in, const char* version,
                                                      const std::string& columns) {
  std::string line;
  if (!std::getline(in, line) || line != version) {
    throw std::runtime_error(std::string("expected header line '") + version + "'");
  }
  if (!std::getline(in, line) || line != columns) throw std::runtime_error("unexpected columns: " + line);
  const std::size_t width = split_csv(columns).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != width) throw std::runtime_error("malformed row: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace detail

inline constexpr const char* kResultsColumns = "mode,count,method,b,trials,successes,rate,ci_lo,ci_hi,mean_paths_success";
inline constexpr const char* kTrialsColumns =
    "mode,count,method,trial,scenario_seed,run_seed,redraws,success,paths_executed,collisions";
inline constexpr const char* kTimingColumns = "mode,count,method,trial,paths_executed,plan_seconds,wall_seconds";

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kResultsHeader << '\n' << kResultsColumns << '\n';
  for (const auto& r : rows) {
    os << to_string(r.mode) << ',' << (r.count ? std::to_string(*r.count) : "all") << ',' << r.method << ','
       << r.b << ',' << r.trials << ',' << r.successes << ',' << detail::fixed(r.rate) << ','
       << detail::fixed(r.ci_lo) << ',' << detail::fixed(r.ci_hi) << ','
       << (r.mean_paths_success ? detail::fixed(*r.mean_paths_success) : "") << '\n';
  }
}

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> out;
  for (const auto& c : detail::read_csv(in, kResultsHeader, kResultsColumns)) {
    ResultRow r;
    r.mode = parse_mode(c[0]);
    if (c[1] != "all") r.count = std::stoi(c[1]);
    r.method = c[2];
    r.b = std::stoi(c[3]);
    r.trials = std::stoi(c[4]);
    r.successes = std::stoi(c[5]);
    r.rate = std::stod(c[6]);
    r.ci_lo = std::stod(c[7]);
    r.ci_hi = std::stod(c[8]);
    if (!c[9].empty()) r.mean_paths_success = std::stod(c[9]);
    out.push_back(r);
  }
  return out;
}

inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << kTrialsHeader << '\n' << kTrialsColumns << '\n';
  for (const auto& t : trials) {
    os << to_string(t.mode) << ',' << t.count << ',' << t.method << ',' << t.trial << ',' << t.scenario_seed << ','
       << t.run_seed << ',' << t.redraws << ',' << (t.success ? 1 : 0) << ',' << t.paths_executed << ','
       << t.collisions << '\n';
  }
}

inline std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<TrialRecord> out;
  for (const auto& c : detail::read_csv(in, kTrialsHeader, kTrialsColumns)) {
    TrialRecord t;
    t.mode = parse_mode(c[0]);
    t.count = std::stoi(c[1]);
    t.method = c[2];
    t.trial = std::stoi(c[3]);
    t.scenario_seed = std::stoull(c[4]);
    t.run_seed = std::stoull(c[5]);
    t.redraws = std::stoi(c[6]);
    t.success = c[7] == "1";
    t.paths_executed = std::stoi(c[8]);
    t.collisions = std::stoi(c[9]);
    out.push_back(t);
  }
  return out;
}

/// Wall-clock figures live apart from results.csv and trials.csv so those
/// two stay byte-identical across reruns.
inline void write_timing_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << kTimingHeader << '\n' << kTimingColumns << '\n';
  for (const auto& t : trials) {
    os << to_string(t.mode) << ',' << t.count << ',' << t.method << ',' << t.trial << ',' << t.paths_executed << ','
       << detail::fixed(t.plan_seconds, 6) << ',' << detail::fixed(t.wall_seconds, 6) << '\n';
  }
}

/// Mean planning seconds per executed path, keyed by (count, method).
inline std::map<std::pair<int, std::string>, double> read_timing_csv(std::istream& in) {
  std::map<std::pair<int, std::string>, std::pair<double, long>> acc;
  for (const auto& c : detail::read_csv(in, kTimingHeader, kTimingColumns)) {
    auto& a = acc[{std::stoi(c[1]), c[2]}];
    a.first += std::stod(c[5]);
    a.second += std::stol(c[4]);
  }
  std::map<std::pair<int, std::string>, double> out;
  for (const auto& [k, v] : acc) out[k] = v.second > 0 ? v.first / static_cast<double>(v.second) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Report

namespace detail {

inline std::string method_family(const std::string& label) { return label.substr(0, label.find(':')); }

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Text tables of success at the largest b per mode, then the spread of each
/// method family across its sweep values per count. Rates are printed with
/// the same digits as results.csv.
inline std::string summarize(const std::vector<ResultRow>& rows,
                             const std::map<std::pair<int, std::string>, double>* plan_seconds = nullptr) {
  if (rows.empty()) throw std::invalid_argument("empty results table");
  std::ostringstream os;
  std::vector<EnvMode> modes;
  for (const auto& r : rows) {
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
  }
  for (EnvMode mode : modes) {
    int b = 0;
    std::vector<std::string> methods;
    std::set<int> counts;
    bool pooled = false;
    for (const auto& r : rows) {
      if (r.mode != mode) continue;
      b = std::max(b, r.b);
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
      if (r.count) {
        counts.insert(*r.count);
      } else {
        pooled = true;
      }
    }
    auto find = [&](const std::string& m, std::optional<int> c) -> const ResultRow* {
      for (const auto& r : rows) {
        if (r.mode == mode && r.method == m && r.count == c && r.b == b) return &r;
      }
      return nullptr;
    };
    os << "mode " << to_string(mode) << ": success rate within " << b << " paths [95% CI]\n";
    constexpr std::size_t w0 = 12;
    constexpr std::size_t w = 26;
    os << detail::pad("method", w0);
    for (int c : counts) os << detail::pad(std::to_string(c) + " obstacles", w);
    if (pooled) os << "all";
    os << '\n';
    auto cell = [](const ResultRow* r) {
      if (!r) return std::string("-");
      return detail::fixed(r->rate) + " [" + detail::fixed(r->ci_lo) + ", " + detail::fixed(r->ci_hi) + "]";
    };
    for (const auto& m : methods) {
      os << detail::pad(m, w0);
      for (int c : counts) os << detail::pad(cell(find(m, c)), w);
      if (pooled) os << cell(find(m, std::nullopt));
      os << '\n';
    }

    if (plan_seconds) {
      os << "\nmean planning seconds per path\n" << detail::pad("method", w0);
      for (int c : counts) os << detail::pad(std::to_string(c) + " obstacles", w);
      os << '\n';
      for (const auto& m : methods) {
        os << detail::pad(m, w0);
        for (int c : counts) {
          const auto it = plan_seconds->find({c, m});
          os << detail::pad(it == plan_seconds->end() ? "-" : detail::fixed(it->second), w);
        }
        os << '\n';
      }
    }

    std::vector<std::string> families;
    for (const auto& m : methods) {
      const std::string f = detail::method_family(m);
      if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
    }
    bool header = false;
    for (const auto& f : families) {
      std::vector<std::string> members;
      for (const auto& m : methods) {
        if (detail::method_family(m) == f) members.push_back(m);
      }
      if (members.size() < 2) continue;
      if (!header) {
        os << "\nsensitivity: spread (max - min) of success rate across sweep values\n";
        header = true;
      }
      os << detail::pad(f, w0);
      for (int c : counts) {
        double lo = 1.0;
        double hi = 0.0;
        std::string best;
        for (const auto& m : members) {
          if (const auto* r = find(m, c)) {
            lo = std::min(lo, r->rate);
            if (r->rate > hi || best.empty()) {
              hi = std::max(hi, r->rate);
              best = m;
            }
          }
        }
        os << detail::pad(detail::fixed(std::max(0.0, hi - lo)) + " (best " + best + ")", w);
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Output bundle

inline std::string file_label(const std::string& method) {
  std::string s = method;
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

/// Runs an experiment and writes results.csv, trials.csv, timing.csv,
/// config.json plus scenario, trace and map dumps for the first
/// `dump_trials` trials of every count.
inline ExperimentResult run_to_directory(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                         int dump_trials = 1,
                                         std::function<void(std::size_t, std::size_t)> progress = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "scenarios");
  fs::create_directories(dir / "traces");
  fs::create_directories(dir / "maps");
  const int dim = cfg.mode == EnvMode::planar2d ? 2 : 3;
  RunHooks hooks;
  hooks.dump = [dump_trials](int, int trial) { return trial < dump_trials; };
  hooks.on_scenario = [&](const Environment& env, int count, int trial) {
    write_scenario((dir / "scenarios" / ("c" + std::to_string(count) + "_t" + std::to_string(trial) + ".json")).string(),
                   env);
  };
  hooks.on_trace = [&](const TrialRecord& rec, const TrialTrace& trace, const Method& m) {
    const std::string stem = "c" + std::to_string(rec.count) + "_t" + std::to_string(rec.trial) + "_" + file_label(m.label());
    TrialResult res;
    res.seed = rec.run_seed;
    res.success = rec.success;
    res.paths_executed = rec.paths_executed;
    write_json_file((dir / "traces" / (stem + ".json")).string(), trace_to_json(trace, m, res, dim));
    std::ofstream mo(dir / "maps" / (stem + ".map"));
    write_failure_map(mo, trace.map, dim);
  };
  hooks.progress = std::move(progress);
  ExperimentResult res = run_experiment(cfg, hooks);

  {
    std::ofstream o(dir / "results.csv");
    write_results_csv(o, res.rows);
  }
  {
    std::ofstream o(dir / "trials.csv");
    write_trials_csv(o, res.trials);
  }
  {
    std::ofstream o(dir / "timing.csv");
    write_timing_csv(o, res.trials);
  }
  json jc;
  jc["mode"] = to_string(cfg.mode);
  jc["counts"] = cfg.counts;
  jc["trials"] = cfg.trials;
  json ms = json::array();
  for (const auto& m : cfg.methods) ms.push_back(m.label());
  jc["methods"] = ms;
  jc["budget"] = cfg.budget;
  jc["seed"] = cfg.seed;
  jc["resamples"] = cfg.resamples;
  jc["planner"] = {{"k_iter", cfg.options.planner.k_iter}, {"delta", cfg.options.planner.delta},
                   {"p_goal", cfg.options.planner.p_goal}, {"n_rand", cfg.options.planner.n_rand},
                   {"eta", cfg.options.planner.eta},       {"k_rewire", cfg.options.planner.k_rewire}};
  jc["epsilon"] = {{"step", cfg.options.epsilon.step}, {"max_steps", cfg.options.epsilon.max_steps}};
  write_json_file((dir / "config.json").string(), jc);
  return res;
}

}  // namespace probdis
