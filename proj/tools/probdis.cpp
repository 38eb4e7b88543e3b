// Command-line front end: run experiments, render SVGs, print reports.

#include "probdis/probdis.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace probdis;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<ResultRow> load_results(const fs::path& dir) {
  std::ifstream in(dir / "results.csv");
  if (!in) throw std::runtime_error("no results.csv in " + dir.string());
  return read_results_csv(in);
}

int cmd_run(const std::string& mode, const std::string& obstacles, int trials, const std::string& methods,
            int budget, std::uint64_t seed, const std::string& out, int threads, int dump_trials, bool quiet) {
  ExperimentConfig cfg;
  cfg.mode = parse_mode(mode);
  cfg.counts.clear();
  for (const auto& c : split(obstacles, ',')) cfg.counts.push_back(std::stoi(c));
  cfg.methods.clear();
  for (const auto& m : split(methods, ',')) cfg.methods.push_back(Method::parse(m));
  cfg.trials = trials;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.threads = threads;

  std::size_t last_pct = 101;
  auto progress = [&](std::size_t done, std::size_t total) {
    if (quiet) return;
    const std::size_t pct = 100 * done / total;
    if (pct != last_pct && (pct % 5 == 0 || done == total)) {
      std::cerr << "\r" << done << "/" << total << " trials (" << pct << "%)" << std::flush;
      last_pct = pct;
    }
  };
  const ExperimentResult res = run_to_directory(cfg, out, dump_trials, progress);
  if (!quiet) std::cerr << '\n';
  // Summarize what was written so the numbers match a later `report`.
  std::cout << summarize(load_results(out));
  std::cout << "wrote " << (fs::path(out) / "results.csv").string() << " and " << res.trials.size()
            << " trial rows\n";
  return 0;
}

int cmd_plot(const std::string& in, bool svg, bool episodes) {
  const fs::path dir(in);
  const auto rows = load_results(dir);
  if (!svg) {
    // Text rendition of the success curves, pooled when available.
    const bool pooled = std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.count; });
    for (const auto& r : rows) {
      if (pooled && r.count) continue;
      std::cout << to_string(r.mode) << ' ' << (r.count ? std::to_string(*r.count) : "all") << ' ' << r.method
                << " b=" << r.b << ' ' << r.rate << " [" << r.ci_lo << ", " << r.ci_hi << "]\n";
    }
    return 0;
  }

  const fs::path out = dir / "svg";
  fs::create_directories(out);
  int written = 0;
  std::vector<std::pair<EnvMode, std::optional<int>>> panels;
  for (const auto& r : rows) {
    const std::pair<EnvMode, std::optional<int>> key{r.mode, r.count};
    if (std::find(panels.begin(), panels.end(), key) == panels.end()) panels.push_back(key);
  }
  for (const auto& [mode, count] : panels) {
    const std::string name = "success_" + std::string(to_string(mode)) + "_" + (count ? std::to_string(*count) : "all") + ".svg";
    std::ofstream(out / name) << render_success_svg(rows, mode, count);
    ++written;
  }

  int skipped = 0;
  if (fs::exists(dir / "traces")) {
    std::vector<fs::path> traces;
    for (const auto& e : fs::directory_iterator(dir / "traces")) {
      if (e.path().extension() == ".json") traces.push_back(e.path());
    }
    std::sort(traces.begin(), traces.end());
    for (const auto& tp : traces) {
      const std::string stem = tp.stem().string();
      const auto scen_name = stem.substr(0, stem.find('_', stem.find('_') + 1)) + ".json";
      const fs::path scen = dir / "scenarios" / scen_name;
      const fs::path map_file = dir / "maps" / (stem + ".map");
      if (!fs::exists(scen) || !fs::exists(map_file)) continue;
      const Environment env = read_scenario(scen.string());
      if (env.mode != EnvMode::planar2d) {
        ++skipped;
        continue;
      }
      const json trace = read_json_file(tp.string());
      std::ifstream mf(map_file);
      const FailureMap final_map = read_failure_map(mf);
      const auto paths = trace_paths(trace);
      if (paths.empty()) continue;
      if (episodes) {
        FailureMap m(final_map.c_fail());
        const auto& eps = trace.at("episodes");
        for (std::size_t k = 0; k < paths.size(); ++k) {
          std::ofstream(out / (stem + "_e" + std::to_string(k) + ".svg")) << render_map_svg(m, env, &paths[k]);
          ++written;
          if (eps[k].contains("failure")) {
            const auto& f = eps[k]["failure"];
            m = m.with(detail::json_vec(f["position"]), detail::json_vec(f["direction"]), 2);
          }
        }
      }
      std::ofstream(out / (stem + ".svg")) << render_map_svg(final_map, env, &paths.back());
      ++written;
    }
  }
  std::cout << "wrote " << written << " SVG files to " << out.string() << '\n';
  if (skipped > 0) std::cout << "skipped " << skipped << " traces: map rendering is 2-D only\n";
  return 0;
}

int cmd_report(const std::string& in) {
  const fs::path dir(in);
  const auto rows = load_results(dir);
  std::map<std::pair<int, std::string>, double> timing;
  std::ifstream tin(dir / "timing.csv");
  if (tin) timing = read_timing_csv(tin);
  std::cout << summarize(rows, tin ? &timing : nullptr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic disentangling: planner benchmarks and reports"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run trials and write CSV results plus dumps");
  std::string mode = "2d";
  std::string obstacles = "1,10,30,50";
  int trials = 100;
  std::string methods = "prob,hard:0.01,hard:0.02,eps:0.2,eps:0.4";
  int budget = kDefaultBudget;
  std::uint64_t seed = 1;
  std::string out = "results";
  int threads = 0;
  int dump_trials = 1;
  bool quiet = false;
  run->add_option("--mode", mode, "2d, 3d or 3d-orient")->check(CLI::IsMember({"2d", "3d", "3d-orient"}));
  run->add_option("--obstacles", obstacles, "Comma-separated obstacle counts");
  run->add_option("--trials", trials, "Trials per obstacle count")->check(CLI::PositiveNumber);
  run->add_option("--methods", methods, "Comma-separated methods: prob[:C_FAIL], hard:TAU, eps:EPSILON");
  run->add_option("--budget", budget, "Paths per trial")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0: all cores)");
  run->add_option("--dump-trials", dump_trials, "Trials per count whose scenario, trace and map are dumped");
  run->add_flag("--quiet", quiet, "No progress output");

  auto* plot = app.add_subcommand("plot", "Render success curves and map snapshots");
  std::string plot_in;
  bool svg = false;
  bool episodes = false;
  plot->add_option("--in", plot_in, "Directory written by run")->required();
  plot->add_flag("--svg", svg, "Write SVG files (otherwise print the curves as text)");
  plot->add_flag("--episodes", episodes, "Also render one map snapshot per episode");

  auto* report = app.add_subcommand("report", "Print success tables and sensitivity");
  std::string report_in;
  report->add_option("--in", report_in, "Directory written by run")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(mode, obstacles, trials, methods, budget, seed, out, threads, dump_trials, quiet);
    if (*plot) return cmd_plot(plot_in, svg, episodes);
    if (*report) return cmd_report(report_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
