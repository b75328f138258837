// Command-line front end; talks to the simulator only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmcsim/mmcsim.h"

namespace {

int to_exit_code(mmcsim_status st) {
  switch (st) {
    case MMCSIM_OK: return 0;
    case MMCSIM_ERR_CONFIG: return 2;
    case MMCSIM_ERR_DIVERGED: return 3;
    case MMCSIM_ERR_WRONG_SM: return 4;
    default: return 1;
  }
}

int worker_count(size_t jobs) {
  if (const char* env = std::getenv("MMCSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<int>(std::min<size_t>(n, jobs));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<size_t>(hw ? hw : 1, jobs));
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err = "cannot open " + path;
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

struct RunOutcome {
  mmcsim_status status = MMCSIM_ERR_INTERNAL;
  std::string error;
  nlohmann::json summary;
};

RunOutcome run_one(const char* builtin, const char* config_json,
                   const std::string& out_dir) {
  RunOutcome oc;
  mmcsim_scenario* s = nullptr;
  mmcsim_status st = mmcsim_scenario_create(builtin, config_json, &s);
  if (st != MMCSIM_OK) {
    oc.status = st;
    oc.error = mmcsim_last_error();
    return oc;
  }
  st = mmcsim_scenario_run(s, out_dir.empty() ? nullptr : out_dir.c_str());
  oc.status = st;
  if (st != MMCSIM_OK) oc.error = mmcsim_scenario_error(s);
  if (const char* sum = mmcsim_scenario_summary(s))
    oc.summary = nlohmann::json::parse(sum, nullptr, false);
  mmcsim_scenario_free(s);
  return oc;
}

double location_time_ms(const nlohmann::json& summary) {
  if (!summary.is_object()) return -1.0;
  const auto& rep = summary.value("report", nlohmann::json::object());
  const auto& lt = rep.find("location_time_s");
  if (lt == rep.end() || !lt->is_number()) return -1.0;
  return lt->get<double>() * 1e3;
}

int cmd_run(const std::string& config_path, const std::string& scenario,
            const std::string& out_dir) {
  std::string config_text;
  if (!config_path.empty()) {
    std::string err;
    if (!read_file(config_path, config_text, err)) {
      std::fprintf(stderr, "error: %s\n", err.c_str());
      return 2;
    }
  }
  const RunOutcome oc =
      run_one(scenario.empty() ? nullptr : scenario.c_str(),
              config_text.empty() ? nullptr : config_text.c_str(), out_dir);
  if (oc.status != MMCSIM_OK)
    std::fprintf(stderr, "error: %s\n", oc.error.c_str());
  if (oc.summary.is_object()) {
    const std::string name = oc.summary.value("scenario", "scenario");
    const double lt = location_time_ms(oc.summary);
    if (lt >= 0.0)
      std::printf("%s: located sm %d after %.3f ms\n", name.c_str(),
                  oc.summary["report"]["located_sm"].get<int>(), lt);
    else
      std::printf("%s: no module flagged\n", name.c_str());
    if (!out_dir.empty())
      std::printf("outputs written to %s\n", out_dir.c_str());
  }
  return to_exit_code(oc.status);
}

int cmd_sweep(const std::string& cases, const std::string& out_dir) {
  const mmcsim_status st =
      mmcsim_sweep(cases.empty() ? nullptr : cases.c_str(), out_dir.c_str());
  if (st != MMCSIM_OK) {
    std::fprintf(stderr, "error: %s\n", mmcsim_last_error());
    return to_exit_code(st);
  }
  std::printf("sweep tables written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_repro_table5(const std::string& out_dir) {
  struct Job {
    const char* name;
    RunOutcome outcome;
  };
  std::vector<Job> jobs = {{"fig11"}, {"fig12"}, {"fig13"}, {"fig14"}};

  const int workers = worker_count(jobs.size());
  std::mutex mu;
  size_t next = 0;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t idx;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= jobs.size()) return;
          idx = next++;
        }
        jobs[idx].outcome = run_one(jobs[idx].name, nullptr, out_dir);
      }
    });
  }
  for (auto& th : pool) th.join();

  int rc = 0;
  for (const auto& j : jobs) {
    if (j.outcome.status != MMCSIM_OK) {
      std::fprintf(stderr, "error: %s: %s\n", j.name, j.outcome.error.c_str());
      rc = std::max(rc, to_exit_code(j.outcome.status));
    }
  }

  const double t1_plain = location_time_ms(jobs[0].outcome.summary);
  const double t1_inj = location_time_ms(jobs[1].outcome.summary);
  const double t2_plain = location_time_ms(jobs[2].outcome.summary);
  const double t2_inj = location_time_ms(jobs[3].outcome.summary);

  std::printf("fault   without injection   with injection   speedup\n");
  auto row = [](const char* name, double plain, double inj) {
    auto cell = [](double v) {
      char buf[32];
      if (v < 0.0)
        std::snprintf(buf, sizeof buf, "%s", "not located");
      else
        std::snprintf(buf, sizeof buf, "%.1f ms", v);
      return std::string(buf);
    };
    std::string speedup = "-";
    if (plain > 0.0 && inj > 0.0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1fx", plain / inj);
      speedup = buf;
    }
    std::printf("%-7s %-19s %-16s %s\n", name, cell(plain).c_str(),
                cell(inj).c_str(), speedup.c_str());
  };
  row("T1", t1_plain, t1_inj);
  row("T2", t2_plain, t2_inj);
  if (!out_dir.empty()) std::printf("outputs written to %s\n", out_dir.c_str());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular multilevel converter open-switch fault study"};
  app.set_version_flag("--version", mmcsim_version());
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir = "out", cases;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  run->add_option("--scenario", scenario,
                  std::string("Built-in scenario (") + mmcsim_builtin_scenarios() +
                      "); a config file refines it");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Write unipolarity threshold tables");
  sweep->add_option("--cases", cases, "Comma-separated case ids (default: all)");
  sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* repro = app.add_subcommand(
      "repro-table5", "Run the four reference fault scenarios and tabulate "
                      "location times");
  repro->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (config_path.empty() && scenario.empty()) {
      std::fprintf(stderr, "error: pass a config file or --scenario NAME\n");
      return 2;
    }
    return cmd_run(config_path, scenario, out_dir);
  }
  if (sweep->parsed()) return cmd_sweep(cases, out_dir);
  return cmd_repro_table5(out_dir);
}
