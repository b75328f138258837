#include "mmcsim/mmcsim.h"

#include <cstring>
#include <sstream>
#include <string>

#include "mmcsim/config_json.hpp"
#include "mmcsim/criteria.hpp"
#include "mmcsim/scenario.hpp"

using namespace mmcsim;

struct mmcsim_scenario {
  ScenarioConfig config;
  std::string summary;
  std::string error;
  bool has_summary = false;
};

namespace {

thread_local std::string g_last_error;

mmcsim_status fail(mmcsim_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

mmcsim_status fail(mmcsim_scenario* s, mmcsim_status code, const std::string& msg) {
  if (s) s->error = msg;
  return fail(code, msg);
}

}  // namespace

extern "C" {

const char* mmcsim_version(void) { return "1.0.0"; }

const char* mmcsim_last_error(void) { return g_last_error.c_str(); }

const char* mmcsim_builtin_scenarios(void) {
  static const std::string names = [] {
    std::string out;
    for (const auto& n : builtin_scenario_names()) {
      if (!out.empty()) out += ',';
      out += n;
    }
    return out;
  }();
  return names.c_str();
}

mmcsim_status mmcsim_scenario_create(const char* builtin_name,
                                     const char* config_json,
                                     mmcsim_scenario** out) {
  if (!out) return fail(MMCSIM_ERR_INVALID_ARG, "out must not be null");
  *out = nullptr;
  try {
    ScenarioConfig cfg =
        builtin_name ? builtin_scenario(builtin_name) : ScenarioConfig{};
    if (config_json) cfg = apply_config_json(cfg, config_json);
    cfg.validate();
    auto* s = new mmcsim_scenario;
    s->config = std::move(cfg);
    *out = s;
    return MMCSIM_OK;
  } catch (const ConfigError& e) {
    return fail(MMCSIM_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(MMCSIM_ERR_INTERNAL, e.what());
  }
}

void mmcsim_scenario_free(mmcsim_scenario* s) { delete s; }

const char* mmcsim_scenario_name(const mmcsim_scenario* s) {
  return s ? s->config.run.name.c_str() : nullptr;
}

mmcsim_status mmcsim_scenario_run(mmcsim_scenario* s, const char* out_dir) {
  if (!s) return fail(MMCSIM_ERR_INVALID_ARG, "scenario must not be null");
  try {
    const ScenarioResult result = run_scenario(s->config);
    s->summary = summary_json(result, s->config);
    s->has_summary = true;
    if (out_dir) write_outputs(result, s->config, out_dir);
    if (result.status == RunStatus::Diverged)
      return fail(s, MMCSIM_ERR_DIVERGED, result.message);
    if (result.located_wrong_sm)
      return fail(s, MMCSIM_ERR_WRONG_SM,
                  "a module other than the seeded one was flagged");
    return MMCSIM_OK;
  } catch (const ConfigError& e) {
    return fail(s, MMCSIM_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(s, MMCSIM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(s, MMCSIM_ERR_INTERNAL, e.what());
  }
}

const char* mmcsim_scenario_summary(const mmcsim_scenario* s) {
  return s && s->has_summary ? s->summary.c_str() : nullptr;
}

const char* mmcsim_scenario_error(const mmcsim_scenario* s) {
  return s ? s->error.c_str() : nullptr;
}

mmcsim_status mmcsim_sweep(const char* case_ids, const char* out_dir) {
  if (!out_dir) return fail(MMCSIM_ERR_INVALID_ARG, "out_dir must not be null");
  try {
    std::vector<int> ids;
    if (case_ids) {
      std::stringstream ss(case_ids);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        size_t pos = 0;
        const int id = std::stoi(tok, &pos);
        if (pos != tok.size())
          return fail(MMCSIM_ERR_CONFIG, "bad case id '" + tok + "'");
        ids.push_back(id);
      }
    }
    write_sweep_outputs(ids, out_dir);
    return MMCSIM_OK;
  } catch (const ConfigError& e) {
    return fail(MMCSIM_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MMCSIM_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MMCSIM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MMCSIM_ERR_INTERNAL, e.what());
  }
}

mmcsim_status mmcsim_unipolarity_threshold(double u_dc, int n_sm, double f_c,
                                           double l_s, double m, double cos_phi,
                                           int n_faulty, int fault_type,
                                           double* out) {
  if (!out) return fail(MMCSIM_ERR_INVALID_ARG, "out must not be null");
  if (fault_type != 1 && fault_type != 2)
    return fail(MMCSIM_ERR_INVALID_ARG, "fault_type must be 1 or 2");
  try {
    CriterionInput in;
    in.u_dc = u_dc;
    in.n_sm = n_sm;
    in.f_c = f_c;
    in.l_s = l_s;
    in.m = m;
    in.cos_phi = cos_phi;
    in.n_faulty = n_faulty;
    in.type = fault_type == 1 ? FaultType::T1Open : FaultType::T2Open;
    *out = unipolarity_threshold(in);
    return MMCSIM_OK;
  } catch (const std::invalid_argument& e) {
    return fail(MMCSIM_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MMCSIM_ERR_INTERNAL, e.what());
  }
}

}  // extern "C"
