#include "mmcsim/config_json.hpp"

#include <initializer_list>
#include <string>

#include <json.hpp>

namespace mmcsim {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

void get_num(const json& obj, const char* key, const std::string& path, double& out) {
  if (const json* v = find(obj, key)) out = as_number(*v, path + "." + key);
}

void get_int(const json& obj, const char* key, const std::string& path, int& out) {
  if (const json* v = find(obj, key)) out = as_int(*v, path + "." + key);
}

void get_bool(const json& obj, const char* key, const std::string& path, bool& out) {
  if (const json* v = find(obj, key)) out = as_bool(*v, path + "." + key);
}

void parse_converter(const json& obj, ConverterParams& p) {
  const std::string path = "converter";
  reject_unknown_keys(obj, path,
                      {"u_dc_v", "u_m_v", "n_sm", "c_f", "u_c_nom_v", "l_s_h",
                       "r_s_ohm", "f0_hz", "f_c_hz", "i_m_a", "cos_phi", "dt_s"});
  bool u_c_given = find(obj, "u_c_nom_v") != nullptr;
  get_num(obj, "u_dc_v", path, p.u_dc);
  get_num(obj, "u_m_v", path, p.u_m);
  get_int(obj, "n_sm", path, p.n_sm);
  get_num(obj, "c_f", path, p.c_sm);
  get_num(obj, "u_c_nom_v", path, p.u_c_nom);
  get_num(obj, "l_s_h", path, p.l_s);
  get_num(obj, "r_s_ohm", path, p.r_s);
  get_num(obj, "f0_hz", path, p.f0);
  get_num(obj, "f_c_hz", path, p.f_c);
  get_num(obj, "i_m_a", path, p.i_m);
  get_num(obj, "cos_phi", path, p.cos_phi);
  get_num(obj, "dt_s", path, p.dt);
  if (!u_c_given && p.n_sm > 0) p.u_c_nom = p.u_dc / p.n_sm;
}

void parse_control(const json& obj, ControlParams& c) {
  const std::string path = "control";
  reject_unknown_keys(obj, path,
                      {"k_bal", "kp_iz", "ki_iz", "kr_iz", "i_2nd_a", "h_inj",
                       "feedforward", "corr_limit_frac"});
  get_num(obj, "k_bal", path, c.k_bal);
  get_num(obj, "kp_iz", path, c.kp_iz);
  get_num(obj, "ki_iz", path, c.ki_iz);
  get_num(obj, "kr_iz", path, c.kr_iz);
  get_num(obj, "i_2nd_a", path, c.i_2nd);
  get_int(obj, "h_inj", path, c.h_inj);
  get_bool(obj, "feedforward", path, c.feedforward);
  get_num(obj, "corr_limit_frac", path, c.corr_limit_frac);
}

void parse_detector(const json& obj, DetectorConfig& d) {
  const std::string path = "detector";
  reject_unknown_keys(obj, path,
                      {"u_th_v", "dwell_s", "arm_detect_delay_s",
                       "injection_enabled", "injection_max_periods",
                       "classifier_band_a", "classifier_settle_s",
                       "coast_on_detect"});
  get_num(obj, "u_th_v", path, d.u_th);
  get_num(obj, "dwell_s", path, d.dwell);
  get_num(obj, "arm_detect_delay_s", path, d.arm_detect_delay);
  get_bool(obj, "injection_enabled", path, d.injection_enabled);
  get_int(obj, "injection_max_periods", path, d.injection_max_periods);
  get_num(obj, "classifier_band_a", path, d.classifier_band);
  get_num(obj, "classifier_settle_s", path, d.classifier_settle);
  get_bool(obj, "coast_on_detect", path, d.coast_on_detect);
}

Phase parse_phase(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "a") return Phase::A;
  if (s == "b") return Phase::B;
  if (s == "c") return Phase::C;
  throw ConfigError(path + ": expected \"a\", \"b\" or \"c\"");
}

ArmSide parse_arm_side(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "upper") return ArmSide::Upper;
  if (s == "lower") return ArmSide::Lower;
  throw ConfigError(path + ": expected \"upper\" or \"lower\"");
}

FaultType parse_fault_type(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "T1") return FaultType::T1Open;
  if (s == "T2") return FaultType::T2Open;
  throw ConfigError(path + ": expected \"T1\" or \"T2\"");
}

void parse_fault(const json& obj, std::optional<FaultSpec>& out) {
  const std::string path = "fault";
  reject_unknown_keys(obj, path, {"phase", "arm", "sm_index", "type", "t_fault_s"});
  FaultSpec f = out.value_or(FaultSpec{});
  if (const json* v = find(obj, "phase")) f.phase = parse_phase(*v, path + ".phase");
  if (const json* v = find(obj, "arm")) f.arm = parse_arm_side(*v, path + ".arm");
  if (const json* v = find(obj, "sm_index"))
    f.sm_index = as_int(*v, path + ".sm_index");
  if (const json* v = find(obj, "type")) f.type = parse_fault_type(*v, path + ".type");
  if (const json* v = find(obj, "t_fault_s"))
    f.t_fault = as_number(*v, path + ".t_fault_s");
  out = f;
}

void parse_run(const json& obj, RunConfig& r) {
  const std::string path = "run";
  reject_unknown_keys(obj, path, {"name", "t_end_s", "decimation"});
  if (const json* v = find(obj, "name")) r.name = as_string(*v, path + ".name");
  get_num(obj, "t_end_s", path, r.t_end);
  get_int(obj, "decimation", path, r.decimation);
}

}  // namespace

ScenarioConfig apply_config_json(const ScenarioConfig& base,
                                 const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(doc, "config",
                      {"converter", "control", "detector", "fault", "run"});

  ScenarioConfig cfg = base;
  if (const json* v = find(doc, "converter")) {
    if (!v->is_object()) throw ConfigError("converter: expected an object");
    parse_converter(*v, cfg.converter);
  }
  if (const json* v = find(doc, "control")) {
    if (!v->is_object()) throw ConfigError("control: expected an object");
    parse_control(*v, cfg.control);
  }
  if (const json* v = find(doc, "detector")) {
    if (!v->is_object()) throw ConfigError("detector: expected an object");
    parse_detector(*v, cfg.detector);
  }
  if (const json* v = find(doc, "fault")) {
    if (v->is_null()) {
      cfg.fault.reset();
    } else if (v->is_object()) {
      parse_fault(*v, cfg.fault);
    } else {
      throw ConfigError("fault: expected an object or null");
    }
  }
  if (const json* v = find(doc, "run")) {
    if (!v->is_object()) throw ConfigError("run: expected an object");
    parse_run(*v, cfg.run);
  }
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["converter"] = {{"u_dc_v", cfg.converter.u_dc},
                    {"u_m_v", cfg.converter.u_m},
                    {"n_sm", cfg.converter.n_sm},
                    {"c_f", cfg.converter.c_sm},
                    {"u_c_nom_v", cfg.converter.u_c_nom},
                    {"l_s_h", cfg.converter.l_s},
                    {"r_s_ohm", cfg.converter.r_s},
                    {"f0_hz", cfg.converter.f0},
                    {"f_c_hz", cfg.converter.f_c},
                    {"i_m_a", cfg.converter.i_m},
                    {"cos_phi", cfg.converter.cos_phi},
                    {"dt_s", cfg.converter.dt}};
  j["control"] = {{"k_bal", cfg.control.k_bal},
                  {"kp_iz", cfg.control.kp_iz},
                  {"ki_iz", cfg.control.ki_iz},
                  {"kr_iz", cfg.control.kr_iz},
                  {"i_2nd_a", cfg.control.i_2nd},
                  {"h_inj", cfg.control.h_inj},
                  {"feedforward", cfg.control.feedforward},
                  {"corr_limit_frac", cfg.control.corr_limit_frac}};
  j["detector"] = {{"u_th_v", cfg.detector.u_th},
                   {"dwell_s", cfg.detector.dwell},
                   {"arm_detect_delay_s", cfg.detector.arm_detect_delay},
                   {"injection_enabled", cfg.detector.injection_enabled},
                   {"injection_max_periods", cfg.detector.injection_max_periods},
                   {"classifier_band_a", cfg.detector.classifier_band},
                   {"classifier_settle_s", cfg.detector.classifier_settle},
                   {"coast_on_detect", cfg.detector.coast_on_detect}};
  if (cfg.fault) {
    j["fault"] = {{"phase", to_string(cfg.fault->phase)},
                  {"arm", to_string(cfg.fault->arm)},
                  {"sm_index", cfg.fault->sm_index},
                  {"type", to_string(cfg.fault->type)},
                  {"t_fault_s", cfg.fault->t_fault}};
  } else {
    j["fault"] = nullptr;
  }
  j["run"] = {{"name", cfg.run.name},
              {"t_end_s", cfg.run.t_end},
              {"decimation", cfg.run.decimation}};
  return j.dump(2);
}

}  // namespace mmcsim
