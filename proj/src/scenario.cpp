#include "mmcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "mmcsim/config_json.hpp"
#include "mmcsim/criteria.hpp"
#include "mmcsim/csv.hpp"

namespace mmcsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> series_columns(const ConverterParams& p) {
  std::vector<std::string> cols = {"t",    "i_ap", "i_an", "i_bp", "i_bn",
                                   "i_cp", "i_cn", "i_za", "i_zb", "i_zc"};
  for (int i = 1; i <= p.n_sm; ++i) cols.push_back("uc_" + std::to_string(i));
  for (const char* a : {"g_ap", "g_an", "g_bp", "g_bn", "g_cp", "g_cn"})
    cols.push_back(a);
  cols.push_back("inj_ref");
  cols.push_back("fault_flag");
  return cols;
}

bool criterion_risk_for(const ScenarioConfig& cfg, ClassifiedFault type) {
  if (type == ClassifiedFault::Indeterminate) return false;
  CriterionInput in;
  in.u_dc = cfg.converter.u_dc;
  in.n_sm = cfg.converter.n_sm;
  in.f_c = cfg.converter.f_c;
  in.l_s = cfg.converter.l_s;
  in.m = cfg.converter.modulation_index();
  in.cos_phi = cfg.converter.cos_phi;
  in.n_faulty = 1;
  in.type = type == ClassifiedFault::T1 ? FaultType::T1Open : FaultType::T2Open;
  return cfg.converter.i_m < unipolarity_threshold(in);
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    converter.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& c = control;
  if (c.k_bal < 0.0) throw ConfigError("control.k_bal: must be >= 0");
  if (c.kp_iz < 0.0) throw ConfigError("control.kp_iz: must be >= 0");
  if (c.kr_iz < 0.0) throw ConfigError("control.kr_iz: must be >= 0");
  if (c.i_2nd < 0.0) throw ConfigError("control.i_2nd_a: must be >= 0");
  if (c.h_inj != 1 && c.h_inj != 2)
    throw ConfigError("control.h_inj: must be 1 or 2");
  if (c.corr_limit_frac <= 0.0 || c.corr_limit_frac > 1.0)
    throw ConfigError("control.corr_limit_frac: must be in (0, 1]");
  const auto& d = detector;
  if (d.u_th <= 0.0) throw ConfigError("detector.u_th_v: must be > 0");
  if (d.dwell <= 0.0) throw ConfigError("detector.dwell_s: must be > 0");
  if (d.arm_detect_delay < 0.0)
    throw ConfigError("detector.arm_detect_delay_s: must be >= 0");
  if (d.injection_max_periods < 1)
    throw ConfigError("detector.injection_max_periods: must be >= 1");
  if (d.classifier_band < 0.0)
    throw ConfigError("detector.classifier_band_a: must be >= 0");
  if (d.classifier_settle < 0.0)
    throw ConfigError("detector.classifier_settle_s: must be >= 0");
  if (run.t_end <= 0.0) throw ConfigError("run.t_end_s: must be > 0");
  if (run.decimation < 1) throw ConfigError("run.decimation: must be >= 1");
  if (fault) {
    if (fault->sm_index < 1 || fault->sm_index > converter.n_sm)
      throw ConfigError("fault.sm_index: must be in [1, n_sm]");
    if (fault->t_fault < 0.0) throw ConfigError("fault.t_fault_s: must be >= 0");
    if (fault->t_fault >= run.t_end)
      throw ConfigError("fault.t_fault_s: must be below run.t_end_s");
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const ConverterParams& p = cfg.converter;

  ScenarioResult result;
  result.series.columns = series_columns(p);

  ConverterState st = make_initial_state(p);
  MmcController controller(p, cfg.control);

  std::optional<ArmFaultDetector> detector;
  std::optional<LocationMonitor> monitor;
  InjectionSupervisor supervisor(cfg.detector, p.f0);
  if (cfg.fault) {
    detector.emplace(cfg.detector, p.f0, cfg.fault->t_fault);
    monitor.emplace(p.n_sm, cfg.detector);
  }

  const int faulty_arm = cfg.fault ? arm_index(cfg.fault->phase, cfg.fault->arm)
                                   : arm_index(Phase::A, ArmSide::Upper);
  bool fault_applied = false;
  bool event_seen = false;
  bool risk = false;

  const long n_steps = std::lround(cfg.run.t_end / p.dt);
  result.series.rows.reserve(static_cast<size_t>(n_steps / cfg.run.decimation) + 1);

  for (long k = 0; k < n_steps; ++k) {
    const double t = st.t;

    if (cfg.fault && !fault_applied && t >= cfg.fault->t_fault) {
      inject_fault(st, *cfg.fault, p.n_sm);
      fault_applied = true;
    }

    InjectionCommand cmd;
    if (cfg.fault && fault_applied) {
      // the classifier watches the faulty phase's circulating-current
      // deviation: both arms carry it identically, and the suppressor setpoint
      // removes the healthy dc component
      const int fph = faulty_arm / 2;
      detector->feed(t, circulating_current(st.arms[2 * fph].current,
                                            st.arms[2 * fph + 1].current) -
                            controller.i_dc_ref() / 3.0);
      if (detector->fired() && !event_seen) {
        event_seen = true;
        result.report.arm_event_time = detector->event_time();
        result.report.classified = detector->type();
        risk = criterion_risk_for(cfg, detector->type());
        result.report.criterion_risk = risk;
      }
      if (event_seen && !monitor->located()) {
        if (auto flag = monitor->step(st.arms[faulty_arm].sms, t, p.dt)) {
          result.report.flags.push_back(*flag);
          result.report.located_sm = flag->sm_index;
          result.report.flag_time = flag->time;
          result.report.location_time = flag->time - cfg.fault->t_fault;
          st.arms[faulty_arm].sms[static_cast<size_t>(flag->sm_index - 1)]
              .bypassed = true;
        }
      }
      const ClassifiedFault type = event_seen ? detector->type()
                                              : ClassifiedFault::Indeterminate;
      cmd.active = supervisor.step(t, event_seen, type, risk, monitor->located());
      if (cmd.active)
        cmd.type = type == ClassifiedFault::T1 ? FaultType::T1Open
                                               : FaultType::T2Open;
      // optional coast: while the module hunt is on and nothing is being
      // injected, park the faulty leg's suppressor at the fault's conduction
      // boundary instead of fighting it; the classified type tells the coast
      // which side of the boundary to ride
      if (cfg.detector.coast_on_detect && event_seen && !monitor->located() &&
          !cmd.active && type != ClassifiedFault::Indeterminate) {
        cmd.hold_arm = faulty_arm;
        cmd.type = type == ClassifiedFault::T1 ? FaultType::T1Open
                                               : FaultType::T2Open;
      } else {
        cmd.hold_arm = -1;
      }
    }

    ControlStepInfo info;
    const GateMatrix gates = controller.step(st, p, cmd, t, &info);

    if (const char* dbg = std::getenv("MMCSIM_DBG")) {
      static std::ofstream dbgf(dbg);
      int gap = 0, gan = 0;
      for (auto v : gates[0]) gap += v;
      for (auto v : gates[1]) gan += v;
      double mup = 0.0, mlo = 0.0;
      for (const auto& sm : st.arms[0].sms) mup += sm.u_c;
      for (const auto& sm : st.arms[1].sms) mlo += sm.u_c;
      dbgf << t << ',' << st.arms[0].current << ','
           << circulating_current(st.arms[0].current, st.arms[1].current) << ','
           << info.u_corr[0] << ',' << static_cast<int>(gates[0][0]) << ','
           << gap << ',' << gan << ',' << st.arms[0].sms[0].u_c << ','
           << st.arms[0].sms[0].bypassed << ',' << mup / 12 << ',' << mlo / 12
           << ',' << info.integ[0] << '\n';
    }

    if (k % cfg.run.decimation == 0) {
      std::vector<double> row;
      row.reserve(result.series.columns.size());
      row.push_back(t);
      for (int a = 0; a < 6; ++a) row.push_back(st.arms[a].current);
      for (int ph = 0; ph < 3; ++ph)
        row.push_back(circulating_current(st.arms[2 * ph].current,
                                          st.arms[2 * ph + 1].current));
      for (const auto& sm : st.arms[faulty_arm].sms) row.push_back(sm.u_c);
      for (int a = 0; a < 6; ++a) {
        int g = 0;
        for (auto v : gates[a]) g += v;
        row.push_back(static_cast<double>(g));
      }
      row.push_back(info.injection[faulty_arm / 2]);
      row.push_back(monitor && monitor->located() ? 1.0 : 0.0);
      result.series.rows.push_back(std::move(row));
    }

    const StepFlags flags = converter_step(st, gates, p);
    result.negative_u_cap = result.negative_u_cap || flags.negative_u_cap;
    if (flags.diverged) {
      result.status = RunStatus::Diverged;
      result.message = "simulation diverged at t = " + format_number(st.t);
      break;
    }
  }

  result.report.injection_start = supervisor.start_time();
  result.report.injection_end = supervisor.stop_time();
  if (result.report.injection_start && !result.report.injection_end)
    result.report.injection_end = st.t;

  if (cfg.fault) {
    result.located_wrong_sm = result.report.located_sm.has_value() &&
                              *result.report.located_sm != cfg.fault->sm_index;
  }
  return result;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig cfg;  // defaults carry the reference operating point
  cfg.run.name = name;
  if (name == "healthy") {
    cfg.fault.reset();
    cfg.run.t_end = 0.3;
    return cfg;
  }
  FaultSpec fault;
  fault.phase = Phase::A;
  fault.arm = ArmSide::Upper;
  fault.sm_index = 1;
  if (name == "fig11") {
    fault.type = FaultType::T1Open;
    fault.t_fault = 0.04;
    cfg.detector.injection_enabled = false;
    cfg.run.t_end = 0.3;
  } else if (name == "fig12") {
    fault.type = FaultType::T1Open;
    fault.t_fault = 0.05;
    cfg.detector.injection_enabled = true;
    cfg.run.t_end = 0.15;
  } else if (name == "fig13") {
    fault.type = FaultType::T2Open;
    // lands while the faulty arm's current is deep in its negative interval,
    // so the bottom-switch fault begins silently (no conduction change at
    // onset) and the capacitor divergence builds from zero
    fault.t_fault = 0.035;
    cfg.detector.injection_enabled = false;
    cfg.run.t_end = 0.3;
  } else if (name == "fig14") {
    fault.type = FaultType::T2Open;
    fault.t_fault = 0.05;
    cfg.detector.injection_enabled = true;
    cfg.run.t_end = 0.15;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  cfg.fault = fault;
  return cfg;
}

std::vector<std::string> builtin_scenario_names() {
  return {"healthy", "fig11", "fig12", "fig13", "fig14"};
}

std::string summary_json(const ScenarioResult& result, const ScenarioConfig& cfg) {
  ordered_json j;
  j["scenario"] = cfg.run.name;
  j["status"] = result.status == RunStatus::Ok ? "ok" : "diverged";
  if (!result.message.empty()) j["message"] = result.message;
  j["negative_capacitor_voltage"] = result.negative_u_cap;

  const auto& r = result.report;
  ordered_json rep;
  rep["arm_event_time_s"] =
      r.arm_event_time ? ordered_json(*r.arm_event_time) : ordered_json(nullptr);
  rep["classified_fault"] = to_string(r.classified);
  rep["criterion_risk"] = r.criterion_risk;
  if (r.injection_start) {
    rep["injection_window_s"] = {*r.injection_start,
                                 r.injection_end ? *r.injection_end : -1.0};
  } else {
    rep["injection_window_s"] = nullptr;
  }
  rep["located_sm"] = r.located_sm ? ordered_json(*r.located_sm) : ordered_json(nullptr);
  rep["flag_time_s"] = r.flag_time ? ordered_json(*r.flag_time) : ordered_json(nullptr);
  rep["location_time_s"] =
      r.location_time ? ordered_json(*r.location_time) : ordered_json(nullptr);
  ordered_json flags = ordered_json::array();
  for (const auto& f : r.flags)
    flags.push_back({{"sm_index", f.sm_index}, {"time_s", f.time}});
  rep["flags"] = flags;
  rep["located_wrong_sm"] = result.located_wrong_sm;
  j["report"] = rep;

  j["config"] = ordered_json::parse(config_to_json(cfg));
  return j.dump(2) + "\n";
}

void write_outputs(const ScenarioResult& result, const ScenarioConfig& cfg,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / (cfg.run.name + "_timeseries.csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  write_csv(csv, result.series);

  const auto sum_path = out_dir / (cfg.run.name + "_summary.json");
  std::ofstream sum(sum_path, std::ios::binary);
  if (!sum) throw std::runtime_error("cannot write " + sum_path.string());
  sum << summary_json(result, cfg);
}

void write_sweep_outputs(const std::vector<int>& case_ids,
                         const std::filesystem::path& out_dir) {
  const auto all = builtin_sweep_cases();
  std::vector<SweepCase> picked;
  if (case_ids.empty()) {
    picked = all;
  } else {
    for (int id : case_ids) {
      bool found = false;
      for (const auto& c : all) {
        if (c.id == id) {
          picked.push_back(c);
          found = true;
          break;
        }
      }
      if (!found)
        throw ConfigError("unknown sweep case " + std::to_string(id));
    }
  }

  std::filesystem::create_directories(out_dir);
  // case groups as studied: {1,2} inductance, {3,4} carrier frequency and
  // modulation depth, {5,6} power factor, {7,8,9} number of faulty modules
  const std::vector<std::pair<std::string, std::vector<int>>> groups = {
      {"sweep_arm_inductance.csv", {1, 2}},
      {"sweep_carrier_modulation.csv", {3, 4}},
      {"sweep_power_factor.csv", {5, 6}},
      {"sweep_faulty_count.csv", {7, 8, 9}},
  };

  for (const auto& [fname, ids] : groups) {
    std::vector<SweepCase> group_cases;
    for (const auto& c : picked)
      if (std::find(ids.begin(), ids.end(), c.id) != ids.end())
        group_cases.push_back(c);
    if (group_cases.empty()) continue;

    const auto rows = impact_sweep(group_cases, 4, 50);
    std::ofstream os(out_dir / fname, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + fname);
    os << "case_id,n_sm,i_m_threshold_t1_a,i_m_threshold_t2_a,error\n";
    for (const auto& r : rows) {
      os << r.case_id << ',' << r.n_sm << ',' << format_number(r.thr_t1) << ','
         << format_number(r.thr_t2) << ',' << r.error << '\n';
    }
  }
}

}  // namespace mmcsim
