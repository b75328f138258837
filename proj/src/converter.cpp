#include "mmcsim/converter.hpp"

#include <cmath>
#include <stdexcept>

#include "mmcsim/criteria.hpp"

namespace mmcsim {

namespace {

double arm_voltage(const ArmState& arm) {
  double u = 0.0;
  for (const auto& sm : arm.sms) u += sm_output_voltage(sm, arm.current);
  return u;
}

}  // namespace

double output_current_reference(const ConverterParams& p, Phase x, double t) {
  return p.i_m * std::sin(p.omega() * t + phase_angle_offset(x) + p.phi());
}

double rated_arm_current(const ConverterParams& p) {
  const double i_dc = dc_current(p.i_m, p.modulation_index(), p.cos_phi);
  return 0.5 * p.i_m + i_dc / 3.0;
}

ConverterState make_initial_state(const ConverterParams& p) {
  ConverterState st;
  const double i_z0 = dc_current(p.i_m, p.modulation_index(), p.cos_phi) / 3.0;
  for (int ph = 0; ph < 3; ++ph) {
    const double i_x0 = output_current_reference(p, static_cast<Phase>(ph), 0.0);
    for (ArmSide side : {ArmSide::Upper, ArmSide::Lower}) {
      ArmState& arm = st.arm(static_cast<Phase>(ph), side);
      arm.sms.assign(static_cast<size_t>(p.n_sm), SubmoduleState{p.u_c_nom});
      arm.current = i_z0 + (side == ArmSide::Upper ? 0.5 : -0.5) * i_x0;
    }
  }
  st.t = 0.0;
  return st;
}

StepFlags converter_step(ConverterState& st, const GateMatrix& gates,
                         const ConverterParams& p) {
  StepFlags flags;
  const double t_new = st.t + p.dt;
  const double i_guard = 100.0 * std::max(rated_arm_current(p), 1.0);
  const double u_guard = 5.0 * p.u_c_nom;

  for (int ph = 0; ph < 3; ++ph) {
    ArmState& up = st.arms[2 * ph];
    ArmState& lo = st.arms[2 * ph + 1];

    for (int s = 0; s < 2; ++s) {
      ArmState& arm = st.arms[2 * ph + s];
      const auto& cmd = gates[2 * ph + s];
      for (size_t i = 0; i < arm.sms.size(); ++i)
        arm.sms[i].gate = !arm.sms[i].bypassed && cmd[i] != 0;
    }

    // conduction and arm voltages from the present current sign
    const double u_up = arm_voltage(up);
    const double u_lo = arm_voltage(lo);

    // leg loop: both arm inductors in series against the dc bus, the ac
    // terminal sinks the commanded phase current and absorbs no imbalance
    const double i_z = circulating_current(up.current, lo.current);
    const double di_z =
        (p.u_dc - u_up - u_lo - 2.0 * p.r_s * i_z) / (2.0 * p.l_s) * p.dt;
    const double i_z_new = i_z + di_z;
    const double i_x_new =
        output_current_reference(p, static_cast<Phase>(ph), t_new);
    up.current = i_z_new + 0.5 * i_x_new;
    lo.current = i_z_new - 0.5 * i_x_new;

    for (int s = 0; s < 2; ++s) {
      ArmState& arm = st.arms[2 * ph + s];
      if (std::abs(arm.current) > i_guard) flags.diverged = true;
      for (auto& sm : arm.sms) {
        sm.u_c = capacitor_step(sm, arm.current, p.c_sm, p.dt);
        if (sm.u_c < 0.0) flags.negative_u_cap = true;
        if (sm.u_c > u_guard) flags.diverged = true;
      }
    }
  }

  st.t = t_new;
  return flags;
}

void inject_fault(ConverterState& st, const FaultSpec& spec, int n_sm) {
  if (spec.sm_index < 1 || spec.sm_index > n_sm)
    throw std::invalid_argument("fault sm_index out of range");
  ArmState& arm = st.arm(spec.phase, spec.arm);
  arm.sms[static_cast<size_t>(spec.sm_index - 1)].health = to_health(spec.type);
}

}  // namespace mmcsim
