#include "mmcsim/control.hpp"

#include <algorithm>
#include <cmath>

#include "mmcsim/criteria.hpp"

namespace mmcsim {

namespace {

// unit triangle, period 1, starts at 0 rising: 0 -> 1 -> 0
double triangle01(double x) {
  const double f = x - std::floor(x);
  return f < 0.5 ? 2.0 * f : 2.0 * (1.0 - f);
}

// diagnosis coast: the riding setpoint stays this far inside the fault's
// conduction boundary, just above the switching-ripple floor
constexpr double kCoastMargin = 3.0;  // A

// time constant on which the suppressor integrator bleeds off while its
// phase is in the diagnosis coast, so no wound-up push is replayed against
// the conduction boundary the coast is trying to keep quiet
constexpr double kIntegBleedTau = 3e-3;  // s

// Beyond the dead zone, a learned integral trim releases this much slower
// than it accumulates. A periodic obstruction (an arm whose current hits a
// one-way clamp once per fundamental cycle) is only observable while the
// clamp binds; releasing at full rate during the tracking half-cycle would
// erase between episodes everything learned during them and the trim would
// stall at a small equilibrium instead of growing to meet the obstruction.
// Inside the dead zone both directions run at full rate, so the zero-mean
// regulation ripple cannot ratchet the trim away from zero.
constexpr double kIntegReleaseRatio = 8.0;
constexpr double kIntegDeadZone = 60.0;  // V

// total-energy anchor: with duty normalized by the measured stack voltage the
// modulator no longer pins the capacitor mean, so the dc-current setpoint
// absorbs a slow trim that makes each leg's import follow its export. The
// filter keeps the capacitors' double-frequency ripple out of the setpoint.
constexpr double kEnergyGain = 0.2;    // A per V of mean capacitor deficit
constexpr double kEnergyTau = 0.1;     // s, low-pass on the measured leg mean
constexpr double kEnergyTrimMax = 5.0; // A

double injection_phase(FaultType type) {
  return type == FaultType::T1Open ? -std::numbers::pi / 2.0
                                   : std::numbers::pi / 2.0;
}

}  // namespace

double CarrierBank::value(int i, double t) const {
  return triangle01(f_c_ * t + static_cast<double>(i) / n_);
}

double suppressor_step(SuppressorState& s, double err, double feedforward,
                       double kp, double ki, double kr, double omega_r,
                       double limit, double dt, bool use_resonant) {
  const double raw =
      kp * err + (use_resonant ? s.res : 0.0) + s.integ + feedforward;
  const double out = std::clamp(raw, -limit, limit);
  if (out == raw) {
    // resonant pair d(res)/dt = w*aux + kr*err, d(aux)/dt = -w*res, advanced
    // by the exact rotation so the poles sit on the unit circle and the null
    // stays at omega_r for any step size
    const double c = std::cos(omega_r * dt);
    const double sn = std::sin(omega_r * dt);
    const double res = s.res;
    s.res = c * res + sn * s.aux + dt * kr * err;
    s.aux = c * s.aux - sn * res;
    if (use_resonant) {
      double drive =
          std::clamp(err, -kIntegratorErrLimit, kIntegratorErrLimit);
      if (std::abs(s.integ) > kIntegDeadZone && s.integ * drive < 0.0)
        drive /= kIntegReleaseRatio;
      s.integ += dt * ki * drive;
    }
  }
  if (!use_resonant) s.integ -= s.integ * (dt / (kIntegBleedTau + dt));
  return out;
}

std::array<double, 6> reference_arm_voltages(const ConverterParams& p, double t) {
  std::array<double, 6> refs;
  for (int ph = 0; ph < 3; ++ph) {
    const double e =
        p.u_m * std::sin(p.omega() * t + phase_angle_offset(static_cast<Phase>(ph)));
    refs[2 * ph] = 0.5 * p.u_dc - e;
    refs[2 * ph + 1] = 0.5 * p.u_dc + e;
  }
  return refs;
}

std::vector<double> balancing_offsets(const ArmState& arm, double k_bal) {
  std::vector<double> offsets(arm.sms.size(), 0.0);
  std::vector<double> ucs;
  ucs.reserve(arm.sms.size());
  for (const auto& sm : arm.sms) {
    if (sm.bypassed) continue;
    ucs.push_back(sm.u_c);
  }
  if (ucs.empty()) return offsets;
  // balance around the median: a single runaway module (one that can no
  // longer discharge, say) would drag a mean-based center with it and starve
  // the remaining modules of differential correction
  std::sort(ucs.begin(), ucs.end());
  const size_t m = ucs.size();
  const double center =
      m % 2 ? ucs[m / 2] : 0.5 * (ucs[m / 2 - 1] + ucs[m / 2]);
  // correction follows the current direction, fading out below 5 A: near a
  // zero crossing no charge moves anyway, and a hard sign would make large
  // offsets flap with the switching ripple
  const double dir = std::clamp(arm.current / 5.0, -1.0, 1.0);
  // cap the deviation input so the runaway module cannot demand more duty
  // shift than its neighbors can absorb, then re-center to keep the offsets
  // zero-sum and the commanded arm voltage untouched
  constexpr double dev_cap = 60.0;  // V
  double shift = 0.0;
  for (size_t i = 0; i < arm.sms.size(); ++i) {
    if (arm.sms[i].bypassed) continue;
    const double dev = std::clamp(center - arm.sms[i].u_c, -dev_cap, dev_cap);
    offsets[i] = k_bal * dir * dev;
    shift += offsets[i];
  }
  shift /= static_cast<double>(m);
  for (size_t i = 0; i < arm.sms.size(); ++i) {
    if (arm.sms[i].bypassed) continue;
    offsets[i] -= shift;
  }
  return offsets;
}

std::vector<std::uint8_t> cps_pwm_gates(double u_ref,
                                        std::span<const double> offsets,
                                        const ArmState& arm,
                                        const CarrierBank& carriers,
                                        double u_c_nom, double t) {
  const size_t n = arm.sms.size();
  std::vector<std::uint8_t> gates(n, 0);
  int active = 0;
  double sum_uc = 0.0;
  for (const auto& sm : arm.sms) {
    if (sm.bypassed) continue;
    ++active;
    sum_uc += sm.u_c;
  }
  if (active == 0) return gates;

  // normalize by the measured stack voltage so the realized arm voltage
  // tracks the reference even while the capacitors drift; guard against a
  // collapsed measurement so a startup transient cannot blow up the duty
  const double stack = std::max(sum_uc, 0.1 * active * u_c_nom);
  const double base = u_ref / stack;
  std::vector<double> duty(n, 0.0);
  double spill = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (arm.sms[i].bypassed) continue;
    const double want = base + offsets[i];
    duty[i] = std::clamp(want, 0.0, 1.0);
    spill += want - duty[i];
  }
  // push duty clipped off one module onto the others so the arm-voltage sum
  // still matches the reference (until the whole stack saturates)
  for (int pass = 0; pass < 2 && std::abs(spill) > 1e-9; ++pass) {
    int room = 0;
    for (size_t i = 0; i < n; ++i) {
      if (arm.sms[i].bypassed) continue;
      if (spill > 0.0 ? duty[i] < 1.0 : duty[i] > 0.0) ++room;
    }
    if (room == 0) break;
    const double share = spill / room;
    for (size_t i = 0; i < n; ++i) {
      if (arm.sms[i].bypassed) continue;
      const double before = duty[i];
      duty[i] = std::clamp(before + share, 0.0, 1.0);
      spill -= duty[i] - before;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (arm.sms[i].bypassed) continue;
    gates[i] = duty[i] >= carriers.value(static_cast<int>(i), t) ? 1 : 0;
  }
  return gates;
}

double injection_reference(const ControlParams& c, const ConverterParams& p,
                           FaultType type, Phase x, double t) {
  const double theta = p.omega() * t + phase_angle_offset(x);
  return c.i_2nd * std::sin(c.h_inj * theta + injection_phase(type));
}

MmcController::MmcController(const ConverterParams& p, const ControlParams& c)
    : ctl_(c),
      carriers_(p.n_sm, p.f_c),
      i_dc_ref_(dc_current(p.i_m, p.modulation_index(), p.cos_phi)) {
  uc_filt_.fill(p.u_c_nom);
}

GateMatrix MmcController::step(const ConverterState& st, const ConverterParams& p,
                               const InjectionCommand& cmd, double t,
                               ControlStepInfo* info) {
  auto refs = reference_arm_voltages(p, t);
  const double limit = ctl_.corr_limit_frac * p.u_dc;
  const double omega_r = ctl_.h_inj * p.omega();

  for (int ph = 0; ph < 3; ++ph) {
    const bool hold =
        !cmd.active && cmd.hold_arm >= 0 && cmd.hold_arm / 2 == ph;
    const Phase x = static_cast<Phase>(ph);
    const double i_z = circulating_current(st.arms[2 * ph].current,
                                           st.arms[2 * ph + 1].current);
    double inj = 0.0;
    double ff = 0.0;
    if (cmd.active) {
      inj = injection_reference(ctl_, p, cmd.type, x, t);
      if (ctl_.feedforward) {
        const double theta = p.omega() * t + phase_angle_offset(x);
        ff = p.l_s * ctl_.i_2nd * ctl_.h_inj * p.omega() *
             std::cos(ctl_.h_inj * theta + injection_phase(cmd.type));
      }
    }
    double mean_uc = 0.0;
    int n_active = 0;
    for (int a = 2 * ph; a <= 2 * ph + 1; ++a) {
      for (const auto& sm : st.arms[a].sms) {
        if (sm.bypassed) continue;
        mean_uc += sm.u_c;
        ++n_active;
      }
    }
    if (n_active > 0) mean_uc /= n_active; else mean_uc = p.u_c_nom;
    uc_filt_[ph] += (mean_uc - uc_filt_[ph]) * (p.dt / (kEnergyTau + p.dt));
    const double trim = std::clamp(kEnergyGain * (p.u_c_nom - uc_filt_[ph]),
                                   -kEnergyTrimMax, kEnergyTrimMax);
    double err = (i_dc_ref_ / 3.0 + inj + trim) - i_z;
    double kr = ctl_.kr_iz;
    if (hold) {
      // diagnosis coast. The fault clamps the suspect arm's current to one
      // sign, which bounds the circulating current by -i_x/2 from the side
      // the clamp defends; fighting that boundary only chops the faulty
      // module's capacitor through the fault diode. Instead the setpoint
      // rides just inside the boundary, with a rate feedforward so the
      // proportional loop is not dragged behind the moving envelope. The
      // resonant pair is muted (its learned correction would replay a push
      // against the clamp) and stops adapting, but keeps rotating so it
      // resumes phase-coherently once the faulty module is found and
      // bypassed.
      const double boundary = -0.5 * output_current_reference(p, x, t);
      const double target =
          cmd.type == FaultType::T1Open
              ? std::max(i_dc_ref_ / 3.0, boundary + kCoastMargin)
              : std::min(i_dc_ref_ / 3.0, boundary - kCoastMargin);
      if (coast_on_[ph]) ff = p.l_s * (target - coast_tgt_[ph]) / p.dt;
      coast_tgt_[ph] = target;
      err = target - i_z;
      kr = 0.0;
    }
    coast_on_[ph] = hold;
    const double u_corr =
        suppressor_step(sup_[ph], err, ff, ctl_.kp_iz, ctl_.ki_iz, kr,
                        omega_r, limit, p.dt, !hold);
    refs[2 * ph] -= u_corr;
    refs[2 * ph + 1] -= u_corr;
    if (info) {
      info->injection[ph] = inj;
      info->u_corr[ph] = u_corr;
      info->integ[ph] = sup_[ph].integ;
    }
  }

  // an arm whose stack has sagged (or swollen) may be unable to realize its
  // commanded voltage; carry the unmet volts on the sibling arm so the leg
  // sum — and with it the circulating current — stays controlled. The ac
  // terminal is a stiff current sink, so it tolerates the brief common-mode
  // shift this puts on the leg midpoint.
  for (int ph = 0; ph < 3; ++ph) {
    double ceil_v[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      for (const auto& sm : st.arms[2 * ph + k].sms) {
        if (!sm.bypassed) ceil_v[k] += sm.u_c;
      }
    }
    double& r_up = refs[2 * ph];
    double& r_lo = refs[2 * ph + 1];
    const double want = r_up + r_lo;
    r_up = std::clamp(r_up, 0.0, ceil_v[0]);
    r_lo = std::clamp(r_lo, 0.0, ceil_v[1]);
    double resid = want - r_up - r_lo;
    if (resid > 0.0) {
      const double d_lo = std::min(resid, ceil_v[1] - r_lo);
      r_lo += d_lo;
      r_up += std::min(resid - d_lo, ceil_v[0] - r_up);
    } else if (resid < 0.0) {
      const double d_lo = std::min(-resid, r_lo);
      r_lo -= d_lo;
      r_up -= std::min(-resid - d_lo, r_up);
    }
  }

  GateMatrix gates;
  for (int a = 0; a < 6; ++a) {
    const ArmState& arm = st.arms[a];
    const auto offsets = balancing_offsets(arm, ctl_.k_bal);
    gates[a] = cps_pwm_gates(refs[a], offsets, arm, carriers_, p.u_c_nom, t);
  }
  return gates;
}

}  // namespace mmcsim
