#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mmcsim/converter.hpp"
#include "mmcsim/params.hpp"

namespace mmcsim {

struct ControlParams {
  double k_bal = 1.5e-3;   // per-module balancing gain, 1/V
  double kp_iz = 15.0;     // circulating-current proportional gain, V/A
  double ki_iz = 600.0;    // circulating-current integral gain, V/(A*s)
  double kr_iz = 600.0;    // resonant gain at the injection harmonic, V/(A*s)
  double i_2nd = 113.6;    // injected circulating-current amplitude, A
  int h_inj = 2;           // injection harmonic order (1 or 2)
  bool feedforward = true; // add L_s * d(i_z_ref)/dt to the suppressor output
  double corr_limit_frac = 0.1;  // suppressor clamp as a fraction of u_dc
};

/// n triangular carriers in [0, 1] at f_c, evenly phase-shifted by 2pi/n.
class CarrierBank {
 public:
  CarrierBank(int n, double f_c) : n_(n), f_c_(f_c) {}
  double value(int i, double t) const;
  int size() const { return n_; }

 private:
  int n_;
  double f_c_;
};

/// Dynamic part of the circulating-current suppressor (one set per phase).
struct SuppressorState {
  double res = 0.0;    // resonant output state
  double aux = 0.0;    // quadrature state
  double integ = 0.0;  // integral output state, V
};

/// The integrator winds from the error clamped to this band. The clamp bounds
/// the authority a persistent offset can request per unit time, so the windup
/// rate measures how long the offset lasts rather than how large it is.
inline constexpr double kIntegratorErrLimit = 5.0;  // A

/// One suppressor update. Output is kp*err + resonant + integral +
/// feedforward, clamped to +/-limit; the adaptive states freeze while the
/// output saturates. The resonant pair advances by exact rotation, so its
/// null sits at omega_r for any step size. With use_resonant = false the
/// pair keeps rotating (staying phase-coherent for later resumption) but is
/// muted in the output, and the integrator bleeds off instead of adapting.
double suppressor_step(SuppressorState& s, double err, double feedforward,
                       double kp, double ki, double kr, double omega_r,
                       double limit, double dt, bool use_resonant = true);

/// Sinusoidal arm voltage references; upper = U_dc/2 - U_m sin(wt+phi_x),
/// lower = U_dc/2 + U_m sin(wt+phi_x). The two always sum to U_dc.
std::array<double, 6> reference_arm_voltages(const ConverterParams& p, double t);

/// Per-module duty offsets k_bal * w * (mean(u_c) - u_c_i) with
/// w = i_arm / 5 A clamped to [-1, 1], zero for bypassed modules; the mean
/// runs over the active modules only. The weight fades near zero current so
/// offsets cannot flap sign with the switching ripple.
std::vector<double> balancing_offsets(const ArmState& arm, double k_bal);

/// Phase-shifted-carrier comparison. The arm reference is normalized over the
/// active modules, shifted per module by the balancing offset, saturated to
/// [0, 1] and compared against that module's carrier. Bypassed modules get 0.
std::vector<std::uint8_t> cps_pwm_gates(double u_ref,
                                        std::span<const double> offsets,
                                        const ArmState& arm,
                                        const CarrierBank& carriers,
                                        double u_c_nom, double t);

/// Circulating-current injection reference
///   I_2nd * sin(h*(w t + phi_x) + phi_2nd),
/// with phi_2nd = -pi/2 for a top-switch fault and +pi/2 for a bottom-switch
/// fault.
double injection_reference(const ControlParams& c, const ConverterParams& p,
                           FaultType type, Phase x, double t);

struct InjectionCommand {
  bool active = false;
  FaultType type = FaultType::T1Open;
  // Arm under diagnosis (suspect arm seen, module not located, no injection
  // running): its phase's suppressor runs in a guarded mode. The resonant
  // pair is muted in the output and stops adapting (but keeps rotating for
  // phase-coherent resumption), the integrator bleeds off, and the setpoint
  // rides just inside the fault's one-way conduction boundary (per `type`)
  // so regulation never pushes the current back across the boundary being
  // measured. -1 = none; ignored while an injection is active.
  int hold_arm = -1;
};

/// Everything the scenario loop wants to log about one control step.
struct ControlStepInfo {
  std::array<double, 3> injection = {0, 0, 0};  // A, per phase
  std::array<double, 3> u_corr = {0, 0, 0};     // V, per phase
  std::array<double, 3> integ = {0, 0, 0};      // V, per phase
};

/// Carrier bank plus the three suppressors; produces the full gate matrix.
class MmcController {
 public:
  MmcController(const ConverterParams& p, const ControlParams& c);

  GateMatrix step(const ConverterState& st, const ConverterParams& p,
                  const InjectionCommand& cmd, double t,
                  ControlStepInfo* info = nullptr);

  const ControlParams& params() const { return ctl_; }
  double i_dc_ref() const { return i_dc_ref_; }

 private:
  ControlParams ctl_;
  CarrierBank carriers_;
  std::array<SuppressorState, 3> sup_{};
  double i_dc_ref_;  // total dc-side current at the operating point
  // previous coast target per phase, for the target-rate feedforward; the
  // flag marks whether the stored value is from the immediately preceding step
  std::array<double, 3> coast_tgt_{};
  std::array<bool, 3> coast_on_{};
  // low-passed per-leg mean capacitor voltage feeding the energy anchor
  std::array<double, 3> uc_filt_{};
};

}  // namespace mmcsim
