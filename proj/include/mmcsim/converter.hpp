#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mmcsim/params.hpp"
#include "mmcsim/submodule.hpp"

namespace mmcsim {

struct ArmState {
  std::vector<SubmoduleState> sms;
  double current = 0.0;  // A, positive from the dc rail toward the ac terminal
};

struct ConverterState {
  std::array<ArmState, 6> arms;  // phase-major, see arm_index()
  double t = 0.0;

  ArmState& arm(Phase p, ArmSide s) { return arms[arm_index(p, s)]; }
  const ArmState& arm(Phase p, ArmSide s) const { return arms[arm_index(p, s)]; }
};

/// Gate commands per arm, one entry per submodule (1 = insert).
using GateMatrix = std::array<std::vector<std::uint8_t>, 6>;

struct StepFlags {
  bool diverged = false;        // current or capacitor voltage left the sane range
  bool negative_u_cap = false;  // some capacitor went below zero
};

inline double circulating_current(double i_upper, double i_lower) {
  return 0.5 * (i_upper + i_lower);
}

inline double output_current(double i_upper, double i_lower) {
  return i_upper - i_lower;
}

/// Commanded ac phase current i_x(t) = I_m sin(w t + phi_x + phi).
double output_current_reference(const ConverterParams& p, Phase x, double t);

/// Per-phase dc bus current share plus the ac split across the two arms,
/// evaluated at t = 0; used to start runs at the analytic operating point.
ConverterState make_initial_state(const ConverterParams& p);

/// Arm current magnitude at the configured operating point, used to scale the
/// divergence guard and the detector's polarity band.
double rated_arm_current(const ConverterParams& p);

/// Advances the converter by one step of p.dt.
///
/// Order within the step: arm voltages from the present state (conduction
/// decided by the present current sign), then the per-leg current update, then
/// capacitor charge with the updated current. The ac terminal of each leg
/// behaves as a stiff current sink at the commanded phase current, so any
/// arm-voltage imbalance drives the leg loop through both arm inductors.
StepFlags converter_step(ConverterState& st, const GateMatrix& gates,
                         const ConverterParams& p);

/// Marks one submodule as faulty. Idempotent; throws std::invalid_argument on
/// an out-of-range submodule index.
void inject_fault(ConverterState& st, const FaultSpec& spec, int n_sm);

}  // namespace mmcsim
