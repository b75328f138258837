#pragma once

#include "mmcsim/params.hpp"

namespace mmcsim {

struct SubmoduleState {
  double u_c = 0.0;      // capacitor voltage, V
  bool gate = false;     // commanded insertion (upper switch on)
  SmHealth health = SmHealth::Healthy;
  bool bypassed = false;  // isolated by the protection bypass switch
};

/// Actual insertion of the capacitor into the arm, given the commanded gate,
/// the switch health and the arm current direction. i_arm == 0 counts as >= 0.
///
/// With the top switch failed open the module cannot insert while current is
/// negative (the bottom freewheeling diode takes over). With the bottom switch
/// failed open it cannot bypass while current is positive (the top diode
/// conducts into the capacitor regardless of the gate).
bool sm_inserted(const SubmoduleState& sm, double i_arm);

/// Terminal voltage contributed to the arm: u_c when inserted, else 0.
/// A bypassed module contributes nothing in either direction.
double sm_output_voltage(const SubmoduleState& sm, double i_arm);

/// New capacitor voltage after one step: u_c + i_arm*dt/C while inserted,
/// unchanged otherwise. Does not clamp; a negative result indicates a
/// modeling problem upstream and is flagged by the caller.
double capacitor_step(const SubmoduleState& sm, double i_arm, double capacitance,
                      double dt);

}  // namespace mmcsim
