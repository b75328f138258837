#include "mmcsim/submodule.hpp"

namespace mmcsim {

bool sm_inserted(const SubmoduleState& sm, double i_arm) {
  if (sm.bypassed) return false;
  const bool nonneg = i_arm >= 0.0;
  switch (sm.health) {
    case SmHealth::Healthy:
      return sm.gate;
    case SmHealth::T1Open:
      // negative current can only freewheel through the bottom diode
      return nonneg ? sm.gate : false;
    case SmHealth::T2Open:
      // positive current charges the capacitor through the top diode
      return nonneg ? true : sm.gate;
  }
  return sm.gate;
}

double sm_output_voltage(const SubmoduleState& sm, double i_arm) {
  return sm_inserted(sm, i_arm) ? sm.u_c : 0.0;
}

double capacitor_step(const SubmoduleState& sm, double i_arm, double capacitance,
                      double dt) {
  if (!sm_inserted(sm, i_arm)) return sm.u_c;
  return sm.u_c + i_arm * dt / capacitance;
}

}  // namespace mmcsim
