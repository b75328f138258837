#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmcsim {

enum class Phase { A = 0, B = 1, C = 2 };

enum class ArmSide { Upper = 0, Lower = 1 };

/// Health of the two switch positions in a half-bridge submodule.
enum class SmHealth { Healthy, T1Open, T2Open };

enum class FaultType { T1Open, T2Open };

inline SmHealth to_health(FaultType f) {
  return f == FaultType::T1Open ? SmHealth::T1Open : SmHealth::T2Open;
}

/// Flat arm index, phase-major: a-upper, a-lower, b-upper, b-lower, c-upper, c-lower.
inline int arm_index(Phase p, ArmSide s) {
  return static_cast<int>(p) * 2 + static_cast<int>(s);
}

/// Electrical angle offset of each phase: a = 0, b = -2pi/3, c = +2pi/3.
inline double phase_angle_offset(Phase p) {
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  switch (p) {
    case Phase::A: return 0.0;
    case Phase::B: return -third;
    default: return third;
  }
}

struct ConverterParams {
  double u_dc = 24e3;      // pole-to-pole dc bus voltage, V
  double u_m = 11e3;       // ac phase voltage amplitude, V
  int n_sm = 12;           // submodules per arm
  double c_sm = 3e-3;      // submodule capacitance, F
  double u_c_nom = 2e3;    // nominal submodule capacitor voltage, V (= u_dc / n_sm)
  double l_s = 8e-3;       // arm inductance, H
  double r_s = 0.1;        // arm resistance, Ohm
  double f0 = 50.0;        // fundamental frequency, Hz
  double f_c = 1.2e3;      // carrier frequency, Hz
  double i_m = 50.0;       // ac phase current amplitude, A
  double cos_phi = 10.0 / 11.0;  // power factor at the operating point
  double dt = 1e-5;        // integration step, s

  double modulation_index() const { return u_m / (0.5 * u_dc); }
  double omega() const { return 2.0 * std::numbers::pi * f0; }
  // current lags the internal emf by acos(cos_phi)
  double phi() const { return -std::acos(std::clamp(cos_phi, -1.0, 1.0)); }

  /// Throws std::invalid_argument when parameters are out of range or inconsistent.
  void validate() const;
};

struct FaultSpec {
  Phase phase = Phase::A;
  ArmSide arm = ArmSide::Upper;
  int sm_index = 1;  // 1-based position within the arm
  FaultType type = FaultType::T1Open;
  double t_fault = 0.0;  // s
};

const char* to_string(Phase p);
const char* to_string(ArmSide s);
const char* to_string(FaultType f);

}  // namespace mmcsim
