#include "mmcsim/params.hpp"

#include <cmath>

namespace mmcsim {

void ConverterParams::validate() const {
  if (u_dc <= 0.0) throw std::invalid_argument("converter.u_dc_v: must be > 0");
  if (u_m <= 0.0) throw std::invalid_argument("converter.u_m_v: must be > 0");
  if (n_sm < 2) throw std::invalid_argument("converter.n_sm: must be >= 2");
  if (c_sm <= 0.0) throw std::invalid_argument("converter.c_f: must be > 0");
  if (u_c_nom <= 0.0)
    throw std::invalid_argument("converter.u_c_nom_v: must be > 0");
  if (std::abs(u_c_nom - u_dc / n_sm) > 1e-6 * u_c_nom)
    throw std::invalid_argument(
        "converter.u_c_nom_v: must equal u_dc_v / n_sm");
  if (l_s <= 0.0) throw std::invalid_argument("converter.l_s_h: must be > 0");
  if (r_s < 0.0) throw std::invalid_argument("converter.r_s_ohm: must be >= 0");
  if (f0 <= 0.0) throw std::invalid_argument("converter.f0_hz: must be > 0");
  if (f_c <= 0.0) throw std::invalid_argument("converter.f_c_hz: must be > 0");
  if (i_m < 0.0) throw std::invalid_argument("converter.i_m_a: must be >= 0");
  if (cos_phi < 0.0 || cos_phi > 1.0)
    throw std::invalid_argument("converter.cos_phi: must be in [0, 1]");
  if (dt <= 0.0) throw std::invalid_argument("converter.dt_s: must be > 0");
  if (dt > 1.0 / (50.0 * f_c))
    throw std::invalid_argument(
        "converter.dt_s: must resolve the carrier (dt <= 1/(50 f_c))");
  const double m = modulation_index();
  if (m <= 0.0 || m > 1.0)
    throw std::invalid_argument(
        "converter.u_m_v: modulation index u_m/(u_dc/2) must be in (0, 1]");
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::A: return "a";
    case Phase::B: return "b";
    default: return "c";
  }
}

const char* to_string(ArmSide s) {
  return s == ArmSide::Upper ? "upper" : "lower";
}

const char* to_string(FaultType f) {
  return f == FaultType::T1Open ? "T1" : "T2";
}

}  // namespace mmcsim
