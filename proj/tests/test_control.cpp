#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmcsim/control.hpp"

using namespace mmcsim;

namespace {

ArmState make_arm(const std::vector<double>& u_c, double current) {
  ArmState arm;
  arm.current = current;
  for (double u : u_c) {
    SubmoduleState sm;
    sm.u_c = u;
    arm.sms.push_back(sm);
  }
  return arm;
}

}  // namespace

TEST_CASE("arm voltage references are complementary around the dc bus") {
  ConverterParams p;
  const double quarter = 0.25 / p.f0;  // wt = pi/2 for phase a

  auto refs = reference_arm_voltages(p, quarter);
  CHECK(refs[0] == doctest::Approx(1e3));   // 12 kV - 11 kV
  CHECK(refs[1] == doctest::Approx(23e3));  // 12 kV + 11 kV

  auto refs0 = reference_arm_voltages(p, 0.0);
  CHECK(refs0[0] == doctest::Approx(12e3));
  CHECK(refs0[1] == doctest::Approx(12e3));

  for (double t : {0.0, 1.3e-3, 7.7e-3, 0.04}) {
    auto r = reference_arm_voltages(p, t);
    for (int ph = 0; ph < 3; ++ph)
      CHECK(r[2 * ph] + r[2 * ph + 1] == doctest::Approx(p.u_dc));
  }
}

TEST_CASE("carriers stay in [0,1] and are evenly shifted") {
  const CarrierBank bank(12, 1.2e3);
  for (int i = 0; i < 12; ++i) {
    for (double t = 0.0; t < 2.0e-3; t += 1.7e-6) {
      const double v = bank.value(i, t);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // shifting by i carriers equals shifting time by i/(n f_c)
    const double shifted = bank.value(0, 1e-4 + i / (12 * 1.2e3));
    CHECK(bank.value(i, 1e-4) == doctest::Approx(shifted).epsilon(1e-9));
  }
}

TEST_CASE("balancing pushes low modules up along positive current") {
  const auto arm = make_arm({1990.0, 2000.0, 2010.0}, 40.0);
  const auto off = balancing_offsets(arm, 2e-3);
  CHECK(off[0] == doctest::Approx(2e-3 * 10.0));   // below mean: insert longer
  CHECK(off[1] == doctest::Approx(0.0));
  CHECK(off[2] == doctest::Approx(-2e-3 * 10.0));  // above mean: insert less
  // discharging current flips the correction
  const auto arm2 = make_arm({1990.0, 2000.0, 2010.0}, -40.0);
  const auto off2 = balancing_offsets(arm2, 2e-3);
  CHECK(off2[0] == doctest::Approx(-2e-3 * 10.0));
  CHECK(off2[2] == doctest::Approx(2e-3 * 10.0));
}

TEST_CASE("balancing offsets are zero-sum and skip bypassed modules") {
  auto arm = make_arm({1980.0, 2004.0, 2026.0, 1995.0}, 12.0);
  arm.sms[2].bypassed = true;
  const auto off = balancing_offsets(arm, 1.5e-3);
  CHECK(off[2] == 0.0);
  CHECK(off[0] + off[1] + off[3] == doctest::Approx(0.0).epsilon(1e-15));
  // equal voltages give no offsets at all
  const auto equal = balancing_offsets(make_arm({2000.0, 2000.0}, 5.0), 1e-3);
  CHECK(equal[0] == 0.0);
  CHECK(equal[1] == 0.0);
}

TEST_CASE("saturated references force all-on / all-off gates") {
  ConverterParams p;
  const CarrierBank bank(p.n_sm, p.f_c);
  ArmState arm = make_arm(std::vector<double>(12, 2000.0), 10.0);
  const std::vector<double> zeros(12, 0.0);

  const auto all_on = cps_pwm_gates(30e3, zeros, arm, bank, p.u_c_nom, 3.3e-4);
  const auto all_off = cps_pwm_gates(-5e3, zeros, arm, bank, p.u_c_nom, 3.3e-4);
  for (int i = 0; i < 12; ++i) {
    CHECK(all_on[i] == 1);
    CHECK(all_off[i] == 0);
  }
}

TEST_CASE("gate duty matches the normalized reference over whole carrier periods") {
  ConverterParams p;
  const CarrierBank bank(p.n_sm, p.f_c);
  ArmState arm = make_arm(std::vector<double>(12, 2000.0), 10.0);
  const std::vector<double> zeros(12, 0.0);

  // constant half reference: every module should be inserted half the time,
  // so the mean inserted count over 3 carrier periods is n/2
  const double dt = 1e-5;
  const int steps = 250;  // exactly 3 carrier periods at 1.2 kHz
  std::vector<int> on(12, 0);
  double sum = 0.0;
  for (int k = 0; k < steps; ++k) {
    const auto g = cps_pwm_gates(12e3, zeros, arm, bank, p.u_c_nom, k * dt);
    for (int i = 0; i < 12; ++i) on[i] += g[i];
    for (int i = 0; i < 12; ++i) sum += g[i];
  }
  CHECK(sum / steps == doctest::Approx(6.0).epsilon(0.02));
  for (int i = 0; i < 12; ++i) {
    // 50% duty means on-time 1/(2 f_c) per carrier period
    const double duty = static_cast<double>(on[i]) / steps;
    CHECK(duty == doctest::Approx(0.5).epsilon(0.03));
  }
}

TEST_CASE("bypassed modules are skipped and the reference is redistributed") {
  ConverterParams p;
  const CarrierBank bank(p.n_sm, p.f_c);
  ArmState arm = make_arm(std::vector<double>(12, 2000.0), 10.0);
  arm.sms[4].bypassed = true;
  const std::vector<double> zeros(12, 0.0);

  const double dt = 1e-5;
  const int steps = 250;
  double sum = 0.0;
  for (int k = 0; k < steps; ++k) {
    const auto g = cps_pwm_gates(11e3, zeros, arm, bank, p.u_c_nom, k * dt);
    CHECK(g[4] == 0);
    for (int i = 0; i < 12; ++i) sum += g[i];
  }
  // 11 kV over 11 active modules at 2 kV each: mean inserted count 5.5
  CHECK(sum / steps == doctest::Approx(5.5).epsilon(0.02));
}

TEST_CASE("suppressor is quiet at zero error and clamps with anti-windup") {
  SuppressorState s;
  const double w2 = 2.0 * 2.0 * std::numbers::pi * 50.0;
  for (int k = 0; k < 100; ++k)
    CHECK(suppressor_step(s, 0.0, 0.0, 5.0, 0.0, 600.0, w2, 2400.0, 1e-5) == 0.0);

  // a huge error saturates the output at the limit and freezes the states
  double out = 0.0;
  for (int k = 0; k < 200000; ++k)
    out = suppressor_step(s, 1e5, 0.0, 5.0, 0.0, 600.0, w2, 2400.0, 1e-5);
  CHECK(out == doctest::Approx(2400.0));
  CHECK(std::abs(s.res) < 2500.0);
}

TEST_CASE("resonant branch accumulates gain at its tuned frequency") {
  SuppressorState s;
  const double w2 = 2.0 * 2.0 * std::numbers::pi * 50.0;
  const double dt = 1e-5;
  const double kr = 600.0;
  double amp1 = 0.0, amp2 = 0.0;
  for (int k = 0; k < 4000; ++k) {  // four periods of 100 Hz
    const double t = k * dt;
    const double out =
        suppressor_step(s, std::sin(w2 * t), 0.0, 0.0, 0.0, kr, w2, 1e9, dt);
    amp1 = std::max(amp1, std::abs(out));
  }
  for (int k = 4000; k < 8000; ++k) {
    const double t = k * dt;
    const double out =
        suppressor_step(s, std::sin(w2 * t), 0.0, 0.0, 0.0, kr, w2, 1e9, dt);
    amp2 = std::max(amp2, std::abs(out));
  }
  // resonantly driven pair: envelope ~ kr * t / 2, i.e. 12 after 40 ms
  CHECK(amp2 > 1.7 * amp1);
  CHECK(amp1 == doctest::Approx(kr * 0.04 / 2.0).epsilon(0.2));
}

TEST_CASE("injection reference phase depends on the fault type") {
  ConverterParams p;
  ControlParams c;
  c.i_2nd = 100.0;
  c.h_inj = 2;
  // at t = 0, phase a: sin(+-pi/2) = +-1
  CHECK(injection_reference(c, p, FaultType::T1Open, Phase::A, 0.0) ==
        doctest::Approx(-100.0));
  CHECK(injection_reference(c, p, FaultType::T2Open, Phase::A, 0.0) ==
        doctest::Approx(100.0));
  // amplitude zero kills the reference
  c.i_2nd = 0.0;
  CHECK(injection_reference(c, p, FaultType::T1Open, Phase::A, 0.0123) == 0.0);

  // first harmonic option follows the same phase rule
  c.i_2nd = 50.0;
  c.h_inj = 1;
  CHECK(injection_reference(c, p, FaultType::T1Open, Phase::A, 0.0) ==
        doctest::Approx(-50.0));
  const double period = 1.0 / p.f0;
  CHECK(injection_reference(c, p, FaultType::T1Open, Phase::A, period) ==
        doctest::Approx(-50.0).epsilon(1e-9));
}
