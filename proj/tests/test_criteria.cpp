#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmcsim/criteria.hpp"

using namespace mmcsim;

TEST_CASE("dc bus current from the power balance") {
  // 750 kW at 24 kV: 31.25 A
  CHECK(dc_current(50.0, 11.0 / 12.0, 10.0 / 11.0) == doctest::Approx(31.25));
  CHECK(dc_current(100.0, 0.8, 0.86) == doctest::Approx(51.6));
  CHECK(dc_current(50.0, 0.9, 0.0) == 0.0);
}

TEST_CASE("threshold spot values for the reference design") {
  CriterionInput in;  // 24 kV, 12 modules, 1.2 kHz, 8 mH, m = 0.9, cos = 1
  in.type = FaultType::T1Open;
  CHECK(unipolarity_threshold(in) == doctest::Approx(189.3939394).epsilon(1e-3));
  in.type = FaultType::T2Open;
  CHECK(unipolarity_threshold(in) == doctest::Approx(71.83908046).epsilon(1e-3));

  // reactive-only load: both types collapse onto U_dc / (2 N f_c L_s)
  in.cos_phi = 0.0;
  const double mid = 24e3 / (2.0 * 12 * 1.2e3 * 8e-3);
  CHECK(unipolarity_threshold(in) == doctest::Approx(mid).epsilon(1e-9));
  in.type = FaultType::T1Open;
  CHECK(unipolarity_threshold(in) == doctest::Approx(mid).epsilon(1e-9));
}

TEST_CASE("threshold scales linearly with the faulty-module count") {
  CriterionInput in;
  in.cos_phi = 0.0;
  in.type = FaultType::T2Open;
  const double one = unipolarity_threshold(in);
  for (int nf = 2; nf <= 4; ++nf) {
    in.n_faulty = nf;
    CHECK(unipolarity_threshold(in) == doctest::Approx(nf * one).epsilon(1e-12));
  }
}

TEST_CASE("threshold rejects non-physical inputs") {
  CriterionInput in;
  in.u_dc = 0.0;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
  in = {};
  in.l_s = -1e-3;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
  in = {};
  in.cos_phi = 1.5;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
  in = {};
  in.n_faulty = 0;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
  in = {};
  in.n_faulty = 13;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
  in = {};
  in.m = 0.0;
  CHECK_THROWS_AS(unipolarity_threshold(in), std::invalid_argument);
}

TEST_CASE("threshold monotonicity over randomized designs") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> u_dc(5e3, 100e3);
  std::uniform_real_distribution<double> f_c(0.4e3, 5e3);
  std::uniform_real_distribution<double> l_s(1e-3, 50e-3);
  std::uniform_real_distribution<double> m(0.05, 1.0);
  std::uniform_real_distribution<double> cosp(0.0, 1.0);
  std::uniform_int_distribution<int> n_sm(4, 40);

  for (int trial = 0; trial < 1000; ++trial) {
    CriterionInput in;
    in.u_dc = u_dc(rng);
    in.f_c = f_c(rng);
    in.l_s = l_s(rng);
    in.m = m(rng);
    in.cos_phi = cosp(rng);
    in.n_sm = n_sm(rng);
    in.n_faulty = 1;
    in.type = FaultType::T1Open;
    const double t1 = unipolarity_threshold(in);
    in.type = FaultType::T2Open;
    const double t2 = unipolarity_threshold(in);
    REQUIRE(t1 > 0.0);
    REQUIRE(t2 > 0.0);
    // a top-switch fault tolerates at least as much load current
    REQUIRE(t1 >= t2);
    if (in.m * in.cos_phi > 1e-9) REQUIRE(t1 > t2);

    // a larger inductor or a faster carrier lowers the threshold
    CriterionInput harder = in;
    harder.l_s *= 2.0;
    REQUIRE(unipolarity_threshold(harder) < t2);
    harder = in;
    harder.f_c *= 1.5;
    in.type = FaultType::T1Open;
    REQUIRE(unipolarity_threshold(harder) < t2);
    REQUIRE(unipolarity_threshold(in) == t1);
  }
}

TEST_CASE("built-in sweep covers the nine studies with expected knobs") {
  const auto cases = builtin_sweep_cases();
  REQUIRE(cases.size() == 9);
  for (size_t i = 0; i < cases.size(); ++i)
    CHECK(cases[i].id == static_cast<int>(i) + 1);
  CHECK(cases[1].l_s == doctest::Approx(5e-3));
  CHECK(cases[2].f_c == doctest::Approx(2e3));
  CHECK(cases[3].m == doctest::Approx(0.8));
  CHECK(cases[5].cos_phi == doctest::Approx(0.86));
  CHECK(cases[6].cos_phi == 0.0);
  CHECK(cases[7].n_faulty == 2);
  CHECK(cases[8].n_faulty == 3);
}

TEST_CASE("impact sweep annotates invalid rows and keeps valid ones") {
  std::vector<SweepCase> cases = {{1, 8e-3, 0.0, 1.2e3, 0.9, 3}};
  const auto rows = impact_sweep(cases, 2, 6);
  REQUIRE(rows.size() == 5);
  // n_faulty = 3 is impossible below 3 modules
  CHECK(!rows[0].error.empty());
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].thr_t1 == doctest::Approx(rows[i].thr_t2).epsilon(1e-12));
  }
  // reactive-only three-module case: thresholds of rows scale as 1/n
  CHECK(rows[1].thr_t1 * 3 == doctest::Approx(rows[4].thr_t1 * 6).epsilon(1e-12));

  CHECK_THROWS_AS(impact_sweep(cases, 5, 4), std::invalid_argument);
}

TEST_CASE("sweep reproduces the faulty-count proportionality") {
  const auto cases = builtin_sweep_cases();
  std::vector<SweepCase> trio(cases.begin() + 6, cases.begin() + 9);
  const auto rows = impact_sweep(trio, 12, 12);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].thr_t1 == doctest::Approx(2.0 * rows[0].thr_t1).epsilon(1e-12));
  CHECK(rows[2].thr_t1 == doctest::Approx(3.0 * rows[0].thr_t1).epsilon(1e-12));
}

TEST_CASE("faulty current increment from a recorded gate trace") {
  // 0.4 ms of forced insertion at 2 kV over 2 * 8 mH lifts the current 50 A
  const size_t n = 40;
  std::vector<std::uint8_t> gates(n, 1), active(n, 1);
  CHECK(faulty_current_component(gates, active, 2e3, 8e-3, 1e-5,
                                 FaultType::T1Open) == doctest::Approx(50.0));
  // for a bottom-switch fault the same trace has no surplus insertion
  CHECK(faulty_current_component(gates, active, 2e3, 8e-3, 1e-5,
                                 FaultType::T2Open) == 0.0);
  // all-off trace: mirror situation
  std::fill(gates.begin(), gates.end(), std::uint8_t{0});
  CHECK(faulty_current_component(gates, active, 2e3, 8e-3, 1e-5,
                                 FaultType::T2Open) == doctest::Approx(-50.0));
  CHECK(faulty_current_component(gates, active, 2e3, 8e-3, 1e-5,
                                 FaultType::T1Open) == 0.0);
  // inactive samples contribute nothing
  std::fill(active.begin(), active.end(), std::uint8_t{0});
  CHECK(faulty_current_component(gates, active, 2e3, 8e-3, 1e-5,
                                 FaultType::T2Open) == 0.0);

  std::vector<std::uint8_t> short_active(n - 1, 1);
  CHECK_THROWS_AS(faulty_current_component(gates, short_active, 2e3, 8e-3, 1e-5,
                                           FaultType::T1Open),
                  std::invalid_argument);
  CHECK_THROWS_AS(faulty_current_component(gates, active, 2e3, -8e-3, 1e-5,
                                           FaultType::T1Open),
                  std::invalid_argument);
}

TEST_CASE("mean forced-conduction time per carrier period at half duty") {
  // a 50% duty gate observed only while the current direction activates the
  // fault conducts for 1/(2 f_c) per carrier period on average
  const double f_c = 1.2e3;
  const double dt = 1e-5;
  const int periods = 240;  // 0.2 s
  const auto steps = static_cast<size_t>(periods / f_c / dt);
  std::vector<std::uint8_t> gates(steps), active(steps, 1);
  for (size_t k = 0; k < steps; ++k) {
    const double frac = std::fmod(k * dt * f_c, 1.0);
    gates[k] = frac < 0.5 ? 1 : 0;
  }
  const double inc = faulty_current_component(gates, active, 2e3, 8e-3, dt,
                                              FaultType::T1Open);
  const double on_time_per_period = inc * 2.0 * 8e-3 / 2e3 / periods;
  CHECK(on_time_per_period ==
        doctest::Approx(1.0 / (2.0 * f_c)).epsilon(0.05));
}
