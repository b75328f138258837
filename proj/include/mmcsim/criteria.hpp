#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmcsim/params.hpp"

namespace mmcsim {

/// Steady-state dc bus current from the power balance: (3m/4) * I_m * cos_phi.
double dc_current(double i_m, double m, double cos_phi);

/// Inputs of the unipolarity threshold check.
struct CriterionInput {
  double u_dc = 24e3;
  int n_sm = 12;
  double f_c = 1.2e3;
  double l_s = 8e-3;
  double m = 0.9;
  double cos_phi = 1.0;
  int n_faulty = 1;
  FaultType type = FaultType::T1Open;
};

/// Largest ac current amplitude at which n_faulty open-switch modules still
/// force the arm current unipolar:
///   I_m = U_dc * N_f / ((2 -+ m cos_phi) * N * f_c * L_s)
/// with the minus sign for top-switch faults and plus for bottom-switch
/// faults. Throws std::invalid_argument on non-physical inputs.
double unipolarity_threshold(const CriterionInput& in);

struct SweepCase {
  int id = 0;
  double l_s = 8e-3;
  double cos_phi = 1.0;
  double f_c = 1.2e3;
  double m = 0.9;
  int n_faulty = 1;
};

/// The nine built-in parameter studies over the submodule count.
std::vector<SweepCase> builtin_sweep_cases();

struct SweepRow {
  int case_id = 0;
  int n_sm = 0;
  double thr_t1 = 0.0;  // A
  double thr_t2 = 0.0;  // A
  std::string error;    // non-empty when this row's inputs were rejected
};

/// Evaluates both thresholds for every case over n_sm in [n_min, n_max].
/// Invalid rows are annotated rather than aborting the sweep.
std::vector<SweepRow> impact_sweep(std::span<const SweepCase> cases, int n_min,
                                   int n_max, double u_dc = 24e3);

/// Analytic arm-current increment caused by the faulty module over a gate
/// trace sampled at dt. `active` marks the samples where the arm current
/// direction makes the fault conduct abnormally (negative for top-switch
/// faults, nonnegative for bottom-switch faults):
///   top:    sum(S * active) * u_c * dt / (2 L_s)      (>= 0)
///   bottom: sum((S - 1) * active) * u_c * dt / (2 L_s) (<= 0)
double faulty_current_component(std::span<const std::uint8_t> gates,
                                std::span<const std::uint8_t> active,
                                double u_c, double l_s, double dt,
                                FaultType type);

}  // namespace mmcsim
