#include "mmcsim/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcsim {

double dc_current(double i_m, double m, double cos_phi) {
  return 0.75 * m * i_m * cos_phi;
}

double unipolarity_threshold(const CriterionInput& in) {
  if (in.u_dc <= 0.0) throw std::invalid_argument("u_dc must be positive");
  if (in.n_sm <= 0) throw std::invalid_argument("n_sm must be positive");
  if (in.f_c <= 0.0) throw std::invalid_argument("f_c must be positive");
  if (in.l_s <= 0.0) throw std::invalid_argument("l_s must be positive");
  if (in.m <= 0.0) throw std::invalid_argument("m must be positive");
  if (in.cos_phi < 0.0 || in.cos_phi > 1.0)
    throw std::invalid_argument("cos_phi must be in [0, 1]");
  if (in.n_faulty < 1 || in.n_faulty > in.n_sm)
    throw std::invalid_argument("n_faulty must be in [1, n_sm]");
  const double mc = in.m * in.cos_phi;
  if (mc >= 2.0) throw std::invalid_argument("m*cos_phi must be below 2");

  const double denom = in.type == FaultType::T1Open ? 2.0 - mc : 2.0 + mc;
  return in.u_dc * in.n_faulty / (denom * in.n_sm * in.f_c * in.l_s);
}

std::vector<SweepCase> builtin_sweep_cases() {
  // id, l_s, cos_phi, f_c, m, n_faulty
  return {
      {1, 8e-3, 1.00, 1.2e3, 0.9, 1},
      {2, 5e-3, 1.00, 1.2e3, 0.9, 1},
      {3, 8e-3, 1.00, 2.0e3, 0.9, 1},
      {4, 8e-3, 1.00, 2.0e3, 0.8, 1},
      {5, 8e-3, 1.00, 1.2e3, 0.9, 1},
      {6, 8e-3, 0.86, 1.2e3, 0.9, 1},
      {7, 8e-3, 0.00, 1.2e3, 0.9, 1},
      {8, 8e-3, 0.00, 1.2e3, 0.9, 2},
      {9, 8e-3, 0.00, 1.2e3, 0.9, 3},
  };
}

std::vector<SweepRow> impact_sweep(std::span<const SweepCase> cases, int n_min,
                                   int n_max, double u_dc) {
  std::vector<SweepRow> rows;
  if (n_min > n_max) throw std::invalid_argument("empty submodule range");
  rows.reserve(cases.size() * static_cast<size_t>(n_max - n_min + 1));
  for (const auto& c : cases) {
    for (int n = n_min; n <= n_max; ++n) {
      SweepRow row;
      row.case_id = c.id;
      row.n_sm = n;
      CriterionInput in{u_dc, n, c.f_c, c.l_s, c.m, c.cos_phi, c.n_faulty,
                        FaultType::T1Open};
      try {
        row.thr_t1 = unipolarity_threshold(in);
        in.type = FaultType::T2Open;
        row.thr_t2 = unipolarity_threshold(in);
      } catch (const std::invalid_argument& e) {
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double faulty_current_component(std::span<const std::uint8_t> gates,
                                std::span<const std::uint8_t> active,
                                double u_c, double l_s, double dt,
                                FaultType type) {
  if (gates.size() != active.size())
    throw std::invalid_argument("gate and activity traces differ in length");
  if (l_s <= 0.0) throw std::invalid_argument("l_s must be positive");
  long sum = 0;
  for (size_t k = 0; k < gates.size(); ++k) {
    if (!active[k]) continue;
    if (type == FaultType::T1Open)
      sum += gates[k] ? 1 : 0;   // missing inserted voltage lifts the current
    else
      sum -= gates[k] ? 0 : 1;   // surplus inserted voltage drags it down
  }
  return static_cast<double>(sum) * u_c * dt / (2.0 * l_s);
}

}  // namespace mmcsim
