#include "mmcsim/detection.hpp"

#include <algorithm>
#include <cmath>

namespace mmcsim {

const char* to_string(ClassifiedFault c) {
  switch (c) {
    case ClassifiedFault::T1: return "T1";
    case ClassifiedFault::T2: return "T2";
    default: return "indeterminate";
  }
}

ArmFaultDetector::ArmFaultDetector(const DetectorConfig& cfg, double f0,
                                   double t_fault)
    : t_event_(t_fault + cfg.arm_detect_delay),
      window_start_(
          std::max(t_fault + cfg.classifier_settle, t_event_ - 1.0 / f0)),
      band_(cfg.classifier_band) {}

void ArmFaultDetector::feed(double t, double i_dev) {
  if (fired_) return;
  if (t >= window_start_ && t < t_event_) {
    i_min_ = std::min(i_min_, i_dev);
    i_max_ = std::max(i_max_, i_dev);
  }
  if (t >= t_event_) {
    fired_ = true;
    if (i_min_ > i_max_) {
      type_ = ClassifiedFault::Indeterminate;  // empty window
    } else if (i_min_ > -band_) {
      // a bottom-switch fault acts whenever the arm conducts forward, which
      // the window always samples, so a nonnegative (even quiet) deviation
      // indicts the top switch
      type_ = ClassifiedFault::T1;
    } else if (i_max_ < band_) {
      type_ = ClassifiedFault::T2;
    } else {
      type_ = ClassifiedFault::Indeterminate;
    }
  }
}

bool InjectionSupervisor::step(double t, bool event_fired, ClassifiedFault type,
                               bool criterion_risk, bool located) {
  if (stop_) return false;
  if (start_ && located) {
    stop_ = t;
    return false;
  }
  if (start_ && t - *start_ >= cfg_.injection_max_periods * period_) {
    stop_ = t;
    return false;
  }
  const bool want = cfg_.injection_enabled && event_fired && criterion_risk &&
                    type != ClassifiedFault::Indeterminate && !located;
  if (want && !start_) start_ = t;
  return want && start_;
}

LocationMonitor::LocationMonitor(int n_sm, const DetectorConfig& cfg)
    : cfg_(cfg), dwell_(static_cast<size_t>(n_sm), 0.0) {}

std::optional<SmFlag> LocationMonitor::step(
    const std::vector<SubmoduleState>& sms, double t, double dt) {
  if (located_) return std::nullopt;

  double sum = 0.0;
  int active = 0;
  for (const auto& sm : sms) {
    if (sm.bypassed) continue;
    sum += sm.u_c;
    ++active;
  }
  if (active < 2) return std::nullopt;

  int best = -1;
  double best_dev = 0.0;
  for (size_t i = 0; i < sms.size(); ++i) {
    if (sms[i].bypassed) {
      dwell_[i] = 0.0;
      continue;
    }
    // reference for module i: mean of the other active modules
    const double ref = (sum - sms[i].u_c) / (active - 1);
    const double dev = std::abs(sms[i].u_c - ref);
    if (dev > cfg_.u_th) {
      dwell_[i] += dt;
      if (dwell_[i] >= cfg_.dwell && dev > best_dev) {
        best = static_cast<int>(i);
        best_dev = dev;
      }
    } else {
      dwell_[i] = 0.0;
    }
  }

  if (best < 0) return std::nullopt;
  located_ = SmFlag{best + 1, t};
  return located_;
}

}  // namespace mmcsim
