#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "mmcsim/params.hpp"
#include "mmcsim/submodule.hpp"

namespace mmcsim {

struct DetectorConfig {
  double u_th = 5.0;               // capacitor deviation threshold, V
  double dwell = 5e-3;             // time the deviation must persist, s
  double arm_detect_delay = 10e-3; // arm-level detection latency, s
  bool injection_enabled = true;
  int injection_max_periods = 5;   // fundamental periods the injection may run
  double classifier_band = 6.6;    // polarity dead band on the circulating-
                                   // current deviation, A
  double classifier_settle = 0.0;  // optional post-fault blanking before
                                   // polarity sampling, s (the onset swing
                                   // already carries the fault's polarity)
  bool coast_on_detect = false;    // after classifying, park the faulty leg's
                                   // suppressor at the fault's conduction
                                   // boundary instead of fighting it; keeps
                                   // the arm current one-sided but also stops
                                   // the capacitor divergence that passive
                                   // location feeds on
};

enum class ClassifiedFault { T1, T2, Indeterminate };

const char* to_string(ClassifiedFault c);

/// Arm-level detection stand-in: fires a fixed delay after fault onset and
/// classifies the fault from the polarity of the faulty phase's
/// circulating-current deviation (i_z minus its share of the dc current).
/// A stuck-off top switch only acts while the arm conducts one way and drags
/// the deviation positive; a stuck-off bottom switch drags it negative.
///
/// The polarity window is the most recent fundamental period before the event,
/// clipped to start no earlier than t_fault + classifier_settle. Deviation
/// stays above -band: top-switch fault (a quiet
/// window also lands here: a bottom-switch fault conducts and drags the
/// deviation negative within any window, a top-switch fault may idle until
/// the arm next reverses). Else stays below +band: bottom-switch fault.
/// Else (bipolar): indeterminate.
class ArmFaultDetector {
 public:
  ArmFaultDetector(const DetectorConfig& cfg, double f0, double t_fault);

  /// Call once per step with the circulating-current deviation; latches at
  /// event time.
  void feed(double t, double i_dev);

  bool fired() const { return fired_; }
  double event_time() const { return t_event_; }
  ClassifiedFault type() const { return type_; }

 private:
  double t_event_;
  double window_start_;
  double band_;
  double i_min_ = std::numeric_limits<double>::infinity();
  double i_max_ = -std::numeric_limits<double>::infinity();
  bool fired_ = false;
  ClassifiedFault type_ = ClassifiedFault::Indeterminate;
};

/// Gates the circulating-current injection: runs only after the arm event,
/// only when the operating point actually risks a unipolar arm current, and
/// never longer than injection_max_periods fundamental periods. Stops for
/// good once the module is located or the window expires.
class InjectionSupervisor {
 public:
  InjectionSupervisor(const DetectorConfig& cfg, double f0)
      : cfg_(cfg), period_(1.0 / f0) {}

  bool step(double t, bool event_fired, ClassifiedFault type, bool criterion_risk,
            bool located);

  std::optional<double> start_time() const { return start_; }
  std::optional<double> stop_time() const { return stop_; }

 private:
  DetectorConfig cfg_;
  double period_;
  std::optional<double> start_;
  std::optional<double> stop_;
};

struct SmFlag {
  int sm_index = 0;  // 1-based
  double time = 0.0;
};

/// Per-module threshold/dwell location. Each active module is compared
/// against the mean of the other active modules; the dwell timer accumulates
/// while the deviation exceeds u_th and resets to zero the moment it does not.
/// The first module whose timer reaches the dwell time is flagged; ties within
/// one step resolve to the largest deviation.
class LocationMonitor {
 public:
  LocationMonitor(int n_sm, const DetectorConfig& cfg);

  std::optional<SmFlag> step(const std::vector<SubmoduleState>& sms, double t,
                             double dt);

  bool located() const { return located_.has_value(); }
  std::optional<SmFlag> result() const { return located_; }

 private:
  DetectorConfig cfg_;
  std::vector<double> dwell_;
  std::optional<SmFlag> located_;
};

struct LocationReport {
  std::optional<double> arm_event_time;
  ClassifiedFault classified = ClassifiedFault::Indeterminate;
  bool criterion_risk = false;
  std::optional<double> injection_start;
  std::optional<double> injection_end;
  std::vector<SmFlag> flags;
  std::optional<int> located_sm;        // 1-based
  std::optional<double> flag_time;
  std::optional<double> location_time;  // flag_time - t_fault
};

}  // namespace mmcsim
