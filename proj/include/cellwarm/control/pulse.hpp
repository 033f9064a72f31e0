#pragma once

#include <vector>

namespace cellwarm::control {

// Alternating charge/discharge square wave held for a fixed window. The
// charge phase comes first in every period; duty is the charge fraction.
struct PulseConfig {
  double frequency_hz = 1.0;
  double duty = 0.5;
  double hold_s = 5.0;

  void validate() const;  // also requires hold_s to hold a whole number of periods
  double period_s() const { return 1.0 / frequency_hz; }
  double charge_s() const { return duty / frequency_hz; }
  double discharge_s() const { return (1.0 - duty) / frequency_hz; }
};

struct Segment {
  double duration_s = 0.0;
  double current_a = 0.0;  // > 0 discharges
};

struct CurrentProfile {
  std::vector<Segment> segments;
  double total_s = 0.0;
  // Time-weighted mean current; the net charge moved per hold is this times
  // total_s.
  double average_current_a() const;
};

// i_charge_a and i_discharge_a are magnitudes; charge segments carry
// -i_charge_a. Negative amplitudes throw ConfigError.
CurrentProfile synthesize_pulse_waveform(const PulseConfig& cfg, double i_charge_a,
                                         double i_discharge_a);

}  // namespace cellwarm::control
