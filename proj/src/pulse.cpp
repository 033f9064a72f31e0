#include "cellwarm/control/pulse.hpp"

#include <cmath>

#include "cellwarm/errors.hpp"

namespace cellwarm::control {

void PulseConfig::validate() const {
  if (!(frequency_hz > 0.0)) throw ConfigError("pulse frequency must be positive");
  if (!(duty > 0.0 && duty < 1.0)) throw ConfigError("pulse duty outside (0, 1)");
  if (!(hold_s > 0.0)) throw ConfigError("hold window must be positive");
  const double periods = hold_s * frequency_hz;
  if (std::abs(periods - std::round(periods)) > 1e-9 * periods) {
    throw ConfigError("hold window must contain a whole number of pulse periods");
  }
}

double CurrentProfile::average_current_a() const {
  double sum = 0.0;
  for (const Segment& s : segments) sum += s.duration_s * s.current_a;
  return total_s > 0.0 ? sum / total_s : 0.0;
}

CurrentProfile synthesize_pulse_waveform(const PulseConfig& cfg, double i_charge_a,
                                         double i_discharge_a) {
  cfg.validate();
  if (i_charge_a < 0.0 || i_discharge_a < 0.0) {
    throw ConfigError("pulse amplitudes are magnitudes and must be nonnegative");
  }
  const int periods = static_cast<int>(std::round(cfg.hold_s * cfg.frequency_hz));
  CurrentProfile out;
  out.segments.reserve(2 * static_cast<std::size_t>(periods));
  for (int k = 0; k < periods; ++k) {
    out.segments.push_back({cfg.charge_s(), -i_charge_a});
    out.segments.push_back({cfg.discharge_s(), i_discharge_a});
  }
  out.total_s = cfg.hold_s;
  return out;
}

}  // namespace cellwarm::control
