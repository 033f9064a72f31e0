#pragma once

#include <vector>

#include "cellwarm/exp/trace.hpp"

namespace cellwarm::experiments {

// Aggregates of one run, computed from its emitted trace rows so the report
// and the trace can never disagree.
// Both components cover the modeled half stack: one film's electrical input
// and the volumetric heat deposited in the half it faces.
struct EnergyReport {
  double ptc_energy_j = 0.0;
  double pulse_energy_j = 0.0;
  double total_j = 0.0;
  bool reached_target = false;
  double time_to_target_s = -1.0;  // first sampled instant at or past the target
  double duration_s = 0.0;
  double final_t_avg_k = 0.0;
  double final_t_range_k = 0.0;
};

// Trapezoidal quadrature over the rows as given (anchor row included). The
// result's resolution is the rows' sampling interval.
EnergyReport energy_accounting(const std::vector<TraceRecord>& rows, double cell_volume_m3,
                               double t_des_k);

}  // namespace cellwarm::experiments
