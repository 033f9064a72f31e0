#include "cellwarm/exp/energy.hpp"

#include "cellwarm/errors.hpp"

namespace cellwarm::experiments {

EnergyReport energy_accounting(const std::vector<TraceRecord>& rows, double cell_volume_m3,
                               double t_des_k) {
  if (rows.empty()) throw ConfigError("cannot account an empty trace");
  if (cell_volume_m3 <= 0.0) throw ConfigError("cell volume must be positive");
  EnergyReport rep;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const TraceRecord& a = rows[i];
    const TraceRecord& b = rows[i + 1];
    const double dt = b.t - a.t;
    if (dt < 0.0) throw ConfigError("trace rows are not time ordered");
    rep.ptc_energy_j += 0.5 * (a.q_ptc + b.q_ptc) * dt;
    rep.pulse_energy_j += 0.5 * (a.q_gen + b.q_gen) * cell_volume_m3 * dt;
  }
  rep.total_j = rep.ptc_energy_j + rep.pulse_energy_j;
  for (const TraceRecord& r : rows) {
    if (r.t_avg >= t_des_k) {
      rep.reached_target = true;
      rep.time_to_target_s = r.t;
      break;
    }
  }
  rep.duration_s = rows.back().t - rows.front().t;
  rep.final_t_avg_k = rows.back().t_avg;
  rep.final_t_range_k = rows.back().t_range;
  return rep;
}

}  // namespace cellwarm::experiments
