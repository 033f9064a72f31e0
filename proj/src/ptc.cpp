#include "cellwarm/thermal/ptc.hpp"

#include <cmath>
#include <string>

#include "cellwarm/errors.hpp"
#include "cellwarm/functions.hpp"

namespace cellwarm::thermal {

PtcParameters PtcParameters::from_kv(const KvFile& kv, const std::string& prefix) {
  PtcParameters p;
  p.r0_ohm = kv.get_double(prefix + ".r0_ohm");
  p.t0_k = kv.get_double(prefix + ".t0_k");
  p.alpha0_1_k = kv.get_double(prefix + ".alpha0_1_k");
  p.r1_ohm = kv.get_double(prefix + ".r1_ohm");
  p.t1_k = kv.get_double(prefix + ".t1_k");
  p.alpha1_1_k = kv.get_double(prefix + ".alpha1_1_k");
  p.v_max = kv.get_double(prefix + ".v_max");
  p.validate();
  return p;
}

void PtcParameters::validate() const {
  if (!(r0_ohm > 0.0 && r1_ohm > 0.0)) throw ConfigError("film resistances must be positive");
  if (!(v_max > 0.0)) throw ConfigError("ptc.v_max must be positive");
  if (alpha0_1_k == alpha1_1_k) {
    throw ConfigError("degenerate film: equal branch slopes never intersect");
  }
  check_temperature(t0_k);
  check_temperature(t1_k);
}

double curie_temperature(const PtcParameters& p) {
  // r0*exp(a0*(T-t0)) = r1*exp(a1*(T-t1)) solved for T.
  const double t = (std::log(p.r1_ohm) - std::log(p.r0_ohm) + p.alpha0_1_k * p.t0_k -
                    p.alpha1_1_k * p.t1_k) /
                   (p.alpha0_1_k - p.alpha1_1_k);
  if (!std::isfinite(t)) throw DomainError("film branches do not intersect");
  return t;
}

double ptc_resistance(const PtcParameters& p, double t_k) {
  check_temperature(t_k);
  const double tc = curie_temperature(p);
  if (t_k < tc) return p.r0_ohm * std::exp(p.alpha0_1_k * (t_k - p.t0_k));
  return p.r1_ohm * std::exp(p.alpha1_1_k * (t_k - p.t1_k));
}

double ptc_power(const PtcParameters& p, double v, double t_k) {
  if (!(v >= 0.0 && v <= p.v_max)) {
    throw DomainError("film voltage " + std::to_string(v) + " outside [0, " +
                      std::to_string(p.v_max) + "]");
  }
  return v * v / ptc_resistance(p, t_k);
}

}  // namespace cellwarm::thermal
