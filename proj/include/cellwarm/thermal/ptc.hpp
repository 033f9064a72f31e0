#pragma once

#include <string>

#include "cellwarm/kvfile.hpp"

namespace cellwarm::thermal {

// Self-regulating resistive heater film. Resistance follows two exponential
// branches that meet at the switching temperature returned by
// curie_temperature; below it the film conducts well, above it resistance
// climbs steeply and the film throttles itself.
struct PtcParameters {
  double r0_ohm = 0.0;
  double t0_k = 0.0;
  double alpha0_1_k = 0.0;  // branch slope below the knee, typically < 0
  double r1_ohm = 0.0;
  double t1_k = 0.0;
  double alpha1_1_k = 0.0;  // branch slope above the knee, > 0
  double v_max = 0.0;

  static PtcParameters from_kv(const KvFile& kv, const std::string& prefix = "ptc");
  void validate() const;
};

// Temperature where the two resistance branches intersect.
double curie_temperature(const PtcParameters& p);

// Film resistance [ohm] at film temperature t_k.
double ptc_resistance(const PtcParameters& p, double t_k);

// Electrical power [W] drawn by one film at drive voltage v. v outside
// [0, v_max] throws DomainError.
double ptc_power(const PtcParameters& p, double v, double t_k);

}  // namespace cellwarm::thermal
