#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "cellwarm/errors.hpp"
#include "cellwarm/kvfile.hpp"
#include "cellwarm/thermal/model.hpp"
#include "cellwarm/thermal/ptc.hpp"

using namespace cellwarm;
using namespace cellwarm::thermal;

namespace {

std::string data_path(const std::string& rel) {
  const char* root = std::getenv("CELLWARM_DATA");
  REQUIRE(root != nullptr);
  return std::string(root) + "/" + rel;
}

ThermalParameters shipped() {
  KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  return ThermalParameters::from_kv(kv);
}

// Thermal energy of the modeled half stack above an arbitrary datum [J].
double stored_energy(const ThermalState& s, const ThermalParameters& p) {
  const double dx = p.half_thickness_m / p.n_x;
  return p.rho_c_j_m3k * p.face_area_m2() * dx * s.t.sum();
}

}  // namespace

TEST_CASE("shipped thermal parameters load and validate") {
  const auto p = shipped();
  CHECK_NOTHROW(p.validate());
  CHECK(p.width_m == doctest::Approx(0.137));
  CHECK(p.height_m == doctest::Approx(0.207));
  CHECK(p.half_thickness_m == doctest::Approx(5.3e-3));
  CHECK(p.rho_c_j_m3k == doctest::Approx(1.8e6));
  CHECK(p.h_w_m2k == doctest::Approx(10.0));
  CHECK(p.t_ambient_k == doctest::Approx(253.15));
}

TEST_CASE("validation rejects nonphysical thermal parameters") {
  auto p = shipped();
  p.conductivity_w_mk = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = shipped();
  p.n_x = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = shipped();
  p.h_w_m2k = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = shipped();
  p.half_thickness_m = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("uniform state at ambient with no sources is a fixed point") {
  const auto p = shipped();
  ThermalState s = ThermalState::uniform(p, p.t_ambient_k);
  for (int i = 0; i < 200; ++i) step_thermal(s, 0.0, 0.0, p, 0.05);
  CHECK((s.t.array() - p.t_ambient_k).abs().maxCoeff() < 1e-12);
  CHECK(s.time_s == doctest::Approx(10.0));
  const auto st = temperature_stats(s, p);
  CHECK(std::abs(st.t_range) < 1e-12);
  CHECK(st.t_avg == doctest::Approx(p.t_ambient_k));
}

TEST_CASE("adiabatic energy balance closes to 1e-9 relative per step") {
  auto p = shipped();
  p.h_w_m2k = 0.0;  // adiabatic edges
  ThermalState s = ThermalState::uniform(p, 253.15);
  const double q_gen = 3.3e4;    // W/m3, volumetric source
  const double q_ptc = 47.0;     // W, both faces together
  const double dt = 0.05;
  const double input_per_step =
      (q_gen * p.half_stack_volume_m3() + 0.5 * q_ptc) * dt;
  for (int i = 0; i < 400; ++i) {
    const double before = stored_energy(s, p);
    step_thermal(s, q_gen, q_ptc, p, dt);
    const double after = stored_energy(s, p);
    const double err = std::abs(after - before - input_per_step);
    CHECK(err / input_per_step < 1e-9);
  }
  // Film-heated face leads, mid-plane trails.
  const auto st = temperature_stats(s, p);
  CHECK(st.t_out > st.t_m);
  CHECK(st.t_range > 0.0);
  CHECK(st.t_avg > 253.15);
}

TEST_CASE("energy balance with edge convection closes to 1e-9 per step") {
  const auto p = shipped();
  ThermalState s = ThermalState::uniform(p, 263.15);
  const double q_gen = 1.2e4;
  const double q_ptc = 20.0;
  const double dt = 0.05;
  const double dx = p.half_thickness_m / p.n_x;
  const double sink_per_k = p.h_w_m2k * p.edge_coeff_1_m() * p.face_area_m2() * dx;
  for (int i = 0; i < 400; ++i) {
    const Eigen::VectorXd t_before = s.t;
    const double before = stored_energy(s, p);
    step_thermal(s, q_gen, q_ptc, p, dt);
    const double after = stored_energy(s, p);
    // The implicit step evaluates convection at the end-of-step temperatures.
    double loss = 0.0;
    for (int k = 0; k < p.n_x; ++k) loss += sink_per_k * (s.t[k] - p.t_ambient_k);
    const double input =
        (q_gen * p.half_stack_volume_m3() + 0.5 * q_ptc - loss) * dt;
    CHECK(std::abs(after - before - input) / std::abs(input) < 1e-9);
    CHECK((s.t - t_before).minCoeff() > -1e-6);  // warming phase
  }
}

TEST_CASE("quasi-steady convective loss matches the lumped coefficient") {
  const auto p = shipped();
  // Whole-cell edge conductance is h * perimeter * thickness; the modeled
  // half carries half of it.
  const double g_half =
      0.5 * p.h_w_m2k * 2.0 * (p.width_m + p.height_m) * 2.0 * p.half_thickness_m;
  CHECK(g_half == doctest::Approx(0.5 * 0.0729280).epsilon(1e-5));

  ThermalState s = ThermalState::uniform(p, 253.15);
  const double q_ptc = 2.0;  // small, so the profile stays nearly flat
  for (int i = 0; i < 400000 && std::abs(stored_energy(s, p)) > 0; ++i) {
    const double before = s.t.sum();
    step_thermal(s, 0.0, q_ptc, p, 1.0);
    if (std::abs(s.t.sum() - before) < 1e-10) break;
  }
  const auto st = temperature_stats(s, p);
  // At steady state the film input balances the edge loss.
  const double loss = g_half * (st.t_avg - p.t_ambient_k);
  CHECK(loss == doctest::Approx(0.5 * q_ptc).epsilon(1e-3));
}

TEST_CASE("steady face flux reports the film input") {
  auto p = shipped();
  p.h_w_m2k = 5.0;
  ThermalState s = ThermalState::uniform(p, 253.15);
  const double q_ptc = 30.0;
  for (int i = 0; i < 200000; ++i) {
    const double before = s.t.sum();
    step_thermal(s, 0.0, q_ptc, p, 1.0);
    if (std::abs(s.t.sum() - before) < 1e-11) break;
  }
  // Half of the film power crosses the outer face of this half stack.
  CHECK(s.last_face_flux_w_m2 * p.face_area_m2() ==
        doctest::Approx(0.5 * q_ptc).epsilon(1e-6));
}

TEST_CASE("film heating builds a monotone through-plane profile") {
  const auto p = shipped();
  ThermalState s = ThermalState::uniform(p, 253.15);
  for (int i = 0; i < 100; ++i) step_thermal(s, 0.0, 100.0, p, 0.05);
  // Heat enters at the outer face (last cell), so temperature must rise
  // toward it without interior extrema.
  for (int k = 1; k < p.n_x; ++k) CHECK(s.t[k] >= s.t[k - 1] - 1e-12);
  const auto st = temperature_stats(s, p);
  CHECK(st.t_m == doctest::Approx(s.t[0]));
  // Face readout extrapolates half a cell beyond the last center with the
  // inflow gradient, so it exceeds every stored value during film heating.
  CHECK(st.t_out > s.t[p.n_x - 1]);
  const double dx = p.half_thickness_m / p.n_x;
  CHECK(st.t_out == doctest::Approx(s.t[p.n_x - 1] +
                                    s.last_face_flux_w_m2 / p.conductivity_w_mk *
                                        0.5 * dx));
  CHECK(st.t_range == doctest::Approx(st.t_out - st.t_m));
  CHECK(st.t_avg == doctest::Approx(s.t.mean()));
}

TEST_CASE("volumetric heating alone keeps the slab uniform") {
  auto p = shipped();
  p.h_w_m2k = 0.0;
  ThermalState s = ThermalState::uniform(p, 260.0);
  for (int i = 0; i < 200; ++i) step_thermal(s, 5.0e4, 0.0, p, 0.05);
  const auto st = temperature_stats(s, p);
  CHECK(std::abs(st.t_range) < 1e-9);
  // dT/dt = q / (rho c): 5e4 / 1.8e6 K/s for 10 s.
  CHECK(st.t_avg == doctest::Approx(260.0 + 5.0e4 / 1.8e6 * 10.0).epsilon(1e-9));
}

TEST_CASE("hotter film face throttles a film near its switching band") {
  // Resistance rise above the knee caps the power draw; check the coupled
  // pair: a film clamped at 10 V on a slab heated far beyond ambient draws
  // less power than at subzero.
  KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  const auto ptc = PtcParameters::from_kv(kv);
  const double cold = ptc_power(ptc, 10.0, 253.15);
  const double warm = ptc_power(ptc, 10.0, 390.0);
  const double hot = ptc_power(ptc, 10.0, 400.0);
  CHECK(cold < warm);   // below the knee resistance falls as it warms
  CHECK(hot < warm);    // above the knee the film throttles hard
  CHECK(hot < 0.05 * cold);
}
