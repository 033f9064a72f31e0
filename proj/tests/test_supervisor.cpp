#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "cellwarm/control/pulse.hpp"
#include "cellwarm/control/supervisor.hpp"
#include "cellwarm/dfn/model.hpp"
#include "cellwarm/dfn/state.hpp"
#include "cellwarm/errors.hpp"
#include "cellwarm/rng.hpp"

using namespace cellwarm;
using namespace cellwarm::control;

namespace {

std::string data_path(const std::string& rel) {
  const char* root = std::getenv("CELLWARM_DATA");
  REQUIRE(root != nullptr);
  return std::string(root) + "/" + rel;
}

dfn::DfnParameters load_params() {
  return dfn::DfnParameters::from_file(data_path("parameters/lipf6_graphite_lco.cfg"));
}

// Applies the pulse waveform for one hold window and tracks the terminal
// voltage envelope, mirroring what the supervisor certifies.
struct HoldOutcome {
  double v_min = 1e9, v_max = -1e9;
  bool solver_ok = true;
};

HoldOutcome run_hold(dfn::CellModel& model, dfn::ElectrochemState s,
                     const PulseConfig& pc, double i_c, double i_d, double t_k) {
  HoldOutcome out;
  const auto prof = synthesize_pulse_waveform(pc, i_c, i_d);
  const double dt = 0.05;
  try {
    for (const auto& seg : prof.segments) {
      const int n = static_cast<int>(std::llround(seg.duration_s / dt));
      for (int k = 0; k < n; ++k) {
        model.step(s, seg.current_a, t_k, dt);
        const double v = dfn::terminal_voltage(model.params(), model.mesh(), s);
        out.v_min = std::min(out.v_min, v);
        out.v_max = std::max(out.v_max, v);
      }
    }
  } catch (const SolverError&) {
    out.solver_ok = false;
  }
  return out;
}

}  // namespace

TEST_CASE("pulse waveform lays out charge-first periods") {
  PulseConfig pc;  // 1 Hz, 50% duty, 5 s hold
  CHECK_NOTHROW(pc.validate());
  const auto prof = synthesize_pulse_waveform(pc, 2.0, 3.0);
  REQUIRE(prof.segments.size() == 10);
  CHECK(prof.total_s == doctest::Approx(5.0));
  for (size_t i = 0; i < prof.segments.size(); ++i) {
    CHECK(prof.segments[i].duration_s == doctest::Approx(0.5));
    if (i % 2 == 0) {
      CHECK(prof.segments[i].current_a == doctest::Approx(-2.0));
    } else {
      CHECK(prof.segments[i].current_a == doctest::Approx(3.0));
    }
  }
  // Net charge moved: 5 periods x 0.5 s x (3 - 2) A = 2.5 As.
  CHECK(prof.average_current_a() * prof.total_s == doctest::Approx(2.5));

  CHECK_THROWS_AS((void)synthesize_pulse_waveform(pc, -1.0, 3.0), ConfigError);
  CHECK_THROWS_AS((void)synthesize_pulse_waveform(pc, 1.0, -3.0), ConfigError);
}

TEST_CASE("zero amplitudes produce a resting hold") {
  PulseConfig pc;
  const auto prof = synthesize_pulse_waveform(pc, 0.0, 0.0);
  CHECK(prof.total_s == doctest::Approx(pc.hold_s));
  for (const auto& seg : prof.segments) CHECK(seg.current_a == 0.0);
  CHECK(prof.average_current_a() == doctest::Approx(0.0));
}

TEST_CASE("pulse config validation rejects broken setups") {
  PulseConfig pc;
  pc.duty = 0.0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = PulseConfig{};
  pc.duty = 1.0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = PulseConfig{};
  pc.frequency_hz = 0.0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = PulseConfig{};
  pc.hold_s = 5.3;  // not a whole number of 1 s periods
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc = PulseConfig{};
  pc.frequency_hz = 2.0;
  pc.hold_s = 4.5;  // nine 0.5 s periods is fine
  CHECK_NOTHROW(pc.validate());
}

TEST_CASE("supervisor enforces the discharge bias and clamps the film voltage") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  const auto s = model->initial_state(0.5);
  const double t = 263.15;

  // Film voltage outside its window is clamped, never rejected.
  auto a = sup.supervise({12.0, 0.5, 0.6}, s, t);
  CHECK(a.v_ptc == doctest::Approx(10.0));
  CHECK(a.v_clamped);
  a = sup.supervise({-1.0, 0.5, 0.6}, s, t);
  CHECK(a.v_ptc == doctest::Approx(0.0));
  CHECK(a.v_clamped);

  // A lazy discharge proposal is raised to hold the net-discharge bias.
  a = sup.supervise({5.0, 2.0, 1.0}, s, t);
  CHECK(a.i_discharge_a >= doctest::Approx(1.05 * a.i_charge_a));
  CHECK(a.discharge_raised);

  // The zero action passes through untouched.
  a = sup.supervise({0.0, 0.0, 0.0}, s, t);
  CHECK(a.v_ptc == 0.0);
  CHECK(a.i_charge_a == 0.0);
  CHECK(a.i_discharge_a == 0.0);
  CHECK_FALSE(a.v_clamped);
  CHECK_FALSE(a.charge_limited);
  CHECK_FALSE(a.discharge_raised);
}

TEST_CASE("supervision is idempotent") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  Rng rng(31);
  for (int k = 0; k < 5; ++k) {
    const auto s = model->initial_state(rng.uniform(0.3, 0.8));
    const double t = rng.uniform(253.15, 273.15);
    const ActionProposal prop{rng.uniform(0.0, 12.0), rng.uniform(0.0, 8.0),
                              rng.uniform(0.0, 8.0)};
    const auto once = sup.supervise(prop, s, t);
    const auto twice = sup.supervise({once.v_ptc, once.i_charge_a, once.i_discharge_a}, s, t);
    CHECK(twice.v_ptc == doctest::Approx(once.v_ptc));
    CHECK(twice.i_charge_a == doctest::Approx(once.i_charge_a).epsilon(0.02));
    CHECK(twice.i_discharge_a == doctest::Approx(once.i_discharge_a).epsilon(0.02));
  }
}

TEST_CASE("supervisor probes leave the state untouched") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  const auto s = model->initial_state(0.6);
  const auto backup = s;
  (void)sup.max_safe_charge_current(s, 253.15);
  (void)sup.max_safe_discharge_current(s, 253.15, 2.0);
  (void)sup.supervise({5.0, 6.0, 6.0}, s, 253.15);
  CHECK((s.ce - backup.ce).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((s.cs_neg - backup.cs_neg).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((s.cs_pos - backup.cs_pos).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.time_s == backup.time_s);
}

TEST_CASE("certified charge limit is a boundary: safe below, violating above") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);

  for (double soc : {0.4, 0.6, 0.8}) {
    const auto s = model->initial_state(soc);
    const double t = 258.15;
    const double i_max = sup.max_safe_charge_current(s, t);
    CHECK(i_max > 0.0);
    CHECK(i_max <= sc.i_upper_a);
    CHECK(sup.charge_feasible(s, t, i_max));
    if (i_max < sc.i_upper_a - 1e-9) {
      // Interior limit: stepping 10% above must violate the certificate.
      CHECK_FALSE(sup.charge_feasible(s, t, 1.10 * i_max));
      // Re-simulating the certified amplitude keeps v under the cap.
      const auto hold = run_hold(*model, s, sup.pulse(), i_max,
                                 1.05 * i_max, t);
      CHECK(hold.solver_ok);
      CHECK(hold.v_max <= p.v_max + 1e-9);
    }
  }
}

TEST_CASE("cold caps the certified charge current harder than warm") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 20.0;  // wide bracket so temperature is the binding factor
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  const auto s = model->initial_state(0.6);
  const double cold = sup.max_safe_charge_current(s, 253.15);
  const double warm = sup.max_safe_charge_current(s, 273.15);
  CHECK(cold < warm);
}

TEST_CASE("high state of charge leaves no charge headroom") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  const auto low = model->initial_state(0.3);
  const auto high = model->initial_state(0.95);
  CHECK(sup.max_safe_charge_current(high, 253.15) <
        sup.max_safe_charge_current(low, 253.15));
}

TEST_CASE("supervised random proposals respect the voltage window when re-simulated") {
  const auto p = load_params();
  auto model = dfn::make_cell_model(p, dfn::MeshSpec{}, dfn::Fidelity::Reduced);
  SupervisorConfig sc;
  sc.i_upper_a = 6.8;
  sc.v_ptc_max = 10.0;
  Supervisor sup(*model, PulseConfig{}, sc);
  Rng rng(2027);
  for (int k = 0; k < 25; ++k) {
    const double soc = rng.uniform(0.2, 0.9);
    const double t = rng.uniform(253.15, 273.15);
    const auto s = model->initial_state(soc);
    const ActionProposal prop{rng.uniform(0.0, 12.0), rng.uniform(0.0, 8.0),
                              rng.uniform(0.0, 8.0)};
    const auto a = sup.supervise(prop, s, t);
    CHECK(a.i_discharge_a >= 1.05 * a.i_charge_a - 1e-12);
    CHECK(a.v_ptc >= 0.0);
    CHECK(a.v_ptc <= 10.0);
    const auto hold = run_hold(*model, s, sup.pulse(), a.i_charge_a,
                               a.i_discharge_a, t);
    CHECK(hold.solver_ok);
    CHECK(hold.v_max <= p.v_max + 1e-9);
    CHECK(hold.v_min >= p.v_min - 1e-9);
  }
}
