#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>

#include "cellwarm/control/pulse.hpp"
#include "cellwarm/dfn/model.hpp"
#include "cellwarm/dfn/parameters.hpp"
#include "cellwarm/dfn/state.hpp"
#include "cellwarm/errors.hpp"

using namespace cellwarm;
using namespace cellwarm::dfn;

namespace {

std::string data_path(const std::string& rel) {
  const char* root = std::getenv("CELLWARM_DATA");
  REQUIRE(root != nullptr);
  return std::string(root) + "/" + rel;
}

DfnParameters load_params() {
  return DfnParameters::from_file(data_path("parameters/lipf6_graphite_lco.cfg"));
}

MeshSpec default_mesh() { return MeshSpec{}; }

double rest_voltage(const DfnParameters& p, double soc) {
  const double x = p.neg.sto_soc0 + soc * (p.neg.sto_soc100 - p.neg.sto_soc0);
  const double y = p.pos.sto_soc0 + soc * (p.pos.sto_soc100 - p.pos.sto_soc0);
  return p.pos.ocp.value(y) - p.neg.ocp.value(x);
}

// 100 steps of a 1 Hz square pulse: 0.5 s charge then 0.5 s discharge with a
// 5% heavier discharge leg, 0.05 s substeps.
void run_pulsed(CellModel& model, ElectrochemState& s, double i_charge_a,
                double t_k) {
  const double dt = 0.05;
  for (int k = 0; k < 100; ++k) {
    const bool charging = (k / 10) % 2 == 0;
    const double i = charging ? -i_charge_a : 1.05 * i_charge_a;
    model.step(s, i, t_k, dt);
  }
}

}  // namespace

TEST_CASE("equilibrium rest voltage equals the open-circuit difference") {
  const auto p = load_params();
  const auto spec = default_mesh();
  for (auto fid : {Fidelity::Full, Fidelity::Reduced}) {
    auto model = make_cell_model(p, spec, fid);
    for (double soc_frac : {0.2, 0.5, 0.72, 0.9}) {
      const auto s = model->initial_state(soc_frac);
      CHECK(terminal_voltage(p, model->mesh(), s) ==
            doctest::Approx(rest_voltage(p, soc_frac)).epsilon(1e-9));
      CHECK(std::abs(terminal_voltage(p, model->mesh(), s) -
                     rest_voltage(p, soc_frac)) < 1e-6);
      CHECK(soc(p, model->mesh(), s) == doctest::Approx(soc_frac).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero current from equilibrium is a fixed point") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  const auto s0 = model->initial_state(0.6);
  auto s = s0;
  for (int i = 0; i < 10; ++i) model->step(s, 0.0, 263.15, 0.05);
  CHECK((s.ce - s0.ce).lpNorm<Eigen::Infinity>() < 1e-12);
  // Concentration fields sit near 5e4 mol/m3 where one ulp is ~7e-12; the
  // uniform-column diffusion solve may wiggle them by a few ulps per step.
  CHECK((s.cs_neg - s0.cs_neg).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((s.cs_pos - s0.cs_pos).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((s.i_loc).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(s.time_s == doctest::Approx(0.5));
}

TEST_CASE("lithium is conserved through pulsed operation") {
  const auto p = load_params();
  for (auto fid : {Fidelity::Full, Fidelity::Reduced}) {
    auto model = make_cell_model(p, default_mesh(), fid);
    auto s = model->initial_state(0.6);
    const double li0 = total_lithium(p, model->mesh(), s);
    double worst = 0.0;
    const double dt = 0.05;
    for (int k = 0; k < 100; ++k) {
      const bool charging = (k / 10) % 2 == 0;
      model->step(s, charging ? -3.0 : 3.15, 253.15, dt);
      worst = std::max(worst,
                       std::abs(total_lithium(p, model->mesh(), s) - li0) / li0);
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("soc tracks coulomb counting at one C") {
  const auto p = load_params();
  for (auto fid : {Fidelity::Full, Fidelity::Reduced}) {
    auto model = make_cell_model(p, default_mesh(), fid);
    auto s = model->initial_state(0.7);
    const double i_1c = p.one_c_a();
    for (int k = 0; k < 1200; ++k) model->step(s, i_1c, 298.15, 0.05);
    // 60 s of 1C discharge moves SOC by exactly 60/3600.
    CHECK(soc(p, model->mesh(), s) ==
          doctest::Approx(0.7 - 60.0 / 3600.0).epsilon(1e-6));
  }
}

TEST_CASE("discharge sags the terminal voltage and cold sags it harder") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  const double i_1c = p.one_c_a();

  auto warm = model->initial_state(0.6);
  for (int k = 0; k < 100; ++k) model->step(warm, i_1c, 298.15, 0.05);
  const double v_warm = terminal_voltage(p, model->mesh(), warm);
  CHECK(v_warm < rest_voltage(p, 0.6));

  auto cold = model->initial_state(0.6);
  for (int k = 0; k < 100; ++k) model->step(cold, i_1c, 253.15, 0.05);
  const double v_cold = terminal_voltage(p, model->mesh(), cold);
  CHECK(v_cold < v_warm);
}

TEST_CASE("charging lifts the terminal voltage above rest") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto s = model->initial_state(0.6);
  for (int k = 0; k < 20; ++k) model->step(s, -2.0, 263.15, 0.05);
  CHECK(terminal_voltage(p, model->mesh(), s) > rest_voltage(p, 0.6));
}

TEST_CASE("heat generation is zero at rest and positive under load") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto s = model->initial_state(0.6);
  CHECK(heat_generation(p, model->mesh(), s, 253.15) == doctest::Approx(0.0));

  // Average over one full pulse period so the entropic term, which flips
  // sign with the current, cancels and the dissipative part remains.
  auto period_mean_q = [&](CellModel& m, ElectrochemState& st, double t_k) {
    double acc = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double i = k < 10 ? -2.5 : 1.05 * 2.5;
      m.step(st, i, t_k, 0.05);
      acc += heat_generation(p, m.mesh(), st, t_k);
    }
    return acc / 20.0;
  };

  run_pulsed(*model, s, 2.5, 253.15);
  const double q_cold = period_mean_q(*model, s, 253.15);
  CHECK(q_cold > 0.0);

  // Same amplitude at room temperature dissipates less.
  auto warm_model = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto sw = warm_model->initial_state(0.6);
  run_pulsed(*warm_model, sw, 2.5, 298.15);
  CHECK(period_mean_q(*warm_model, sw, 298.15) < 0.8 * q_cold);
}

TEST_CASE("pulse heat grows superlinearly with amplitude") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  double q[3];
  int idx = 0;
  for (double amp : {1.0, 2.0, 4.0}) {
    auto s = model->initial_state(0.6);
    run_pulsed(*model, s, amp, 253.15);
    q[idx++] = heat_generation(p, model->mesh(), s, 253.15);
  }
  CHECK(q[1] > 2.0 * q[0]);  // joule-dominated: closer to quadratic
  CHECK(q[2] > 2.0 * q[1]);
}

TEST_CASE("reduced model stays close to the full model on a pulse train") {
  const auto p = load_params();
  auto full = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto red = make_cell_model(p, default_mesh(), Fidelity::Reduced);
  auto sf = full->initial_state(0.6);
  auto sr = red->initial_state(0.6);
  const double dt = 0.05;
  double v_gap = 0.0, q_gap_rel = 0.0;
  for (int k = 0; k < 200; ++k) {
    const bool charging = (k / 10) % 2 == 0;
    const double i = charging ? -3.0 : 3.15;
    full->step(sf, i, 253.15, dt);
    red->step(sr, i, 253.15, dt);
    v_gap = std::max(v_gap, std::abs(terminal_voltage(p, full->mesh(), sf) -
                                     terminal_voltage(p, red->mesh(), sr)));
    const double qf = heat_generation(p, full->mesh(), sf, 253.15);
    const double qr = heat_generation(p, red->mesh(), sr, 253.15);
    q_gap_rel = std::max(q_gap_rel, std::abs(qf - qr) / std::max(qf, 1.0));
  }
  CHECK(v_gap < 0.02);       // 20 mV across a 3 A subzero pulse train
  CHECK(q_gap_rel < 0.10);   // heat within 10%
}

TEST_CASE("solver failure leaves the state untouched") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto s = model->initial_state(0.95);
  const auto backup = s;
  // A brutal charge from a nearly full cell cannot converge to a physical
  // solution; the step must throw and roll back.
  CHECK_THROWS_AS(model->step(s, -500.0, 253.15, 0.05), SolverError);
  CHECK(s.time_s == backup.time_s);
  CHECK((s.ce - backup.ce).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((s.cs_neg - backup.cs_neg).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((s.cs_pos - backup.cs_pos).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.i_app_a == backup.i_app_a);

  // The model remains usable afterwards.
  CHECK_NOTHROW(model->step(s, 0.5, 253.15, 0.05));
}

TEST_CASE("interfacial current matches the applied current in both electrodes") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  auto s = model->initial_state(0.5);
  model->step(s, 2.0, 263.15, 0.05);
  const auto& m = model->mesh();
  const double i_density = p.current_density(2.0);
  double neg_sum = 0.0, pos_sum = 0.0;
  for (int c = 0; c < m.spec.n_neg; ++c) {
    neg_sum += p.neg.surface_area_per_volume_1_m * s.i_loc[c] * m.dx[c];
  }
  for (int c = 0; c < m.spec.n_pos; ++c) {
    const int cell = m.spec.n_neg + m.spec.n_sep + c;
    pos_sum += p.pos.surface_area_per_volume_1_m * s.i_loc[m.spec.n_neg + c] *
               m.dx[cell];
  }
  CHECK(std::abs(neg_sum - i_density) < 1e-6 * std::abs(i_density) + 1e-9);
  CHECK(std::abs(pos_sum + i_density) < 1e-6 * std::abs(i_density) + 1e-9);
}

TEST_CASE("mesh construction validates its spec") {
  MeshSpec spec;
  spec.n_neg = 2;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = MeshSpec{};
  spec.n_r = 3;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = MeshSpec{};
  spec.radial_grading = 0.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = MeshSpec{};
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("fidelity names parse") {
  CHECK(fidelity_from_string("full") == Fidelity::Full);
  CHECK(fidelity_from_string("dfn") == Fidelity::Full);
  CHECK(fidelity_from_string("reduced") == Fidelity::Reduced);
  CHECK(fidelity_from_string("spme") == Fidelity::Reduced);
  CHECK_THROWS_AS((void)fidelity_from_string("fast"), ConfigError);
}

TEST_CASE("equilibrium state round-trips through soc") {
  const auto p = load_params();
  auto model = make_cell_model(p, default_mesh(), Fidelity::Full);
  for (double target : {0.05, 0.33, 0.5, 0.77, 0.95}) {
    const auto s = model->initial_state(target);
    CHECK(soc(p, model->mesh(), s) == doctest::Approx(target).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)model->initial_state(-0.1), DomainError);
  CHECK_THROWS_AS((void)model->initial_state(1.2), DomainError);
}
