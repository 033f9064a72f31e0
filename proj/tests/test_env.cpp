#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "cellwarm/env/env.hpp"
#include "cellwarm/errors.hpp"
#include "cellwarm/exp/trace.hpp"
#include "cellwarm/kvfile.hpp"

using namespace cellwarm;
using namespace cellwarm::env;

namespace {

std::string data_path(const std::string& rel) {
  const char* root = std::getenv("CELLWARM_DATA");
  REQUIRE(root != nullptr);
  return std::string(root) + "/" + rel;
}

struct EnvBundle {
  dfn::DfnParameters cell;
  thermal::ThermalParameters th;
  thermal::PtcParameters ptc;
  PreheatEnv::Config cfg;
};

EnvBundle make_bundle() {
  EnvBundle b;
  const KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  b.cell = dfn::DfnParameters::from_kv(kv);
  b.th = thermal::ThermalParameters::from_kv(kv);
  b.ptc = thermal::PtcParameters::from_kv(kv);
  b.cfg.fidelity = dfn::Fidelity::Reduced;
  b.cfg.supervisor.i_upper_a = 6.8;
  return b;
}

}  // namespace

TEST_CASE("reward oracle: quiet warming earns the rate term alone") {
  RewardConfig rc;
  const auto r = compute_reward(rc, 260.0, 260.5, 0.1, 0.3, 5.0, false, false);
  CHECK(r.rate_term == 0.1);
  CHECK(r.guard_term == 0.0);
  CHECK(r.total == 0.1);
}

TEST_CASE("reward oracle: gradient above threshold pays both penalties") {
  RewardConfig rc;
  const auto r = compute_reward(rc, 260.0, 260.5, 0.7, 0.8, 5.0, false, false);
  CHECK(r.rate_term == 0.1);
  CHECK(r.total == -1.6);  // 0.1 - 2*0.8 - 1*(0.8 - 0.7)
}

TEST_CASE("reward oracle: terminal grant keys on the gradient") {
  RewardConfig rc;
  // Ending nonuniform forfeits the bonus.
  auto r = compute_reward(rc, 272.9, 273.2, 0.5, 0.6, 5.0, true, false);
  CHECK(r.guard_term == -200.0);
  // Ending uniform collects it.
  r = compute_reward(rc, 272.9, 273.2, 0.5, 0.4, 5.0, true, false);
  CHECK(r.guard_term == 200.0);
  // A solver failure is always the penalty, uniform or not.
  r = compute_reward(rc, 260.0, 260.1, 0.1, 0.1, 5.0, true, true);
  CHECK(r.guard_term == -200.0);
}

TEST_CASE("reward oracle: threshold boundary stays penalty-free") {
  RewardConfig rc;
  // Exactly at the threshold the guard is inactive (it arms strictly above).
  const auto r = compute_reward(rc, 260.0, 260.5, 0.5, 0.5, 5.0, false, false);
  CHECK(r.guard_term == 0.0);
  const auto just_over = compute_reward(rc, 260.0, 260.5, 0.5, 0.5000001, 5.0,
                                        false, false);
  CHECK(just_over.guard_term < 0.0);
}

TEST_CASE("reward weights scale their terms independently") {
  RewardConfig rc;
  rc.w_rate = 3.0;
  rc.w_range = 0.5;
  rc.w_drange = 2.0;
  const auto r = compute_reward(rc, 260.0, 261.0, 0.6, 1.0, 5.0, false, false);
  CHECK(r.rate_term == doctest::Approx(3.0 * 1.0 / 5.0));
  CHECK(r.guard_term == doctest::Approx(-0.5 * 1.0 - 2.0 * 0.4));
}

TEST_CASE("reset produces a resting cell at the requested point") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 7);
  const auto obs = env.reset(263.15, 0.5);
  CHECK(obs.t_m == doctest::Approx(263.15));
  CHECK(obs.t_out == doctest::Approx(263.15));
  CHECK(obs.soc == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(obs.t_des == doctest::Approx(273.15));
  // At rest the terminal voltage equals the open-circuit difference.
  const double x = b.cell.neg.sto_soc0 + 0.5 * (b.cell.neg.sto_soc100 - b.cell.neg.sto_soc0);
  const double y = b.cell.pos.sto_soc0 + 0.5 * (b.cell.pos.sto_soc100 - b.cell.pos.sto_soc0);
  const double u = b.cell.pos.ocp.value(y) - b.cell.neg.ocp.value(x);
  CHECK(obs.v_t == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("random resets sample inside the configured ranges") {
  auto b = make_bundle();
  b.cfg.episode.init_t_low_k = 255.0;
  b.cfg.episode.init_t_high_k = 265.0;
  b.cfg.episode.init_soc_low = 0.3;
  b.cfg.episode.init_soc_high = 0.8;
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 99);
  for (int k = 0; k < 50; ++k) {
    const auto obs = env.reset();
    CHECK(obs.t_m >= 255.0);
    CHECK(obs.t_m < 265.0);
    CHECK(obs.soc >= 0.3 - 1e-9);
    CHECK(obs.soc <= 0.8 + 1e-9);
  }
}

TEST_CASE("one hold advances five seconds and warms under film plus pulse") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 3);
  env.reset(263.15, 0.5);
  const auto r = env.step({5.0, 1.0, 0.0});
  CHECK(r.time_s == doctest::Approx(5.0));
  CHECK(r.t_avg > 263.15);
  CHECK_FALSE(r.done);
  CHECK_FALSE(r.failed);
  // The supervisor lifted the idle discharge leg to carry the bias.
  CHECK(r.applied.i_discharge_a >= doctest::Approx(1.05 * r.applied.i_charge_a));
  CHECK(r.applied.v_ptc == doctest::Approx(5.0));
  CHECK(r.ptc_energy_j > 0.0);
  CHECK(r.pulse_energy_j > 0.0);
  CHECK(r.reward == doctest::Approx(r.reward_parts.total));
}

TEST_CASE("hold energies vanish with their sources") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 3);
  env.reset(263.15, 0.5);
  auto r = env.step({0.0, 2.0, 2.5});
  CHECK(r.ptc_energy_j == 0.0);
  CHECK(r.pulse_energy_j > 0.0);

  env.reset(263.15, 0.5);
  r = env.step({6.0, 0.0, 0.0});
  CHECK(r.ptc_energy_j > 0.0);
  CHECK(r.pulse_energy_j < 1e-9);  // rest heat only, which is zero
}

TEST_CASE("a zero action in thermal equilibrium is a quiet hold") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 3);
  env.reset(258.15, 0.5);  // ambient tracks the start by default
  const auto r = env.step({0.0, 0.0, 0.0});
  CHECK(r.t_avg == doctest::Approx(258.15).epsilon(1e-9));
  CHECK(std::abs(r.t_range) < 1e-9);
  CHECK(r.reward_parts.rate_term == doctest::Approx(0.0));
  CHECK(r.ptc_energy_j == 0.0);
  CHECK(r.pulse_energy_j == 0.0);
  CHECK(r.net_electrical_j == 0.0);
}

TEST_CASE("episodes terminate on target and on timeout") {
  auto b = make_bundle();
  b.cfg.episode.max_duration_s = 15.0;  // three holds
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 3);
  env.reset(253.15, 0.5);
  auto r = env.step({0.0, 0.0, 0.0});
  CHECK_FALSE(r.done);
  r = env.step({0.0, 0.0, 0.0});
  CHECK_FALSE(r.done);
  r = env.step({0.0, 0.0, 0.0});
  CHECK(r.done);  // timeout
  CHECK(r.reward_parts.guard_term == 200.0);  // ended uniform
  CHECK_THROWS_AS((void)env.step({0.0, 0.0, 0.0}), ConfigError);

  // Near the target one strong film hold finishes the job.
  auto b2 = make_bundle();
  PreheatEnv env2(b2.cell, b2.th, b2.ptc, b2.cfg, 3);
  env2.reset(273.05, 0.5);
  const auto r2 = env2.step({10.0, 0.0, 0.0});
  CHECK(r2.done);
  CHECK(r2.t_avg >= 273.15);
}

TEST_CASE("trace sink sees one hundred substeps per hold") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 3);
  experiments::TraceBuffer buf;
  env.set_trace_sink(&buf);
  env.reset(263.15, 0.5);
  (void)env.step({4.0, 1.0, 1.2});
  // One anchor row at reset plus one row per 0.05 s substep of the 5 s hold.
  const auto& rows = buf.records();
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().t == 0.0);
  CHECK(rows.front().applied_current == 0.0);
  CHECK(rows[1].t == doctest::Approx(0.05));
  CHECK(rows.back().t == doctest::Approx(5.0));
  CHECK(rows.back().hold_end);
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK_FALSE(rows[i].hold_end);
    CHECK(rows[i + 1].t > rows[i].t);
  }
  // Charge-first square wave: the first substep carries -i_charge.
  CHECK(rows[1].applied_current == doctest::Approx(-1.0));
  CHECK(rows.back().applied_current == doctest::Approx(1.2));
}

TEST_CASE("identically seeded environments stay bitwise identical") {
  auto b = make_bundle();
  PreheatEnv e1(b.cell, b.th, b.ptc, b.cfg, 123);
  PreheatEnv e2(b.cell, b.th, b.ptc, b.cfg, 123);
  e1.reset();
  e2.reset();
  for (int k = 0; k < 8; ++k) {
    const control::ActionProposal a{2.0 + 0.5 * k, 1.0 + 0.1 * k, 1.5};
    const auto r1 = e1.step(a);
    const auto r2 = e2.step(a);
    CHECK(r1.obs.v_t == r2.obs.v_t);
    CHECK(r1.t_avg == r2.t_avg);
    CHECK(r1.t_range == r2.t_range);
    CHECK(r1.reward == r2.reward);
    CHECK(r1.ptc_energy_j == r2.ptc_energy_j);
    CHECK(r1.pulse_energy_j == r2.pulse_energy_j);
    if (r1.done) break;
  }
}

TEST_CASE("observation normalization is the documented affine map") {
  Observation o;
  o.soc = 0.75;
  o.t_m = 268.0;
  o.t_out = 293.0;
  o.v_t = 4.2;
  o.t_des = 273.15;
  const auto v = PreheatEnv::normalize(o);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v[3] == doctest::Approx(1.0));
  CHECK(v[4] == doctest::Approx(0.206));
}

TEST_CASE("pulse-only operation drains state of charge across holds") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 11);
  auto obs = env.reset(263.15, 0.6);
  double prev = obs.soc;
  for (int k = 0; k < 6; ++k) {
    const auto r = env.step({0.0, 3.0, 3.5});
    CHECK(r.obs.soc < prev + 1e-12);  // net-discharge bias
    prev = r.obs.soc;
    if (r.done) break;
  }
  CHECK(prev < 0.6);
}

TEST_CASE("film only heating builds an outward gradient") {
  auto b = make_bundle();
  PreheatEnv env(b.cell, b.th, b.ptc, b.cfg, 11);
  env.reset(253.15, 0.5);
  const auto r = env.step({10.0, 0.0, 0.0});
  CHECK(r.obs.t_out > r.obs.t_m);
  CHECK(r.t_range > 0.0);
}
