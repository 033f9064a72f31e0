#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "cellwarm/constants.hpp"
#include "cellwarm/dfn/kinetics.hpp"
#include "cellwarm/dfn/parameters.hpp"
#include "cellwarm/errors.hpp"
#include "cellwarm/functions.hpp"
#include "cellwarm/kvfile.hpp"
#include "cellwarm/rng.hpp"
#include "cellwarm/thermal/model.hpp"
#include "cellwarm/thermal/ptc.hpp"
#include "cellwarm/tridiag.hpp"

using namespace cellwarm;

namespace {

std::string data_path(const std::string& rel) {
  const char* root = std::getenv("CELLWARM_DATA");
  REQUIRE(root != nullptr);
  return std::string(root) + "/" + rel;
}

dfn::DfnParameters load_params() {
  return dfn::DfnParameters::from_file(data_path("parameters/lipf6_graphite_lco.cfg"));
}

}  // namespace

// Frozen values below were computed with an independent double-precision
// implementation of the same closed forms; they pin the shipped parameter
// set as much as the code.

TEST_CASE("open-circuit potentials reproduce frozen reference values") {
  const auto p = load_params();
  CHECK(p.neg.ocp.value(0.8) == doctest::Approx(0.17519318402833506).epsilon(1e-12));
  CHECK(p.pos.ocp.value(0.6) == doctest::Approx(4.027013847342062).epsilon(1e-12));

  const double x50 = p.neg.sto_soc0 + 0.5 * (p.neg.sto_soc100 - p.neg.sto_soc0);
  const double y50 = p.pos.sto_soc0 + 0.5 * (p.pos.sto_soc100 - p.pos.sto_soc0);
  CHECK(x50 == doctest::Approx(0.5013090542538603).epsilon(1e-14));
  CHECK(y50 == doctest::Approx(0.7748358383422482).epsilon(1e-14));
  CHECK(p.neg.ocp.value(x50) == doctest::Approx(0.19477432555970603).epsilon(1e-12));
  CHECK(p.pos.ocp.value(y50) == doctest::Approx(3.9163681508595634).epsilon(1e-12));

  // Rest voltage at 50% and at full charge.
  CHECK(p.pos.ocp.value(y50) - p.neg.ocp.value(x50) ==
        doctest::Approx(3.7215938252998573).epsilon(1e-12));
  CHECK(p.pos.ocp.value(p.pos.sto_soc100) - p.neg.ocp.value(p.neg.sto_soc100) ==
        doctest::Approx(3.8518206633137266).epsilon(1e-12));
}

TEST_CASE("stoichiometry windows and entropic scales match the shipped set") {
  const auto p = load_params();
  CHECK(p.neg.sto_soc0 == doctest::Approx(0.20261810850772044).epsilon(1e-14));
  CHECK(p.neg.sto_soc100 == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(p.pos.sto_soc0 == doctest::Approx(0.9496716766844965).epsilon(1e-14));
  CHECK(p.pos.sto_soc100 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p.neg.entropic_scale == doctest::Approx(4.002679875215723e-05).epsilon(1e-14));
  CHECK(p.pos.entropic_scale == doctest::Approx(1.9524414269595433e-05).epsilon(1e-14));
}

TEST_CASE("graphite potential decreases with lithiation") {
  const auto p = load_params();
  // The tanh fit has tiny ripples; allow them but nothing beyond.
  double prev = p.neg.ocp.value(0.01);
  for (int i = 2; i <= 99; ++i) {
    const double x = i * 0.01;
    const double u = p.neg.ocp.value(x);
    CHECK(u < prev + 1e-4);
    prev = u;
  }
  // Ends well apart: steep dilute branch, flat plateau at high lithiation.
  CHECK(p.neg.ocp.value(0.01) > 0.5);
  CHECK(p.neg.ocp.value(0.99) < 0.2);
}

TEST_CASE("ocp derivative matches central differences") {
  const auto p = load_params();
  const double h = 1e-6;
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (const OcpCurve* c : {&p.neg.ocp, &p.pos.ocp}) {
      const double fd = (c->value(x + h) - c->value(x - h)) / (2.0 * h);
      CHECK(c->derivative(x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  CHECK(p.neg.ocp.derivative(0.5) ==
        doctest::Approx(-0.46073205157632785).epsilon(1e-12));
}

TEST_CASE("ocp rejects stoichiometry outside the unit interval") {
  const auto p = load_params();
  CHECK_THROWS_AS((void)p.neg.ocp.value(-0.001), DomainError);
  CHECK_THROWS_AS((void)p.neg.ocp.value(1.001), DomainError);
  CHECK_THROWS_AS((void)p.pos.ocp.derivative(-0.5), DomainError);
  CHECK_NOTHROW((void)p.neg.ocp.value(0.0));
  CHECK_NOTHROW((void)p.neg.ocp.value(1.0));
}

TEST_CASE("arrhenius factor is one at reference and scales as expected") {
  CHECK(arrhenius_factor(42770.0, 298.15, 298.15) == 1.0);
  CHECK(arrhenius_factor(0.0, 298.15, 253.15) == 1.0);
  CHECK(arrhenius_factor(15000.0, 298.15, 253.15) ==
        doctest::Approx(0.3410879282068725).epsilon(1e-12));
  CHECK(arrhenius_factor(8000.0, 298.15, 273.15) ==
        doctest::Approx(0.7442594979117333).epsilon(1e-12));
  // Positive activation energy: slower when cold, faster when hot.
  CHECK(arrhenius_factor(20000.0, 298.15, 253.15) < 1.0);
  CHECK(arrhenius_factor(20000.0, 298.15, 330.0) > 1.0);
}

TEST_CASE("electrolyte transport reproduces frozen reference values") {
  const auto p = load_params();
  CHECK(p.electrolyte.diffusivity(1000.0, 298.15) ==
        doctest::Approx(2.7877244479038255e-10).epsilon(1e-12));
  CHECK(p.electrolyte.conductivity(1000.0, 298.15) ==
        doctest::Approx(1.1045999999999998).epsilon(1e-12));
  CHECK(p.electrolyte.conductivity(1500.0, 298.15) ==
        doctest::Approx(1.1137249999999999).epsilon(1e-12));
  // Both transport properties slow down in the cold.
  CHECK(p.electrolyte.diffusivity(1000.0, 253.15) <
        p.electrolyte.diffusivity(1000.0, 298.15));
  CHECK(p.electrolyte.conductivity(1000.0, 253.15) <
        p.electrolyte.conductivity(1000.0, 298.15));
}

TEST_CASE("exchange current density reproduces frozen reference values") {
  const auto p = load_params();
  const double i0n = dfn::exchange_current_density(
      p.neg, 1000.0, 0.5 * p.neg.cs_max_mol_m3, 298.15, p.t_ref_k);
  const double i0p = dfn::exchange_current_density(
      p.pos, 1000.0, 0.5 * p.pos.cs_max_mol_m3, 298.15, p.t_ref_k);
  CHECK(i0n == doctest::Approx(7.900401128126567).epsilon(1e-12));
  CHECK(i0p == doctest::Approx(1.457687721051677).epsilon(1e-12));

  // Saturated or empty particle surfaces have no exchange current domain.
  CHECK_THROWS_AS((void)dfn::exchange_current_density(p.neg, 1000.0, -1.0, 298.15,
                                                      p.t_ref_k),
                  DomainError);
  CHECK_THROWS_AS((void)dfn::exchange_current_density(
                      p.neg, 1000.0, p.neg.cs_max_mol_m3 + 1.0, 298.15, p.t_ref_k),
                  DomainError);
  CHECK_THROWS_AS((void)dfn::exchange_current_density(
                      p.neg, -5.0, 0.5 * p.neg.cs_max_mol_m3, 298.15, p.t_ref_k),
                  DomainError);
}

TEST_CASE("butler-volmer current is antisymmetric at alpha one half") {
  const double i0 = 2.3;
  for (double eta : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2}) {
    const double fwd = dfn::butler_volmer_current(i0, eta, 263.15, 0.5);
    const double bwd = dfn::butler_volmer_current(i0, -eta, 263.15, 0.5);
    CHECK(fwd + bwd == 0.0);  // exact: same exponentials, swapped
  }
}

TEST_CASE("butler-volmer derivative and inverse are consistent") {
  const double i0 = 0.8;
  const double t = 270.0;
  for (double alpha : {0.5, 0.4}) {
    for (double eta : {-0.08, -0.01, 0.0, 0.02, 0.09}) {
      const double h = 1e-7;
      const double fd = (dfn::butler_volmer_current(i0, eta + h, t, alpha) -
                         dfn::butler_volmer_current(i0, eta - h, t, alpha)) /
                        (2.0 * h);
      CHECK(dfn::butler_volmer_current_deta(i0, eta, t, alpha) ==
            doctest::Approx(fd).epsilon(1e-6));

      const double i = dfn::butler_volmer_current(i0, eta, t, alpha);
      CHECK(dfn::invert_butler_volmer(i0, i, t, alpha) ==
            doctest::Approx(eta).epsilon(1e-10));
    }
  }
  // Overflow guard trips before exp does.
  CHECK_THROWS_AS((void)dfn::butler_volmer_current(1.0, 50.0, 253.15, 0.5),
                  OverpotentialOverflowError);
}

TEST_CASE("heater film resistance branches meet at the switching temperature") {
  KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  const auto ptc = thermal::PtcParameters::from_kv(kv);
  const double tc = thermal::curie_temperature(ptc);
  CHECK(tc == doctest::Approx(393.0).epsilon(1e-12));

  // The two closed-form branches evaluated at tc agree to roundoff.
  const double below = ptc.r0_ohm * std::exp(ptc.alpha0_1_k * (tc - ptc.t0_k));
  const double above = ptc.r1_ohm * std::exp(ptc.alpha1_1_k * (tc - ptc.t1_k));
  CHECK(std::abs(below - above) / below < 1e-9);
  CHECK(thermal::ptc_resistance(ptc, tc) == doctest::Approx(below).epsilon(1e-12));

  // Switching point equals the upper-branch anchor whenever the anchor
  // resistance lies on the lower branch, wherever that anchor is placed.
  auto moved = ptc;
  moved.t1_k = 360.0;
  moved.r1_ohm = moved.r0_ohm * std::exp(moved.alpha0_1_k * (moved.t1_k - moved.t0_k));
  CHECK(thermal::curie_temperature(moved) == doctest::Approx(360.0).epsilon(1e-12));
}

TEST_CASE("heater film resistance and power reproduce frozen reference values") {
  KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  const auto ptc = thermal::PtcParameters::from_kv(kv);
  CHECK(ptc.r1_ohm == doctest::Approx(0.24177845896706457).epsilon(1e-12));
  CHECK(thermal::ptc_resistance(ptc, 253.15) ==
        doctest::Approx(0.44735919853254286).epsilon(1e-12));
  CHECK(thermal::ptc_power(ptc, 10.0, 253.15) ==
        doctest::Approx(223.53401992856433).epsilon(1e-12));
  CHECK(thermal::ptc_power(ptc, 0.0, 253.15) == 0.0);

  // Self-regulation: far above the switching point the film draws nothing.
  CHECK(thermal::ptc_power(ptc, 10.0, 450.0) < 1e-20);
  // Below the knee the film conducts better when hot (negative slope).
  CHECK(thermal::ptc_resistance(ptc, 273.15) < thermal::ptc_resistance(ptc, 253.15));

  CHECK_THROWS_AS((void)thermal::ptc_power(ptc, -0.1, 253.15), DomainError);
  CHECK_THROWS_AS((void)thermal::ptc_power(ptc, ptc.v_max + 0.1, 253.15), DomainError);
}

TEST_CASE("lumped thermal geometry matches hand-computed constants") {
  KvFile kv = KvFile::load(data_path("parameters/lipf6_graphite_lco.cfg"));
  const auto th = thermal::ThermalParameters::from_kv(kv);
  CHECK(th.face_area_m2() == doctest::Approx(0.028359).epsilon(1e-14));
  CHECK(th.edge_coeff_1_m() == doctest::Approx(24.260375894777667).epsilon(1e-12));
  CHECK(th.half_stack_volume_m3() == doctest::Approx(1.5030270e-4).epsilon(1e-12));
  CHECK(th.full_cell_volume_m3() == doctest::Approx(3.0060540e-4).epsilon(1e-12));
  CHECK(th.full_cell_heat_capacity_j_k() == doctest::Approx(541.08972).epsilon(1e-12));
}

TEST_CASE("parameter validation rejects broken sets") {
  auto p = load_params();
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.neg.thickness_m = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.neg.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.v_min = bad.v_max + 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.neg.sto_soc0 = bad.neg.sto_soc100;  // window collapsed to a point
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("temperature guard rejects nonphysical inputs") {
  CHECK_NOTHROW(check_temperature(253.15));
  CHECK_THROWS_AS(check_temperature(-5.0), DomainError);
  CHECK_THROWS_AS(check_temperature(0.0), DomainError);
}

TEST_CASE("rng streams are deterministic and serializable") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  // Serialization resumes the exact stream, including the cached normal.
  Rng c(77);
  (void)c.normal();  // leaves a spare cached
  std::stringstream buf;
  c.save(buf);
  Rng d;
  d.load(buf);
  for (int i = 0; i < 50; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.uniform() == d.uniform());
  }

  // Forked streams diverge from the parent and from each other.
  Rng base(9);
  Rng f1 = base.fork(1);
  Rng f2 = base.fork(2);
  int same12 = 0, same1b = 0;
  for (int i = 0; i < 64; ++i) {
    const double u1 = f1.uniform(), u2 = f2.uniform(), ub = base.uniform();
    same12 += u1 == u2;
    same1b += u1 == ub;
  }
  CHECK(same12 == 0);
  CHECK(same1b == 0);
}

TEST_CASE("rng moments land where uniform and normal laws put them") {
  Rng r(2024);
  const int n = 100000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  double umin = 1.0, umax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    su2 += u * u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  // 4-sigma bands on the sample moments.
  CHECK(std::abs(su / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(su2 / n - 1.0 / 3.0) < 4.0 * 0.3 / std::sqrt(double(n)));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));

  // Bounded draws respect their interval.
  for (int i = 0; i < 1000; ++i) {
    const double v = r.uniform(-3.5, 2.0);
    CHECK(v >= -3.5);
    CHECK(v < 2.0);
  }
}

TEST_CASE("kv files parse comments, lists and round-trip") {
  const std::string text =
      "# heading comment\n"
      "a.b = 1.5\n"
      "a.c = 2, 4, 8   # trailing comment\n"
      "name = pulse only\n"
      "flag = true\n"
      "\n"
      "count = 42\n";
  KvFile kv = KvFile::from_string(text, "inline");
  CHECK(kv.get_double("a.b") == 1.5);
  CHECK(kv.get_doubles("a.c") == std::vector<double>{2.0, 4.0, 8.0});
  CHECK(kv.get_string("name") == "pulse only");
  CHECK(kv.get_bool("flag"));
  CHECK(kv.get_int("count") == 42);
  CHECK(kv.get_double("missing", -7.0) == -7.0);
  CHECK_THROWS_AS((void)kv.get_double("missing"), ConfigError);
  CHECK_THROWS_AS((void)kv.get_double("name"), ConfigError);
  CHECK(kv.has("a.b"));
  CHECK_FALSE(kv.has("a"));

  const auto round = KvFile::from_string(kv.to_string(), "round");
  CHECK(round.entries() == kv.entries());

  CHECK(kv.keys_with_prefix("a.").size() == 2);
  CHECK_THROWS_AS(KvFile::from_string("novalue\n", "inline"), ConfigError);
}

TEST_CASE("tridiagonal solve matches a dense factorization") {
  Rng r(5);
  const int n = 40;
  Eigen::VectorXd lower(n - 1), upper(n - 1), diag(n), rhs(n);
  for (int i = 0; i < n - 1; ++i) {
    lower[i] = r.uniform(-1.0, 1.0);
    upper[i] = r.uniform(-1.0, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    diag[i] = 4.0 + r.uniform();  // keep it diagonally dominant
    rhs[i] = r.uniform(-2.0, 2.0);
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    dense(i, i) = diag[i];
    if (i > 0) dense(i, i - 1) = lower[i - 1];
    if (i + 1 < n) dense(i, i + 1) = upper[i - 1 + 1];
  }
  const Eigen::VectorXd expect = dense.fullPivLu().solve(rhs);
  Eigen::VectorXd x = rhs;
  tridiag_solve(lower, diag, upper, x);
  CHECK((x - expect).lpNorm<Eigen::Infinity>() < 1e-11);
}
