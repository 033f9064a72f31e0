#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cellwarm/control/pulse.hpp"
#include "cellwarm/control/supervisor.hpp"
#include "cellwarm/env/env.hpp"
#include "cellwarm/exp/energy.hpp"
#include "cellwarm/exp/scenario.hpp"
#include "cellwarm/exp/trace.hpp"
#include "cellwarm/rl/checkpoint.hpp"
#include "cellwarm/rl/evaluate.hpp"
#include "cellwarm/thermal/ptc.hpp"

namespace py = pybind11;
using namespace cellwarm;

namespace {

py::dict report_dict(const experiments::EnergyReport& r) {
  py::dict d;
  d["ptc_energy_j"] = r.ptc_energy_j;
  d["pulse_energy_j"] = r.pulse_energy_j;
  d["total_j"] = r.total_j;
  d["reached_target"] = r.reached_target;
  d["time_to_target_s"] = r.time_to_target_s;
  d["duration_s"] = r.duration_s;
  d["final_t_avg_k"] = r.final_t_avg_k;
  d["final_t_range_k"] = r.final_t_range_k;
  return d;
}

py::dict obs_dict(const env::Observation& o) {
  py::dict d;
  d["soc"] = o.soc;
  d["t_m"] = o.t_m;
  d["t_out"] = o.t_out;
  d["v_t"] = o.v_t;
  d["t_des"] = o.t_des;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cell preheating toolkit: coupled cell/thermal simulation, safety "
            "supervision, and heating-policy evaluation.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<thermal::PtcParameters>(m, "PtcParameters")
      .def(py::init<>())
      .def_readwrite("r0_ohm", &thermal::PtcParameters::r0_ohm)
      .def_readwrite("t0_k", &thermal::PtcParameters::t0_k)
      .def_readwrite("alpha0_1_k", &thermal::PtcParameters::alpha0_1_k)
      .def_readwrite("r1_ohm", &thermal::PtcParameters::r1_ohm)
      .def_readwrite("t1_k", &thermal::PtcParameters::t1_k)
      .def_readwrite("alpha1_1_k", &thermal::PtcParameters::alpha1_1_k)
      .def_readwrite("v_max", &thermal::PtcParameters::v_max);

  m.def("curie_temperature", &thermal::curie_temperature,
        "Temperature where the film's two resistance branches meet.");
  m.def("ptc_resistance", &thermal::ptc_resistance, py::arg("ptc"), py::arg("t_k"));
  m.def("ptc_power", &thermal::ptc_power, py::arg("ptc"), py::arg("v"), py::arg("t_k"),
        "Electrical power of one film at the given drive voltage.");

  m.def(
      "pulse_waveform",
      [](double frequency_hz, double duty, double hold_s, double i_charge_a,
         double i_discharge_a) {
        control::PulseConfig cfg;
        cfg.frequency_hz = frequency_hz;
        cfg.duty = duty;
        cfg.hold_s = hold_s;
        cfg.validate();
        const auto prof = control::synthesize_pulse_waveform(cfg, i_charge_a, i_discharge_a);
        py::list segs;
        for (const auto& s : prof.segments) segs.append(py::make_tuple(s.duration_s, s.current_a));
        return segs;
      },
      py::arg("frequency_hz"), py::arg("duty"), py::arg("hold_s"), py::arg("i_charge_a"),
      py::arg("i_discharge_a"),
      "Square charge/discharge profile for one hold as (duration_s, current_a) "
      "segments; positive current discharges.");

  m.def(
      "reward",
      [](double t_avg_prev, double t_avg_new, double t_range_prev, double t_range_new,
         double hold_s, bool terminal, bool failed) {
        env::RewardConfig cfg;
        const auto r = env::compute_reward(cfg, t_avg_prev, t_avg_new, t_range_prev,
                                           t_range_new, hold_s, terminal, failed);
        py::dict d;
        d["rate_term"] = r.rate_term;
        d["guard_term"] = r.guard_term;
        d["total"] = r.total;
        return d;
      },
      py::arg("t_avg_prev"), py::arg("t_avg_new"), py::arg("t_range_prev"),
      py::arg("t_range_new"), py::arg("hold_s") = 5.0, py::arg("terminal") = false,
      py::arg("failed") = false,
      "Hold reward under the default weights: warming-rate term plus gradient guard.");

  py::class_<experiments::RunConfig>(m, "RunConfig")
      .def_static("load", &experiments::RunConfig::load, py::arg("path"))
      .def_readwrite("seed", &experiments::RunConfig::seed)
      .def_readwrite("scenario", &experiments::RunConfig::scenario)
      .def_readonly("ptc", &experiments::RunConfig::ptc)
      .def_property(
          "fidelity",
          [](const experiments::RunConfig& c) {
            return c.env.fidelity == dfn::Fidelity::Full ? "full" : "reduced";
          },
          [](experiments::RunConfig& c, const std::string& name) {
            c.env.fidelity = dfn::fidelity_from_string(name);
          });

  py::class_<env::PreheatEnv>(m, "PreheatEnv")
      .def(py::init([](const experiments::RunConfig& cfg, std::uint64_t seed) {
             return new env::PreheatEnv(cfg.cell, cfg.thermal, cfg.ptc, cfg.env, seed);
           }),
           py::arg("config"), py::arg("seed") = 1)
      .def("reset", [](env::PreheatEnv& e) { return obs_dict(e.reset()); })
      .def(
          "reset_to",
          [](env::PreheatEnv& e, double t0_k, double soc0) {
            return obs_dict(e.reset(t0_k, soc0));
          },
          py::arg("t0_k"), py::arg("soc0"))
      .def(
          "step",
          [](env::PreheatEnv& e, double v_ptc, double i_charge_a, double i_discharge_a) {
            control::ActionProposal a;
            a.v_ptc = v_ptc;
            a.i_charge_a = i_charge_a;
            a.i_discharge_a = i_discharge_a;
            const auto r = e.step(a);
            py::dict d;
            d["obs"] = obs_dict(r.obs);
            d["reward"] = r.reward;
            d["done"] = r.done;
            d["failed"] = r.failed;
            d["t_avg"] = r.t_avg;
            d["t_range"] = r.t_range;
            d["time_s"] = r.time_s;
            d["applied"] = py::make_tuple(r.applied.v_ptc, r.applied.i_charge_a,
                                          r.applied.i_discharge_a);
            d["ptc_energy_j"] = r.ptc_energy_j;
            d["pulse_energy_j"] = r.pulse_energy_j;
            return d;
          },
          py::arg("v_ptc"), py::arg("i_charge_a"), py::arg("i_discharge_a"),
          "Applies one hold window; amplitudes are proposals the supervisor may shrink.")
      .def_property_readonly("done", &env::PreheatEnv::done)
      .def_property_readonly("time_s", &env::PreheatEnv::time_s)
      .def("observation", [](const env::PreheatEnv& e) { return obs_dict(e.observation()); });

  py::class_<rl::GaussianPolicy>(m, "Policy")
      .def_static("load", [](const std::filesystem::path& p) { return rl::load_policy(p); },
                  py::arg("checkpoint"))
      .def(
          "act",
          [](const rl::GaussianPolicy& pol, const py::dict& obs) {
            env::Observation o;
            o.soc = obs["soc"].cast<double>();
            o.t_m = obs["t_m"].cast<double>();
            o.t_out = obs["t_out"].cast<double>();
            o.v_t = obs["v_t"].cast<double>();
            o.t_des = obs["t_des"].cast<double>();
            const auto a = rl::greedy_action(pol, o);
            return py::make_tuple(a.v_ptc, a.i_charge_a, a.i_discharge_a);
          },
          py::arg("obs"), "Mode action for an observation dict, before supervision.");

  m.def(
      "run_scenario",
      [](const experiments::RunConfig& cfg, const std::string& scenario,
         const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir,
         std::uint64_t seed) {
        const auto res = experiments::run_scenario(
            cfg, experiments::scenario_from_string(scenario), checkpoint, out_dir, seed);
        py::dict d = report_dict(res.report);
        d["episode_return"] = res.episode_return;
        d["net_electrical_j"] = res.net_electrical_j;
        d["failed"] = res.failed;
        d["holds"] = res.holds;
        return d;
      },
      py::arg("config"), py::arg("scenario"), py::arg("checkpoint") = std::filesystem::path(),
      py::arg("out_dir") = std::filesystem::path(), py::arg("seed") = 1,
      "Runs one heating scenario from the configured cold start; writes "
      "trace.csv and report.json when out_dir is given.");

  m.def(
      "report_from_trace",
      [](const std::filesystem::path& trace_csv, double volume_m3, double t_des_k) {
        const auto rows = experiments::read_trace_csv(trace_csv.string());
        return report_dict(experiments::energy_accounting(rows, volume_m3, t_des_k));
      },
      py::arg("trace_csv"), py::arg("volume_m3"), py::arg("t_des_k") = 273.15,
      "Energy accounting over a previously written trace file.");
}
