#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "ghim/auction.hpp"
#include "ghim/encoding.hpp"
#include "ghim/error.hpp"
#include "ghim/experiment.hpp"
#include "ghim/ops.hpp"
#include "ghim/scenario.hpp"
#include "ghim/session.hpp"

namespace py = pybind11;

namespace {

ghim::Scenario scenario_from(const std::string& text, const std::string& base_dir) {
  return ghim::parse_scenario(text, base_dir, "scenario");
}

ghim::Scenario bare(std::uint64_t seed) {
  ghim::Scenario s;
  s.name = "python";
  s.seed = seed;
  return s;
}

class PySandbox {
 public:
  PySandbox(std::uint64_t seed, const std::optional<std::string>& scenario, const std::string& base_dir)
      : sim_(std::make_unique<ghim::Simulation>(scenario ? scenario_from(*scenario, base_dir) : bare(seed))) {}

  std::string execute(const std::string& op, const std::string& args, const std::string& actor,
                      const std::string& role) {
    const auto parsed_role = ghim::parse_role(role);
    if (!parsed_role) throw ghim::UsageError("unknown role '" + role + "'");
    ghim::Caller caller{actor.empty() ? ghim::ActorId() : ghim::ActorId(actor), *parsed_role};
    return ghim::execute_op(*sim_, op, nlohmann::json::parse(args), caller).dump();
  }

  void run() { sim_->run(); }
  void advance_to(ghim::Millis t) { sim_->advance_to(t); }
  ghim::Millis now() const { return sim_->sandbox().clock().now(); }
  std::string log_ndjson() const { return sim_->sandbox().log().to_ndjson(); }
  std::string report() const { return ghim::to_json(ghim::build_report(sim_->sandbox().log(), sim_->scenario())).dump(); }

 private:
  std::unique_ptr<ghim::Simulation> sim_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic issue-marketplace sandbox (native core)";

  // Module-lifetime reference; never released.
  static PyObject* domain_error = PyErr_NewException("ghim._core.GhimError", PyExc_RuntimeError, nullptr);
  m.attr("GhimError") = py::handle(domain_error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ghim::Error& e) {
      PyErr_SetString(domain_error, (std::string(ghim::to_string(e.code())) + ": " + e.what()).c_str());
    } catch (const ghim::UsageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("sha256_hex", [](const py::bytes& data) { return ghim::to_hex(ghim::sha256(std::string_view(data))); },
        py::arg("data"));

  m.def(
      "select_winner",
      [](const std::vector<std::tuple<std::string, std::uint64_t, ghim::Millis>>& bids,
         std::uint64_t reserve) -> std::optional<std::pair<std::string, std::uint64_t>> {
        std::vector<ghim::Bid> v;
        std::uint64_t arrival = 0;
        for (const auto& [bidder, amount, at] : bids) {
          v.push_back({"", ghim::ActorId(bidder), ghim::Money::msat(amount), at, ++arrival});
        }
        const auto w = ghim::select_winner(v, ghim::Money::msat(reserve));
        if (!w) return std::nullopt;
        return std::make_pair(w->bidder.str(), w->price.msat());
      },
      py::arg("bids"), py::arg("reserve_msat"));

  m.def(
      "run_scenario",
      [](const std::string& text, const std::string& base_dir) {
        const auto r = ghim::run_scenario(scenario_from(text, base_dir));
        return py::make_tuple(ghim::to_json(r.report).dump(), r.log_ndjson);
      },
      py::arg("scenario_json"), py::arg("base_dir") = "");

  m.def(
      "compare_baseline",
      [](const std::string& text, const std::string& base_dir) {
        return ghim::to_json(ghim::compare_baseline(scenario_from(text, base_dir))).dump();
      },
      py::arg("scenario_json"), py::arg("base_dir") = "");

  m.def(
      "sweep",
      [](const std::string& text, const std::string& param, const std::vector<double>& values,
         const std::string& base_dir) {
        const auto p = ghim::parse_sweep_param(param);
        if (!p) throw ghim::UsageError("param must be n_bidders or reserve_scale");
        return ghim::to_json(ghim::sweep(scenario_from(text, base_dir), *p, values), *p).dump();
      },
      py::arg("scenario_json"), py::arg("param"), py::arg("values"), py::arg("base_dir") = "");

  m.def(
      "replay",
      [](const std::string& scenario, const std::vector<std::string>& recordings, const std::string& base_dir) {
        std::vector<ghim::SessionRecording> recs;
        for (const auto& r : recordings) recs.push_back(ghim::parse_recording(r));
        ghim::Simulation sim(scenario_from(scenario, base_dir));
        ghim::replay_sessions(sim, recs);
        return sim.sandbox().log().to_ndjson();
      },
      py::arg("scenario_json"), py::arg("recordings"), py::arg("base_dir") = "");

  py::class_<PySandbox>(m, "Sandbox")
      .def(py::init<std::uint64_t, const std::optional<std::string>&, const std::string&>(), py::arg("seed") = 0,
           py::arg("scenario_json") = std::nullopt, py::arg("base_dir") = "")
      .def("execute", &PySandbox::execute, py::arg("op"), py::arg("args_json") = "{}", py::arg("actor") = "",
           py::arg("role") = "admin")
      .def("run", &PySandbox::run)
      .def("advance_to", &PySandbox::advance_to, py::arg("t_ms"))
      .def("now", &PySandbox::now)
      .def("log_ndjson", &PySandbox::log_ndjson)
      .def("report", &PySandbox::report);
}
