#include "fairprice/experiments.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fairprice;

namespace {

std::vector<double> widen(const std::vector<std::uint8_t>& v)
{
  return {v.begin(), v.end()};
}

}  // namespace

PYBIND11_MODULE(_fairprice, m)
{
  m.doc() = "Fair contextual pricing with strategic buyers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularFitError>(m, "SingularFitError", PyExc_ArithmeticError);

  py::enum_<Group>(m, "Group").value("ZERO", Group::Zero).value("ONE", Group::One);

  py::class_<DemandParams>(m, "DemandParams")
      .def(py::init<double, Vector>(), py::arg("alpha"), py::arg("beta"))
      .def_property_readonly("alpha", &DemandParams::alpha)
      .def_property_readonly("beta", &DemandParams::beta)
      .def_property_readonly("dim", &DemandParams::dim)
      .def("expected_demand",
           [](const DemandParams& t, double p, const Vector& x) { return expected_demand(t, p, augment(x)); })
      .def("expected_revenue",
           [](const DemandParams& t, double p, const Vector& x) { return expected_revenue(t, p, augment(x)); });

  py::class_<PricePair>(m, "PricePair")
      .def_readonly("p0", &PricePair::p0)
      .def_readonly("p1", &PricePair::p1)
      .def_readonly("constrained", &PricePair::constrained)
      .def_property_readonly("gap", &PricePair::gap)
      .def("__repr__", [](const PricePair& p) {
        return "PricePair(p0=" + format_double(p.p0) + ", p1=" + format_double(p.p1) +
               ", constrained=" + (p.constrained ? "True" : "False") + ")";
      });

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("theta0", &Environment::theta0)
      .def_property_readonly("theta1", &Environment::theta1)
      .def_property_readonly("q", &Environment::q)
      .def_property_readonly("sigma_eps", &Environment::sigma_eps)
      .def_property_readonly("dim", &Environment::dim);

  m.def("simulation_environment", &simulation_environment, py::arg("dim") = 3, py::arg("q") = 0.5,
        py::arg("sigma_eps") = 1.0);
  m.def("theorem1_environment", &theorem1_env, py::arg("sigma_eps") = 1.0);
  m.def("theorem3_environment", &theorem3_env, py::arg("alpha"));
  m.def("theorem3_optimal_price", &theorem3_optimal_price, py::arg("alpha"), py::arg("group"));

  m.def(
      "optimal_fair_prices",
      [](const DemandParams& t0, const DemandParams& t1, double q, double delta, const Vector& x) {
        return optimal_fair_prices(t0, t1, q, delta, augment(x));
      },
      py::arg("theta0"), py::arg("theta1"), py::arg("q"), py::arg("delta"), py::arg("x"));
  m.def(
      "grid_oracle_prices",
      [](const DemandParams& t0, const DemandParams& t1, double q, double delta, const Vector& x, double step,
         double upper) { return grid_oracle_prices(t0, t1, q, delta, augment(x), GridOptions{step, upper}); },
      py::arg("theta0"), py::arg("theta1"), py::arg("q"), py::arg("delta"), py::arg("x"), py::arg("step") = 1e-3,
      py::arg("upper") = 5.0);
  m.def("report_group", &report_group, py::arg("true_group"), py::arg("delta_hat"), py::arg("manipulation_cost"));

  m.def(
      "verify_properties",
      [](std::size_t grid) {
        const PropertyReport r = verify_properties(linspace(kTheorem3AlphaLow, kTheorem3AlphaHigh, grid),
                                                   linspace(kTheorem3PriceLow, kTheorem3PriceHigh, grid));
        py::dict out;
        for (const auto& c : r.checks) {
          out[py::str(c.name)] = py::dict(py::arg("evaluated") = c.evaluated, py::arg("failures") = c.failures,
                                          py::arg("worst_margin") = c.worst_margin);
        }
        return out;
      },
      py::arg("grid") = 50);

  m.def(
      "simulate",
      [](const std::string& mode, std::size_t horizon, std::uint64_t seed, double delta, double manipulation_cost,
         std::size_t dim, double q, const std::string& oracle) {
        RunConfig c = scenario_defaults(Scenario::SimDefault);
        c.seller.horizon = horizon;
        c.seller.delta = delta;
        c.manipulation_cost = manipulation_cost;
        c.dim = dim;
        c.q = q;
        c.buyer.oracle_kind = oracle_kind_from_string(oracle);
        c.validate();
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run_episode(episode_spec(c, buyer_mode_from_string(mode)), seed);
        }
        py::dict out;
        out["instance_regret"] = Vector(Eigen::Map<const Vector>(tr.instance_regret.data(), tr.size()));
        out["cum_regret"] = Vector(Eigen::Map<const Vector>(tr.cum_regret.data(), tr.size()));
        out["manipulated"] = widen(tr.manipulation_flags);
        out["true_group"] = widen(tr.true_group);
        out["exploration_length"] = tr.exploration_length;
        return out;
      },
      py::arg("mode") = "oracle-learner", py::arg("horizon") = 10000, py::arg("seed") = 1, py::arg("delta") = 0.799,
      py::arg("manipulation_cost") = 0.8, py::arg("dim") = 3, py::arg("q") = 0.5, py::arg("oracle") = "mlp");

  m.def(
      "loglog_slope", [](const std::vector<double>& curve, std::size_t t_min) { return loglog_slope(curve, t_min).slope; },
      py::arg("curve"), py::arg("t_min") = 1);

  m.def(
      "calibrate",
      [](const std::filesystem::path& csv) {
        const LoadResult loaded = load_csv(csv);
        const PreparedSample prepared = preprocess(loaded.records);
        const CalibratedModel model = calibrate_demand(prepared.records);
        const GapReport gap = raw_gap_report(prepared.records);
        py::dict out;
        out["rows"] = loaded.rows;
        out["skipped"] = loaded.skipped;
        out["kept"] = prepared.records.size();
        out["theta0"] = model.theta0;
        out["theta1"] = model.theta1;
        out["sigma_eps"] = model.sigma_eps;
        out["q"] = model.q;
        out["mean_gap"] = gap.mean_gap;
        out["one_sided_p"] = gap.one_sided_p;
        return out;
      },
      py::arg("csv"));
}
