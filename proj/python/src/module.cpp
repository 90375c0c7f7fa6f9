#include "gctl/catalog.hpp"
#include "gctl/config.hpp"
#include "gctl/gheat.hpp"
#include "gctl/hjb.hpp"
#include "gctl/measures.hpp"
#include "gctl/parallel.hpp"
#include "gctl/recursive.hpp"
#include "gctl/runner.hpp"
#include "gctl/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace gctl;

namespace {

// Python callables hold the GIL, so loops that call back into Python run on
// the calling thread only.
class SerialScope {
 public:
  SerialScope() : saved_(num_threads()) { set_num_threads(1); }
  ~SerialScope() { set_num_threads(saved_); }
  SerialScope(const SerialScope&) = delete;
  SerialScope& operator=(const SerialScope&) = delete;

 private:
  int saved_;
};

py::dict field_to_dict(const ValueField& f) {
  const auto& g = f.grid;
  py::array_t<double> t(g.nt + 1), x(g.nx);
  py::array_t<double> v({g.nt + 1, g.nx});
  py::array_t<double> pol({g.nt, g.nx});
  auto tv = t.mutable_unchecked<1>();
  auto xv = x.mutable_unchecked<1>();
  auto vv = v.mutable_unchecked<2>();
  auto pv = pol.mutable_unchecked<2>();
  for (int k = 0; k <= g.nt; ++k) tv(k) = g.t(k);
  for (int i = 0; i < g.nx; ++i) xv(i) = g.x(i);
  for (int k = 0; k <= g.nt; ++k)
    for (int i = 0; i < g.nx; ++i) {
      vv(k, i) = f.v(k, i);
      if (k < g.nt) pv(k, i) = f.policy_control(k, i)(0);
    }
  py::dict out;
  out["t"] = t;
  out["x"] = x;
  out["v"] = v;
  out["policy"] = pol;
  return out;
}

SpaceTimeGrid grid_for(const ExperimentConfig& cfg, const CatalogEntry& e) {
  if (cfg.nt > 0) return SpaceTimeGrid(cfg.x_min, cfg.x_max, cfg.nx, cfg.nt, 0.0, cfg.horizon);
  return cfl_grid(e.problem, e.gamma, cfg.x_min, cfg.x_max, cfg.nx, 0.0, cfg.horizon,
                  cfg.cfl_factor);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of gctl";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<CflError>(m, "CflError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<GammaSet>(m, "GammaSet")
      .def_static("interval", &GammaSet::interval, py::arg("sigma_low"), py::arg("sigma_high"))
      .def_static("finite", &GammaSet::finite, py::arg("matrices"))
      .def_property_readonly("dim", &GammaSet::dim)
      .def_property_readonly("sigma_low", &GammaSet::sigma_low)
      .def_property_readonly("sigma_high", &GammaSet::sigma_high)
      .def_property_readonly("extreme_points", &GammaSet::extreme_points)
      .def("__repr__", [](const GammaSet& g) {
        std::ostringstream os;
        if (g.kind() == GammaSet::Kind::kInterval)
          os << "GammaSet.interval(" << g.sigma_low() << ", " << g.sigma_high() << ")";
        else
          os << "GammaSet.finite(<" << g.extreme_points().size() << " matrices of dim " << g.dim()
             << ">)";
        return os.str();
      });

  m.def("g_eval", py::overload_cast<double, const GammaSet&>(&g_eval), py::arg("a"), py::arg("gamma"));
  m.def("g_eval", py::overload_cast<const Mat&, const GammaSet&>(&g_eval), py::arg("a"),
        py::arg("gamma"), "G(A) = 1/2 sup over gamma of tr(gamma gamma^T A)");
  m.def("g_maximizer", &g_maximizer, py::arg("a"), py::arg("gamma"));

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def(py::init([](py::kwargs kw) {
        ExperimentConfig c;
        py::object self = py::cast(c);
        for (auto item : kw) {
          const auto key = py::str(item.first).cast<std::string>();
          if (!py::hasattr(self, key.c_str())) throw DomainError("Config: unknown field '" + key + "'");
          self.attr(key.c_str()) = item.second;
        }
        return self.cast<ExperimentConfig>();
      }))
      .def_readwrite("problem_id", &ExperimentConfig::problem_id)
      .def_readwrite("sigma_low", &ExperimentConfig::sigma_low)
      .def_readwrite("sigma_high", &ExperimentConfig::sigma_high)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("beta", &ExperimentConfig::beta)
      .def_readwrite("strike", &ExperimentConfig::strike)
      .def_readwrite("eta", &ExperimentConfig::eta)
      .def_readwrite("controls", &ExperimentConfig::controls)
      .def_readwrite("x0", &ExperimentConfig::x0)
      .def_readwrite("terminal", &ExperimentConfig::terminal)
      .def_readwrite("x_min", &ExperimentConfig::x_min)
      .def_readwrite("x_max", &ExperimentConfig::x_max)
      .def_readwrite("nx", &ExperimentConfig::nx)
      .def_readwrite("nt", &ExperimentConfig::nt)
      .def_readwrite("cfl_factor", &ExperimentConfig::cfl_factor)
      .def_readwrite("n_paths", &ExperimentConfig::n_paths)
      .def_readwrite("levels", &ExperimentConfig::levels)
      .def_readwrite("mc_nt", &ExperimentConfig::mc_nt)
      .def_readwrite("n_basis", &ExperimentConfig::n_basis)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("tree_steps", &ExperimentConfig::tree_steps)
      .def_readwrite("tolerance", &ExperimentConfig::tolerance)
      .def_readwrite("tree_tolerance", &ExperimentConfig::tree_tolerance)
      .def_readwrite("dpp_t", &ExperimentConfig::dpp_t)
      .def_readwrite("dpp_windows", &ExperimentConfig::dpp_windows)
      .def_readwrite("dpp_decay", &ExperimentConfig::dpp_decay)
      .def_readwrite("deltas", &ExperimentConfig::deltas)
      .def_readwrite("f0_slope", &ExperimentConfig::f0_slope)
      .def_readwrite("nx_list", &ExperimentConfig::nx_list)
      .def_readwrite("padding", &ExperimentConfig::padding)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("threads", &ExperimentConfig::threads);

  m.def("load_config", &load_config, py::arg("path"));
  m.def("catalog_ids", &catalog_ids);
  m.def("subcommands", &subcommands);

  m.def(
      "run",
      [](const std::string& sub, const ExperimentConfig& cfg) {
        std::ostringstream log;
        int status;
        {
          py::gil_scoped_release release;
          status = run(sub, cfg, log);
        }
        return py::make_tuple(status, log.str());
      },
      py::arg("subcommand"), py::arg("config"),
      "Runs one experiment; returns (exit status, log text).");

  m.def(
      "solve_hjb",
      [](const ExperimentConfig& cfg) {
        const auto e = build_catalog_entry(cfg);
        ValueField f;
        {
          py::gil_scoped_release release;
          f = solve_hjb(e.problem, e.gamma, grid_for(cfg, e));
        }
        return field_to_dict(f);
      },
      py::arg("config"), "Solves the HJB equation of a catalog problem; returns t, x, v, policy.");

  m.def(
      "solve_g_heat",
      [](std::function<double(double)> phi, const GammaSet& gamma, double horizon, double x_min,
         double x_max, int nx, int nt) {
        SerialScope serial;
        const auto fn = TestFunction::scalar(std::move(phi), 2, 1.0);
        const SpaceTimeGrid grid =
            nt > 0 ? SpaceTimeGrid(x_min, x_max, nx, nt, 0.0, horizon)
                   : cfl_grid(g_heat_problem(fn, horizon), gamma, x_min, x_max, nx, 0.0, horizon);
        return field_to_dict(solve_g_heat(fn, gamma, horizon, grid));
      },
      py::arg("phi"), py::arg("gamma"), py::arg("horizon") = 1.0, py::arg("x_min") = -6.0,
      py::arg("x_max") = 6.0, py::arg("nx") = 401, py::arg("nt") = 0,
      "Forward G-heat solve; layer k of v is heat time t[k]. nt = 0 picks a CFL-valid step.");

  m.def(
      "mc_sublinear_expectation",
      [](std::function<double(double)> phi, const GammaSet& gamma, double horizon, std::size_t nt,
         int levels, std::size_t n_paths, std::uint64_t seed) {
        SerialScope serial;
        const auto r = mc_sublinear_expectation(TestFunction::scalar(std::move(phi), 2, 1.0), gamma,
                                                horizon, nt, levels, n_paths, seed);
        std::vector<double> theta;
        for (std::size_t k = 0; k < r.argmax_theta.steps(); ++k) theta.push_back(r.argmax_theta.scalar(k));
        py::dict out;
        out["estimate"] = r.estimate;
        out["std_error"] = r.std_error;
        out["argmax_theta"] = theta;
        return out;
      },
      py::arg("phi"), py::arg("gamma"), py::arg("horizon") = 1.0, py::arg("nt") = 1,
      py::arg("levels") = 2, py::arg("n_paths") = 100000, py::arg("seed") = 1);

  m.def(
      "tree_solve",
      [](const ExperimentConfig& cfg, std::size_t control_index) {
        const auto e = build_catalog_entry(cfg);
        const auto sol = tree_gbsde_solve(e.problem, ControlPath::constant(e.problem.controls.at(control_index)),
                                          0.0, vec1(cfg.x0), TreeSpec::from_gamma(e.gamma, cfg.tree_steps));
        py::dict out;
        out["y0"] = sol.y0;
        out["x"] = sol.x;
        out["y"] = sol.y;
        out["z"] = sol.z;
        out["k"] = sol.k;
        return out;
      },
      py::arg("config"), py::arg("control_index") = 0,
      "Tree G-BSDE solve of a catalog problem under one constant control.");

  m.def(
      "dpp_residual",
      [](const ExperimentConfig& cfg, int k_t, int k_s) {
        const auto e = build_catalog_entry(cfg);
        const auto f = solve_hjb(e.problem, e.gamma, grid_for(cfg, e));
        const auto r = dpp_residual(e.problem, e.gamma, f, k_t, k_s);
        py::dict out;
        out["max_residual"] = r.max_residual;
        out["min_residual"] = r.min_residual;
        out["per_node"] = r.per_node;
        out["times"] = py::make_tuple(f.grid.t(k_t), f.grid.t(k_s));
        return out;
      },
      py::arg("config"), py::arg("k_t"), py::arg("k_s"));

  m.def(
      "oracle_compare",
      [](const ExperimentConfig& cfg) {
        const auto e = build_catalog_entry(cfg);
        McOptions mc;
        mc.n_paths = cfg.n_paths;
        mc.levels = cfg.levels;
        mc.nt = cfg.mc_nt;
        mc.n_basis = cfg.n_basis;
        mc.seed = cfg.seed;
        const auto r = oracle_compare(e.problem, e.gamma, cfg.tree_steps, grid_for(cfg, e), cfg.x0, mc,
                                      cfg.tolerance);
        py::dict out;
        out["tree_value"] = r.tree_value;
        out["pde_value"] = r.pde_value;
        out["mc_lower"] = r.mc_lower;
        out["mc_std_error"] = r.mc_std_error;
        out["mc_below_pde"] = r.mc_below_pde;
        return out;
      },
      py::arg("config"));
}
