#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "spgs/driver.hpp"
#include "spgs/error.hpp"

namespace py = pybind11;
using namespace spgs;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const GridSpec& g) {
  std::vector<py::ssize_t> s{3};
  for (int a = 0; a < g.dim; ++a) s.push_back(g.points[a]);
  return s;
}

CArray to_numpy(const SpinorField& f) {
  CArray out(shape_of(f.grid()));
  cplx* p = out.mutable_data();
  for (int c = 0; c < 3; ++c) std::memcpy(p + c * f.points(), f[c].data(), f.points() * sizeof(cplx));
  return out;
}

SpinorField from_numpy(const CArray& a, const GridSpec& g) {
  const auto want = shape_of(g);
  if (a.ndim() != static_cast<py::ssize_t>(want.size()))
    throw Error(ErrorKind::invalid_argument, "array must have shape (3, *grid.points)");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (a.shape(static_cast<py::ssize_t>(i)) != want[i])
      throw Error(ErrorKind::invalid_argument, "array shape does not match the grid");
  SpinorField f(g);
  const cplx* p = a.data();
  for (int c = 0; c < 3; ++c) std::memcpy(f[c].data(), p + c * f.points(), f.points() * sizeof(cplx));
  return f;
}

py::dict energy_dict(const EnergyBreakdown& e) {
  py::dict d;
  d["kin"] = e.kin;
  d["pot"] = e.pot;
  d["spin"] = e.spin;
  d["rot"] = e.rot;
  d["soc"] = e.soc;
  d["total"] = e.total;
  d["mu"] = e.mu;
  return d;
}

py::dict record_dict(const ConvergenceRecord& r) {
  std::vector<double> energy, ediff, res, wdiff, theta, beta, secs;
  std::vector<int> bt;
  for (const auto& row : r.rows) {
    energy.push_back(row.energy);
    ediff.push_back(row.energy_diff);
    res.push_back(row.residual_inf);
    wdiff.push_back(row.wavefn_diff_inf);
    theta.push_back(row.theta);
    beta.push_back(row.beta);
    bt.push_back(row.backtracks);
    secs.push_back(row.elapsed_seconds);
  }
  py::dict d;
  d["energy"] = energy;
  d["energy_diff"] = ediff;
  d["residual_inf"] = res;
  d["wavefn_diff_inf"] = wdiff;
  d["theta"] = theta;
  d["beta"] = beta;
  d["backtracks"] = bt;
  d["elapsed_seconds"] = secs;
  d["converged"] = r.converged;
  d["stalled"] = r.stalled;
  d["iterations"] = r.iterations();
  return d;
}

py::dict solve_dict(const SolveResult& r) {
  py::dict d;
  d["phi"] = to_numpy(r.phi);
  d["energy"] = energy_dict(r.energy);
  d["record"] = record_dict(r.record);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ground states of rotating spin-orbit-coupled spin-1 condensates";

  static py::exception<Error> error(m, "SpgsError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<GridSpec>(m, "Grid")
      .def(py::init([](int dim, std::vector<double> half_width, std::vector<int> points) {
             if (half_width.size() == 1) half_width.assign(static_cast<std::size_t>(dim), half_width[0]);
             if (points.size() == 1) points.assign(static_cast<std::size_t>(dim), points[0]);
             return make_grid(dim, half_width, points);
           }),
           py::arg("dim"), py::arg("half_width"), py::arg("points"))
      .def(py::init([](int dim, double l, int n) { return make_grid(dim, l, n); }), py::arg("dim"),
           py::arg("half_width"), py::arg("points"))
      .def_readonly("dim", &GridSpec::dim)
      .def_property_readonly("points", [](const GridSpec& g) {
        return std::vector<int>(g.points.begin(), g.points.begin() + g.dim);
      })
      .def_property_readonly("half_width", [](const GridSpec& g) {
        return std::vector<double>(g.half_width.begin(), g.half_width.begin() + g.dim);
      })
      .def("h", &GridSpec::h, py::arg("axis") = 0)
      .def("refined", &GridSpec::refined)
      .def_property_readonly("cell_volume", &GridSpec::cell_volume)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; })
      .def("__repr__", &GridSpec::describe);

  py::class_<TrapPotential>(m, "Trap")
      .def_static("harmonic", &TrapPotential::harmonic, py::arg("gx") = 1.0, py::arg("gy") = 1.0, py::arg("gz") = 1.0)
      .def_static("harmonic_plus_quartic", &TrapPotential::harmonic_plus_quartic, py::arg("a2") = -0.2,
                  py::arg("a4") = 0.5);

  py::class_<PhysicsParams>(m, "Physics")
      .def(py::init([](double c0, double c1, double omega, double gamma, const TrapPotential& trap) {
             PhysicsParams p;
             p.c0 = c0;
             p.c1 = c1;
             p.omega = omega;
             p.gamma = gamma;
             p.trap = trap;
             p.validate();
             return p;
           }),
           py::arg("c0") = 0.0, py::arg("c1") = 0.0, py::arg("omega") = 0.0, py::arg("gamma") = 0.0,
           py::arg("trap") = TrapPotential::harmonic())
      .def_readwrite("c0", &PhysicsParams::c0)
      .def_readwrite("c1", &PhysicsParams::c1)
      .def_readwrite("omega", &PhysicsParams::omega)
      .def_readwrite("gamma", &PhysicsParams::gamma);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](const std::string& preconditioner, const std::string& stop, double tol, int max_iters) {
             SolverConfig c;
             c.preconditioner = parse_preconditioner(preconditioner);
             c.stop = parse_stop_criterion(stop);
             c.tol = tol;
             c.max_iters = max_iters;
             c.validate();
             return c;
           }),
           py::arg("preconditioner") = "combined", py::arg("stop") = "energy_diff", py::arg("tol") = 1e-14,
           py::arg("max_iters") = 100000)
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("theta_trial", &SolverConfig::theta_trial)
      .def_readwrite("backtrack_factor", &SolverConfig::backtrack_factor)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("max_backtracks", &SolverConfig::max_backtracks);

  m.def("initial_guess", [](const std::string& tags, const GridSpec& g, const PhysicsParams& p) {
    return to_numpy(make_spinor_guess(parse_guess_triple(tags), g, p));
  }, py::arg("tags"), py::arg("grid"), py::arg("physics"),
        "Spinor initial state from one tag or three comma-separated tags (a b bbar c cbar d dbar e ebar f).");

  m.def("energy", [](const CArray& phi, const GridSpec& g, const PhysicsParams& p) {
    return energy_dict(energy(from_numpy(phi, g), p));
  }, py::arg("phi"), py::arg("grid"), py::arg("physics"));

  m.def("hamiltonian", [](const CArray& phi, const GridSpec& g, const PhysicsParams& p) {
    return to_numpy(apply_hamiltonian(from_numpy(phi, g), p));
  }, py::arg("phi"), py::arg("grid"), py::arg("physics"));

  m.def("residual", [](const CArray& phi, const GridSpec& g, const PhysicsParams& p) {
    return to_numpy(residual(from_numpy(phi, g), p));
  }, py::arg("phi"), py::arg("grid"), py::arg("physics"));

  m.def("normalize", [](const CArray& phi, const GridSpec& g) { return to_numpy(normalize(from_numpy(phi, g))); },
        py::arg("phi"), py::arg("grid"));

  m.def("prolongate", [](const CArray& phi, const GridSpec& g, const GridSpec& fine) {
    return to_numpy(prolongate(from_numpy(phi, g), fine));
  }, py::arg("phi"), py::arg("grid"), py::arg("fine"));

  m.def("diagnose", [](const CArray& phi, const GridSpec& g, const PhysicsParams& p) {
    const Diagnostics d = diagnose(from_numpy(phi, g), p);
    py::dict out = energy_dict(d.energy);
    out["residual_inf"] = d.residual_inf;
    out["virial"] = d.virial ? py::cast(*d.virial) : py::none();
    out["warnings"] = d.existence.messages;
    return out;
  }, py::arg("phi"), py::arg("grid"), py::arg("physics"));

  m.def("pcg_solve", [](const CArray& phi0, const GridSpec& g, const PhysicsParams& p, const SolverConfig& c) {
    SolveResult r;
    {
      py::gil_scoped_release release;
      r = pcg_solve(from_numpy(phi0, g), p, c);
    }
    return solve_dict(r);
  }, py::arg("phi0"), py::arg("grid"), py::arg("physics"), py::arg("config") = SolverConfig{});

  m.def("cm_pcg_solve", [](const CArray& phi0, const GridSpec& coarse, const GridSpec& fine, const PhysicsParams& p,
                           const SolverConfig& c) {
    CascadeResult r;
    {
      py::gil_scoped_release release;
      r = cm_pcg_solve(from_numpy(phi0, coarse), p, MultigridPlan::between(coarse, fine, c));
    }
    py::dict d;
    d["phi"] = to_numpy(r.finest().phi);
    d["energy"] = energy_dict(r.finest().energy);
    py::list levels;
    for (const auto& l : r.levels) levels.append(record_dict(l.record));
    d["levels"] = levels;
    d["converged"] = r.converged();
    return d;
  }, py::arg("phi0"), py::arg("coarse"), py::arg("fine"), py::arg("physics"), py::arg("config") = SolverConfig{});

  m.def("pgf_solve", [](const CArray& phi0, const GridSpec& g, const PhysicsParams& p, double dt, double tol,
                        int max_iters) {
    PgfConfig c;
    c.dt = dt;
    c.tol = tol;
    c.max_iters = max_iters;
    SolveResult r;
    {
      py::gil_scoped_release release;
      r = pgf_solve(from_numpy(phi0, g), p, c);
    }
    return solve_dict(r);
  }, py::arg("phi0"), py::arg("grid"), py::arg("physics"), py::arg("dt") = 0.1, py::arg("tol") = 1e-14,
        py::arg("max_iters") = 200000);

  m.def("sweep", [](const std::vector<std::string>& tags, const GridSpec& g, const PhysicsParams& p,
                    const SolverConfig& c, int jobs) {
    std::vector<GuessTriple> triples;
    for (const auto& t : tags) triples.push_back(parse_guess_triple(t));
    SweepOptions o;
    o.grid = g;
    o.solver = c;
    o.jobs = jobs;
    SweepResult s;
    {
      py::gil_scoped_release release;
      s = sweep_guesses(triples, p, o);
    }
    py::list table;
    for (const auto& e : s.entries) {
      py::dict row;
      row["tags"] = to_string(e.tags);
      row["ok"] = e.ok;
      row["energy"] = e.energy;
      row["iterations"] = e.iterations;
      row["converged"] = e.converged;
      row["error"] = e.error;
      table.append(row);
    }
    py::dict d;
    d["table"] = table;
    d["best"] = s.best;
    d["phi"] = to_numpy(s.best_phi);
    d["energy"] = energy_dict(s.best_energy);
    return d;
  }, py::arg("tags"), py::arg("grid"), py::arg("physics"), py::arg("config") = SolverConfig{}, py::arg("jobs") = 1);

  m.def("write_field", [](const std::filesystem::path& path, const CArray& phi, const GridSpec& g) {
    write_field(path, from_numpy(phi, g));
  }, py::arg("path"), py::arg("phi"), py::arg("grid"));

  m.def("read_field", [](const std::filesystem::path& path) {
    const SpinorField f = read_field(path);
    return py::make_tuple(to_numpy(f), f.grid());
  }, py::arg("path"));
}
