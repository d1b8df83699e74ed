#include "spgs/guesses.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "spgs/error.hpp"

namespace spgs {

const char* to_string(GuessTag t) noexcept {
  switch (t) {
    case GuessTag::a: return "a";
    case GuessTag::b: return "b";
    case GuessTag::bbar: return "bbar";
    case GuessTag::c: return "c";
    case GuessTag::cbar: return "cbar";
    case GuessTag::d: return "d";
    case GuessTag::dbar: return "dbar";
    case GuessTag::e: return "e";
    case GuessTag::ebar: return "ebar";
    case GuessTag::f: return "f";
  }
  return "?";
}

GuessTag parse_guess_tag(const std::string& s) {
  for (GuessTag t : kAllGuessTags)
    if (s == to_string(t)) return t;
  throw Error(ErrorKind::invalid_argument, "unknown initial guess '" + s + "' (a b bbar c cbar d dbar e ebar f)");
}

std::string to_string(const GuessTriple& t) {
  return std::string(to_string(t[0])) + "," + to_string(t[1]) + "," + to_string(t[2]);
}

GuessTriple parse_guess_triple(const std::string& s) {
  std::string norm = s;
  for (char& ch : norm)
    if (ch == ',') ch = ' ';
  std::istringstream is(norm);
  std::vector<std::string> parts;
  for (std::string w; is >> w;) parts.push_back(w);
  if (parts.size() == 1) {
    const GuessTag t = parse_guess_tag(parts[0]);
    return {t, t, t};
  }
  if (parts.size() != 3)
    throw Error(ErrorKind::invalid_argument, "initial guess needs one tag or three tags, got '" + s + "'");
  return {parse_guess_tag(parts[0]), parse_guess_tag(parts[1]), parse_guess_tag(parts[2])};
}

double thomas_fermi_mu(const PhysicsParams& params, int dim) {
  if (params.trap.kind != TrapKind::harmonic)
    throw Error(ErrorKind::invalid_argument, "Thomas-Fermi guess needs a harmonic trap");
  if (!(params.c0 > 0.0)) throw Error(ErrorKind::invalid_argument, "Thomas-Fermi guess needs c0 > 0");
  const auto& g = params.trap.frequencies;
  if (dim == 2) return 0.5 * std::sqrt(4.0 * params.c0 * g[0] * g[1] / std::numbers::pi);
  return 0.5 * std::pow(15.0 * params.c0 * g[0] * g[1] * g[2] / (4.0 * std::numbers::pi), 0.4);
}

ComplexArray make_guess(GuessTag tag, const GridSpec& grid, const PhysicsParams& params) {
  const std::size_t n = grid.size();
  ComplexArray out(n);
  const SpectralOps ops(grid);

  if (tag == GuessTag::f) {
    const double mu = thomas_fermi_mu(params, grid.dim);
    const RealArray v = eval_potential(params.trap, grid);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[k] < mu ? std::sqrt((mu - v[k]) / params.c0) : 0.0;
  } else {
    const double pre = std::pow(std::numbers::pi, -grid.dim / 4.0);
    const double w = params.omega;
    double wa = 0.0, wb = 0.0;
    switch (tag) {
      case GuessTag::a: wa = 1.0; break;
      case GuessTag::b: case GuessTag::bbar: wb = 1.0; break;
      case GuessTag::c: case GuessTag::cbar: wa = 1.0; wb = 1.0; break;
      case GuessTag::d: case GuessTag::dbar: wa = 1.0 - w; wb = w; break;
      case GuessTag::e: case GuessTag::ebar: wa = w; wb = 1.0 - w; break;
      case GuessTag::f: break;
    }
    const bool conj = tag == GuessTag::bbar || tag == GuessTag::cbar || tag == GuessTag::dbar || tag == GuessTag::ebar;
    ops.for_each_point([&](std::size_t k, double x, double y, double z) {
      const double a = pre * std::exp(-(x * x + y * y + z * z) / 2.0);
      const cplx val = wa * a + wb * cplx{x, y} * a;
      out[k] = conj ? std::conj(val) : val;
    });
  }

  const double mass = component_mass(grid, out);
  if (!(mass > 0.0))
    throw Error(ErrorKind::degenerate_input, std::string("initial guess ") + to_string(tag) + " vanishes on this grid");
  const double s = 1.0 / std::sqrt(mass);
  for (auto& v : out) v *= s;
  return out;
}

SpinorField make_spinor_guess(const GuessTriple& tags, const GridSpec& grid, const PhysicsParams& params) {
  SpinorField f(grid);
  const double s = 1.0 / std::sqrt(3.0);
  for (int c = 0; c < 3; ++c) {
    f[c] = make_guess(tags[static_cast<std::size_t>(c)], grid, params);
    for (auto& v : f[c]) v *= s;
  }
  return f;
}

std::vector<GuessTriple> identical_triples(const std::vector<GuessTag>& tags) {
  std::vector<GuessTriple> out;
  for (GuessTag t : tags) out.push_back({t, t, t});
  return out;
}

std::vector<GuessTriple> all_triples(const std::vector<GuessTag>& tags) {
  std::vector<GuessTriple> out;
  for (GuessTag x : tags)
    for (GuessTag y : tags)
      for (GuessTag z : tags) out.push_back({x, y, z});
  return out;
}

SweepResult sweep_guesses(const std::vector<GuessTriple>& triples, const PhysicsParams& params,
                          const SweepOptions& options) {
  if (triples.empty()) throw Error(ErrorKind::invalid_argument, "sweep needs at least one initial guess");
  const GridSpec start_grid = options.method == SolveMethod::cm_pcg ? options.plan.levels.at(0) : options.grid;
  if (options.method == SolveMethod::cm_pcg) options.plan.validate();
  else options.solver.validate();

  struct Slot {
    SweepEntry entry;
    SpinorField phi;
    EnergyBreakdown energy;
    ConvergenceRecord record;
  };
  std::vector<Slot> slots(triples.size());

  auto run = [&](std::size_t i) {
    Slot& s = slots[i];
    s.entry.tags = triples[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const SpinorField guess = make_spinor_guess(triples[i], start_grid, params);
      if (options.method == SolveMethod::cm_pcg) {
        CascadeResult r = cm_pcg_solve(guess, params, options.plan);
        LevelResult& fin = r.levels.back();
        s.entry.converged = r.converged();
        s.entry.iterations = r.total_iterations();
        s.phi = std::move(fin.phi);
        s.energy = fin.energy;
        s.record = std::move(fin.record);
      } else {
        const Hamiltonian ham(start_grid, params);
        SolveResult r = pcg_solve(guess, ham, options.solver);
        s.entry.converged = r.record.converged;
        s.entry.iterations = r.record.iterations();
        s.phi = std::move(r.phi);
        s.energy = r.energy;
        s.record = std::move(r.record);
      }
      s.entry.ok = true;
      s.entry.energy = s.energy.total;
      s.entry.residual_inf = s.record.rows.empty() ? 0.0 : s.record.rows.back().residual_inf;
    } catch (const std::exception& e) {
      s.entry.ok = false;
      s.entry.error = e.what();
    }
    s.entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(triples.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < triples.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < triples.size();) run(i);
      });
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  bool any = false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out.entries.push_back(slots[i].entry);
    if (!slots[i].entry.ok) continue;
    // Ties keep the earliest guess so the answer is independent of scheduling.
    if (!any || slots[i].entry.energy < out.entries[out.best].energy) out.best = i;
    any = true;
  }
  if (!any) {
    std::string msg = "every solve in the sweep failed";
    if (!slots.empty() && !slots[0].entry.error.empty()) msg += ": " + slots[0].entry.error;
    throw Error(ErrorKind::sweep_failed, msg);
  }
  out.best_phi = std::move(slots[out.best].phi);
  out.best_energy = slots[out.best].energy;
  out.best_record = std::move(slots[out.best].record);
  return out;
}

}  // namespace spgs
