// Acceptance checks 1-7. Prints one PASS/FAIL line per criterion.
//
//   spgs_acceptance [--only 1,4,...] [--reduced-sweep] [--verbose]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "spgs/driver.hpp"
#include "spgs/error.hpp"

using namespace spgs;

namespace {

bool verbose = false;

void note(const char* fmt, auto... args) {
  if (!verbose) return;
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PhysicsParams params(double c0, double c1, double omega, double gamma) {
  PhysicsParams p;
  p.c0 = c0;
  p.c1 = c1;
  p.omega = omega;
  p.gamma = gamma;
  return p;
}

GridSpec square(int dim, double l, int n) { return make_grid(dim, l, n); }

// --- 1 and 2: spectral accuracy and the virial identity -------------------------

struct AccuracyRun {
  std::vector<StudyRow> rows;
};

AccuracyRun accuracy_study(const PhysicsParams& p, int coarse, int finest_study, int reference) {
  RunConfig rc;
  rc.grid = square(2, 16.0, finest_study);
  rc.physics = p;
  rc.solver.stop = StopCriterion::residual_inf;
  rc.solver.tol = 1e-12;
  for (int n = coarse; n <= finest_study; n *= 2) rc.study_points.push_back(n);
  rc.study_reference_points = reference;
  const StudyResult s = convergence_study(rc, {GuessTag::a, GuessTag::a, GuessTag::a});
  for (const auto& r : s.rows)
    note("N=%d h=%g E_h=%.3e dE=%.3e dmu=%.3e I_h=%.3e iters=%d%s", r.points, r.h, r.wavefn_error, r.energy_error,
         r.mu_error, r.virial, r.iterations, r.converged ? "" : " (not converged)");
  return {s.rows};
}

std::optional<AccuracyRun> case1_cache;

const AccuracyRun& case1() {
  if (!case1_cache) case1_cache = accuracy_study(params(100, 1, 0.1, 0.3), 32, 256, 512);
  return *case1_cache;
}

Verdict criterion1() {
  Verdict v;
  const auto& rows = case1().rows;
  const double limits[3] = {1e-2, 2e-4, 1e-7};
  for (int i = 0; i < 3; ++i)
    v.require(rows[i].wavefn_error <= limits[i],
              "E_h(h=" + fmt("%g", rows[i].h) + ")=" + fmt("%.2e", rows[i].wavefn_error) + " <= " + fmt("%g", limits[i]));
  bool conv = true;
  for (const auto& r : rows) conv = conv && r.converged;
  v.require(conv, "all levels converged");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const StudyRow& r1 = case1().rows[3];
  v.require(std::abs(r1.virial) <= 1e-10, "case 1 |I_h(1/8)|=" + fmt("%.2e", std::abs(r1.virial)) + " <= 1e-10");

  RunConfig rc;
  rc.grid = square(2, 16.0, 256);
  rc.coarsest_points = 32;
  rc.method = SolveMethodKind::cm_pcg;
  rc.physics = params(100, 1, 0.3, 0.3);
  rc.solver.stop = StopCriterion::residual_inf;
  rc.solver.tol = 1e-12;
  const RunOutcome o = run_solve(rc, {GuessTag::a, GuessTag::a, GuessTag::a});
  const double i2 = Hamiltonian(o.phi.grid(), rc.physics).virial_residual(o.energy);
  note("case 2: E=%.12f I_h=%.3e iters=%d %.1fs", o.energy.total, i2, o.iterations, o.seconds);
  v.require(o.converged, "case 2 converged");
  v.require(std::abs(i2) <= 1e-9, "case 2 |I_h(1/8)|=" + fmt("%.2e", std::abs(i2)) + " <= 1e-9");
  return v;
}

// --- 3 and 5: initial-guess sweeps ---------------------------------------------

const std::map<double, double> kSweepMinima{{0.6, 2.2833}, {0.7, 2.0437}, {0.8, 1.6806}, {0.9, 1.0492}};

SweepOptions sweep_options(bool cascade) {
  SweepOptions o;
  o.method = cascade ? SolveMethod::cm_pcg : SolveMethod::pcg;
  o.grid = square(2, 12.0, 256);
  o.solver.stop = StopCriterion::energy_diff;
  o.solver.tol = 1e-14;
  if (cascade) o.plan = MultigridPlan::between(square(2, 12.0, 64), o.grid, o.solver);
  return o;
}

std::map<double, SweepResult> reduced_sweeps;

Verdict sweep_criterion(const std::vector<GuessTag>& tags, double tol, const std::string& label) {
  Verdict v;
  for (const auto& [omega, expect] : kSweepMinima) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult s = sweep_guesses(identical_triples(tags), params(50, 0.5, omega, 0.3), sweep_options(true));
    const double secs = since(t0);
    for (const auto& e : s.entries)
      note("Omega=%.1f %-15s E=%.6f iters=%d %.1fs%s", omega, to_string(e.tags).c_str(), e.energy, e.iterations,
           e.seconds, e.converged ? "" : " (not converged)");
    const double best = s.entries[s.best].energy;
    v.require(std::abs(best - expect) <= tol,
              "Omega=" + fmt("%.1f", omega) + " min " + fmt("%.5f", best) + " vs " + fmt("%.4f", expect));
    note("Omega=%.1f sweep %.1fs", omega, secs);
    if (tags.size() == 3) reduced_sweeps.emplace(omega, std::move(s));
  }
  (void)label;
  return v;
}

Verdict criterion3(bool reduced_only) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = sweep_criterion({GuessTag::a, GuessTag::b, GuessTag::e}, 5e-3, "reduced");
  const double secs = since(t0);
  v.require(secs <= 20 * 60, "reduced sweep " + fmt("%.0f", secs) + " s <= 1200 s");
  if (!reduced_only) {
    const auto t1 = std::chrono::steady_clock::now();
    Verdict f = sweep_criterion({kAllGuessTags.begin(), kAllGuessTags.end()}, 2e-3, "full");
    const double fs = since(t1);
    v.require(f.pass, "full sweep {" + f.detail.str() + "}");
    v.require(fs <= 2 * 3600, "full sweep " + fmt("%.0f", fs) + " s <= 7200 s");
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  const PhysicsParams p = params(50, 0.5, 0.9, 0.3);
  const GuessTriple guess{GuessTag::e, GuessTag::e, GuessTag::e};
  const SweepOptions cm = sweep_options(true), fixed = sweep_options(false);

  auto t0 = std::chrono::steady_clock::now();
  const CascadeResult c = cm_pcg_solve(make_spinor_guess(guess, cm.plan.levels.front(), p), p, cm.plan);
  const double t_cm = since(t0);
  t0 = std::chrono::steady_clock::now();
  const SolveResult f = pcg_solve(make_spinor_guess(guess, fixed.grid, p), p, fixed.solver);
  const double t_fixed = since(t0);
  note("cascade E=%.8f iters=%d %.1fs; fixed E=%.8f iters=%d %.1fs", c.finest().energy.total, c.total_iterations(),
       t_cm, f.energy.total, f.record.iterations(), t_fixed);
  v.require(c.converged() && f.record.converged, "both converged");
  v.require(std::abs(c.finest().energy.total - f.energy.total) <= 2e-3,
            "|E_cm - E_fixed|=" + fmt("%.2e", std::abs(c.finest().energy.total - f.energy.total)) + " <= 2e-3");
  v.require(t_fixed >= 2.0 * t_cm, "speedup " + fmt("%.2f", t_fixed / t_cm) + "x >= 2x");
  return v;
}

// --- 4: PCG against projected gradient flow ---------------------------------------

Verdict criterion4() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g = square(2, 12.0, 128);
  const PhysicsParams p = params(100, 1, 0.3, 0.3);
  const SpinorField start = make_spinor_guess({GuessTag::c, GuessTag::c, GuessTag::c}, g, p);
  const Hamiltonian ham(g, p);
  const SolveResult a = pcg_solve(start, ham, SolverConfig{});
  const SolveResult b = pgf_solve(start, ham, PgfConfig{});
  const int ia = a.record.iterations(), ib = b.record.iterations();
  note("pcg E=%.14f iters=%d; pgf E=%.14f iters=%d; %.1fs", a.energy.total, ia, b.energy.total, ib, since(t0));
  v.require(a.record.converged && b.record.converged, "both converged");
  v.require(std::abs(a.energy.total - b.energy.total) <= 1e-8,
            "|dE|=" + fmt("%.2e", std::abs(a.energy.total - b.energy.total)) + " <= 1e-8");
  v.require(ia >= 323 / 3 && ia <= 3 * 323, "pcg " + std::to_string(ia) + " iterations in [107, 969]");
  v.require(ib >= 18168 / 3 && ib <= 3 * 18168, "pgf " + std::to_string(ib) + " iterations in [6056, 54504]");
  v.require(ia <= 0.1 * ib, "ratio " + fmt("%.4f", static_cast<double>(ia) / ib) + " <= 0.1");
  return v;
}

// --- 6: property suite ----------------------------------------------------------------

SpinorField random_start(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpinorField f(g);
  for (int c = 0; c < 3; ++c) {
    const double ax = u(rng), ay = u(rng), b = u(rng), ph = 3.0 * u(rng), s = 0.6 + 0.3 * u(rng);
    const SpectralOps ops(g);
    ops.for_each_point([&](std::size_t k, double x, double y, double z) {
      const double env = std::exp(-s * (x * x + y * y + z * z) / 2);
      f[c][k] = env * cplx{1.0 + ax * x + b * x * y, ay * y} * std::polar(1.0, ph);
    });
  }
  return normalize(f);
}

Verdict criterion6() {
  Verdict v;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridSpec g = square(2, 8.0, 48);

  int nonmonotone = 0, soc_positive = 0, unconverged = 0;
  double worst_soc = -1e300, worst_fd = 0.0, worst_gauge = 0.0, worst_norm = 0.0;
  int fd_samples = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const PhysicsParams p = params(5 + 60 * u(rng), -1 + 3 * u(rng), 0.5 * u(rng), 0.2 + 0.6 * u(rng));
    const Hamiltonian ham(g, p);
    SolverConfig cfg;
    cfg.stop = StopCriterion::residual_inf;
    cfg.tol = 1e-9;
    const SpinorField start = random_start(g, rng);
    double prev = ham.total_energy(start);
    const SolveResult r = pcg_solve(start, ham, cfg, [&](const IterationProbe& pr) {
      // strict decrease: the accepted change is negative, and the stored energy never rises
      if (!(pr.row->energy_diff > 0.0) || pr.row->energy > prev + 1e-14) ++nonmonotone;
      prev = pr.row->energy;
      worst_norm = std::max(worst_norm, std::abs(norm(*pr.phi) - 1.0));
    });
    if (!r.record.converged) ++unconverged;
    // (iii) SOC energy sign on a radially symmetric trap
    worst_soc = std::max(worst_soc, r.energy.soc);
    if (r.energy.soc > 1e-10) ++soc_positive;
    // (iv) gauge invariance
    const double eg = ham.total_energy(std::polar(1.0, 2 * std::numbers::pi * u(rng)) * r.phi);
    worst_gauge = std::max(worst_gauge, std::abs(eg - r.energy.total));
    // (ii) b against a central difference of E along the retraction
    for (int d = 0; d < 5 && fd_samples < 50; ++d, ++fd_samples) {
      SpinorField dir = project_tangent(random_start(g, rng), start);
      dir *= 1.0 / norm(dir);
      const LineModel m = line_coeffs(ham, start, dir);
      const double t = 1e-5;
      const double ep = ham.total_energy(SpinorField::combine(std::cos(t), start, std::sin(t), dir));
      const double em = ham.total_energy(SpinorField::combine(std::cos(t), start, -std::sin(t), dir));
      const double fd = (ep - em) / (2 * t);
      worst_fd = std::max(worst_fd, std::abs(fd - m.b) / std::max(std::abs(m.b), 1e-300));
    }
  }
  note("nonmonotone=%d unconverged=%d worst_soc=%.2e fd_rel=%.2e gauge=%.2e norm=%.2e", nonmonotone, unconverged,
       worst_soc, worst_fd, worst_gauge, worst_norm);
  v.require(nonmonotone == 0, "(i) strict decrease on 20 instances");
  v.require(unconverged == 0, "(i) all 20 converged");
  v.require(fd_samples == 50 && worst_fd <= 1e-6, "(ii) b vs finite difference rel " + fmt("%.1e", worst_fd));
  v.require(soc_positive == 0, "(iii) max E_soc " + fmt("%.1e", worst_soc) + " <= 1e-10");
  v.require(worst_gauge <= 1e-12 && worst_norm <= 1e-12,
            "(iv) gauge " + fmt("%.1e", worst_gauge) + ", norm " + fmt("%.1e", worst_norm));

  // (v) linear case in 2D and 3D
  PhysicsParams lin;
  SolverConfig cfg;
  const GridSpec g2 = square(2, 8.0, 64), g3 = square(3, 8.0, 32);
  const double e2 = pcg_solve(make_spinor_guess({GuessTag::c, GuessTag::c, GuessTag::c}, g2, lin), lin, cfg).energy.total;
  const double e3 = pcg_solve(make_spinor_guess({GuessTag::c, GuessTag::c, GuessTag::c}, g3, lin), lin, cfg).energy.total;
  note("linear E2=%.15f E3=%.15f", e2, e3);
  v.require(std::abs(e2 - 1.0) <= 1e-9 && std::abs(e3 - 1.5) <= 1e-9,
            "(v) linear |E-1|=" + fmt("%.1e", std::abs(e2 - 1.0)) + ", |E-3/2|=" + fmt("%.1e", std::abs(e3 - 1.5)));
  return v;
}

// --- 7: 3D smoke test -------------------------------------------------------------------

Verdict criterion7() {
  Verdict v;
  const PhysicsParams p = params(100, 1, 0.1, 0.3);
  SolverConfig cfg;
  cfg.stop = StopCriterion::residual_inf;
  cfg.tol = 1e-9;
  const MultigridPlan plan = MultigridPlan::between(square(3, 16.0, 32), square(3, 16.0, 128), cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const CascadeResult c = cm_pcg_solve(make_spinor_guess({GuessTag::a, GuessTag::a, GuessTag::a}, plan.levels[0], p),
                                       p, plan, [&](std::size_t l, const LevelResult& r) {
                                         note("level %zu E=%.10f iters=%d %.1fs", l, r.energy.total,
                                              r.record.iterations(), since(t0));
                                       });
  const LevelResult& h2 = c.levels[1];
  const LevelResult& h4 = c.levels[2];
  const double ih = Hamiltonian(h2.phi.grid(), p).virial_residual(h2.energy);
  v.require(c.converged(), "converged");
  v.require(std::abs(h2.energy.total - h4.energy.total) <= 5e-4,
            "|E(1/2)-E(1/4)|=" + fmt("%.2e", std::abs(h2.energy.total - h4.energy.total)) + " <= 5e-4");
  v.require(std::abs(ih) <= 1e-4, "|I_h(1/2)|=" + fmt("%.2e", std::abs(ih)) + " <= 1e-4");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  bool reduced_only = false;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_flag("--reduced-sweep", reduced_only, "skip the ten-guess sweep of criterion 3");
  app.add_flag("--verbose,-v", verbose, "print intermediate numbers");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<int, std::function<Verdict()>>> all{
      {1, criterion1}, {2, criterion2}, {3, [&] { return criterion3(reduced_only); }},
      {4, criterion4}, {5, criterion5}, {6, criterion6}, {7, criterion7}};
  const std::set<int> want(only.begin(), only.end());
  int failed = 0;
  for (const auto& [id, run] : all) {
    if (!want.empty() && !want.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "error: " << e.what();
    }
    std::printf("criterion %d: %s (%.0f s) %s\n", id, v.pass ? "PASS" : "FAIL", since(t0), v.detail.str().c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
