#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "spgs/driver.hpp"
#include "spgs/error.hpp"

using namespace spgs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kNotConverged = 3;

struct Options {
  std::string config;
  std::string output;
  std::string reference;
  std::string field;
  int jobs = 1;
};

RunConfig load(const Options& o) {
  RunConfig rc = load_run_config(o.config);
  if (!o.output.empty()) rc.output.directory = o.output;
  fs::create_directories(rc.output.directory);
  return rc;
}

json energy_json(const EnergyBreakdown& e) {
  return {{"kin", e.kin}, {"pot", e.pot}, {"spin", e.spin}, {"rot", e.rot},
          {"soc", e.soc}, {"total", e.total}, {"mu", e.mu}};
}

json diagnostics_json(const Diagnostics& d) {
  json j = energy_json(d.energy);
  j["residual_inf"] = d.residual_inf;
  j["virial"] = d.virial ? json(*d.virial) : json(nullptr);
  j["soc_sign"] = d.energy.soc <= 1e-10 ? "nonpositive" : "positive";
  j["existence_warnings"] = d.existence.messages;
  return j;
}

void print_diagnostics(const Diagnostics& d) {
  const EnergyBreakdown& e = d.energy;
  std::printf("kin      %.15g\npot      %.15g\nspin     %.15g\nrot      %.15g\nsoc      %.15g\n", e.kin, e.pot, e.spin,
              e.rot, e.soc);
  std::printf("total    %.15g\nmu       %.15g\nresidual %.3e\n", e.total, e.mu, d.residual_inf);
  if (d.virial) std::printf("virial   %.3e\n", *d.virial);
  else std::printf("virial   n/a (trap is not harmonic)\n");
  std::printf("soc sign %s\n", e.soc <= 1e-10 ? "nonpositive" : "positive");
  for (const auto& m : d.existence.messages) std::printf("warning: %s\n", m.c_str());
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
  out << j.dump(2) << '\n';
}

void emit_state(const RunConfig& rc, const RunOutcome& o, const std::string& guess, json extra = json::object()) {
  const fs::path dir = rc.output.directory;
  if (rc.output.field) write_field(dir / "ground_state.spgs", o.phi);
  if (rc.output.csv) {
    write_convergence_csv(dir / "convergence.csv", o.record);
    if (o.levels.size() > 1)
      for (std::size_t l = 0; l < o.levels.size(); ++l)
        write_convergence_csv(dir / ("convergence_level" + std::to_string(l) + ".csv"), o.levels[l]);
  }
  if (rc.output.density) write_densities(dir, "", o.phi);
  const Diagnostics d = diagnose(o.phi, rc.physics);
  json j = diagnostics_json(d);
  j["method"] = to_string(rc.method);
  j["grid"] = o.phi.grid().describe();
  j["initial_guess"] = guess;
  j["iterations"] = o.iterations;
  j["converged"] = o.converged;
  j["seconds"] = o.seconds;
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json(dir / "summary.json", j);
  std::printf("method   %s on %s, guess %s\n", to_string(rc.method), o.phi.grid().describe().c_str(), guess.c_str());
  std::printf("iters    %d (%s) in %.2f s\n", o.iterations, o.converged ? "converged" : "NOT converged", o.seconds);
  print_diagnostics(d);
}

int cmd_solve(const Options& opt) {
  const RunConfig rc = load(opt);
  if (rc.guesses.size() != 1) {
    std::fprintf(stderr, "note: %zu initial guesses configured, running a sweep\n", rc.guesses.size());
  }
  if (rc.guesses.size() == 1) {
    const RunOutcome o = run_solve(rc, rc.guesses.front());
    emit_state(rc, o, to_string(rc.guesses.front()));
    return o.converged ? kOk : kNotConverged;
  }
  return -1;
}

int cmd_sweep(const Options& opt) {
  const RunConfig rc = load(opt);
  if (rc.method == SolveMethodKind::pgf) throw Error(ErrorKind::invalid_argument, "sweep supports pcg and cm_pcg only");
  SweepOptions so;
  so.method = rc.method == SolveMethodKind::cm_pcg ? SolveMethod::cm_pcg : SolveMethod::pcg;
  so.solver = rc.solver;
  so.grid = rc.grid;
  if (so.method == SolveMethod::cm_pcg) so.plan = rc.plan();
  so.jobs = opt.jobs;
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult s = sweep_guesses(rc.guesses, rc.physics, so);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = rc.output.directory;
  {
    std::ofstream t(dir / "sweep.csv", std::ios::trunc);
    t << "phi_p1,phi_0,phi_m1,energy,iterations,converged,residual_inf,seconds,error\n" << std::setprecision(15);
    for (const auto& e : s.entries)
      t << to_string(e.tags[0]) << ',' << to_string(e.tags[1]) << ',' << to_string(e.tags[2]) << ','
        << (e.ok ? e.energy : std::nan("")) << ',' << e.iterations << ',' << (e.converged ? 1 : 0) << ','
        << e.residual_inf << ',' << e.seconds << ",\"" << e.error << "\"\n";
  }
  const SweepEntry& best = s.entries[s.best];
  for (const auto& e : s.entries)
    std::printf("%-16s %s %.10f%s\n", to_string(e.tags).c_str(), e.ok ? "E" : "failed:", e.ok ? e.energy : 0.0,
                e.ok ? (e.converged ? "" : "  (not converged)") : e.error.c_str());

  RunOutcome o;
  o.phi = std::move(s.best_phi);
  o.energy = s.best_energy;
  o.record = std::move(s.best_record);
  o.levels = {o.record};
  o.converged = best.converged;
  o.iterations = best.iterations;
  o.seconds = secs;
  emit_state(rc, o, to_string(best.tags), {{"sweep_size", s.entries.size()}, {"sweep_seconds", secs}});
  return o.converged ? kOk : kNotConverged;
}

int cmd_compare(const Options& opt) {
  const RunConfig rc = load(opt);
  const GuessTriple guess = rc.guesses.front();
  const CompareResult r = compare_methods(rc, guess);
  const fs::path dir = rc.output.directory;
  {
    std::ofstream out(dir / "compare.csv", std::ios::trunc);
    out << compare_csv(r);
  }
  write_convergence_csv(dir / "convergence_pcg.csv", r.pcg.record);
  write_convergence_csv(dir / "convergence_pgf.csv", r.pgf.record);
  const double ratio = static_cast<double>(r.pcg.iterations) / std::max(1, r.pgf.iterations);
  json j = {{"pcg", {{"iterations", r.pcg.iterations}, {"energy", r.pcg.energy.total}, {"converged", r.pcg.converged},
                     {"seconds", r.pcg.seconds}}},
            {"pgf", {{"iterations", r.pgf.iterations}, {"energy", r.pgf.energy.total}, {"converged", r.pgf.converged},
                     {"seconds", r.pgf.seconds}}},
            {"energy_difference", std::abs(r.pcg.energy.total - r.pgf.energy.total)},
            {"iteration_ratio", ratio}};
  write_json(dir / "compare_summary.json", j);
  std::printf("pcg  %6d iterations  E = %.15g  %.2f s%s\n", r.pcg.iterations, r.pcg.energy.total, r.pcg.seconds,
              r.pcg.converged ? "" : "  (not converged)");
  std::printf("pgf  %6d iterations  E = %.15g  %.2f s%s\n", r.pgf.iterations, r.pgf.energy.total, r.pgf.seconds,
              r.pgf.converged ? "" : "  (not converged)");
  std::printf("|dE| %.3e  iteration ratio %.4f\n", std::abs(r.pcg.energy.total - r.pgf.energy.total), ratio);
  return r.pcg.converged && r.pgf.converged ? kOk : kNotConverged;
}

int cmd_diagnose(const Options& opt) {
  const RunConfig rc = load_run_config(opt.config);
  const SpinorField phi = read_field(opt.field);
  if (!(phi.grid() == rc.grid))
    throw Error(ErrorKind::invalid_argument, "field grid " + phi.grid().describe() + " does not match config grid " +
                                                 rc.grid.describe());
  const Diagnostics d = diagnose(phi, rc.physics);
  std::printf("norm     %.15g\n", norm(phi));
  print_diagnostics(d);
  return kOk;
}

int cmd_study(const Options& opt) {
  const RunConfig rc = load(opt);
  std::optional<SpinorField> ref;
  if (!opt.reference.empty()) ref = read_field(opt.reference);
  const StudyResult s = convergence_study(rc, rc.guesses.front(), ref ? &*ref : nullptr);
  const fs::path dir = rc.output.directory;
  std::ofstream out(dir / "study.csv", std::ios::trunc);
  out << "points,h,wavefn_error,energy_error,mu_error,virial,iterations,converged\n" << std::setprecision(6)
      << std::scientific;
  std::printf("%8s %10s %12s %12s %12s %12s %6s\n", "N", "h", "E_h", "|dE|", "|dmu|", "I_h", "iters");
  bool ok = true;
  for (const auto& r : s.rows) {
    out << r.points << ',' << r.h << ',' << r.wavefn_error << ',' << r.energy_error << ',' << r.mu_error << ','
        << r.virial << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    std::printf("%8d %10.6f %12.4e %12.4e %12.4e %12.4e %6d\n", r.points, r.h, r.wavefn_error, r.energy_error,
                r.mu_error, r.virial, r.iterations);
    ok = ok && r.converged;
  }
  if (!ref && rc.output.field) write_field(dir / "reference.spgs", s.reference);
  return ok ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of rotating spin-orbit-coupled spin-1 condensates"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", opt.config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output,-o", opt.output, "output directory (overrides [output] directory)");
  };
  CLI::App* solve = app.add_subcommand("solve", "compute a ground state from the configured initial guess");
  add_common(solve);
  CLI::App* sweep = app.add_subcommand("sweep", "solve from every configured initial guess and keep the lowest energy");
  add_common(sweep);
  sweep->add_option("--jobs,-j", opt.jobs, "parallel solves")->check(CLI::PositiveNumber);
  CLI::App* compare = app.add_subcommand("compare", "run PCG and projected gradient flow on the same problem");
  add_common(compare);
  CLI::App* diag = app.add_subcommand("diagnose", "report energies, residual and virial identity of a stored field");
  diag->add_option("field", opt.field, "field file")->required()->check(CLI::ExistingFile);
  diag->add_option("--config,-c", opt.config, "run configuration file")->required()->check(CLI::ExistingFile);
  CLI::App* study = app.add_subcommand("convergence-study", "errors against a fine reference along an h-halving sequence");
  add_common(study);
  study->add_option("--reference,-r", opt.reference, "reference field file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) {
      const int rc = cmd_solve(opt);
      return rc >= 0 ? rc : cmd_sweep(opt);
    }
    if (*sweep) return cmd_sweep(opt);
    if (*compare) return cmd_compare(opt);
    if (*diag) return cmd_diagnose(opt);
    if (*study) return cmd_study(opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::step_stalled ? kNotConverged : kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
