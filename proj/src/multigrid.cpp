#include "spgs/multigrid.hpp"

#include <cmath>

#include "spgs/error.hpp"
#include "spgs/spectral.hpp"

namespace spgs {

MultigridPlan MultigridPlan::between(const GridSpec& coarse, const GridSpec& fine, const SolverConfig& config) {
  MultigridPlan plan;
  GridSpec g = coarse;
  plan.levels.push_back(g);
  while (g.points[0] < fine.points[0]) {
    g = g.refined();
    plan.levels.push_back(g);
  }
  if (!(g == fine))
    throw Error(ErrorKind::invalid_argument,
                "fine grid " + fine.describe() + " is not reachable from " + coarse.describe() + " by doubling");
  plan.configs.assign(plan.levels.size(), config);
  return plan;
}

void MultigridPlan::validate() const {
  if (levels.empty()) throw Error(ErrorKind::invalid_argument, "multigrid plan has no levels");
  if (configs.size() != levels.size())
    throw Error(ErrorKind::invalid_argument, "multigrid plan needs one solver config per level");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const GridSpec& c = levels[i - 1];
    const GridSpec& f = levels[i];
    if (c.dim != f.dim) throw Error(ErrorKind::invalid_argument, "multigrid levels differ in dimension");
    for (int a = 0; a < c.dim; ++a) {
      if (f.points[a] != 2 * c.points[a])
        throw Error(ErrorKind::invalid_argument, "multigrid levels must double the points per axis");
      if (std::abs(f.half_width[a] - c.half_width[a]) > 1e-12 * c.half_width[a])
        throw Error(ErrorKind::invalid_argument, "multigrid levels must share one domain");
    }
  }
  for (const auto& c : configs) c.validate();
}

bool CascadeResult::converged() const {
  for (const auto& l : levels)
    if (!l.record.converged) return false;
  return !levels.empty();
}

int CascadeResult::total_iterations() const {
  int n = 0;
  for (const auto& l : levels) n += l.record.iterations();
  return n;
}

CascadeResult cm_pcg_solve(const SpinorField& phi0_coarse, const PhysicsParams& params, const MultigridPlan& plan,
                           const LevelCallback& on_level) {
  plan.validate();
  if (!(phi0_coarse.grid() == plan.levels.front()))
    throw Error(ErrorKind::invalid_argument, "initial guess does not live on the coarsest level");

  CascadeResult out;
  SpinorField start = normalize(phi0_coarse);
  for (std::size_t p = 0; p < plan.levels.size(); ++p) {
    const Hamiltonian ham(plan.levels[p], params);
    LevelResult level;
    level.start_energy = ham.total_energy(start);
    SolveResult r = pcg_solve(start, ham, plan.configs[p]);
    level.phi = std::move(r.phi);
    level.energy = r.energy;
    level.record = std::move(r.record);
    if (on_level) on_level(p, level);
    if (p + 1 < plan.levels.size()) start = normalize(prolongate(level.phi, plan.levels[p + 1]));
    out.levels.push_back(std::move(level));
  }
  return out;
}

}  // namespace spgs
