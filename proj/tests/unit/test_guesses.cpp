#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "spgs/error.hpp"
#include "spgs/guesses.hpp"
#include "spgs/spectral.hpp"

using namespace spgs;
using testutil::cplx;

TEST_CASE("guess tags") {
  for (GuessTag t : kAllGuessTags) CHECK(parse_guess_tag(to_string(t)) == t);
  CHECK_THROWS_AS(parse_guess_tag("g"), Error);
  CHECK(parse_guess_triple("a,b,ebar") == GuessTriple{GuessTag::a, GuessTag::b, GuessTag::ebar});
  CHECK(parse_guess_triple("c") == GuessTriple{GuessTag::c, GuessTag::c, GuessTag::c});
  CHECK_THROWS_AS(parse_guess_triple("a,b"), Error);
  const auto all = all_triples();
  CHECK(all.size() == 1000);
  CHECK(std::set<GuessTriple>(all.begin(), all.end()).size() == 1000);
  CHECK(identical_triples().size() == 10);
}

TEST_CASE("scalar guesses") {
  const GridSpec g = make_grid(2, 12.0, 96);
  PhysicsParams p;
  p.omega = 0.3;
  p.c0 = 100;
  const SpectralOps ops(g);
  for (GuessTag t : kAllGuessTags) CHECK(component_mass(g, make_guess(t, g, p)) == doctest::Approx(1.0).epsilon(1e-13));

  auto lz_mean = [&](const ComplexArray& f) {
    const ComplexArray l = ops.lz(f);
    cplx s{0, 0};
    for (std::size_t k = 0; k < f.size(); ++k) s += l[k] * std::conj(f[k]);
    return (s * g.cell_volume()).real();
  };
  CHECK(lz_mean(make_guess(GuessTag::a, g, p)) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(lz_mean(make_guess(GuessTag::b, g, p)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lz_mean(make_guess(GuessTag::bbar, g, p)) == doctest::Approx(-1.0).epsilon(1e-10));
  // c mixes m = 0 and m = 1 with equal weight
  CHECK(lz_mean(make_guess(GuessTag::c, g, p)) == doctest::Approx(0.5).epsilon(1e-10));

  const ComplexArray b = make_guess(GuessTag::b, g, p), bb = make_guess(GuessTag::bbar, g, p);
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(bb[k] == std::conj(b[k]));
}

TEST_CASE("thomas-fermi guess") {
  PhysicsParams p;
  p.c0 = std::numbers::pi / 4;
  CHECK(thomas_fermi_mu(p, 2) == doctest::Approx(0.5));
  p.c0 = 4 * std::numbers::pi / 15;
  CHECK(thomas_fermi_mu(p, 3) == doctest::Approx(0.5));
  p.c0 = 100;
  const GridSpec g = make_grid(2, 12.0, 64);
  const double mu = thomas_fermi_mu(p, 2);
  const ComplexArray f = make_guess(GuessTag::f, g, p);
  const RealArray v = eval_potential(p.trap, g);
  const double unscaled_peak = std::sqrt(mu / p.c0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (v[k] >= mu) CHECK(f[k] == cplx{0, 0});
    CHECK(f[k].imag() == 0.0);
  }
  // TF profile already has mass close to one on a fine enough grid
  CHECK(std::abs(f[32 * 64 + 32]) == doctest::Approx(unscaled_peak).epsilon(0.05));
  p.c0 = 0;
  CHECK_THROWS_AS(make_guess(GuessTag::f, g, p), Error);
}

TEST_CASE("spinor guess") {
  const GridSpec g = make_grid(2, 8.0, 32);
  const PhysicsParams p;
  const SpinorField s = make_spinor_guess({GuessTag::a, GuessTag::b, GuessTag::e}, g, p);
  CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-13));
  for (int c = 0; c < 3; ++c) CHECK(component_mass(g, s[c]) == doctest::Approx(1.0 / 3).epsilon(1e-13));
}

TEST_CASE("sweep") {
  const GridSpec g = make_grid(2, 8.0, 32);
  PhysicsParams p;
  p.c0 = 20;
  p.c1 = 1;
  p.omega = 0.3;
  p.gamma = 0.3;
  SweepOptions o;
  o.grid = g;
  o.solver.tol = 1e-12;
  const auto tri = identical_triples({GuessTag::a, GuessTag::b, GuessTag::e, GuessTag::f});
  const SweepResult one = sweep_guesses(tri, p, o);
  o.jobs = 3;
  const SweepResult many = sweep_guesses(tri, p, o);
  REQUIRE(one.entries.size() == 4);
  CHECK(one.best == many.best);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one.entries[i].tags == tri[i]);
    CHECK(one.entries[i].ok);
    CHECK(one.entries[i].energy == many.entries[i].energy);
    CHECK(one.entries[i].energy >= one.entries[one.best].energy);
  }
  CHECK(one.best_energy.total == one.entries[one.best].energy);
  CHECK(norm(one.best_phi) == doctest::Approx(1.0).epsilon(1e-12));

  PhysicsParams bad = p;
  bad.c0 = 0;
  try {
    sweep_guesses(identical_triples({GuessTag::f}), bad, o);
    FAIL("expected sweep-failed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sweep_failed);
  }
}
