#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "spgs/driver.hpp"
#include "spgs/error.hpp"

using namespace spgs;

TEST_CASE("restriction samples the nested nodes") {
  const GridSpec coarse = make_grid(2, std::array{6.0, 4.0}, std::array{8, 16});
  const GridSpec fine = make_grid(2, std::array{6.0, 4.0}, std::array{32, 32});
  auto f = [](double x, double y, double) { return testutil::cplx{x * x - y, 3 * y + x}; };
  const SpinorField r = restrict_to(testutil::spinor(fine, testutil::sample(fine, f), 1, 2, 3), coarse);
  CHECK(sup_diff(r, testutil::spinor(coarse, testutil::sample(coarse, f), 1, 2, 3)) == 0.0);
  const GridSpec g3 = make_grid(3, 2.0, 4);
  auto h = [](double x, double y, double z) { return testutil::cplx{x + 10 * y + 100 * z, 0}; };
  CHECK(sup_diff(restrict_to(testutil::spinor(g3.refined(), testutil::sample(g3.refined(), h), 1, 0, 0), g3),
                 testutil::spinor(g3, testutil::sample(g3, h), 1, 0, 0)) == 0.0);
}

TEST_CASE("wavefunction error across several refinements") {
  const GridSpec coarse = make_grid(2, 10.0, 32);
  const GridSpec fine = make_grid(2, 10.0, 128);
  // A trigonometric polynomial resolved on the coarse grid is reproduced exactly by refinement.
  auto trig = [](const GridSpec& g) {
    const double k = std::numbers::pi / 10.0;
    return testutil::sample(g, [&](double x, double y, double) {
      return std::polar(1.0, k * x) * std::cos(2 * k * y) + 0.3 * std::sin(5 * k * x) + testutil::cplx{0, 0.2};
    });
  };
  const SpinorField a = normalize(testutil::spinor(coarse, trig(coarse), 1, 0.5, 0.25));
  const SpinorField b = normalize(testutil::spinor(fine, trig(fine), 1, 0.5, 0.25));
  CHECK(wavefn_error(a, b) < 1e-12);
  CHECK(wavefn_error(std::polar(1.0, 2.0) * a, b) < 1e-12);
  CHECK_THROWS_AS(wavefn_error(b, a), Error);
  CHECK_THROWS_AS(wavefn_error(a, normalize(testutil::random_smooth(make_grid(2, 10.0, 80), 3))), Error);
}
