#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "spgs/error.hpp"
#include "spgs/io.hpp"

using namespace spgs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "spgs_unit";
  fs::create_directories(d);
  return d / name;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::io;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

const char* kBase = R"(
# comment
[grid]
dim = 2
half_width = 16
points = 128
coarsest_points = 32

[physics]
c0 = 100
c1 = 1
omega = 0.1   # trailing comment
; full-line comment
gamma = 0.3

[solver]
method = cm_pcg
tol = 1e-12
stop = residual_inf

[guesses]
initial = a; b,bbar,e

[output]
directory = results
density = false
)";

}  // namespace

TEST_CASE("field file round trip") {
  const GridSpec g = make_grid(2, std::array{3.0, 5.0}, std::array{8, 16});
  const SpinorField f = testutil::random_field(g, 77);
  const fs::path p = scratch("rt.spgs");
  write_field(p, f);
  CHECK(fs::file_size(p) == field_file_size(g));
  const SpinorField r = read_field(p);
  CHECK(r.grid() == g);
  for (int c = 0; c < 3; ++c) CHECK(std::memcmp(r[c].data(), f[c].data(), f[c].size() * sizeof(cplx)) == 0);

  CHECK(field_file_size(make_grid(3, 16.0, 64)) == 48 + 3ull * 2 * 64 * 64 * 64 * 8 + 8);

  SUBCASE("corruption") {
    std::string bytes;
    {
      std::ifstream in(p, std::ios::binary);
      bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    const fs::path q = scratch("bad.spgs");
    auto dump = [&](const std::string& b) {
      std::ofstream out(q, std::ios::binary | std::ios::trunc);
      out.write(b.data(), static_cast<std::streamsize>(b.size()));
    };
    std::string flipped = bytes;
    flipped[100] ^= 0x10;
    dump(flipped);
    CHECK(kind_of([&] { read_field(q); }) == ErrorKind::checksum);
    dump(bytes.substr(0, bytes.size() - 20));
    CHECK(kind_of([&] { read_field(q); }) == ErrorKind::checksum);
    std::string bumped = bytes;
    bumped[4] = 2;
    dump(bumped);
    CHECK(kind_of([&] { read_field(q); }) == ErrorKind::version);
    CHECK(kind_of([&] { read_field(scratch("missing.spgs")); }) == ErrorKind::io);
  }
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("convergence csv") {
  ConvergenceRecord rec;
  IterationRow r;
  r.iter = 1;
  r.energy = 1.5;
  r.backtracks = 2;
  rec.rows.push_back(r);
  const std::string csv = convergence_csv(rec);
  CHECK(csv.rfind("iter,energy,energy_diff,residual_inf,wavefn_diff_inf,theta,beta,backtracks,elapsed_seconds\n", 0) == 0);
  CHECK(csv.find("\n1,1.5,0,0,0,0,0,2,0\n") != std::string::npos);
}

TEST_CASE("density output") {
  const GridSpec g = make_grid(2, 4.0, 8);
  const SpinorField f = normalize(testutil::random_field(g, 3));
  const fs::path dir = scratch("dens");
  fs::remove_all(dir);
  const auto files = write_densities(dir, "t_", f);
  REQUIRE(files.size() == 4);
  std::ifstream in(dir / "t_rho.txt");
  double sum = 0.0, v;
  int count = 0;
  while (in >> v) {
    sum += v;
    ++count;
  }
  CHECK(count == 64);
  CHECK(sum * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-9));

  const GridSpec g3 = make_grid(3, 4.0, 8);
  const auto f3 = write_densities(dir, "v_", normalize(testutil::random_field(g3, 4)));
  CHECK(f3.size() == 6);
  const SpinorField vol = read_field(dir / "v_density_volume.spgs");
  double mass = 0.0;
  for (int c = 0; c < 3; ++c)
    for (auto x : vol[c]) mass += x.real();
  CHECK(mass * g3.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run config") {
  const RunConfig rc = parse_run_config(IniDocument::parse(kBase, "base.ini"));
  CHECK(rc.grid.points[1] == 128);
  CHECK(rc.grid.h(0) == doctest::Approx(0.25));
  CHECK(rc.physics.c0 == 100);
  CHECK(rc.physics.omega == 0.1);
  CHECK(rc.method == SolveMethodKind::cm_pcg);
  CHECK(rc.solver.stop == StopCriterion::residual_inf);
  CHECK(rc.solver.tol == 1e-12);
  REQUIRE(rc.guesses.size() == 2);
  CHECK(rc.guesses[1] == GuessTriple{GuessTag::b, GuessTag::bbar, GuessTag::e});
  CHECK(rc.output.directory == "results");
  CHECK(!rc.output.density);
  const MultigridPlan plan = rc.plan();
  CHECK(plan.levels.size() == 3);
  CHECK(plan.levels[0].points[0] == 32);

  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kBase;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  const std::string missing = message_of([&] { parse_run_config(IniDocument::parse(with("c0 = 100\n", ""), "m.ini")); });
  CHECK(missing.find("'c0'") != std::string::npos);
  CHECK(missing.find("[physics]") != std::string::npos);

  const std::string badnum = message_of([&] { parse_run_config(IniDocument::parse(with("c1 = 1", "c1 = one"), "b.ini")); });
  CHECK(badnum.rfind("b.ini:11:", 0) == 0);

  CHECK(message_of([&] { parse_run_config(IniDocument::parse(with("points = 128", "points = 127"), "p.ini")); })
            .rfind("p.ini:6:", 0) == 0);
  CHECK(message_of([&] { parse_run_config(IniDocument::parse(with("method = cm_pcg", "method = newton"), "x.ini")); })
            .find("unknown method") != std::string::npos);
  CHECK(message_of([&] { parse_run_config(IniDocument::parse(with("initial = a; b,bbar,e", "initial = q"), "g.ini")); })
            .rfind("g.ini:22:", 0) == 0);
  CHECK(message_of([] { IniDocument::parse("[a]\nnovalue\n", "s.ini"); }).rfind("s.ini:2:", 0) == 0);
  CHECK(message_of([] { IniDocument::parse("[a]\nk = 1\nk = 2\n", "d.ini"); }).find("duplicate") != std::string::npos);
  CHECK(message_of([&] { parse_run_config(IniDocument::parse(with("coarsest_points = 32", "coarsest_points = 48"), "c.ini")); })
            .rfind("c.ini:7:", 0) == 0);

  const RunConfig sweep = parse_run_config(IniDocument::parse(with("initial = a; b,bbar,e", "initial = sweep-all"), "s.ini"));
  CHECK(sweep.guesses.size() == 1000);
}

TEST_CASE("shipped configs load") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(SPGS_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_run_config(entry.path()).plan().validate());
    ++count;
  }
  CHECK(count >= 30);
}
