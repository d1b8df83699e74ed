#include "spgs/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "spgs/error.hpp"

static_assert(std::endian::native == std::endian::little, "field files are written in host byte order");

namespace spgs {

namespace fs = std::filesystem;

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t field_file_size(const GridSpec& grid) {
  return kFieldHeaderBytes + 3ull * 2ull * 8ull * grid.size() + 8ull;
}

namespace {

template <class T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <class T>
T take(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace

void write_field(const fs::path& path, const SpinorField& field) {
  const GridSpec& g = field.grid();
  std::string head;
  head.append("SPGS", 4);
  put<std::uint32_t>(head, kFieldFormatVersion);
  put<std::uint32_t>(head, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(head, static_cast<std::uint32_t>(g.points[a]));
  for (int a = 0; a < 3; ++a) put<double>(head, g.half_width[a]);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  std::uint64_t sum = 0xcbf29ce484222325ull;
  for (int c = 0; c < 3; ++c) {
    const std::size_t bytes = field[c].size() * sizeof(cplx);
    out.write(reinterpret_cast<const char*>(field[c].data()), static_cast<std::streamsize>(bytes));
    sum = fnv1a(field[c].data(), bytes, sum);
  }
  out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

SpinorField read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = "field file '" + path.string() + "'";
  if (data.size() < kFieldHeaderBytes + 8) throw Error(ErrorKind::checksum, where + " is truncated");
  if (data.compare(0, 4, "SPGS") != 0) throw Error(ErrorKind::io, where + " has no SPGS magic");
  const char* p = data.data() + 4;
  const auto version = take<std::uint32_t>(p);
  if (version != kFieldFormatVersion)
    throw Error(ErrorKind::version, where + " has format version " + std::to_string(version) + ", expected " +
                                        std::to_string(kFieldFormatVersion));
  const int dim = static_cast<int>(take<std::uint32_t>(p));
  std::array<int, 3> n{};
  std::array<double, 3> l{};
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(take<std::uint32_t>(p));
  for (int a = 0; a < 3; ++a) l[a] = take<double>(p);
  if (dim != 2 && dim != 3) throw Error(ErrorKind::io, where + " has invalid dimension");
  const GridSpec g = make_grid(dim, std::span<const double>(l.data(), dim), std::span<const int>(n.data(), dim));
  if (data.size() != field_file_size(g)) throw Error(ErrorKind::checksum, where + " has the wrong length (truncated?)");

  SpinorField f(g);
  std::uint64_t sum = 0xcbf29ce484222325ull;
  for (int c = 0; c < 3; ++c) {
    const std::size_t bytes = g.size() * sizeof(cplx);
    std::memcpy(f[c].data(), p, bytes);
    sum = fnv1a(p, bytes, sum);
    p += bytes;
  }
  if (take<std::uint64_t>(p) != sum) throw Error(ErrorKind::checksum, where + " failed its checksum");
  return f;
}

std::string convergence_csv(const ConvergenceRecord& record) {
  std::ostringstream os;
  os << kConvergenceCsvHeader << '\n' << std::setprecision(17);
  for (const auto& r : record.rows)
    os << r.iter << ',' << r.energy << ',' << r.energy_diff << ',' << r.residual_inf << ',' << r.wavefn_diff_inf << ','
       << r.theta << ',' << r.beta << ',' << r.backtracks << ',' << r.elapsed_seconds << '\n';
  return os.str();
}

void write_convergence_csv(const fs::path& path, const ConvergenceRecord& record) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out << convergence_csv(record);
}

namespace {

void write_matrix(const fs::path& path, const RealArray& v, int rows, int cols, std::size_t offset, std::size_t stride) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out << std::setprecision(10);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out << ' ';
      out << v[offset + (static_cast<std::size_t>(i) * cols + j) * stride];
    }
    out << '\n';
  }
}

}  // namespace

std::vector<fs::path> write_densities(const fs::path& dir, const std::string& prefix, const SpinorField& field) {
  const GridSpec& g = field.grid();
  fs::create_directories(dir);
  std::vector<fs::path> written;
  std::array<RealArray, 4> dens;
  for (int c = 0; c < 3; ++c) {
    dens[c].resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) dens[c][k] = std::norm(field[c][k]);
  }
  dens[3] = total_density(field);
  const char* names[4] = {"rho_p1", "rho_0", "rho_m1", "rho"};

  const int nx = g.points[0], ny = g.points[1];
  const std::size_t nz = static_cast<std::size_t>(g.points[2]);
  const std::size_t zoff = g.dim == 3 ? nz / 2 : 0;  // z = 0 plane
  for (int c = 0; c < 4; ++c) {
    const fs::path p = dir / (prefix + names[c] + ".txt");
    write_matrix(p, dens[c], nx, ny, zoff, nz);
    written.push_back(p);
  }

  if (g.dim == 3) {
    SpinorField vol(g);
    for (int c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < g.size(); ++k) vol[c][k] = dens[c][k];
    const fs::path p = dir / (prefix + "density_volume.spgs");
    write_field(p, vol);
    written.push_back(p);
    const fs::path iso = dir / (prefix + "isosurface_levels.txt");
    std::ofstream out(iso, std::ios::trunc);
    for (double level : kIsosurfaceLevels) out << level << '\n';
    written.push_back(iso);
  }
  return written;
}

// --- ini ---------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source_ = source;
  std::istringstream is(text);
  std::string line, section;
  int no = 0;
  auto bad = [&](const std::string& msg) {
    throw Error(ErrorKind::invalid_argument, source + ":" + std::to_string(no) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    std::string s = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (s.empty() || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) bad("empty section name");
      doc.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad("expected key = value");
    if (section.empty()) bad("key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) bad("empty key");
    auto& sec = doc.sections_[section];
    if (sec.count(key)) bad("duplicate key '" + key + "' in [" + section + "]");
    sec[key] = IniEntry{trim(s.substr(eq + 1)), no};
  }
  return doc;
}

IniDocument IniDocument::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool IniDocument::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const IniEntry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

const IniEntry& IniDocument::require(const std::string& section, const std::string& key) const {
  if (const IniEntry* e = find(section, key)) return *e;
  fail_missing(section, key);
}

void IniDocument::fail(const IniEntry& at, const std::string& message) const {
  throw Error(ErrorKind::invalid_argument, source_ + ":" + std::to_string(at.line) + ": " + message);
}

void IniDocument::fail_missing(const std::string& section, const std::string& key) const {
  throw Error(ErrorKind::invalid_argument, source_ + ": missing required key '" + key + "' in [" + section + "]");
}

std::vector<std::string> IniDocument::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const auto s = sections_.find(section); s != sections_.end())
    for (const auto& [k, v] : s->second) out.push_back(k);
  return out;
}

// --- run config ----------------------------------------------------------------

const char* to_string(SolveMethodKind m) noexcept {
  switch (m) {
    case SolveMethodKind::pcg: return "pcg";
    case SolveMethodKind::cm_pcg: return "cm_pcg";
    case SolveMethodKind::pgf: return "pgf";
  }
  return "?";
}

namespace {

class Reader {
 public:
  Reader(const IniDocument& d, std::string section) : d_(d), s_(std::move(section)) {}

  bool has(const std::string& k) const { return d_.has(s_, k); }

  double num(const std::string& k) const { return parse_num(d_.require(s_, k), k); }
  double num(const std::string& k, double def) const { return has(k) ? num(k) : def; }

  int integer(const std::string& k, int def) const {
    if (!has(k)) return def;
    const IniEntry& e = d_.require(s_, k);
    const double v = parse_num(e, k);
    if (v != std::floor(v) || std::abs(v) > 2e9) d_.fail(e, "'" + k + "' must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> nums(const std::string& k) const {
    const IniEntry& e = d_.require(s_, k);
    std::string t = e.value;
    for (char& ch : t)
      if (ch == ',') ch = ' ';
    std::istringstream is(t);
    std::vector<double> out;
    for (std::string w; is >> w;) out.push_back(parse_word(e, k, w));
    if (out.empty()) d_.fail(e, "'" + k + "' is empty");
    return out;
  }

  bool flag(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const IniEntry& e = d_.require(s_, k);
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    d_.fail(e, "'" + k + "' must be true or false");
  }

  std::string str(const std::string& k, const std::string& def) const { return has(k) ? d_.require(s_, k).value : def; }
  const IniEntry& entry(const std::string& k) const { return d_.require(s_, k); }

  template <class F>
  auto guarded(const std::string& k, F&& f) const {
    const IniEntry& e = d_.require(s_, k);
    try {
      return f(e.value);
    } catch (const Error& err) {
      d_.fail(e, err.what());
    }
  }

 private:
  double parse_word(const IniEntry& e, const std::string& k, const std::string& w) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used == w.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    d_.fail(e, "'" + k + "' expects a number, got '" + w + "'");
  }
  double parse_num(const IniEntry& e, const std::string& k) const { return parse_word(e, k, e.value); }

  const IniDocument& d_;
  std::string s_;
};

template <class T>
std::vector<T> broadcast(const IniDocument& doc, const IniEntry& e, const std::vector<double>& v, int dim,
                         const std::string& key) {
  if (v.size() != 1 && static_cast<int>(v.size()) != dim)
    doc.fail(e, "'" + key + "' needs 1 or " + std::to_string(dim) + " values");
  std::vector<T> out(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) out[static_cast<std::size_t>(a)] = static_cast<T>(v[v.size() == 1 ? 0 : a]);
  return out;
}

}  // namespace

GridSpec RunConfig::coarsest_grid() const {
  if (coarsest_points <= 0 || coarsest_points == grid.points[0]) return grid;
  std::array<int, 3> n{};
  const int shift = std::countr_zero(static_cast<unsigned>(grid.points[0] / coarsest_points));
  for (int a = 0; a < grid.dim; ++a) n[a] = grid.points[a] >> shift;
  return make_grid(grid.dim, std::span<const double>(grid.half_width.data(), grid.dim),
                   std::span<const int>(n.data(), grid.dim));
}

MultigridPlan RunConfig::plan_to(const GridSpec& fine) const {
  return MultigridPlan::between(coarsest_grid(), fine, solver);
}

MultigridPlan RunConfig::plan() const { return plan_to(grid); }

RunConfig parse_run_config(const IniDocument& doc) {
  RunConfig rc;

  const Reader g(doc, "grid");
  const int dim = g.integer("dim", 2);
  if (dim != 2 && dim != 3) doc.fail(g.entry("dim"), "dim must be 2 or 3");
  const auto hw = broadcast<double>(doc, g.entry("half_width"), g.nums("half_width"), dim, "half_width");
  const auto pts = broadcast<int>(doc, g.entry("points"), g.nums("points"), dim, "points");
  try {
    rc.grid = make_grid(dim, hw, pts);
  } catch (const Error& e) {
    doc.fail(g.entry("points"), e.what());
  }
  rc.coarsest_points = g.integer("coarsest_points", 0);
  if (rc.coarsest_points) {
    const int n = rc.grid.points[0];
    bool ok = rc.coarsest_points >= 4 && rc.coarsest_points <= n && n % rc.coarsest_points == 0 &&
              std::has_single_bit(static_cast<unsigned>(n / rc.coarsest_points));
    for (int a = 1; a < dim && ok; ++a) ok = rc.grid.points[a] % (n / rc.coarsest_points) == 0;
    if (!ok) doc.fail(g.entry("coarsest_points"), "coarsest_points must be points / 2^k");
  }

  const Reader p(doc, "physics");
  rc.physics.c0 = p.num("c0");
  rc.physics.c1 = p.num("c1");
  rc.physics.omega = p.num("omega");
  rc.physics.gamma = p.num("gamma");
  const std::string trap = p.str("trap", "harmonic");
  if (trap == "harmonic") {
    rc.physics.trap = TrapPotential::harmonic();
    if (p.has("trap_frequencies")) {
      const auto f = broadcast<double>(doc, p.entry("trap_frequencies"), p.nums("trap_frequencies"), dim,
                                       "trap_frequencies");
      for (int a = 0; a < dim; ++a) rc.physics.trap.frequencies[a] = f[static_cast<std::size_t>(a)];
    }
  } else if (trap == "harmonic_quartic") {
    rc.physics.trap = TrapPotential::harmonic_plus_quartic(p.num("quartic_a2", -0.2), p.num("quartic_a4", 0.5));
  } else {
    doc.fail(p.entry("trap"), "unknown trap '" + trap + "' (harmonic, harmonic_quartic)");
  }
  try {
    rc.physics.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_argument, doc.source() + ": [physics] " + e.what());
  }

  const Reader s(doc, "solver");
  if (s.has("method")) {
    const std::string m = s.str("method", "");
    if (m == "pcg") rc.method = SolveMethodKind::pcg;
    else if (m == "cm_pcg") rc.method = SolveMethodKind::cm_pcg;
    else if (m == "pgf") rc.method = SolveMethodKind::pgf;
    else doc.fail(s.entry("method"), "unknown method '" + m + "' (pcg, cm_pcg, pgf)");
  }
  if (s.has("preconditioner")) rc.solver.preconditioner = s.guarded("preconditioner", parse_preconditioner);
  if (s.has("stop")) rc.solver.stop = s.guarded("stop", parse_stop_criterion);
  rc.solver.tol = s.num("tol", rc.solver.tol);
  rc.solver.theta_trial = s.num("theta_trial", rc.solver.theta_trial);
  rc.solver.backtrack_factor = s.num("backtrack_factor", rc.solver.backtrack_factor);
  rc.solver.max_iters = s.integer("max_iters", rc.solver.max_iters);
  rc.solver.max_backtracks = s.integer("max_backtracks", rc.solver.max_backtracks);
  try {
    rc.solver.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_argument, doc.source() + ": [solver] " + e.what());
  }
  rc.pgf.dt = s.num("dt", rc.pgf.dt);
  if (s.has("pgf_shift") && s.str("pgf_shift", "") != "auto") rc.pgf.shift = s.num("pgf_shift");
  rc.pgf.stop = rc.solver.stop;
  rc.pgf.tol = rc.solver.tol;
  rc.pgf.max_iters = s.integer("pgf_max_iters", rc.pgf.max_iters);
  try {
    rc.pgf.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_argument, doc.source() + ": [solver] " + e.what());
  }
  if (rc.method == SolveMethodKind::cm_pcg && rc.coarsest_points == 0) rc.coarsest_points = rc.grid.points[0];

  const Reader q(doc, "guesses");
  const std::string init = q.str("initial", "c");
  if (init == "sweep-identical") {
    rc.guesses = identical_triples();
  } else if (init == "sweep-all") {
    rc.guesses = all_triples();
  } else {
    std::istringstream is(init);
    for (std::string part; std::getline(is, part, ';');) {
      part = trim(part);
      if (part.empty()) continue;
      rc.guesses.push_back(q.guarded("initial", [&](const std::string&) { return parse_guess_triple(part); }));
    }
    if (rc.guesses.empty()) doc.fail(q.entry("initial"), "no initial guesses given");
  }
  for (const auto& t : rc.guesses)
    for (GuessTag tag : t)
      if (tag == GuessTag::f && (rc.physics.trap.kind != TrapKind::harmonic || !(rc.physics.c0 > 0.0)))
        throw Error(ErrorKind::invalid_argument,
                    doc.source() + ": guess f needs a harmonic trap and c0 > 0");

  const Reader o(doc, "output");
  rc.output.directory = o.str("directory", rc.output.directory.string());
  rc.output.field = o.flag("field", rc.output.field);
  rc.output.density = o.flag("density", rc.output.density);
  rc.output.csv = o.flag("csv", rc.output.csv);

  const Reader c(doc, "compare");
  rc.compare_pgf = c.flag("pgf", false);

  const Reader st(doc, "study");
  if (st.has("points")) {
    for (double v : st.nums("points")) rc.study_points.push_back(static_cast<int>(v));
    rc.study_reference_points = st.integer("reference_points", 0);
    if (rc.study_reference_points <= 0) doc.fail_missing("study", "reference_points");
    std::vector<int> chain = rc.study_points;
    chain.push_back(rc.study_reference_points);
    for (std::size_t i = 1; i < chain.size(); ++i)
      if (chain[i] != 2 * chain[i - 1]) doc.fail(st.entry("points"), "study points must double up to reference_points");
  }
  return rc;
}

RunConfig load_run_config(const fs::path& path) { return parse_run_config(IniDocument::load(path)); }

}  // namespace spgs
