#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spgs/field.hpp"
#include "spgs/guesses.hpp"
#include "spgs/optimizer.hpp"
#include "spgs/pgf.hpp"

namespace spgs {

inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 48;

/// Little-endian binary field file: "SPGS", version, dim, N[3], L[3],
/// three row-major complex arrays, then an FNV-1a checksum of the payload.
void write_field(const std::filesystem::path& path, const SpinorField& field);
SpinorField read_field(const std::filesystem::path& path);
std::uint64_t field_file_size(const GridSpec& grid);

/// FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ull);

inline const char* kConvergenceCsvHeader =
    "iter,energy,energy_diff,residual_inf,wavefn_diff_inf,theta,beta,backtracks,elapsed_seconds";

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceRecord& record);
std::string convergence_csv(const ConvergenceRecord& record);

/// Text matrices |phi_1|^2, |phi_0|^2, |phi_-1|^2 and rho, one grid line per
/// row (x index down, y index across). 3D fields emit the z = 0 plane as text
/// plus the full density volume as a field file with real parts
/// (rho_1, rho_0, rho_-1) and the isosurface levels in a side file.
/// Returns the written paths.
std::vector<std::filesystem::path> write_densities(const std::filesystem::path& dir, const std::string& prefix,
                                                   const SpinorField& field);

inline constexpr double kIsosurfaceLevels[2] = {1e-4, 2e-5};

// --- run configuration ----------------------------------------------------

/// Flat sectioned key = value text. '#' starts a comment anywhere, ';' only at
/// the start of a line (it separates guess triples inside values).
struct IniEntry {
  std::string value;
  int line = 0;
};

class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& source);
  static IniDocument load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }
  const IniEntry* find(const std::string& section, const std::string& key) const;
  /// Throws invalid_argument naming the missing key.
  const IniEntry& require(const std::string& section, const std::string& key) const;
  /// "source:line: message"
  [[noreturn]] void fail(const IniEntry& at, const std::string& message) const;
  [[noreturn]] void fail_missing(const std::string& section, const std::string& key) const;
  const std::string& source() const { return source_; }
  std::vector<std::string> keys(const std::string& section) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, IniEntry>> sections_;
};

enum class SolveMethodKind { pcg, cm_pcg, pgf };
const char* to_string(SolveMethodKind m) noexcept;

struct OutputOptions {
  std::filesystem::path directory = "out";
  bool field = true;
  bool density = true;
  bool csv = true;
};

struct RunConfig {
  GridSpec grid;
  int coarsest_points = 0;  // cascade start; 0 means the fine grid only
  PhysicsParams physics;
  SolveMethodKind method = SolveMethodKind::cm_pcg;
  SolverConfig solver;
  PgfConfig pgf;
  std::vector<GuessTriple> guesses;
  OutputOptions output;
  bool compare_pgf = false;
  std::vector<int> study_points;  // h-halving sequence for convergence-study
  int study_reference_points = 0;

  GridSpec coarsest_grid() const;
  MultigridPlan plan() const;
  MultigridPlan plan_to(const GridSpec& fine) const;
};

RunConfig parse_run_config(const IniDocument& doc);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace spgs
