#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ancvi/rates.hpp"
#include "ancvi/solvers.hpp"

namespace ancvi::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

/// Exact header of every per-solver trace CSV.
inline constexpr std::string_view kTraceCsvHeader =
    "k,beta_k,bellman_err,dist_to_opt,dist_to_anti,bound_general,bound_monotone,bound_lower,wall_ns";

inline constexpr std::string_view kBoundsCsvHeader = "gamma,k,vi_upper,anc_general,anc_monotone,lower,opt_factor";

struct GarnetParams {
  std::size_t n_states = 10;
  std::size_t n_actions = 2;
  std::size_t branching = 2;
  std::uint64_t seed = 0;
  double gamma = 0.9;
  double reward_scale = 1.0;
};

struct HardParams {
  std::size_t n = 12;
  double gamma = 1.0;
  std::optional<std::filesystem::path> shift_file;
};

using Source = std::variant<std::filesystem::path, GarnetParams, HardParams>;

struct SolverSpec {
  SolverVariant variant = SolverVariant::AncVi;
  double eps = 0.0;  // ApxAncVi noise bound
};

/// zero | lower | upper | random, or a JSON file holding the start vector.
/// Absent means zero (the instance's own u0 for hard sources).
struct WarmSpec {
  enum class Mode { Zero, Lower, Upper, Random, File } mode = Mode::Zero;
  std::filesystem::path file;
};

struct RunSpec {
  std::optional<Source> source;  // cmd_verify runs the default Garnet sweep when absent
  std::vector<SolverSpec> solvers;
  std::size_t iterations = 100;
  std::optional<WarmSpec> warm;
  ValueKind kind = ValueKind::StateValue;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  bool timing = false;   // fill the wall_ns column (breaks byte-identical reruns)
  double tighten = 1.0;  // hidden: scales upper bounds in cmd_verify
};

struct SweepSpec {
  std::vector<double> gammas;
  std::vector<std::size_t> ks;
  std::filesystem::path out_dir = ".";
};

/// Gamma grid {0.01, 0.05, 0.10, ..., 0.95, 0.99}.
std::vector<double> default_gamma_grid();

/// Runs every solver on the source and writes trace_<label>.csv per solver
/// plus summary.json into out_dir. Returns an exit code.
int cmd_solve(const RunSpec& spec, std::ostream& log);

/// Runs the solvers, checks every applicable bound, writes report.json.
/// Exit 0 when no bound is violated, 1 otherwise.
int cmd_verify(const RunSpec& spec, std::ostream& log);

/// Writes bounds.csv over the grid; exit 1 if an optimality factor exceeds 4.
int cmd_sweep_bounds(const SweepSpec& spec, std::ostream& log);

/// Writes the worst-case chain (mdp.json, u0.json, fixed_point.json).
int cmd_hard(const HardParams& params, const std::filesystem::path& out_dir, std::ostream& log);

/// Loads and validates an MDP JSON file, printing the report.
int cmd_validate(const std::filesystem::path& file, std::ostream& log);

/// Parses argv-style arguments (without the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits, round-trip exact for doubles.
std::string format_double(double x);

}  // namespace ancvi::bench
