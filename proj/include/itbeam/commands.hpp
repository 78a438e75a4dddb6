#pragma once

// Experiment drivers behind the `itbeam` executable. Each driver builds its
// CSV in memory (so tests can inspect it) and a cmd_* wrapper writes it.

#include "itbeam/cr_solver.hpp"
#include "itbeam/csv.hpp"
#include "itbeam/decentralized.hpp"
#include "itbeam/model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace itbeam::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitNoConvergence = 3,
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;  // replaces a generative scenario's seed
  double tol = 1e-5;                  // bits
  std::string out;                    // empty or "-" means stdout
};

NetworkInstance open_scenario(const CommonOptions& opts);

/// Column name of Gamma_ij (0-based cells, printed 1-based).
std::string gamma_column(std::size_t i, std::size_t j, std::size_t cells);

/// K x K row-major table from "value" (every ordered pair) and "i:j:value"
/// (one ordered pair, 1-based) entries, applied in order.
std::vector<double> parse_pair_table(const std::vector<std::string>& entries,
                                     std::size_t cells, double fallback);

/// The K(K-1) off-diagonal levels in row-major order.
ItVector it_from_list(const std::vector<double>& values, std::size_t cells);
std::vector<double> read_number_file(const std::string& path);

struct SolveOptions : CommonOptions {
  std::optional<std::size_t> cell;  // 1-based; all cells when unset
  std::vector<double> gamma;        // K(K-1) levels, row-major
};
CsvTable solve_table(const NetworkInstance& net, const SolveOptions& opts);
int cmd_solve_cr(const SolveOptions& opts, std::ostream& report);

struct SweepOptions : CommonOptions {
  std::size_t grid = 60;
};
CsvTable sweep_table(const NetworkInstance& net, const SweepOptions& opts);
int cmd_sweep(const SweepOptions& opts, std::ostream& report);

struct DecentralizedOptions : CommonOptions {
  std::string init = "zf";  // zf, mrt or file
  std::string init_file;
  std::vector<std::string> alpha;
  std::vector<std::string> delta;  // empty means 0.1 * min Gamma_bar
  int max_iters = 200;
};
RunConfig run_config(const NetworkInstance& net, const DecentralizedOptions& opts);
ItVector initial_levels(const NetworkInstance& net, const DecentralizedOptions& opts);
CsvTable trajectory_table(const NetworkInstance& net, const Trajectory& traj,
                          const DecentralizedOptions& opts);
int cmd_decentralized(const DecentralizedOptions& opts, std::ostream& report);

struct OracleOptions : CommonOptions {
  std::size_t grid = 60;  // t points per user
  std::size_t phi = 1;
  std::size_t rho = 1;
  std::size_t samples = 0;  // > 0 switches to random sampling
};
CsvTable oracle_table(const NetworkInstance& net, const OracleOptions& opts);
int cmd_oracle(const OracleOptions& opts, std::ostream& report);

CsvTable baselines_table(const NetworkInstance& net);
int cmd_baselines(const CommonOptions& opts, std::ostream& report);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions : CommonOptions {
  std::size_t levels = 5;      // random IT tables per check
  std::uint64_t battery_seed = 1;
};
std::vector<CheckResult> verify_battery(const NetworkInstance& net,
                                        const VerifyOptions& opts);
int cmd_verify(const VerifyOptions& opts, std::ostream& report);

}  // namespace itbeam::cli
