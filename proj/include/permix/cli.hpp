#pragma once

// Command-line front end. Every subcommand builds a Report; run() parses
// flags, executes, and writes JSON or CSV.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "permix/group.hpp"
#include "permix/report.hpp"

namespace permix::cli {

enum class Command { mixing, construct, fourier, concentration, inequality, threshold };

std::string command_name(Command c);

struct ExperimentConfig {
  Command command = Command::mixing;
  std::string action;  // second-level subcommand, e.g. "kedlaya"; empty for mixing/threshold

  int n = 5;
  std::optional<Parity> parity;  // each command picks its own default
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 100000;
  int trials = 100;
  std::optional<double> density;

  // constructions
  std::optional<int> t;
  std::vector<int> T;  // 1-based on the command line and here
  std::optional<int> basepoint;  // 1-based
  bool check_product_free = false;

  // mixing
  std::string family = "random";  // random | kedlaya | surplus
  std::optional<int> m;
  bool monte_carlo = false;

  // concentration
  int lambdas = 20;
  double floor = 1e-15;
  std::string matrix_path;

  // threshold
  double alpha = 0.0, beta = 0.0, gamma = 0.0;

  std::string output_path;
  Format format = Format::json;
  bool rational_mode = false;
  bool timing = false;
  std::optional<unsigned> threads;
};

/// The configuration as embedded in reports. Output path and thread count
/// are left out so that they cannot change the bytes of a report.
Json config_json(const ExperimentConfig& config);

/// Executes one experiment. Throws DomainError for invalid configurations
/// and SizeError / BudgetError when a compute limit is hit.
Report run_experiment(const ExperimentConfig& config);

/// Version string of this build ("0.1.0-<git describe>").
std::string version();

/// Full command-line entry point. Exit codes: 0 ok, 1 runtime failure,
/// 2 usage or domain error, 3 compute budget or size cap exceeded.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace permix::cli
