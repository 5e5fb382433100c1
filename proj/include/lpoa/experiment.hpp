#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpoa/analysis.hpp"
#include "lpoa/driver.hpp"

namespace lpoa {

/// The (problem, p) grid of the rate experiments with per-problem tolerances.
struct ExperimentMatrix {
  std::vector<std::string> problems;
  std::vector<double> p_values;
  std::map<std::string, double> epsilons;

  static ExperimentMatrix defaults();
  double epsilon_for(const std::string& key) const;
};

struct SweepOptions {
  std::string problem_key;
  std::vector<double> p_values;
  std::optional<double> epsilon;  // defaults to the matrix value for the problem
  int max_iterations = 1000;
  std::uint64_t seed = kDefaultSeed;
  bool record_pairs = false;
  int jobs = 1;
};

struct SweepEntry {
  double p = 0.0;
  double p_star = 0.0;
  double epsilon = 0.0;
  /// "converged", "max_iterations", "solver_failure" or "error".
  std::string status;
  std::string message;
  RunTrace trace;
  RateFit fit;
  int iterations = 0;

  bool ok() const { return status == "converged"; }
};

/// Entries sorted by p ascending.
struct SweepResult {
  std::string problem_key;
  int q = 0;
  std::vector<SweepEntry> entries;

  bool any_failed() const;
};

/// Runs every p independently; up to `jobs` runs at a time.
SweepResult run_sweep(const SweepOptions& opt);
/// One run after the other on the calling thread.
SweepResult run_sweep_serial(const SweepOptions& opt);

/// Fit of the monotone envelope of a converged trace.
RateFit fit_trace(const RunTrace& trace, int q);

inline constexpr const char* kSummaryHeader = "p,p_star,c_hat,r_squared,iterations";

/// Converged runs only, rows sorted by p.
std::string summary_csv(const SweepResult& res);
/// Every run with its status: p,status,iterations,message.
std::string status_csv(const SweepResult& res);

/// Writes trace_p<p>.json per run, summary.csv, status.csv and (optionally)
/// sweep.svg into dir, each atomically.
void write_sweep_outputs(const SweepResult& res, const std::string& dir, bool svg);

/// Parses "1.25,2,3" into p values.
std::vector<double> parse_p_list(const std::string& csv);

/// %g-style short label for p in file names and legends.
std::string p_label(double p);

}  // namespace lpoa
