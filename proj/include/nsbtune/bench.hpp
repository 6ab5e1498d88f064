// Embedded benchmark corpus, experiment grid and report writers.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsbtune/emulator.hpp"
#include "nsbtune/formats.hpp"
#include "nsbtune/solver.hpp"

namespace nsbtune {

struct BenchmarkCase {
  std::string name;
  std::string source;
  /// Variable named by the case's require_nsb directive.
  std::string target;
};

const std::vector<BenchmarkCase>& corpus();
/// Throws Error for unknown names.
const BenchmarkCase& find_case(const std::string& name);

struct Job {
  std::string case_name;
  int requirement = 0;
  Mode mode = Mode::Pi;
  Objective objective = Objective::Sum;
  bool uniform = false;
};

struct BenchOptions {
  std::vector<std::string> cases;
  std::vector<int> requirements = {8, 12, 16, 24, 32, 48};
  std::vector<Mode> modes = {Mode::Ilp, Mode::Pi};
  std::vector<Objective> objectives = {Objective::Sum};
  bool uniform_both = false;
  int jobs = 1;
  std::uint64_t seed = 1;
  int trials = 100;
  /// Unset picks, per case, the smallest slack whose jobs all pass on an
  /// independent calibration sample.
  std::optional<int> loop_slack;
  int max_loop_slack = 16;
  bool validate = true;
};

struct JobResult {
  Job job;
  /// "ok", "cycle: <labels>" or "error: <message>".
  std::string status;
  std::optional<TuneResult> tune;
  Summary summary;
  std::optional<ValidationReport> validation;
  double wall_ms = 0;
  int loop_slack = 0;
  std::string tuning_json;

  bool ok() const { return status == "ok"; }
};

std::vector<Job> expand_grid(const BenchOptions& options);

/// Runs the grid; results come back in grid order. Job failures are
/// recorded, never thrown.
std::vector<JobResult> run_bench(const BenchOptions& options);

/// Seed of the calibration sample used when the slack is picked automatically.
std::uint64_t calibration_seed(std::uint64_t seed);

/// Tuning JSON for one result.
std::string tuning_json(const Program& program, const TuneResult& result, Objective objective,
                        bool uniform);
/// Reads the "labels" array of a tuning JSON back into a Tuning.
Tuning tuning_from_json(const std::string& text);

/// wall_ms stays empty unless `timings` is set, so equal grids give equal
/// bytes.
std::string bench_csv(const std::vector<JobResult>& results, bool timings = false);
std::string bench_markdown(const std::vector<JobResult>& results, bool timings = false);

}  // namespace nsbtune
