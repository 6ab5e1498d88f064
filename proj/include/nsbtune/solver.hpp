// Least-solution solver for the nsb constraint systems, carry-bit policy
// iteration, and the objective values.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nsbtune/constraints.hpp"

namespace nsbtune {

struct SolveStats {
  int policy_iterations = 0;
  int relaxation_passes = 0;
  int mp = 0;
  long msum = 0;
  long mop = 0;
  /// msum after every policy iteration that produced a tuning.
  std::vector<long> msum_trace;
  /// Constraints whose constant was lowered to break a loop cycle.
  int relaxed_constraints = 0;
};

/// A positive-weight cycle of Difference/Equal constraints.
struct CycleDiagnostic {
  /// Labels in dependency order: each label's bound feeds the next one.
  std::vector<Label> labels;
  int weight = 0;
  /// Indices of the cycle's constraints in the system.
  std::vector<size_t> constraints;

  std::string to_string() const;
};

using SolveResult = std::variant<Tuning, CycleDiagnostic>;

/// Pointwise-least tuning satisfying every constraint, or the first positive
/// cycle found. Throws OverflowGuard if some T exceeds 1024.
SolveResult solve_least(const ConstraintSystem& system, int* passes = nullptr);

/// Per-constraint amounts subtracted from the constants.
using Relaxation = std::vector<int>;

/// Lowers constants until no positive cycle remains. Each round removes the
/// weight of one cycle from a single edge, preferring loop-carried edges,
/// then the operand edge with the largest constant.
Relaxation break_cycles(const ConstraintSystem& system);
ConstraintSystem relax(ConstraintSystem system, const Relaxation& amounts);

bool satisfies(const Tuning& tuning, const ConstraintSystem& system);

SolveStats evaluate_objectives(const Tuning& tuning, const ConstraintSystem& system);

enum class Objective { Sum, MinMax, Ops };
enum class Mode { Ilp, Pi };

std::string_view to_string(Objective o);
std::string_view to_string(Mode m);
Objective parse_objective(std::string_view s);
Mode parse_mode(std::string_view s);

struct TuneOptions {
  Objective objective = Objective::Sum;
  Mode mode = Mode::Pi;
  bool uniform = false;
  /// Unset: positive cycles are reported. Set: requirements get k extra bits
  /// and cycles are broken by relaxation.
  std::optional<int> loop_slack;
};

struct TuneResult {
  Tuning tuning;
  CarryPolicy policy;
  SolveStats stats;
  ConstraintSystem system;
};

std::variant<TuneResult, CycleDiagnostic> policy_iterate(const Program& program,
                                                         const RangeMap& ranges,
                                                         const DefUseMap& defuse,
                                                         const TuneOptions& options);

}  // namespace nsbtune
