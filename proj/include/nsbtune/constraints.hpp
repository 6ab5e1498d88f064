// Integer constraints over per-label significant-bit counts.
//
// T(l) is the number of significant bits kept at label l, so the value there
// carries an absolute error of at most 2^(ufp(l) - T(l) + 1). Every rule is a
// lower bound, either constant or relative to another label, which keeps the
// feasible set closed under pointwise minimum.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsbtune/frontend.hpp"
#include "nsbtune/range_analysis.hpp"

namespace nsbtune {

/// Label -> number of significant bits.
struct Tuning {
  std::map<Label, int> nsb;

  int at(Label l) const { return nsb.at(l); }
  bool operator==(const Tuning&) const = default;
};

enum class ConstraintKind {
  LowerBound,  // T(v) >= c
  Difference,  // T(v) >= T(w) + c
  Equal,       // T(v) == T(w)
};

/// Which rule emitted a constraint.
enum class Origin {
  Requirement,   // require_nsb directive on a reaching definition
  ControlGuard,  // definition read by a loop or branch condition
  Operand,       // operand of an arithmetic operator or function
  Assignment,    // right-hand side of a definition
  ReachingDef,   // definition reaching a read in evaluation order
  LoopCarried,   // definition reaching a read through a loop back edge
  Uniform,       // one precision per variable
};

std::string_view to_string(Origin o);

struct Constraint {
  ConstraintKind kind = ConstraintKind::LowerBound;
  Label v = 0;
  Label w = 0;
  int c = 0;
  Origin origin = Origin::Requirement;
  /// Label whose rule produced the constraint.
  Label site = 0;
  /// Whether c includes the site's carry bit.
  bool carry = false;

  bool holds(const Tuning& t) const;
  std::string to_string() const;
  bool operator==(const Constraint&) const = default;
};

/// Error position of a value: ufp and ulp of its absolute error. An empty
/// ufp_e means the value is exact.
struct ErrInfo {
  std::optional<int> ufp_e;
  std::optional<int> ulp_e;

  bool exact() const { return !ufp_e.has_value(); }
  static ErrInfo exact_value() { return {}; }
};

/// 0 when the two operand errors cannot overlap (one lies entirely above
/// the other, or either operand is exact), 1 otherwise.
int carry_bit(const ErrInfo& x, const ErrInfo& y);

/// Operator label -> carry bit.
using CarryPolicy = std::map<Label, int>;

/// The all-ones policy: every operator may propagate a carry.
CarryPolicy pessimistic_policy(const Program& program);

struct Requirement {
  std::string var;
  Label directive = 0;
  int nsb = 0;
  std::vector<Label> defs;
};

struct ConstraintSystem {
  std::vector<Label> vars;
  std::vector<Constraint> constraints;
  std::vector<Label> op_labels;
  /// Variable -> its tuned occurrence labels (reads and definitions).
  std::map<std::string, std::vector<Label>> var_occurrences;
  std::vector<Requirement> requirements;
  bool uniform = false;

  /// One constraint per line: "T5 >= T9 + 3", "T5 >= 12", "T5 == T7".
  std::string dump() const;
};

/// Parses the dump format back into bare constraints (origins are lost).
std::vector<Constraint> parse_constraints(const std::string& text);

/// Builds the constraint system for a program under a carry policy.
/// `requirement_slack` extra bits are added to every require_nsb.
/// Throws MissingRange or DivisorMayVanish.
ConstraintSystem generate(const Program& program, const RangeMap& ranges,
                          const DefUseMap& defuse, const CarryPolicy& policy,
                          int requirement_slack = 0);

/// Adds Equal constraints chaining the occurrences of every variable.
/// Idempotent.
ConstraintSystem uniformize(ConstraintSystem system);

/// Error positions implied by a solved tuning. Literals are exact; every
/// other label rounds at ufp - T, and its error reaches down to the lowest
/// ulp among its own and its inputs' errors.
std::map<Label, ErrInfo> error_info(const Program& program, const RangeMap& ranges,
                                    const DefUseMap& defuse, const Tuning& tuning);

/// Re-evaluates the carry bit of every binary operator from `errors`,
/// only ever lowering bits of `current`.
CarryPolicy refine_policy(const Program& program, const CarryPolicy& current,
                          const std::map<Label, ErrInfo>& errors);

}  // namespace nsbtune
