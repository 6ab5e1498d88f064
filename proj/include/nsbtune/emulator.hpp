// Mixed-precision emulation of a tuned program and validation of the
// per-variable accuracy contract against the reference interpreter.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsbtune/bigreal.hpp"
#include "nsbtune/constraints.hpp"

namespace nsbtune {

/// significand * 2^exponent with |significand| < 2^nsb_used.
struct MixedValue {
  mpz_class significand;
  long exponent = 0;
  int nsb_used = 0;

  BigReal to_real() const;
};

/// Rounds x to nsb significant bits, nearest with ties to even.
/// Requires nsb >= 1 and x finite.
MixedValue round_to(const BigReal& x, int nsb);

enum class RoundingSites {
  All,         // constants, reads, operator results and definitions
  WritesOnly,  // operator results and definitions
};

struct EmulationOptions {
  RoundingSites sites = RoundingSites::All;
  long iter_cap = 100000;
};

/// One reference execution: required-variable values and visited labels.
struct ReferenceRun {
  std::map<std::string, BigReal> required;
  std::vector<char> visited;
};

ReferenceRun reference_run(const Program& program, const std::vector<BigReal>& inputs,
                           long iter_cap = 100000);

/// Runs the program rounding every tuned label to its nsb. A 0-bit label is
/// rounded to 1 bit when `visited` (the reference run on the same inputs)
/// marks it; otherwise reaching it throws ReachedZeroNsb.
std::map<std::string, BigReal> emulate(const Program& program, const Tuning& tuning,
                                       const std::vector<BigReal>& inputs,
                                       const EmulationOptions& options = {},
                                       const std::vector<char>* visited = nullptr);

struct TrialRow {
  BigReal reference;
  BigReal emulated;
  BigReal error;
  BigReal bound;
  bool pass = false;
};

struct ValidationReport {
  std::string program;
  std::string target_var;
  int nsb_required = 0;
  int trials = 0;
  BigReal max_err;
  /// Smallest per-trial bound 2^(ufp(reference) - n + 1).
  BigReal bound;
  bool pass = false;
  std::vector<TrialRow> rows;

  std::string to_json() const;
};

/// Reference and emulated runs on identical sampled inputs. `cache`, when
/// given, holds the reference runs for exactly those inputs.
ValidationReport validate(const Program& program, const Tuning& tuning, const std::string& var,
                          int nsb, int trials, std::uint64_t seed,
                          const EmulationOptions& options = {},
                          const std::vector<ReferenceRun>* cache = nullptr);

std::vector<ReferenceRun> reference_runs(const Program& program, int trials, std::uint64_t seed,
                                         long iter_cap = 100000);

}  // namespace nsbtune
