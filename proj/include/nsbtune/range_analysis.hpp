// Dynamic range determination: the program is executed in 160-bit reference
// arithmetic and the magnitude extrema seen at every label are recorded.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsbtune/bigreal.hpp"
#include "nsbtune/frontend.hpp"

namespace nsbtune {

/// Exponent of the leading bit: floor(log2|x|), or 0 for x == 0.
int ufp_of(double x);
int ufp_of(const BigReal& x);

struct RangeInfo {
  BigReal max_abs;
  BigReal min_abs;
  int ufp = 0;
  /// ufp(min_abs); absent when the label was observed at 0.
  std::optional<int> lfp = 0;
  bool always_zero = true;
  /// Every observed value was computed from literals without rounding.
  bool exact = true;
  bool reached = false;
  /// Unary operators only: ufp of the largest |f'| over the observed
  /// argument magnitudes; absent when unbounded (sqrt near 0).
  std::optional<int> deriv_ufp;

  void observe(const BigReal& v, bool v_exact);
  /// Recomputes ufp/lfp from the extrema.
  void finalize();
};

class RangeMap {
 public:
  RangeMap() = default;
  explicit RangeMap(size_t labels) : entries_(labels) {}

  const RangeInfo& at(Label l) const { return entries_.at(l); }
  RangeInfo& at(Label l) { return entries_.at(l); }
  size_t size() const { return entries_.size(); }

  /// Folds in the extrema of another map over the same program. Associative
  /// and commutative.
  void merge(const RangeMap& other);

  /// Text dump, one record per label:
  ///   <label> <max_abs> <min_abs> <ufp> <lfp|-> <flags|-> <deriv_ufp|->
  /// flags: Z always zero, E exact, U unreached.
  std::string dump() const;
  static RangeMap load(const std::string& text);

 private:
  std::vector<RangeInfo> entries_;
};

/// Input vectors for `trials` executions, one value per input declaration
/// (label order), drawn uniformly from each declared interval. Input-free
/// programs get a single empty vector.
std::vector<std::vector<BigReal>> sample_inputs(const Program& program, int trials,
                                                std::uint64_t seed);

/// Executes the program on every input vector and records per-label ranges.
/// Throws DivergenceError or MathDomainError.
RangeMap analyze(const Program& program, int trials, std::uint64_t seed,
                 long iter_cap = 100000);

RangeMap analyze_inputs(const Program& program,
                        const std::vector<std::vector<BigReal>>& inputs,
                        long iter_cap = 100000);

}  // namespace nsbtune
