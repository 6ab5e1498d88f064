// Random difference-constraint systems and an exhaustive-search reference
// for the solver.

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "nsbtune/solver.hpp"

namespace nsbtune::oracle {

inline ConstraintSystem random_system(std::mt19937_64& rng, int max_vars = 6, int max_const = 6) {
  std::uniform_int_distribution<int> nvars(1, max_vars);
  const int n = nvars(rng);
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_int_distribution<int> cst(-max_const, max_const);
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> ncons(1, 2 * n);
  ConstraintSystem s;
  for (int v = 0; v < n; ++v) {
    s.vars.push_back(static_cast<Label>(v));
    if (kind(rng) < 5) s.op_labels.push_back(static_cast<Label>(v));
  }
  const int m = ncons(rng);
  for (int i = 0; i < m; ++i) {
    Constraint c;
    int k = kind(rng);
    c.v = static_cast<Label>(var(rng));
    if (k < 3) {
      c.kind = ConstraintKind::LowerBound;
      c.c = cst(rng);
    } else if (k < 9) {
      c.kind = ConstraintKind::Difference;
      c.w = static_cast<Label>(var(rng));
      c.c = cst(rng);
    } else {
      c.kind = ConstraintKind::Equal;
      c.w = static_cast<Label>(var(rng));
    }
    s.constraints.push_back(c);
  }
  return s;
}

struct BoxOptimum {
  bool feasible = false;
  long msum = std::numeric_limits<long>::max();
  int mp = std::numeric_limits<int>::max();
  long mop = std::numeric_limits<long>::max();
};

/// Enumerates every tuning in [0, bound]^vars and keeps the best value of
/// each objective over the satisfying ones.
inline BoxOptimum exhaustive(const ConstraintSystem& s, int bound) {
  BoxOptimum best;
  const size_t n = s.vars.size();
  std::vector<int> t(n, 0);
  Tuning tuning;
  for (;;) {
    for (size_t i = 0; i < n; ++i) tuning.nsb[s.vars[i]] = t[i];
    bool ok = true;
    for (const Constraint& c : s.constraints) {
      if (!c.holds(tuning)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      best.feasible = true;
      long sum = 0, ops = 0;
      int mx = 0;
      for (size_t i = 0; i < n; ++i) {
        sum += t[i];
        mx = std::max(mx, t[i]);
      }
      for (Label l : s.op_labels) ops += tuning.nsb[l];
      best.msum = std::min(best.msum, sum);
      best.mp = std::min(best.mp, mx);
      best.mop = std::min(best.mop, ops);
    }
    size_t i = 0;
    while (i < n && t[i] == bound) t[i++] = 0;
    if (i == n) break;
    ++t[i];
  }
  return best;
}

/// Empty when the solver agrees with exhaustive search on `s`.
inline std::string check(const ConstraintSystem& s, int bound) {
  BoxOptimum box = exhaustive(s, bound);
  SolveResult r = solve_least(s);
  if (auto* cycle = std::get_if<CycleDiagnostic>(&r)) {
    if (box.feasible) return "cycle reported on a feasible system";
    long w = 0;
    for (size_t i : cycle->constraints) {
      const Constraint& c = s.constraints.at(i);
      if (c.kind == ConstraintKind::Difference) w += c.c;
    }
    if (w <= 0 || w != cycle->weight) return "cycle weight " + std::to_string(w) + " not positive";
    return {};
  }
  const Tuning& t = std::get<Tuning>(r);
  if (!satisfies(t, s)) return "solution violates the system";
  for (Label v : s.vars) {
    if (t.at(v) < 0) return "negative nsb";
  }
  SolveStats st = evaluate_objectives(t, s);
  if (!box.feasible) {
    for (Label v : s.vars) {
      if (t.at(v) > bound) return {};
    }
    return "solution inside the box missed by exhaustive search";
  }
  if (st.msum != box.msum) {
    return "msum " + std::to_string(st.msum) + " != " + std::to_string(box.msum);
  }
  if (st.mp != box.mp) return "mp " + std::to_string(st.mp) + " != " + std::to_string(box.mp);
  if (st.mop != box.mop) return "mop " + std::to_string(st.mop) + " != " + std::to_string(box.mop);
  return {};
}

}  // namespace nsbtune::oracle
