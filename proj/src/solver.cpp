#include "nsbtune/solver.hpp"

#include <algorithm>
#include <unordered_map>

namespace nsbtune {

std::string CycleDiagnostic::to_string() const {
  std::string s = "positive constraint cycle (weight " + std::to_string(weight) + "):";
  for (Label l : labels) s += " " + std::to_string(l);
  return s;
}

namespace {

struct Edge {
  size_t constraint;
  size_t from;
  size_t to;
  int c;
};

}  // namespace

SolveResult solve_least(const ConstraintSystem& system, int* passes) {
  std::vector<Label> labels = system.vars;
  std::unordered_map<Label, size_t> index;
  auto slot = [&](Label l) {
    auto [it, fresh] = index.emplace(l, labels.size());
    if (fresh) labels.push_back(l);
    return it->second;
  };
  for (size_t i = 0; i < system.vars.size(); ++i) index.emplace(system.vars[i], i);

  std::vector<Edge> edges;
  std::vector<std::pair<size_t, int>> floors;
  for (size_t i = 0; i < system.constraints.size(); ++i) {
    const Constraint& c = system.constraints[i];
    switch (c.kind) {
      case ConstraintKind::LowerBound:
        floors.emplace_back(slot(c.v), c.c);
        break;
      case ConstraintKind::Difference:
        edges.push_back({i, slot(c.w), slot(c.v), c.c});
        break;
      case ConstraintKind::Equal:
        edges.push_back({i, slot(c.w), slot(c.v), 0});
        edges.push_back({i, slot(c.v), slot(c.w), 0});
        break;
    }
  }

  const size_t n = labels.size();
  std::vector<long long> t(n, 0);
  for (auto [v, c] : floors) t[v] = std::max<long long>(t[v], c);
  std::vector<long> pred(n, -1);
  size_t last = 0;
  bool changed = true;
  int pass = 0;
  while (changed && pass < static_cast<int>(std::max<size_t>(n, 1))) {
    ++pass;
    changed = false;
    for (size_t e = 0; e < edges.size(); ++e) {
      const Edge& ed = edges[e];
      if (t[ed.from] + ed.c > t[ed.to]) {
        t[ed.to] = t[ed.from] + ed.c;
        pred[ed.to] = static_cast<long>(e);
        last = ed.to;
        changed = true;
      }
    }
  }
  if (passes) *passes = pass;

  if (changed) {
    size_t x = last;
    for (size_t k = 0; k < n; ++k) {
      if (pred[x] < 0) throw Error("internal: broken predecessor chain");
      x = edges[pred[x]].from;
    }
    std::vector<size_t> cycle_edges;
    size_t y = x;
    do {
      cycle_edges.push_back(static_cast<size_t>(pred[y]));
      y = edges[pred[y]].from;
    } while (y != x);
    std::reverse(cycle_edges.begin(), cycle_edges.end());
    CycleDiagnostic d;
    for (size_t e : cycle_edges) {
      d.labels.push_back(labels[edges[e].from]);
      d.weight += edges[e].c;
      d.constraints.push_back(edges[e].constraint);
    }
    return d;
  }

  Tuning tuning;
  for (size_t i = 0; i < n; ++i) {
    if (t[i] > 1024) throw OverflowGuard(labels[i], static_cast<int>(t[i]));
    tuning.nsb[labels[i]] = static_cast<int>(t[i]);
  }
  return tuning;
}

ConstraintSystem relax(ConstraintSystem system, const Relaxation& amounts) {
  for (size_t i = 0; i < amounts.size() && i < system.constraints.size(); ++i) {
    system.constraints[i].c -= amounts[i];
  }
  return system;
}

Relaxation break_cycles(const ConstraintSystem& system) {
  Relaxation amounts(system.constraints.size(), 0);
  // Every round strictly lowers one constant, so this bounds pathological
  // inputs only.
  for (int round = 0; round < 100000; ++round) {
    SolveResult r = solve_least(relax(system, amounts));
    auto* cycle = std::get_if<CycleDiagnostic>(&r);
    if (!cycle) return amounts;
    auto rank = [&](size_t i) {
      const Constraint& c = system.constraints[i];
      int tier = c.origin == Origin::LoopCarried ? 2 : c.origin == Origin::Operand ? 1 : 0;
      return std::make_pair(tier, c.c - amounts[i]);
    };
    std::optional<size_t> pick;
    for (size_t i : cycle->constraints) {
      if (system.constraints[i].kind != ConstraintKind::Difference) continue;
      if (!pick || rank(i) > rank(*pick) || (rank(i) == rank(*pick) && i < *pick)) pick = i;
    }
    if (!pick) throw Error("internal: positive cycle without a difference edge");
    amounts[*pick] += cycle->weight;
  }
  throw Error("cycle relaxation did not converge");
}

bool satisfies(const Tuning& tuning, const ConstraintSystem& system) {
  return std::all_of(system.constraints.begin(), system.constraints.end(),
                     [&](const Constraint& c) { return c.holds(tuning); });
}

SolveStats evaluate_objectives(const Tuning& tuning, const ConstraintSystem& system) {
  SolveStats s;
  for (const auto& [l, v] : tuning.nsb) {
    s.mp = std::max(s.mp, v);
    s.msum += v;
  }
  for (Label l : system.op_labels) {
    auto it = tuning.nsb.find(l);
    if (it != tuning.nsb.end()) s.mop += it->second;
  }
  return s;
}

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::Sum: return "sum";
    case Objective::MinMax: return "minmax";
    case Objective::Ops: return "ops";
  }
  return "?";
}

std::string_view to_string(Mode m) { return m == Mode::Ilp ? "ilp" : "pi"; }

Objective parse_objective(std::string_view s) {
  if (s == "sum") return Objective::Sum;
  if (s == "minmax") return Objective::MinMax;
  if (s == "ops") return Objective::Ops;
  throw Error("unknown objective '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "ilp") return Mode::Ilp;
  if (s == "pi") return Mode::Pi;
  throw Error("unknown mode '" + std::string(s) + "'");
}

std::variant<TuneResult, CycleDiagnostic> policy_iterate(const Program& program,
                                                         const RangeMap& ranges,
                                                         const DefUseMap& defuse,
                                                         const TuneOptions& options) {
  const bool strict = !options.loop_slack.has_value();
  const int slack = options.loop_slack.value_or(0);
  // Cycle relaxation can differ between the two systems, so the uniform
  // tuning is floored at the mixed one to keep it pointwise above.
  std::optional<Tuning> floor;
  if (options.uniform) {
    TuneOptions mixed = options;
    mixed.uniform = false;
    auto m = policy_iterate(program, ranges, defuse, mixed);
    if (auto* cycle = std::get_if<CycleDiagnostic>(&m)) return *cycle;
    floor = std::get<TuneResult>(std::move(m)).tuning;
  }
  CarryPolicy policy = pessimistic_policy(program);
  std::optional<Relaxation> frozen;
  SolveStats stats;

  for (;;) {
    ++stats.policy_iterations;
    ConstraintSystem sys = generate(program, ranges, defuse, policy, slack);
    if (options.uniform) sys = uniformize(std::move(sys));
    if (!strict) {
      // Computed once under the all-ones policy; later policies only lower
      // constants, so the frozen amounts keep every iteration acyclic.
      if (!frozen) frozen = break_cycles(sys);
      sys = relax(std::move(sys), *frozen);
    }
    if (floor) {
      for (const auto& [l, v] : floor->nsb) {
        if (v > 0) sys.constraints.push_back({ConstraintKind::LowerBound, l, 0, v, Origin::Uniform, l, false});
      }
    }
    int passes = 0;
    SolveResult r = solve_least(sys, &passes);
    Tuning tuning;
    if (auto* cycle = std::get_if<CycleDiagnostic>(&r)) {
      if (options.mode == Mode::Ilp) return *cycle;
      // Pick flips from a relaxed solution, then retry the exact system.
      Tuning probe = std::get<Tuning>(solve_least(relax(sys, break_cycles(sys))));
      CarryPolicy next = refine_policy(program, policy, error_info(program, ranges, defuse, probe));
      if (next == policy) return *cycle;
      policy = std::move(next);
      continue;
    }
    tuning = std::get<Tuning>(std::move(r));
    SolveStats obj = evaluate_objectives(tuning, sys);
    stats.mp = obj.mp;
    stats.msum = obj.msum;
    stats.mop = obj.mop;
    stats.relaxation_passes = passes;
    stats.msum_trace.push_back(obj.msum);
    if (frozen) {
      stats.relaxed_constraints =
          static_cast<int>(std::count_if(frozen->begin(), frozen->end(), [](int a) { return a != 0; }));
    }
    CarryPolicy next = options.mode == Mode::Ilp
                           ? policy
                           : refine_policy(program, policy, error_info(program, ranges, defuse, tuning));
    if (next == policy) {
      return TuneResult{std::move(tuning), std::move(policy), std::move(stats), std::move(sys)};
    }
    policy = std::move(next);
  }
}

}  // namespace nsbtune
