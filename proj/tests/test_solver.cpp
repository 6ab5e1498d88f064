#include <gtest/gtest.h>

#include "../tools/oracle.hpp"
#include "nsbtune/range_analysis.hpp"
#include "util.hpp"

namespace nsbtune {
namespace {

ConstraintSystem system_of(const std::string& text, std::vector<Label> vars) {
  ConstraintSystem s;
  s.vars = std::move(vars);
  s.constraints = parse_constraints(text);
  return s;
}

TEST(SolveLeast, IsolatedLowerBound) {
  auto r = solve_least(system_of("T0 >= 12\n", {0, 1}));
  const Tuning& t = std::get<Tuning>(r);
  EXPECT_EQ(t.at(0), 12);
  EXPECT_EQ(t.at(1), 0);
}

TEST(SolveLeast, Chain) {
  auto r = solve_least(system_of("T0 >= T1 + 1\nT1 >= 10\n", {0, 1}));
  const Tuning& t = std::get<Tuning>(r);
  EXPECT_EQ(t.at(1), 10);
  EXPECT_EQ(t.at(0), 11);
}

TEST(SolveLeast, SelfLoop) {
  auto r = solve_least(system_of("T0 >= T0 + 1\n", {0}));
  const auto& c = std::get<CycleDiagnostic>(r);
  EXPECT_EQ(c.labels, std::vector<Label>{0});
  EXPECT_EQ(c.weight, 1);
}

TEST(SolveLeast, ZeroWeightCycleIsFine) {
  auto r = solve_least(system_of("T0 >= T1 + 2\nT1 >= T0 - 2\nT1 >= 3\n", {0, 1}));
  const Tuning& t = std::get<Tuning>(r);
  EXPECT_EQ(t.at(0), 5);
  EXPECT_EQ(t.at(1), 3);
}

TEST(SolveLeast, OverflowGuard) {
  EXPECT_THROW(solve_least(system_of("T0 >= 2000\n", {0})), OverflowGuard);
}

TEST(SolveLeast, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(7);
  int feasible = 0;
  for (int i = 0; i < 300; ++i) {
    ConstraintSystem s = oracle::random_system(rng, 5);
    std::string why = oracle::check(s, 12);
    EXPECT_TRUE(why.empty()) << why << "\n" << s.dump();
    if (std::holds_alternative<Tuning>(solve_least(s))) ++feasible;
  }
  EXPECT_GT(feasible, 100);
}

TEST(BreakCycles, RemovesEveryPositiveCycle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    ConstraintSystem s = oracle::random_system(rng);
    ConstraintSystem relaxed = relax(s, break_cycles(s));
    EXPECT_TRUE(std::holds_alternative<Tuning>(solve_least(relaxed))) << s.dump();
  }
}

TEST(Objectives, DirectArithmetic) {
  ConstraintSystem s;
  s.vars = {0, 1, 2};
  s.op_labels = {2};
  Tuning t;
  t.nsb = {{0, 12}, {1, 10}, {2, 11}};
  SolveStats st = evaluate_objectives(t, s);
  EXPECT_EQ(st.mp, 12);
  EXPECT_EQ(st.msum, 33);
  EXPECT_EQ(st.mop, 11);
  t.nsb = {{0, 0}, {1, 0}, {2, 0}};
  st = evaluate_objectives(t, s);
  EXPECT_EQ(st.mp, 0);
  EXPECT_EQ(st.msum, 0);
  EXPECT_EQ(st.mop, 0);
}

struct Tuned {
  Program program;
  RangeMap ranges;
  DefUseMap defuse;
};

Tuned prepare(const std::string& src) {
  Tuned t;
  t.program = parse(src);
  t.defuse = resolve_defs(t.program);
  t.ranges = analyze(t.program, 50, 1);
  return t;
}

TuneResult tune(const Tuned& t, Mode mode, bool uniform, std::optional<int> slack) {
  auto r = policy_iterate(t.program, t.ranges, t.defuse, {Objective::Sum, mode, uniform, slack});
  if (auto* c = std::get_if<CycleDiagnostic>(&r)) throw Error(c->to_string());
  return std::get<TuneResult>(r);
}

TEST(PolicyIteration, PidStrictModeReportsCycle) {
  Tuned t = prepare(find_case("pid").source);
  auto r = policy_iterate(t.program, t.ranges, t.defuse, {Objective::Sum, Mode::Pi, false, {}});
  ASSERT_TRUE(std::holds_alternative<CycleDiagnostic>(r));
  EXPECT_GT(std::get<CycleDiagnostic>(r).weight, 0);
}

TEST(PolicyIteration, PidMinimalAndDescending) {
  Tuned t = prepare(find_case("pid").source);
  TuneResult pi = tune(t, Mode::Pi, false, 2);
  TuneResult ilp = tune(t, Mode::Ilp, false, 2);
  EXPECT_TRUE(satisfies(pi.tuning, pi.system));
  EXPECT_LE(pi.stats.msum, ilp.stats.msum);
  EXPECT_LE(pi.stats.policy_iterations,
            static_cast<int>(t.program.op_labels().size()) + 1);
  for (size_t i = 1; i < pi.stats.msum_trace.size(); ++i) {
    EXPECT_LE(pi.stats.msum_trace[i], pi.stats.msum_trace[i - 1]);
  }
  EXPECT_NEAR(pi.stats.mp, 16, 2);
  // Lowering any single label breaks the system.
  for (const auto& [l, v] : pi.tuning.nsb) {
    if (v == 0) continue;
    Tuning lower = pi.tuning;
    --lower.nsb[l];
    EXPECT_FALSE(satisfies(lower, pi.system)) << "label " << l;
  }
}

TEST(PolicyIteration, IlpIsFirstIterate) {
  Tuned t = prepare(find_case("accelerometer").source);
  TuneResult ilp = tune(t, Mode::Ilp, false, 0);
  ConstraintSystem s = generate(t.program, t.ranges, t.defuse, pessimistic_policy(t.program));
  EXPECT_EQ(std::get<Tuning>(solve_least(s)), ilp.tuning);
  EXPECT_EQ(ilp.stats.policy_iterations, 1);
}

TEST(PolicyIteration, ExactOperandsSettleInTwo) {
  Tuned t = prepare("x = 1.0 + 2.0; y = x * 3.0; require_nsb(y, 10);");
  TuneResult r = tune(t, Mode::Pi, false, {});
  EXPECT_LE(r.stats.policy_iterations, 2);
  EXPECT_EQ(r.policy.at(test::first_op(t.program)), 0);
}

TEST(PolicyIteration, UniformDominatesMixed) {
  for (const BenchmarkCase& c : corpus()) {
    Tuned t = prepare(c.source);
    for (Mode m : {Mode::Ilp, Mode::Pi}) {
      TuneResult mixed = tune(t, m, false, 3);
      TuneResult uni = tune(t, m, true, 3);
      for (const auto& [l, v] : mixed.tuning.nsb) {
        EXPECT_GE(uni.tuning.at(l), v) << c.name << " label " << l;
      }
      for (const auto& [var, occ] : uni.system.var_occurrences) {
        for (Label l : occ) EXPECT_EQ(uni.tuning.at(l), uni.tuning.at(occ.front())) << var;
      }
    }
  }
}

TEST(PolicyIteration, MonotoneInRequirement) {
  Tuned t = prepare(find_case("trapezoid").source);
  int prev = -1;
  for (int req : {4, 8, 12, 16, 24}) {
    t.program.set_requirement("res", req);
    t.defuse = resolve_defs(t.program);
    TuneResult r = tune(t, Mode::Pi, false, 2);
    EXPECT_GT(r.stats.mp, prev);
    prev = r.stats.mp;
  }
}

TEST(Modes, Parse) {
  EXPECT_EQ(parse_mode("ilp"), Mode::Ilp);
  EXPECT_EQ(parse_objective("minmax"), Objective::MinMax);
  EXPECT_THROW(parse_mode("fast"), Error);
  EXPECT_THROW(parse_objective("max"), Error);
}

}  // namespace
}  // namespace nsbtune
