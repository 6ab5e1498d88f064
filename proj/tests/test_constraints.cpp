#include <gtest/gtest.h>

#include <algorithm>

#include "nsbtune/range_analysis.hpp"
#include "util.hpp"

namespace nsbtune {
namespace {

struct Built {
  Program program;
  RangeMap ranges;
  DefUseMap defuse;
};

Built build(const std::string& src) {
  Built b;
  b.program = parse(src);
  b.defuse = resolve_defs(b.program);
  b.ranges = analyze(b.program, 20, 1);
  return b;
}

const Constraint* find(const ConstraintSystem& s, ConstraintKind kind, Label v, Label w) {
  for (const Constraint& c : s.constraints) {
    if (c.kind == kind && c.v == v && (kind == ConstraintKind::LowerBound || c.w == w)) return &c;
  }
  return nullptr;
}

TEST(CarryBit, Cases) {
  EXPECT_EQ(carry_bit({-2, -3}, {-5, -9}), 0);
  EXPECT_EQ(carry_bit({-5, -9}, {-2, -3}), 0);
  EXPECT_EQ(carry_bit(ErrInfo::exact_value(), {-5, -9}), 0);
  EXPECT_EQ(carry_bit({-5, -9}, ErrInfo::exact_value()), 0);
  EXPECT_EQ(carry_bit({-2, -10}, {-4, -12}), 1);
}

TEST(Generate, RequirementOnPid) {
  Built b = build(find_case("pid").source);
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program));
  std::vector<Label> defs = test::defs_of(b.program, "m1");
  ASSERT_EQ(defs.size(), 2u);
  for (Label d : defs) {
    const Constraint* c = find(s, ConstraintKind::LowerBound, d, 0);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->c, 12);
    EXPECT_EQ(c->origin, Origin::Requirement);
  }
}

TEST(Generate, RequirementSlack) {
  Built b = build(find_case("pid").source);
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program), 3);
  const Constraint* c = find(s, ConstraintKind::LowerBound, test::defs_of(b.program, "m1")[0], 0);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->c, 15);
}

TEST(Generate, AdditionSameUfp) {
  Built b = build("input x in [1.0, 1.5]; input y in [0.25, 0.3]; z = x + y; require_nsb(z, 8);");
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program));
  Label op = test::first_op(b.program);
  Label x = test::reads_of(b.program, "x")[0];
  const Constraint* c = find(s, ConstraintKind::Difference, x, op);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->c, 1);
  EXPECT_TRUE(c->carry);
  Label y = test::reads_of(b.program, "y")[0];
  c = find(s, ConstraintKind::Difference, y, op);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->c, -2 - 0 + 1);
}

TEST(Generate, ExactConstantOperand) {
  Built b = build("input y in [1.0, 1.5]; z = 2.0 + y; require_nsb(z, 8);");
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program));
  Label op = test::first_op(b.program);
  Label y = test::reads_of(b.program, "y")[0];
  const Constraint* c = find(s, ConstraintKind::Difference, y, op);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->c, 0 - 1);
}

TEST(Generate, UnreachedEmitsNothing) {
  Built b = build("x = 2.0; while (x < 1.0) { x = x - 1.0; }; require_nsb(x, 4);");
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program));
  const Node& loop = b.program.at(b.program.top()[1]);
  for (const Constraint& c : s.constraints) {
    EXPECT_EQ(std::count(loop.body.begin(), loop.body.end(), c.site), 0);
  }
}

TEST(Generate, Errors) {
  Built b = build("input x in [0.0, 1.0]; y = 1.0 / (x + 1.0); require_nsb(y, 4);");
  EXPECT_THROW(generate(b.program, RangeMap(1), b.defuse, pessimistic_policy(b.program)),
               MissingRange);
  // A divisor observed at 0 has no lower magnitude bound.
  Label divisor = b.program.at(test::first_op(b.program)).kids[1];
  b.ranges.at(divisor).lfp.reset();
  EXPECT_THROW(generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program)),
               DivisorMayVanish);
}

TEST(Uniformize, ChainsOccurrences) {
  Built b = build("a = 1.0; b = a + a; c = b * 2.0; require_nsb(c, 4);");
  ConstraintSystem s = generate(b.program, b.ranges, b.defuse, pessimistic_policy(b.program));
  ConstraintSystem u = uniformize(s);
  auto equals = [](const ConstraintSystem& sys) {
    return std::count_if(sys.constraints.begin(), sys.constraints.end(),
                         [](const Constraint& c) { return c.kind == ConstraintKind::Equal; });
  };
  // a has three occurrences, b two, c one.
  EXPECT_EQ(equals(u), 2 + 1);
  EXPECT_TRUE(u.uniform);
  ConstraintSystem twice = uniformize(u);
  EXPECT_EQ(twice.dump(), u.dump());
}

TEST(Dump, ParsesBack) {
  Built b = build(find_case("odometry").source);
  ConstraintSystem s = uniformize(generate(b.program, b.ranges, b.defuse,
                                           pessimistic_policy(b.program)));
  std::vector<Constraint> back = parse_constraints(s.dump());
  ASSERT_EQ(back.size(), s.constraints.size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].kind, s.constraints[i].kind);
    EXPECT_EQ(back[i].v, s.constraints[i].v);
    EXPECT_EQ(back[i].c, s.constraints[i].c);
    if (back[i].kind != ConstraintKind::LowerBound) EXPECT_EQ(back[i].w, s.constraints[i].w);
  }
  EXPECT_THROW(parse_constraints("T1 >> 3"), Error);
}

TEST(ErrorInfo, ExactLiterals) {
  Built b = build("x = 1.0 + 2.0; require_nsb(x, 10);");
  Tuning t;
  for (Label l : b.program.tuned_labels()) t.nsb[l] = 10;
  auto info = error_info(b.program, b.ranges, b.defuse, t);
  for (Label l : test::consts_of(b.program, "1.0")) EXPECT_TRUE(info.at(l).exact());
  CarryPolicy refined = refine_policy(b.program, pessimistic_policy(b.program), info);
  EXPECT_EQ(refined.at(test::first_op(b.program)), 0);
}

TEST(RefinePolicy, NeverRaises) {
  Built b = build(find_case("runge_kutta").source);
  CarryPolicy zero = pessimistic_policy(b.program);
  for (auto& [l, bit] : zero) bit = 0;
  Tuning t;
  for (Label l : b.program.tuned_labels()) t.nsb[l] = 20;
  auto info = error_info(b.program, b.ranges, b.defuse, t);
  for (const auto& [l, bit] : refine_policy(b.program, zero, info)) EXPECT_EQ(bit, 0);
}

}  // namespace
}  // namespace nsbtune
