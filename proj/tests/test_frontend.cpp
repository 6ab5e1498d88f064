#include <gtest/gtest.h>

#include "util.hpp"

namespace nsbtune {
namespace {

using test::defs_of;
using test::reads_of;

TEST(Parse, AssignOfConstant) {
  Program p = parse("dt = 0.5;");
  ASSERT_EQ(p.size(), 2u);
  ASSERT_EQ(p.top().size(), 1u);
  const Node& a = p.at(p.top()[0]);
  EXPECT_EQ(a.kind, NodeKind::Assign);
  EXPECT_EQ(a.name, "dt");
  ASSERT_EQ(a.kids.size(), 1u);
  const Node& c = p.at(a.kids[0]);
  EXPECT_EQ(c.kind, NodeKind::Const);
  EXPECT_EQ(c.literal, "0.5");
  EXPECT_NE(a.label, c.label);
}

TEST(Parse, EmptyProgram) {
  Program p = parse("");
  EXPECT_EQ(p.size(), 0u);
  EXPECT_TRUE(p.top().empty());
}

TEST(Parse, MissingExpression) {
  try {
    parse("x = ;");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().column, 5);
  }
}

TEST(Parse, RejectsGarbage) {
  EXPECT_THROW(parse("x = 1.0"), SyntaxError);
  EXPECT_THROW(parse("x = 1.0 +;"), SyntaxError);
  EXPECT_THROW(parse("while (x) { };"), SyntaxError);
  EXPECT_THROW(parse("x = foo(1.0);"), SyntaxError);
}

TEST(Parse, DuplicateRequire) {
  EXPECT_THROW(parse("x = 1.0; require_nsb(x, 3); require_nsb(x, 4);"), DuplicateRequire);
}

TEST(Parse, LabelsAreUniqueAndPreOrder) {
  Program p = test::pid();
  for (size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p.at(static_cast<Label>(i)).label, i);
  for (const Node& n : p.nodes()) {
    for (Label k : n.kids) EXPECT_GT(k, n.label);
  }
}

TEST(Parse, Precedence) {
  Program p = parse("x = 1.0 - 2.0 * 3.0 - 4.0;");
  const Node& a = p.at(p.top()[0]);
  const Node& outer = p.at(a.kids[0]);
  ASSERT_EQ(outer.kind, NodeKind::Binary);
  EXPECT_EQ(outer.bin, BinOp::Sub);
  const Node& left = p.at(outer.kids[0]);
  EXPECT_EQ(left.bin, BinOp::Sub);
  EXPECT_EQ(p.at(left.kids[1]).bin, BinOp::Mul);
}

TEST(Print, RoundTrip) {
  for (const BenchmarkCase& c : corpus()) {
    Program p = parse(c.source);
    std::string once = print(p);
    Program q = parse(once);
    EXPECT_EQ(print(q), once) << c.name;
    EXPECT_EQ(q.size(), p.size()) << c.name;
  }
}

TEST(Print, KeepsNeededParentheses) {
  std::string text = print(parse("x = (1.0 - 2.0) - (3.0 - 4.0) / (5.0 * 6.0);"));
  EXPECT_EQ(text, "x = 1.0 - 2.0 - (3.0 - 4.0) / (5.0 * 6.0);\n");
}

TEST(ReachingDefs, PidLoopCarried) {
  Program p = test::pid();
  DefUseMap du = resolve_defs(p);
  std::vector<Label> eold_defs = defs_of(p, "eold");
  ASSERT_EQ(eold_defs.size(), 2u);
  std::vector<Label> uses = reads_of(p, "eold");
  ASSERT_EQ(uses.size(), 1u);
  std::vector<Label> got = du.reaching.at(uses[0]);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, eold_defs);
  EXPECT_FALSE(du.loop_carried(eold_defs[0], uses[0]));
  EXPECT_TRUE(du.loop_carried(eold_defs[1], uses[0]));
}

TEST(ReachingDefs, StraightLine) {
  Program p = parse("a = 1.0; b = a;");
  DefUseMap du = resolve_defs(p);
  Label use = reads_of(p, "a")[0];
  EXPECT_EQ(du.reaching.at(use), defs_of(p, "a"));
}

TEST(ReachingDefs, UseBeforeDef) {
  EXPECT_THROW(resolve_defs(parse("b = a;")), UseBeforeDef);
  EXPECT_THROW(resolve_defs(parse("x = 1.0; if (x < 2.0) { y = 1.0; }; z = y;")), UseBeforeDef);
}

TEST(ReachingDefs, EveryUseHasADef) {
  for (const BenchmarkCase& c : corpus()) {
    Program p = parse(c.source);
    DefUseMap du = resolve_defs(p);
    for (const Node& n : p.nodes()) {
      if (n.kind != NodeKind::Var) continue;
      ASSERT_TRUE(du.reaching.count(n.label)) << c.name;
      EXPECT_FALSE(du.reaching.at(n.label).empty()) << c.name;
    }
  }
}

TEST(Program, SetRequirement) {
  Program p = test::pid();
  EXPECT_EQ(p.requirement("m1"), 12);
  p.set_requirement("m1", 20);
  EXPECT_EQ(p.requirement("m1"), 20);
  size_t before = p.size();
  p.set_requirement("t", 5);
  EXPECT_EQ(p.size(), before + 1);
  EXPECT_EQ(p.requirement("t"), 5);
}

}  // namespace
}  // namespace nsbtune
