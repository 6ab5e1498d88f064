#include <gtest/gtest.h>

#include "nsbtune/formats.hpp"
#include "util.hpp"

namespace nsbtune {
namespace {

TEST(Format, Boundaries) {
  EXPECT_EQ(to_format(0), IeeeFormat::FP16);
  EXPECT_EQ(to_format(1), IeeeFormat::FP16);
  EXPECT_EQ(to_format(11), IeeeFormat::FP16);
  EXPECT_EQ(to_format(12), IeeeFormat::FP32);
  EXPECT_EQ(to_format(24), IeeeFormat::FP32);
  EXPECT_EQ(to_format(25), IeeeFormat::FP64);
  EXPECT_EQ(to_format(53), IeeeFormat::FP64);
  EXPECT_EQ(to_format(54), IeeeFormat::FP128);
  EXPECT_EQ(to_format(113), IeeeFormat::FP128);
  EXPECT_THROW(to_format(114), Unrepresentable);
  EXPECT_EQ(significand_bits(IeeeFormat::FP32), 24);
  EXPECT_EQ(to_string(IeeeFormat::FP128), "FP128");
}

Tuning constant(const Program& p, int v) {
  Tuning t;
  for (Label l : p.tuned_labels()) t.nsb[l] = v;
  return t;
}

TEST(Summary, Baselines) {
  Program p = test::pid();
  Summary all53 = summarize(constant(p, 53), p);
  EXPECT_DOUBLE_EQ(all53.savings.var_savings_pct, 0.0);
  EXPECT_DOUBLE_EQ(all53.savings.op_savings_pct, 0.0);
  EXPECT_EQ(all53.counts[IeeeFormat::FP64], static_cast<int>(p.def_labels().size()));
  EXPECT_EQ(all53.counts.mp, 53);
  Summary zero = summarize(constant(p, 0), p);
  EXPECT_DOUBLE_EQ(zero.savings.var_savings_pct, 100.0);
  EXPECT_DOUBLE_EQ(zero.savings.op_savings_pct, 100.0);
}

TEST(Summary, Arithmetic) {
  Program p = parse("a = 1.0 + 2.0; b = a;");
  Tuning t = constant(p, 0);
  t.nsb[p.top()[0]] = 20;
  t.nsb[p.top()[1]] = 30;
  t.nsb[test::first_op(p)] = 53;
  Summary s = summarize(t, p);
  EXPECT_DOUBLE_EQ(s.savings.var_savings_pct, 100.0 * (1.0 - 50.0 / 106.0));
  EXPECT_DOUBLE_EQ(s.savings.op_savings_pct, 0.0);
  EXPECT_EQ(s.counts[IeeeFormat::FP32], 1);
  EXPECT_EQ(s.counts[IeeeFormat::FP64], 1);
  EXPECT_EQ(s.counts.mp, 53);
}

}  // namespace
}  // namespace nsbtune
