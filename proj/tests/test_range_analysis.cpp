#include <gtest/gtest.h>

#include "nsbtune/range_analysis.hpp"
#include "util.hpp"

namespace nsbtune {
namespace {

TEST(Ufp, Values) {
  EXPECT_EQ(ufp_of(2.75), 1);
  EXPECT_EQ(ufp_of(0.0), 0);
  EXPECT_EQ(ufp_of(0.5), -1);
  EXPECT_EQ(ufp_of(-0.5), -1);
  EXPECT_EQ(ufp_of(1.0), 0);
  EXPECT_EQ(ufp_of(0.99999), -1);
  EXPECT_EQ(ufp_of(BigReal::from_decimal("1024")), 10);
  EXPECT_EQ(ufp_of(BigReal::from_decimal("1023.999")), 9);
}

TEST(Ranges, PidConstantAndCounter) {
  Program p = test::pid();
  RangeMap r = analyze(p, 1, 1);
  const RangeInfo& five = r.at(test::consts_of(p, "5.0")[0]);
  EXPECT_EQ(five.ufp, 2);
  EXPECT_TRUE(five.exact);

  // The read of t inside "t + dt".
  std::vector<Label> reads = test::reads_of(p, "t");
  Label in_body = 0;
  for (Label l : reads) {
    if (!p.at(l).control) in_body = l;
  }
  ASSERT_NE(in_body, 0u);
  EXPECT_EQ(r.at(in_body).max_abs, BigReal::from_decimal("99.5"));
  EXPECT_EQ(r.at(in_body).ufp, 6);
}

TEST(Ranges, DeadBodyIsUnreached) {
  Program p = parse("x = 2.0; while (x < 1.0) { x = x - 1.0; };");
  RangeMap r = analyze(p, 1, 1);
  const Node& loop = p.at(p.top()[1]);
  for (Label l : loop.body) {
    EXPECT_FALSE(r.at(l).reached);
    EXPECT_TRUE(r.at(l).always_zero);
  }
}

TEST(Ranges, Invariants) {
  for (const BenchmarkCase& c : corpus()) {
    Program p = parse(c.source);
    RangeMap r = analyze(p, 20, 3);
    for (Label l : p.tuned_labels()) {
      const RangeInfo& i = r.at(l);
      if (i.always_zero) {
        EXPECT_EQ(i.ufp, 0);
        continue;
      }
      BigReal lo(0.0, 64), hi(0.0, 64);
      mpfr_set_ui_2exp(lo.get(), 1, i.ufp, MPFR_RNDN);
      mpfr_set_ui_2exp(hi.get(), 1, i.ufp + 1, MPFR_RNDN);
      EXPECT_LE(lo, i.max_abs) << c.name << " label " << l;
      EXPECT_LT(i.max_abs, hi) << c.name << " label " << l;
      if (i.lfp) {
        EXPECT_LE(*i.lfp, i.ufp);
        BigReal m(0.0, 64);
        mpfr_set_ui_2exp(m.get(), 1, *i.lfp, MPFR_RNDN);
        EXPECT_LE(m, i.min_abs);
      }
    }
  }
}

TEST(Ranges, DumpLoadRoundTrip) {
  Program p = parse(find_case("pendulum").source);
  RangeMap r = analyze(p, 5, 9);
  EXPECT_EQ(RangeMap::load(r.dump()).dump(), r.dump());
}

TEST(Ranges, MergeIsOrderFree) {
  Program p = parse(find_case("trapezoid").source);
  RangeMap a = analyze(p, 3, 1), b = analyze(p, 3, 2);
  RangeMap ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.dump(), ba.dump());
}

TEST(Ranges, Errors) {
  EXPECT_THROW(analyze(parse("x = 1.0; while (x > 0.0) { x = x + 1.0; };"), 1, 1, 1000),
               DivergenceError);
  EXPECT_THROW(analyze(parse("x = 0.0 - 1.0; y = sqrt(x);"), 1, 1), MathDomainError);
  EXPECT_THROW(analyze(parse("x = 0.0; y = 1.0 / x;"), 1, 1), MathDomainError);
}

TEST(Sampling, Deterministic) {
  Program p = parse(find_case("accelerometer").source);
  auto a = sample_inputs(p, 10, 42), b = sample_inputs(p, 10, 42), c = sample_inputs(p, 10, 43);
  ASSERT_EQ(a.size(), 10u);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) {
      EXPECT_EQ(a[i][j], b[i][j]);
      differs = differs || !(a[i][j] == c[i][j]);
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(sample_inputs(test::pid(), 10, 1).size(), 1u);
}

}  // namespace
}  // namespace nsbtune
