#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vexlab/expression.hpp"

using namespace vexlab;

namespace {

double eval1(const char* text, double x) {
  const auto e = Expression::parse(text);
  const std::vector<double> p{x};
  return e(p);
}

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(eval1("1 + 2*3", 0), 7.0);
  EXPECT_DOUBLE_EQ(eval1("(1 + 2)*3", 0), 9.0);
  EXPECT_DOUBLE_EQ(eval1("2^3^2", 0), 512.0);
  EXPECT_DOUBLE_EQ(eval1("-x^2", 3), -9.0);
  EXPECT_DOUBLE_EQ(eval1("x/4 - 1", 2), -0.5);
  EXPECT_DOUBLE_EQ(eval1("1e-3 * 2", 0), 2e-3);
}

TEST(Expression, Functions) {
  EXPECT_DOUBLE_EQ(eval1("exp(log(x))", 5), std::exp(std::log(5.0)));
  EXPECT_DOUBLE_EQ(eval1("sin(pi/2)", 0), 1.0);
  EXPECT_DOUBLE_EQ(eval1("|x - 3|", 1), 2.0);
  EXPECT_DOUBLE_EQ(eval1("min(x, 2) + max(x, 2)", 5), 7.0);
  EXPECT_DOUBLE_EQ(eval1("loglog(x)", 2), 0.0);
  EXPECT_DOUBLE_EQ(eval1("loglog(x)", std::exp(std::numbers::e)), 1.0);
  EXPECT_DOUBLE_EQ(eval1("sqrt(x) + cos(0)", 9), 4.0);
}

TEST(Expression, IndicatorsAndAnnuli) {
  EXPECT_EQ(eval1("indicator(0,1)", 0.5), 1.0);
  EXPECT_EQ(eval1("indicator(0,1)", 1.0), 1.0);
  EXPECT_EQ(eval1("indicator(0,1)", 1.5), 0.0);
  EXPECT_EQ(eval1("chi(1,2)", -1.5), 1.0);
  EXPECT_EQ(eval1("chi(1,2)", 2.0), 0.0);
  const auto e = Expression::parse("indicator(0,1)");
  const std::vector<double> in{0.2, 0.9}, out{0.2, 1.1};
  EXPECT_EQ(e(in), 1.0);
  EXPECT_EQ(e(out), 0.0);
}

TEST(Expression, NormAndRadial) {
  const auto e = Expression::parse("2 + 1/log(e + |x|)");
  EXPECT_TRUE(e.radial());
  const std::vector<double> x{3.0, 4.0};
  EXPECT_DOUBLE_EQ(e(x), 2.0 + 1.0 / std::log(std::numbers::e + 5.0));
  EXPECT_DOUBLE_EQ(e.at_radius(5.0), e(x));
  EXPECT_TRUE(Expression::parse("r^2").radial());
  EXPECT_FALSE(Expression::parse("x2 + 1").radial());
  EXPECT_EQ(Expression::parse("x2 + x3").max_coordinate(), 3);
  EXPECT_EQ(Expression::parse("r").max_coordinate(), 0);
}

TEST(Expression, MalformedInputThrows) {
  for (const char* bad : {"", "1 +", "(1", "foo(1)", "1 2", "sin()", "min(1)", "x4", "|x", "2 ** 3"})
    EXPECT_THROW(Expression::parse(bad), SpecError) << bad;
}

TEST(Expression, CopiesShareParsedForm) {
  const auto a = Expression::parse("x + 1");
  const Expression b = a;
  const std::vector<double> x{2.0};
  EXPECT_EQ(a(x), b(x));
  EXPECT_EQ(b.text(), "x + 1");
}
