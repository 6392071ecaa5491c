#include <gtest/gtest.h>

#include "gaudin/config.hpp"

using namespace gaudin;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, ExactDecimal) {
  EXPECT_EQ(*exact_decimal(Rational(1, 2)), "0.5");
  EXPECT_EQ(*exact_decimal(Rational(-3, 40)), "-0.075");
  EXPECT_EQ(*exact_decimal(Rational(7)), "7.0");
  EXPECT_FALSE(exact_decimal(Rational(1, 3)));
}

TEST(Config, RationalAndDecimalNumbers) {
  auto c = parse_config("weights: [1, 1, 1]\npoints: [0, 1/3, -5/2]\n");
  EXPECT_FALSE(c.float_pipeline());
  EXPECT_EQ(c.points[1].value, QQ(Rational(1, 3)));
  EXPECT_EQ(c.points[2].value, QQ(Rational(-5, 2)));
  EXPECT_TRUE(c.real_points());

  auto d = parse_config("weights: [1, 1, 1]\npoints: [0, 0.25, 3]\n");
  EXPECT_TRUE(d.float_pipeline());
  EXPECT_EQ(d.points[1].value, QQ(Rational(1, 4)));

  auto e = parse_config("weights: [1, 1]\npoints: [0, 1+2i]\n");
  EXPECT_FALSE(e.real_points());
  EXPECT_EQ(e.points[1].value, QQ(Rational(1), Rational(2)));
}

TEST(Config, RoundTrip) {
  const char* texts[] = {
      "weights: [1, 2, 1]\npoints: [0, 1/3, -5/2]\n",
      "weights: [1, 1, 1, 1]\npoints: [0, 0.25, 1.5, 3]\nmu: h+e\nm: 1\nseed: 99\ntolerance: 1e-9\n",
      "algebra: sl3\nmodule: defining\npoints: [0, 1, 1/2+1/3i]\nhermitian_required: true\nsubspace: full\n",
      "weights: [1, 1, 1, 1]\npoints: [0, 1, 2, 3]\ntree: \"((1,2),3,4)\"\ncollision_s: 0.001\n"
      "loops:\n  - name: a\n    moves: [[1, 2], [1, 2]]\n",
      "form: killing\nweights: [3, 1]\npoints: [-0.5-0.125i, 2]\nmu: [1/2, 0.5, 0]\nthreads: 2\ntrials: 7\nbethe_starts: 50\n",
  };
  for (const char* t : texts) {
    auto c = parse_config(t);
    auto text = emit_config(c);
    auto back = parse_config(text);
    EXPECT_EQ(c, back) << text;
    EXPECT_EQ(emit_config(back), text);
    EXPECT_EQ(config_hash(c), config_hash(back));
    EXPECT_EQ(c.float_pipeline(), back.float_pipeline()) << text;
  }
}

TEST(Config, MuExpressions) {
  auto c = parse_config("weights: [1, 1]\npoints: [0, 1]\nmu: 2*h - f + 1/2*e\n");
  ASSERT_EQ(c.mu.size(), 3u);
  auto alg = build_algebra("sl2");
  auto mu = c.mu_element(*alg);
  EXPECT_EQ(mu[alg->index_of("e")], Rational(1, 2));
  EXPECT_EQ(mu[alg->index_of("f")], Rational(-1));
  EXPECT_EQ(mu[alg->index_of("h")], Rational(2));
  EXPECT_TRUE(parse_config("weights: [1, 1]\npoints: [0, 1]\nmu: 0\n").homogeneous());
  EXPECT_EQ(error_field("weights: [1, 1]\npoints: [0, 1]\nmu: h+x\n"), "mu");
  EXPECT_EQ(error_field("weights: [1, 1]\npoints: [0, 1]\nmu: [1, 2]\n"), "mu");
}

TEST(Config, Diagnostics) {
  EXPECT_EQ(error_line("weights: [1, 1, 1]\npoints:\n  - 0\n  - 1/2\n  - 0.5\n"), 5);
  EXPECT_EQ(error_field("weights: [1, 1, 1]\npoints: [0, 1, 1]\n"), "points");
  EXPECT_EQ(error_line("weights: [1, 1]\npoints: [0, 1]\ncolour: red\n"), 3);
  EXPECT_EQ(error_field("weights: [1, 1]\npoints: [0, 1]\ncolour: red\n"), "colour");
  EXPECT_EQ(error_line("weights: [1, 1]\npoints:\n  - 0\n  - 1/0\n"), 4);
  EXPECT_EQ(error_line("weights: [1, 1]\npoints:\n  - 0\n  - 1.2.3\n"), 4);
  EXPECT_EQ(error_field("weights: [1]\npoints: [0, 1]\n"), "weights");
  EXPECT_EQ(error_field("points: [0, 1]\n"), "weights");
  EXPECT_EQ(error_field("weights: [1, 1]\n"), "points");
  EXPECT_EQ(error_field("weights: [1, 1]\npoints: [0, 1]\ntolerance: -1\n"), "tolerance");
  EXPECT_EQ(error_field("weights: [1, 1, 1]\npoints: [0, 1, 2]\ntree: \"((1,2),3,4)\"\n"), "tree");
  EXPECT_EQ(error_field("weights: [1, 1, 1]\npoints: [0, 1, 2]\nloops:\n  - moves: [[0, 1]]\n"), "loops");
  EXPECT_EQ(error_field("algebra: so5\nweights: [1]\npoints: [0]\n"), "algebra");
  EXPECT_GT(error_line("weights: [1, 1\npoints: [0, 1]\n"), 0);
  EXPECT_THROW(parse_config(""), ConfigError);
  try {
    parse_config("weights: [1, 1, 1]\npoints: [0, 2/4, 1/2]\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("coincident"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, HashSeesEveryField) {
  auto a = parse_config("weights: [1, 1]\npoints: [0, 1]\n");
  auto b = parse_config("weights: [1, 1]\npoints: [0, 1]\nseed: 2\n");
  auto c = parse_config("weights: [1, 1]\npoints: [0, 1.0]\n");
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a), config_hash(parse_config("# comment\npoints: [0, 1]\nweights: [1, 1]\n")));
}
