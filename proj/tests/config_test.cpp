#include "arls/config.hpp"

#include <gtest/gtest.h>

#include <string>

namespace arls {
namespace {

#ifndef ARLS_DOCS_DIR
#error "ARLS_DOCS_DIR must be defined by the build"
#endif

TEST(Config, DefaultsWithoutAnyKeys) {
  const RunConfig config = RunConfig::parse("", "inline");
  EXPECT_EQ(config.problem, "");
  EXPECT_EQ(config.seed, 1u);
  EXPECT_EQ(config.count, 200);
  EXPECT_DOUBLE_EQ(config.noise_sigma, 0.1);
  EXPECT_DOUBLE_EQ(config.solver.c, 1.0);
  EXPECT_DOUBLE_EQ(config.outliers.fraction, 0.0);
  EXPECT_EQ(config.policy.kind, PolicyKind::kAdaptive);
  EXPECT_TRUE(config.compare.empty());
  EXPECT_EQ(config.output_directory, "out");
  EXPECT_EQ(config.sweep_samples, 20);
  EXPECT_EQ(config.sweep_sigmas, (std::vector<double>{0.1, 0.5, 1.0, 2.0, 5.0}));
}

TEST(Config, ParsesTheAnnotatedExample) {
  const RunConfig config = RunConfig::load(std::string(ARLS_DOCS_DIR) + "/example.cfg");
  EXPECT_EQ(config.problem, "line");
  EXPECT_EQ(config.seed, 1u);
  EXPECT_EQ(config.count, 200);
  EXPECT_DOUBLE_EQ(config.x_max, 10.0);
  EXPECT_DOUBLE_EQ(config.slope, 1.0);
  EXPECT_DOUBLE_EQ(config.noise_sigma, 0.1);
  EXPECT_DOUBLE_EQ(config.yaw_degrees, 10.0);
  EXPECT_DOUBLE_EQ(config.translation[0], 0.3);
  EXPECT_EQ(config.cameras, 8);
  EXPECT_EQ(config.landmarks, 150);
  EXPECT_DOUBLE_EQ(config.outliers.fraction, 0.3);
  EXPECT_EQ(config.outliers.model, OutlierModel::kUniformReplacement);
  EXPECT_DOUBLE_EQ(config.outliers.range_min, -50.0);
  EXPECT_DOUBLE_EQ(config.solver.c, 0.1);
  EXPECT_DOUBLE_EQ(config.solver.alpha_min, -10.0);
  EXPECT_EQ(config.solver.max_em_iterations, 50);
  EXPECT_EQ(config.solver.estep_seed, 5884901991621926835ull);
  EXPECT_EQ(config.policy.kind, PolicyKind::kAdaptive);
  ASSERT_EQ(config.compare.size(), 2u);
  EXPECT_EQ(config.compare[0].name(), "adaptive");
  EXPECT_EQ(config.compare[1].name(), "squared");
  EXPECT_EQ(config.icp.variant, RegistrationVariant::kPointToPoint);
  EXPECT_EQ(config.icp.cadence, AlphaCadence::kPerIteration);
  EXPECT_EQ(config.icp.max_iterations, 30);
  EXPECT_EQ(config.sweep_policies.size(), 2u);
  EXPECT_DOUBLE_EQ(config.sweep_success_rms, 0.01);
  EXPECT_EQ(config.output_directory, "out");
}

TEST(Config, UnknownKeyIsAnErrorWithLocation) {
  const std::string text = "[problem]\nkind = line\nbogus_key = 3\n";
  try {
    RunConfig::parse(text, "test.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
  }
}

TEST(Config, UnknownSectionIsAnError) {
  const std::string text = "[mystery]\nvalue = 1\n";
  try {
    RunConfig::parse(text, "test.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:1"), std::string::npos) << e.what();
  }
}

TEST(Config, DuplicateKeyIsAnError) {
  const std::string text = "[problem]\nseed = 1\nseed = 2\n";
  try {
    RunConfig::parse(text, "dup.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dup.cfg:3"), std::string::npos) << e.what();
  }
}

TEST(Config, MalformedValuesAreErrors) {
  EXPECT_THROW(RunConfig::parse("[problem]\nseed = abc\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[problem]\ntranslation = 1, 2\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[solver]\nc = zero\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[outliers]\nmodel = gremlins\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[icp]\nvariant = sideways\n", "t"), ConfigError);
  EXPECT_THROW(RunConfig::parse("no_section = 1\n", "t"), ConfigError);
}

TEST(Config, PolicyListsParse) {
  const RunConfig config = RunConfig::parse(
      "[policy]\npolicy = fixed:-3.5\ncompare = adaptive, huber, geman_mcclure\n",
      "inline");
  EXPECT_EQ(config.policy.kind, PolicyKind::kFixed);
  EXPECT_DOUBLE_EQ(config.policy.fixed_alpha, -3.5);
  ASSERT_EQ(config.compare.size(), 3u);
  EXPECT_EQ(config.compare[1].name(), "pseudo_huber");
}

}  // namespace
}  // namespace arls
