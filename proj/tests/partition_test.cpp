#include "arls/partition.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "arls/kernel.hpp"

namespace arls {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// Gaussian shape: Z(2) = integral of exp(-x^2/2) over [-tau, tau].
double gaussian_log_partition(double tau) {
  return std::log(std::sqrt(2.0 * std::numbers::pi) * std::erf(tau / std::sqrt(2.0)));
}

// Cauchy shape: Z(0) = integral of (x^2/2 + 1)^-1 over [-tau, tau].
double cauchy_log_partition(double tau) {
  return std::log(2.0 * std::sqrt(2.0) * std::atan(tau / std::sqrt(2.0)));
}

TEST(Partition, ClosedFormShapes) {
  EXPECT_NEAR(compute_log_partition(2.0, 10.0), gaussian_log_partition(10.0), 1e-8);
  EXPECT_NEAR(compute_log_partition(0.0, 10.0), cauchy_log_partition(10.0), 1e-8);
  EXPECT_NEAR(compute_log_partition(2.0, 3.0), gaussian_log_partition(3.0), 1e-8);
  EXPECT_NEAR(compute_log_partition(0.0, 5.0), cauchy_log_partition(5.0), 1e-8);
}

TEST(Partition, QuadratureConvergesUnderStepHalving) {
  for (double alpha : {-10.0, -2.0, 0.0, 1.0, 2.0}) {
    const double coarse = compute_log_partition(alpha, 10.0, 1 << 14);
    const double fine = compute_log_partition(alpha, 10.0, 1 << 15);
    EXPECT_LE(std::abs(coarse - fine), 1e-8) << "alpha " << alpha;
  }
}

TEST(Partition, DefaultTableShape) {
  const PartitionTable table = build_table();
  EXPECT_EQ(table.size(), 121);
  EXPECT_DOUBLE_EQ(table.alpha_at(0), -10.0);
  EXPECT_DOUBLE_EQ(table.alpha_at(120), 2.0);
  EXPECT_EQ(table.index_of(-10.0), 0);
  EXPECT_EQ(table.index_of(2.0), 120);
  EXPECT_EQ(table.index_of(-3.5), 65);
  EXPECT_NEAR(table.log_z_at(2.0), gaussian_log_partition(10.0), 1e-8);
  EXPECT_NEAR(table.log_z_at(0.0), cauchy_log_partition(10.0), 1e-8);
}

TEST(Partition, LogZIsNonIncreasingInAlpha) {
  const PartitionTable table = build_table();
  for (int i = 1; i < table.size(); ++i) {
    EXPECT_LE(table.log_z[static_cast<std::size_t>(i)],
              table.log_z[static_cast<std::size_t>(i - 1)] + 1e-12);
  }
}

TEST(Partition, DensityNormalizes) {
  const PartitionTable table = build_table();
  for (double alpha : {-10.0, -2.0, 0.0, 1.0, 2.0}) {
    for (double c : {1.0, 2.0}) {
      const KernelParams params{alpha, c};
      // Simpson integration of the density over its support [-tau*c, tau*c].
      const int n = 4000;  // even
      const double lo = -table.tau * c;
      const double hi = table.tau * c;
      const double h = (hi - lo) / n;
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double r = lo + h * i;
        const double f = std::exp(log_density(r, params, table));
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * f;
      }
      sum *= h / 3.0;
      EXPECT_NEAR(sum, 1.0, 1e-4) << "alpha " << alpha << " c " << c;
    }
  }
}

TEST(Partition, DensityScaleEquivariance) {
  const PartitionTable table = build_table();
  for (double alpha : {-4.0, 0.0, 2.0}) {
    for (double r : {0.0, 0.3, 1.7, 4.0}) {
      const double lhs = log_density(r, {alpha, 2.0}, table);
      const double rhs = log_density(r / 2.0, {alpha, 1.0}, table) - std::log(2.0);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(Partition, SupportAndTruncation) {
  const PartitionTable table = build_table();
  const KernelParams params{0.0, 0.5};
  EXPECT_TRUE(in_support(4.99, params, table));
  EXPECT_TRUE(in_support(-5.0, params, table));
  EXPECT_FALSE(in_support(5.01, params, table));
  EXPECT_EQ(log_density(5.01, params, table),
            -std::numeric_limits<double>::infinity());
  // Inside the support the truncated loss is the negative log-density.
  EXPECT_NEAR(truncated_loss(0.7, params, table), -log_density(0.7, params, table),
              1e-12);
}

TEST(Partition, SaveLoadRoundTripsBitExactly) {
  const PartitionTable table = build_table(-4.0, 2.0, 0.5, 8.0, 1 << 12);
  const std::string path = temp_path("arls_partition_roundtrip.txt");
  table.save(path);
  const PartitionTable loaded = PartitionTable::load(path);
  EXPECT_EQ(loaded.alpha_min, table.alpha_min);
  EXPECT_EQ(loaded.alpha_max, table.alpha_max);
  EXPECT_EQ(loaded.resolution, table.resolution);
  EXPECT_EQ(loaded.tau, table.tau);
  EXPECT_EQ(loaded.intervals, table.intervals);
  ASSERT_EQ(loaded.log_z.size(), table.log_z.size());
  for (std::size_t i = 0; i < table.log_z.size(); ++i) {
    EXPECT_EQ(loaded.log_z[i], table.log_z[i]) << "entry " << i;
  }
  std::filesystem::remove(path);
}

TEST(Partition, ValidateRejectsIncreasingLogZ) {
  PartitionTable table = build_table(-2.0, 2.0, 0.5, 10.0, 1 << 10);
  EXPECT_NO_THROW(table.validate());
  table.log_z[3] = table.log_z[2] + 0.1;
  EXPECT_THROW(table.validate(), std::exception);
}

TEST(Partition, OffGridAlphaThrows) {
  const PartitionTable table = build_table();
  EXPECT_THROW(table.log_z_at(-3.456), std::invalid_argument);
  EXPECT_THROW(table.log_z_at(2.1), std::invalid_argument);
  EXPECT_THROW(table.index_of(-11.0), std::invalid_argument);
}

TEST(Partition, SinglePointGrid) {
  const PartitionTable table = build_table(2.0, 2.0, 0.1, 10.0, 1 << 12);
  EXPECT_EQ(table.size(), 1);
  EXPECT_EQ(table.index_of(2.0), 0);
  EXPECT_NEAR(table.log_z_at(2.0), gaussian_log_partition(10.0), 1e-7);
  EXPECT_THROW(table.index_of(1.9), std::invalid_argument);
}

}  // namespace
}  // namespace arls
