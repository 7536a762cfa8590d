#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arls/partition.hpp"

namespace arls {

/// Result of the shape-estimation step (the EM E-step): the grid alpha that
/// maximizes the truncated log-likelihood of the residuals, plus diagnostics.
struct AlphaEstimate {
  double alpha = 2.0;
  double log_likelihood = 0.0;
  /// (alpha, log-likelihood) over the whole grid, ascending in alpha.
  std::vector<std::pair<double, double>> profile;
  /// Set when the residual spread (median absolute deviation) is below
  /// 1e-6 * c; the profile is then nearly flat in the tail shape and the
  /// argmax is reported but not meaningful.
  bool degenerate = false;
  /// Residuals with |r| beyond the truncation limit tau * c.
  int out_of_support = 0;
  /// Residuals actually evaluated (after the subsample cap).
  int sample_count = 0;
};

struct EStepOptions {
  /// Above this count the residuals are deterministically subsampled.
  std::size_t subsample_cap = 200000;
  std::uint64_t subsample_seed = 0x51ab5f2e8c9d1fb3ull;
};

/// Truncated log-likelihood of the residuals under shape alpha and scale c:
///   L(alpha) = -N log(c Z~(alpha)) - sum_i rho(r_i, alpha, c).
/// alpha must be a grid value of the table.
double log_likelihood(std::span<const double> residuals, double alpha, double c,
                      const PartitionTable& table);

/// Maximizes log_likelihood over the table's alpha grid. Ties break toward
/// larger alpha (the lighter-tailed shape). Throws on empty input, c <= 0,
/// or non-finite residuals.
AlphaEstimate estimate_alpha(std::span<const double> residuals, double c,
                             const PartitionTable& table,
                             const EStepOptions& options = {});

/// JSON payload for the estimate (schema: docs/schemas/alpha-estimate.schema.json).
std::string to_json(const AlphaEstimate& estimate, double c);

}  // namespace arls
