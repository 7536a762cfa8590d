#pragma once

#include <string>
#include <vector>

#include "arls/kernel.hpp"

namespace arls {

/// Log of the truncated partition function
///   Z~(alpha) = integral_{-tau}^{tau} exp(-rho(r, alpha, 1)) dr
/// evaluated by composite Simpson quadrature on [0, tau] (the integrand is
/// even) with the given number of intervals. tau is in normalized residual
/// units (r/c), so the table is scale-free.
double compute_log_partition(double alpha, double tau, int intervals = 1 << 14);

/// Precomputed log Z~ values on a uniform alpha grid. The solver only ever
/// evaluates the partition function on grid points, so lookups are exact-match
/// (off-grid alpha is an error, not an interpolation).
struct PartitionTable {
  double alpha_min = -10.0;
  double alpha_max = 2.0;
  double resolution = 0.1;
  double tau = 10.0;
  int intervals = 1 << 14;
  std::vector<double> log_z;

  int size() const { return static_cast<int>(log_z.size()); }

  /// Grid value at index i. Endpoints are returned exactly; interior points
  /// are snapped to the nearest multiple of the resolution so the same alpha
  /// double is produced no matter how it is recomputed.
  double alpha_at(int i) const;

  /// Index of a grid value (within 1e-9). Throws std::invalid_argument for
  /// off-grid alpha.
  int index_of(double alpha) const;

  /// log Z~(alpha) for an exact grid value.
  double log_z_at(double alpha) const;

  /// Writes the table as a small self-describing text file (%.17g values,
  /// LF line endings); load() reproduces every double bit-exactly.
  void save(const std::string& path) const;
  static PartitionTable load(const std::string& path);

  /// Throws std::runtime_error if the entries are non-finite, the count does
  /// not match the grid, or log_z increases along alpha. Z~ is non-increasing
  /// in alpha because rho(r, alpha, 1) is pointwise non-decreasing in alpha,
  /// so heavier-tailed shapes (smaller alpha) integrate to more mass.
  void validate() const;
};

/// Builds the table over [alpha_min, alpha_max]. alpha_min == alpha_max is
/// allowed and yields a single-point grid; otherwise the resolution must
/// evenly divide the span. The result is validated before being returned.
PartitionTable build_table(double alpha_min = -10.0, double alpha_max = 2.0,
                           double resolution = 0.1, double tau = 10.0,
                           int intervals = 1 << 14);

/// True when |r| lies within the truncation limit tau * c.
bool in_support(double r, const KernelParams& params, const PartitionTable& table);

/// Log of the truncated robust density
///   p(r | alpha, c) = exp(-rho(r, alpha, c)) / (c * Z~(alpha))
/// for |r| <= tau * c; -infinity outside the support. alpha must be a grid
/// value of the table.
double log_density(double r, const KernelParams& params, const PartitionTable& table);

/// Truncated loss rho(r, alpha, c) + log(c * Z~(alpha)), i.e. the negative
/// log-density inside the support. Adding the log-partition term makes losses
/// comparable across alpha, which is what the EM objective minimizes.
double truncated_loss(double r, const KernelParams& params, const PartitionTable& table);

}  // namespace arls
