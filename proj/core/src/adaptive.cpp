#include "arls/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "arls/rng.hpp"
#include "arls/text_io.hpp"

namespace arls {

namespace {

void check_inputs(std::span<const double> residuals, double c) {
  if (residuals.empty()) {
    throw std::invalid_argument("alpha estimation needs at least one residual");
  }
  if (!std::isfinite(c) || c <= 0.0) {
    throw std::invalid_argument("alpha estimation: scale c must be finite and > 0");
  }
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (!std::isfinite(residuals[i])) {
      throw std::invalid_argument("alpha estimation: residual " + std::to_string(i) +
                                  " is not finite");
    }
  }
}

/// Median absolute deviation (about the median), used as the spread measure
/// for the degeneracy flag.
double median_absolute_deviation(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double median = values[mid];
  for (double& v : values) {
    v = std::abs(v - median);
  }
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  return values[mid];
}

/// Selection sampling (Algorithm S): walks the input once and keeps each
/// element with probability (needed / remaining). Order-preserving and fully
/// pinned by the splitmix64 draw sequence, so subsampling is reproducible
/// across standard libraries.
std::vector<double> subsample(std::span<const double> residuals, std::size_t cap,
                              std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(cap);
  std::uint64_t state = seed;
  std::size_t needed = cap;
  std::size_t remaining = residuals.size();
  for (double r : residuals) {
    if (needed == 0) break;
    if (uniform_unit(state) * static_cast<double>(remaining) < static_cast<double>(needed)) {
      out.push_back(r);
      --needed;
    }
    --remaining;
  }
  return out;
}

}  // namespace

double log_likelihood(std::span<const double> residuals, double alpha, double c,
                      const PartitionTable& table) {
  check_inputs(residuals, c);
  const double log_z = table.log_z_at(alpha);
  const KernelParams params{alpha, c};
  double sum = 0.0;
  for (double r : residuals) {
    sum += rho(r, params);
  }
  const double n = static_cast<double>(residuals.size());
  return -n * (std::log(c) + log_z) - sum;
}

AlphaEstimate estimate_alpha(std::span<const double> residuals, double c,
                             const PartitionTable& table, const EStepOptions& options) {
  check_inputs(residuals, c);
  if (options.subsample_cap == 0) {
    throw std::invalid_argument("alpha estimation: subsample cap must be > 0");
  }

  std::vector<double> sampled;
  std::span<const double> used = residuals;
  if (residuals.size() > options.subsample_cap) {
    sampled = subsample(residuals, options.subsample_cap, options.subsample_seed);
    used = sampled;
  }

  AlphaEstimate estimate;
  estimate.sample_count = static_cast<int>(used.size());
  estimate.degenerate =
      median_absolute_deviation(std::vector<double>(used.begin(), used.end())) < 1e-6 * c;

  const double tau_r = table.tau * c;
  for (double r : used) {
    if (std::abs(r) > tau_r) ++estimate.out_of_support;
  }

  const double n = static_cast<double>(used.size());
  const double log_c = std::log(c);
  double best = -std::numeric_limits<double>::infinity();
  double best_alpha = table.alpha_at(0);
  estimate.profile.reserve(static_cast<std::size_t>(table.size()));
  for (int i = 0; i < table.size(); ++i) {
    const double alpha = table.alpha_at(i);
    const KernelParams params{alpha, c};
    double sum = 0.0;
    for (double r : used) {
      sum += rho(r, params);
    }
    const double ll = -n * (log_c + table.log_z[static_cast<std::size_t>(i)]) - sum;
    estimate.profile.emplace_back(alpha, ll);
    // >= walks ties toward the largest alpha as the grid ascends.
    if (ll >= best) {
      best = ll;
      best_alpha = alpha;
    }
  }
  estimate.alpha = best_alpha;
  estimate.log_likelihood = best;
  return estimate;
}

std::string to_json(const AlphaEstimate& estimate, double c) {
  JsonWriter w;
  w.begin_object();
  w.field("alpha", estimate.alpha);
  w.field("log_likelihood", estimate.log_likelihood);
  w.field("c", c);
  w.field("degenerate", estimate.degenerate);
  w.field("out_of_support", estimate.out_of_support);
  w.field("sample_count", estimate.sample_count);
  w.begin_array("profile");
  for (const auto& [alpha, ll] : estimate.profile) {
    w.begin_object();
    w.field("alpha", alpha);
    w.field("log_likelihood", ll);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

}  // namespace arls
