#include "arls/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace arls {

void validate(const KernelParams& params) {
  if (!std::isfinite(params.alpha)) {
    throw std::invalid_argument("kernel shape alpha must be finite, got " +
                                std::to_string(params.alpha));
  }
  if (!std::isfinite(params.c) || params.c <= 0.0) {
    throw std::invalid_argument("kernel scale c must be finite and > 0, got " +
                                std::to_string(params.c));
  }
}

namespace {

// Shared branch bodies. The named SquaredL2/Cauchy kernels and the generic
// kernel near alpha = 2 / alpha = 0 must produce bitwise-identical values
// (the solver's policy-equivalence guarantee), so both call sites use these.
inline double quadratic_rho(double r, double c) {
  const double x = r / c;
  return 0.5 * x * x;
}

inline double quadratic_weight(double /*r*/, double c) { return 1.0 / (c * c); }

inline double cauchy_rho(double r, double c) {
  const double x = r / c;
  return std::log1p(0.5 * x * x);
}

inline double cauchy_weight(double r, double c) {
  const double x = r / c;
  return (1.0 / (c * c)) / (0.5 * x * x + 1.0);
}

}  // namespace

double rho(double r, const KernelParams& params) {
  validate(params);
  const double alpha = params.alpha;
  if (std::abs(alpha - 2.0) < kAlphaBranchEps) return quadratic_rho(r, params.c);
  if (std::abs(alpha) < kAlphaBranchEps) return cauchy_rho(r, params.c);
  const double x = r / params.c;
  const double b = std::abs(alpha - 2.0);
  return b / alpha * (std::pow(x * x / b + 1.0, 0.5 * alpha) - 1.0);
}

double rho_prime(double r, const KernelParams& params) {
  return weight(r, params) * r;
}

double weight(double r, const KernelParams& params) {
  validate(params);
  const double alpha = params.alpha;
  if (std::abs(alpha - 2.0) < kAlphaBranchEps) return quadratic_weight(r, params.c);
  if (std::abs(alpha) < kAlphaBranchEps) return cauchy_weight(r, params.c);
  const double x = r / params.c;
  const double b = std::abs(alpha - 2.0);
  return (1.0 / (params.c * params.c)) * std::pow(x * x / b + 1.0, 0.5 * alpha - 1.0);
}

const char* to_string(NamedKernel kernel) {
  switch (kernel) {
    case NamedKernel::kSquaredL2: return "squared_l2";
    case NamedKernel::kPseudoHuber: return "pseudo_huber";
    case NamedKernel::kCauchy: return "cauchy";
    case NamedKernel::kGemanMcClure: return "geman_mcclure";
    case NamedKernel::kWelsch: return "welsch";
  }
  return "unknown";
}

double named_kernel_alpha(NamedKernel kernel) {
  switch (kernel) {
    case NamedKernel::kSquaredL2: return 2.0;
    case NamedKernel::kPseudoHuber: return 1.0;
    case NamedKernel::kCauchy: return 0.0;
    case NamedKernel::kGemanMcClure: return -2.0;
    case NamedKernel::kWelsch: return -std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

void validate_scale(double c) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw std::invalid_argument("kernel scale c must be finite and > 0, got " +
                                std::to_string(c));
  }
}

}  // namespace

double named_rho(double r, NamedKernel kernel, double c) {
  validate_scale(c);
  const double x = r / c;
  const double s = x * x;
  switch (kernel) {
    case NamedKernel::kSquaredL2: return quadratic_rho(r, c);
    case NamedKernel::kPseudoHuber: return std::sqrt(s + 1.0) - 1.0;
    case NamedKernel::kCauchy: return cauchy_rho(r, c);
    case NamedKernel::kGemanMcClure: return 2.0 * s / (s + 4.0);
    case NamedKernel::kWelsch: return -std::expm1(-0.5 * s);
  }
  throw std::invalid_argument("unknown named kernel");
}

double named_rho_prime(double r, NamedKernel kernel, double c) {
  return named_weight(r, kernel, c) * r;
}

double named_weight(double r, NamedKernel kernel, double c) {
  validate_scale(c);
  const double x = r / c;
  const double s = x * x;
  const double inv_c2 = 1.0 / (c * c);
  switch (kernel) {
    case NamedKernel::kSquaredL2: return quadratic_weight(r, c);
    case NamedKernel::kPseudoHuber: return inv_c2 / std::sqrt(s + 1.0);
    case NamedKernel::kCauchy: return cauchy_weight(r, c);
    case NamedKernel::kGemanMcClure: {
      const double d = 0.25 * s + 1.0;
      return inv_c2 / (d * d);
    }
    case NamedKernel::kWelsch: return inv_c2 * std::exp(-0.5 * s);
  }
  throw std::invalid_argument("unknown named kernel");
}

}  // namespace arls
