#pragma once

namespace arls {

/// Parameters of the generalized robust kernel: shape alpha and scale c.
///
/// The kernel family is
///   rho(r, alpha, c) = |alpha - 2| / alpha * ((((r/c)^2 / |alpha - 2|) + 1)^(alpha/2) - 1)
/// with analytic limit branches at alpha = 2 (quadratic) and alpha = 0
/// (Cauchy / log). alpha = 1 gives Pseudo-Huber, alpha = -2 Geman-McClure,
/// and alpha -> -inf approaches Welsch.
struct KernelParams {
  double alpha = 2.0;
  double c = 1.0;
};

/// Throws std::invalid_argument unless alpha is finite and c is finite and > 0.
void validate(const KernelParams& params);

/// |alpha| below this switches rho/rho_prime/weight to the alpha = 0 branch,
/// |alpha - 2| below it to the quadratic branch.
inline constexpr double kAlphaBranchEps = 1e-5;

/// Kernel value. rho(0) = 0 and rho is monotonically non-decreasing in |r|.
double rho(double r, const KernelParams& params);

/// d rho / d r. Odd in r; rho_prime(0) = 0.
double rho_prime(double r, const KernelParams& params);

/// IRLS weight rho_prime(r) / r, evaluated in closed form so it stays finite
/// at r = 0 (value 1/c^2 for every alpha).
double weight(double r, const KernelParams& params);

/// Classical kernels realized by specific shape values.
enum class NamedKernel {
  kSquaredL2,     // alpha = 2
  kPseudoHuber,   // alpha = 1
  kCauchy,        // alpha = 0
  kGemanMcClure,  // alpha = -2
  kWelsch,        // alpha -> -inf (not reachable with finite alpha)
};

const char* to_string(NamedKernel kernel);

/// Shape value realizing the named kernel; -infinity for Welsch.
double named_kernel_alpha(NamedKernel kernel);

/// Closed-form kernel value for a named kernel (same normalization as rho).
double named_rho(double r, NamedKernel kernel, double c);

/// Closed-form derivative of named_rho.
double named_rho_prime(double r, NamedKernel kernel, double c);

/// Closed-form IRLS weight for a named kernel, finite at r = 0.
double named_weight(double r, NamedKernel kernel, double c);

}  // namespace arls
