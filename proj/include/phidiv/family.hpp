#pragma once

#include <span>

#include "phidiv/deformed_exp.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/simplex.hpp"

namespace phidiv {

/* Chart of the deformed exponential family at base point p: coordinates
   c_i = phi^{-1}(p_i) and a positive reference measure u0 with
   sum_i u0_i phi'(c_i) = 1 (enforced exactly by one normalizing division). */
struct FamilyChart {
  DeformedExponential f;
  Distribution p;
  std::vector<double> c;
  std::vector<double> u0;
  std::vector<double> dphi_c;  // phi'(c_i), cached
};

// Uniform reference measure: constant u0 scaled to satisfy the chart identity.
FamilyChart chart_at(const DeformedExponential& f, const Distribution& p);

// Custom reference measure: entries must be positive and sum_i u0_i phi'(c_i)
// within 1e-8 of 1; it is then renormalized exactly.
FamilyChart chart_at(const DeformedExponential& f, const Distribution& p,
                     std::vector<double> u0);

struct TangentVector {
  std::vector<double> u;
  double residual;  // |sum_i u_i phi'(c_i)| after projection
};

/* Projection v -> v - lambda*u0 with lambda = sum_i v_i phi'(c_i), the unique
   u0-direction shift landing in the tangent space. Idempotent. */
TangentVector project_tangent(const FamilyChart& chart, std::span<const double> v);

struct NormalizerResult {
  double psi = 0.0;
  Distribution q;
  int iterations = 0;
};

/* Solves sum_i phi(c_i + u_i - lambda*u0_i) = 1 for the unique lambda >= 0.
   The left side is non-increasing in lambda and at least 1 at lambda = 0 for
   any tangent u, so a doubling bracket plus bisection with secant refinement
   converges; stops at |sum - 1| < 1e-12 or bracket width < 1e-14.
   The returned point q_i = phi(c_i + u_i - psi*u0_i) must stay interior;
   entries below 1e-12 raise BoundaryError. */
NormalizerResult normalizer(const FamilyChart& chart, std::span<const double> u);

// |psi - d_phi(p, q)|; zero in exact arithmetic for every chart and tangent.
double verify_psi_identity(const FamilyChart& chart, std::span<const double> u);

}  // namespace phidiv
