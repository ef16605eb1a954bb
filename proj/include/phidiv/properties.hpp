#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "phidiv/deformed_exp.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/simplex.hpp"

namespace phidiv {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct GridMeta {
  int grid_n = 0;
  double delta = 0.0;
  long long samples = 0;
};

/* Outcome of a structural check. verdict is Pass when the scanned margin never
   drops below -1e-9; `strict` additionally reports whether the minimum margin
   exceeds +1e-9 (strict inequality everywhere) and never gates the verdict.
   The witness holds the argmin configuration and is reproducible from the
   grid metadata and seed. */
struct CheckReport {
  Verdict verdict = Verdict::Inconclusive;
  bool strict = false;
  double worst_margin = 0.0;
  nlohmann::ordered_json witness;
  GridMeta grid;
  std::uint64_t seed = 0;
};

// Margin slack shared by all verdicts: violations must exceed it to count.
inline constexpr double margin_slack = 1e-9;

/* g = -(phi^{-1})'/(phi^{-1})'' on (0, 1): identity for the exponential, x/q
   for the q-exponential kinds. SingularError when the second derivative
   vanishes at x. */
double g_func(const DeformedExponential& f, double x);

// h = phi'/phi'' on the support interior; constant 1 for the exponential.
double h_func(const DeformedExponential& f, double x);

// Interpolation along inverse coordinates: phi((1-a)*phi^{-1}(x) + a*phi^{-1}(y)).
double F_alpha(const DeformedExponential& f, double alpha, double x, double y);

// Sum pulled through phi: phi^{-1}(phi(x) + phi(y)); phi(x)+phi(y) must lie in (0,1).
double G_func(const DeformedExponential& f, double x, double y);

struct Hessian2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double det = 0.0;  // xx*yy - xy^2
};

// Closed-form second partials of G_func and F_alpha in (x, y).
Hessian2 hessian_G(const DeformedExponential& f, double x, double y);
Hessian2 hessian_F_alpha(const DeformedExponential& f, double alpha, double x,
                         double y);

/* Scans g(x+y) - g(x) - g(y) >= 0 over a uniform grid of [delta, 1-delta]^2
   restricted to x + y <= 1 - delta. Grid sums reuse cached g values. */
CheckReport check_superadditive_g(const DeformedExponential& f, int grid_n = 200,
                                  double delta = 1e-4);

// Midpoint concavity g((x+y)/2) >= (g(x)+g(y))/2 over the same pair grid.
CheckReport check_concave_g(const DeformedExponential& f, int grid_n = 200,
                            double delta = 1e-4);

/* Coarsening monotonicity D(p||q) >= D(p^A||q^A) over seeded random pairs and
   every set partition of {1..n} (all of them for n <= 6, else 50 random
   partitions per trial). */
CheckReport check_partition_inequality(const DeformedExponential& f, int n = 4,
                                       int trials = 200,
                                       std::uint64_t seed = 0);

/* Joint convexity of (p, q) -> D(p||q): random quadruples across a lambda
   grid, plus a deterministic swap-pair scan at lambda = 1/2 for n >= 3 that
   perturbs two coordinates against a shared third. */
CheckReport check_joint_convexity(const DeformedExponential& f, int n = 3,
                                  int trials = 200,
                                  std::vector<double> lambdas = {0.25, 0.5, 0.75},
                                  std::uint64_t seed = 0);

struct PinskerEstimate {
  double c_hat = 0.0;
  double p_at = 0.0, q_at = 0.0;  // argmin of the scanned objective
  GridMeta grid;
  long long excluded = 0;          // grid pairs skipped due to DomainError
  Verdict verdict = Verdict::Inconclusive;  // Pass when usable: c_hat > 0, few exclusions
};

/* Best constant c with D(p||q) >= c * |p - q|_1^2 obtained from the two-point
   reduction: minimize
     (1/8) (q - p)^{-1} [ inv'(1-q)/inv'(1-p) - inv'(q)/inv'(p) ]
   over delta <= p < q <= 1-delta including the near-diagonal pairs
   q - p = delta, then three local refinement passes halving the spacing.
   1/2 for the exponential, q/2 for the q-exponential. */
PinskerEstimate pinsker_constant(const DeformedExponential& f, int grid_n = 200,
                                 double delta = 1e-4);

/* Tests D(p||q) >= c * |p - q|_1^2 over seeded random pairs; every fourth
   trial perturbs p along a two-coordinate direction to probe the tight
   near-diagonal regime. */
CheckReport check_pinsker(const DeformedExponential& f, double c, int n = 2,
                          int trials = 1000, std::uint64_t seed = 0);

struct TsallisCharacterization {
  Verdict is_tsallis = Verdict::Inconclusive;
  double q_fit = 0.0;
  double max_residual = 0.0;  // worst |g(x) - x/q_fit| over the grid
  CheckReport superadditive;
  CheckReport concave;
  GridMeta grid;
};

/* A deformation passes iff g is superadditive, concave, and fits g(x) = x/q
   through the origin with relative residual below 1e-6; q_fit is the
   least-squares slope inverse. */
TsallisCharacterization characterize_tsallis(const DeformedExponential& f,
                                             int grid_n = 200,
                                             double delta = 1e-4);

// Smallest admissible weight for sampled distributions under f: tables narrow
// the floor to their tabulated range.
double sampling_floor(const DeformedExponential& f);

}  // namespace phidiv
