#pragma once

#include "phidiv/deformed_exp.hpp"
#include "phidiv/simplex.hpp"

namespace phidiv {

struct DivergenceValue {
  double value = 0.0;          // compensated sum of terms
  std::vector<double> terms;   // per-coordinate contributions
};

/* D(p||q) = sum_i (phi^{-1}(p_i) - phi^{-1}(q_i)) / (phi^{-1})'(p_i).
   Non-negative, zero iff p == q. Distributions on a single point are both the
   unit mass, so the value is identically zero and no derivative is taken. */
DivergenceValue d_phi(const DeformedExponential& f, const Distribution& p,
                      const Distribution& q);

// Kullback-Leibler: the Exponential-kind specialization of d_phi.
double kl_closed_form(const Distribution& p, const Distribution& q);

/* Tsallis divergence -sum_i p_i lnq(q_i/p_i) with index q_index in (0, 1];
   q_index = 1 is Kullback-Leibler. Equals d_phi for the QExponential kind. */
double tsallis_closed_form(double q_index, const Distribution& p,
                           const Distribution& q);

}  // namespace phidiv
