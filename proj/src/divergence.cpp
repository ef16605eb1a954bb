#include "phidiv/divergence.hpp"

#include <cmath>

#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

namespace phidiv {

DivergenceValue d_phi(const DeformedExponential& f, const Distribution& p,
                      const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("d_phi: size mismatch");
  DivergenceValue out;
  out.terms.resize(p.size(), 0.0);
  if (p.size() == 1) return out;  // both are the unit mass
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == q[i]) continue;  // exact zero, no derivative needed
    double num = f.phi_inv(p[i]) - f.phi_inv(q[i]);
    out.terms[i] = num / f.derivative(p[i], 1, Deriv::Inverse);
  }
  out.value = compensated_sum(out.terms);
  return out;
}

double kl_closed_form(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("kl_closed_form: size mismatch");
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == q[i]) continue;
    acc.add(-p[i] * std::log(q[i] / p[i]));
  }
  return acc.value();
}

double tsallis_closed_form(double q_index, const Distribution& p,
                           const Distribution& q) {
  if (!(q_index > 0.0 && q_index <= 1.0)) {
    throw DomainError("tsallis_closed_form: index must lie in (0, 1]");
  }
  if (p.size() != q.size()) throw ShapeError("tsallis_closed_form: size mismatch");
  if (q_index == 1.0) return kl_closed_form(p, q);
  CompensatedAccumulator acc;
  const double om = 1.0 - q_index;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == q[i]) continue;
    acc.add(-p[i] * (std::pow(q[i] / p[i], om) - 1.0) / om);
  }
  return acc.value();
}

}  // namespace phidiv
