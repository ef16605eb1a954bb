#include "phidiv/family.hpp"

#include <cmath>

#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

namespace phidiv {

namespace {

FamilyChart build_chart(const DeformedExponential& f, const Distribution& p,
                        std::vector<double> u0, bool custom) {
  FamilyChart chart{f, p, {}, {}, {}};
  const std::size_t n = p.size();
  chart.c.resize(n);
  chart.dphi_c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    chart.c[i] = f.phi_inv(p[i]);
    chart.dphi_c[i] = f.derivative(chart.c[i], 1, Deriv::Forward);
    if (!(chart.dphi_c[i] > 0.0) || !std::isfinite(chart.dphi_c[i])) {
      throw ChartError("chart_at: phi' must be positive at the base coordinates");
    }
  }
  if (custom) {
    if (u0.size() != n) throw ShapeError("chart_at: u0 size mismatch");
    for (double v : u0) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ChartError("chart_at: reference measure entries must be positive");
      }
    }
  } else {
    u0.assign(n, 1.0);
  }
  std::vector<double> prods(n);
  for (std::size_t i = 0; i < n; ++i) prods[i] = u0[i] * chart.dphi_c[i];
  double s = compensated_sum(prods);
  if (custom && std::abs(s - 1.0) > 1e-8) {
    throw ChartError("chart_at: sum u0_i phi'(c_i) = " + std::to_string(s) +
                     ", too far from 1");
  }
  for (double& v : u0) v /= s;
  chart.u0 = std::move(u0);
  return chart;
}

double side_sum(const FamilyChart& chart, std::span<const double> u, double lambda) {
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < chart.c.size(); ++i) {
    acc.add(chart.f.phi(chart.c[i] + u[i] - lambda * chart.u0[i]));
  }
  return acc.value();
}

}  // namespace

FamilyChart chart_at(const DeformedExponential& f, const Distribution& p) {
  return build_chart(f, p, {}, false);
}

FamilyChart chart_at(const DeformedExponential& f, const Distribution& p,
                     std::vector<double> u0) {
  return build_chart(f, p, std::move(u0), true);
}

TangentVector project_tangent(const FamilyChart& chart, std::span<const double> v) {
  const std::size_t n = chart.c.size();
  if (v.size() != n) throw ShapeError("project_tangent: size mismatch");
  std::vector<double> prods(n);
  for (std::size_t i = 0; i < n; ++i) prods[i] = v[i] * chart.dphi_c[i];
  double lambda = compensated_sum(prods);  // sum u0_i phi'(c_i) is exactly 1
  TangentVector out;
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.u[i] = v[i] - lambda * chart.u0[i];
  for (std::size_t i = 0; i < n; ++i) prods[i] = out.u[i] * chart.dphi_c[i];
  out.residual = std::abs(compensated_sum(prods));
  return out;
}

NormalizerResult normalizer(const FamilyChart& chart, std::span<const double> u) {
  const std::size_t n = chart.c.size();
  if (u.size() != n) throw ShapeError("normalizer: size mismatch");
  {
    std::vector<double> prods(n);
    for (std::size_t i = 0; i < n; ++i) prods[i] = u[i] * chart.dphi_c[i];
    double res = std::abs(compensated_sum(prods));
    if (res > 1e-10) {
      throw TangentError("normalizer: tangent residual " + std::to_string(res) +
                         " exceeds 1e-10; project first");
    }
  }

  int iterations = 0;
  double s0 = side_sum(chart, u, 0.0);
  double psi;
  if (s0 <= 1.0) {
    // Mathematically s0 >= 1 for any tangent; allow rounding at the boundary.
    if (s0 < 1.0 - 1e-9) {
      throw NormalizationError("normalizer: mass at lambda = 0 is " +
                               std::to_string(s0) + ", below 1");
    }
    psi = 0.0;
  } else {
    double lo = 0.0, hi = 1.0;
    double s_hi = side_sum(chart, u, hi);
    while (s_hi > 1.0) {
      lo = hi;
      hi *= 2.0;
      ++iterations;
      if (hi > 1e12) throw NormalizationError("normalizer: no finite root bracket");
      s_hi = side_sum(chart, u, hi);
    }
    // Bisect to a narrow bracket, then secant steps clamped inside it.
    double s_lo = side_sum(chart, u, lo);
    psi = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
      ++iterations;
      double width = hi - lo;
      if (width < 1e-14 * std::fmax(1.0, lo)) {
        psi = 0.5 * (lo + hi);
        break;
      }
      double cand;
      if (width < 1e-3 && s_lo > s_hi) {
        cand = lo + (s_lo - 1.0) * width / (s_lo - s_hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
      } else {
        cand = 0.5 * (lo + hi);
      }
      double s_mid = side_sum(chart, u, cand);
      psi = cand;
      if (std::abs(s_mid - 1.0) < 1e-12) break;
      if (s_mid > 1.0) {
        lo = cand;
        s_lo = s_mid;
      } else {
        hi = cand;
        s_hi = s_mid;
      }
    }
  }

  std::vector<double> qw(n);
  for (std::size_t i = 0; i < n; ++i) {
    qw[i] = chart.f.phi(chart.c[i] + u[i] - psi * chart.u0[i]);
    if (qw[i] < Distribution::interior_floor) {
      throw BoundaryError("normalizer: component " + std::to_string(i) +
                          " collapsed to the boundary");
    }
  }
  return {psi, make_distribution(std::move(qw)), iterations};
}

double verify_psi_identity(const FamilyChart& chart, std::span<const double> u) {
  NormalizerResult r = normalizer(chart, u);
  return std::abs(r.psi - d_phi(chart.f, chart.p, r.q).value);
}

}  // namespace phidiv
