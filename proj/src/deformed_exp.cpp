#include "phidiv/deformed_exp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

namespace phidiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lnq(double x, double q) {
  // q = 1 is the logarithm; callers guarantee x > 0.
  if (q == 1.0) return std::log(x);
  return (std::pow(x, 1.0 - q) - 1.0) / (1.0 - q);
}

/* Fritsch-Carlson slopes for monotone cubic Hermite interpolation. Strictly
   increasing data yields positive interior slopes, so the interpolant is
   strictly monotone and invertible. */
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), d(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    d[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double m0 = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m0 * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m0) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m0;
  };
  m[0] = endpoint(h[0], h[1], d[0], d[1]);
  m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

std::size_t interval_of(const std::vector<double>& x, double xq) {
  // Rightmost interval whose left edge is <= xq; xq within [front, back].
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return 0;
  if (i >= x.size()) return x.size() - 2;
  return i - 1;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& m, double xq) {
  std::size_t i = interval_of(x, xq);
  double h = x[i + 1] - x[i];
  double t = (xq - x[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  double h10 = t3 - 2.0 * t2 + t;
  double h01 = -2.0 * t3 + 3.0 * t2;
  double h11 = t3 - t2;
  return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
}

}  // namespace

DeformedExponential DeformedExponential::exponential() {
  DeformedExponential f;
  f.kind_ = Kind::Exponential;
  return f;
}

DeformedExponential DeformedExponential::q_exponential(double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("q_exponential: q must lie in (0, 1], got " + std::to_string(q));
  }
  DeformedExponential f;
  f.kind_ = Kind::QExponential;
  f.q_ = q;
  return f;
}

DeformedExponential DeformedExponential::affine_q_exp(double q, double b, double a) {
  if (!(q > 0.0)) throw DomainError("affine_q_exp: q must be positive");
  if (!(b > 0.0)) throw DomainError("affine_q_exp: b must be positive");
  if (!std::isfinite(a)) throw DomainError("affine_q_exp: a must be finite");
  DeformedExponential f;
  f.kind_ = Kind::AffineQExp;
  f.q_ = q;
  f.b_ = b;
  f.a_ = a;
  return f;
}

DeformedExponential DeformedExponential::from_table(std::vector<double> u,
                                                    std::vector<double> phi_of_u) {
  if (u.size() != phi_of_u.size()) throw ShapeError("from_table: column lengths differ");
  if (u.size() < 4) throw DomainError("from_table: need at least 4 rows");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(phi_of_u[i])) {
      throw DomainError("from_table: non-finite entry at row " + std::to_string(i));
    }
    if (phi_of_u[i] <= 0.0) throw DomainError("from_table: phi values must be positive");
    if (i > 0 && !(u[i] > u[i - 1] && phi_of_u[i] > phi_of_u[i - 1])) {
      throw DomainError("from_table: columns must be strictly increasing at row " +
                        std::to_string(i));
    }
  }
  DeformedExponential f;
  f.kind_ = Kind::NumericTable;
  f.tu_ = std::move(u);
  f.tphi_ = std::move(phi_of_u);
  f.tslope_ = pchip_slopes(f.tu_, f.tphi_);
  return f;
}

DeformedExponential DeformedExponential::from_g(
    const std::function<double(double)>& g, double x_lo, double x_hi, double step) {
  if (!(0.0 < x_lo && x_lo < 0.5 && 0.5 < x_hi && x_hi < 1.0)) {
    throw DomainError("from_g: need 0 < x_lo < 1/2 < x_hi < 1");
  }
  if (!(step > 0.0)) throw DomainError("from_g: step must be positive");

  // State (y, v) = (inv, inv') with y' = v, v' = -v/g(x).
  auto rk4_step = [&g](double x, double& y, double& v, double h) {
    auto fv = [&g](double xx, double vv) { return -vv / g(xx); };
    double k1y = v, k1v = fv(x, v);
    double k2y = v + 0.5 * h * k1v, k2v = fv(x + 0.5 * h, v + 0.5 * h * k1v);
    double k3y = v + 0.5 * h * k2v, k3v = fv(x + 0.5 * h, v + 0.5 * h * k2v);
    double k4y = v + h * k3v, k4v = fv(x + h, v + h * k3v);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  };

  const double anchor = 0.5;
  auto path = [&](double target, double h) {
    std::vector<std::pair<double, double>> out;  // (x, y)
    long long nsteps = std::llround(std::abs(target - anchor) / std::abs(h));
    double x = anchor, y = 0.0, v = 1.0;
    for (long long k = 0; k < nsteps; ++k) {
      rk4_step(x, y, v, h);
      x = anchor + static_cast<double>(k + 1) * h;
      if (!(v > 0.0) || !std::isfinite(y)) {
        throw SingularError("from_g: integration lost monotonicity near x = " +
                            std::to_string(x));
      }
      out.emplace_back(x, y);
    }
    return out;
  };

  auto down = path(x_lo, -step);
  auto up = path(x_hi, step);

  std::vector<double> u, phi;
  u.reserve(down.size() + up.size() + 1);
  phi.reserve(u.capacity());
  for (auto it = down.rbegin(); it != down.rend(); ++it) {
    u.push_back(it->second);
    phi.push_back(it->first);
  }
  u.push_back(0.0);
  phi.push_back(anchor);
  for (const auto& [x, y] : up) {
    u.push_back(y);
    phi.push_back(x);
  }
  return from_table(std::move(u), std::move(phi));
}

DeformedExponential DeformedExponential::parse(std::string_view spec) {
  auto bad = [&spec](const std::string& why) {
    return DomainError("phi spec '" + std::string(spec) + "': " + why);
  };
  if (spec == "exp") return exponential();
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw bad("expected exp, qexp:<q>, affq:<q>,<b>,<a>, or table:<path>");
  std::string head(spec.substr(0, colon));
  std::string rest(spec.substr(colon + 1));
  auto parse_reals = [&](int want) {
    std::vector<double> vals;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(item, &pos);
      } catch (const std::exception&) {
        throw bad("'" + item + "' is not a number");
      }
      if (pos != item.size()) throw bad("'" + item + "' is not a number");
      vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != want) {
      throw bad("expected " + std::to_string(want) + " parameter(s)");
    }
    return vals;
  };
  if (head == "qexp") return q_exponential(parse_reals(1)[0]);
  if (head == "affq") {
    auto v = parse_reals(3);
    return affine_q_exp(v[0], v[1], v[2]);
  }
  if (head == "table") {
    if (rest.empty()) throw bad("missing path");
    auto f = load_table_csv(rest);
    f.table_origin_ = rest;
    return f;
  }
  throw bad("unknown kind '" + head +
            "'; expected exp, qexp:<q>, affq:<q>,<b>,<a>, or table:<path>");
}

std::string DeformedExponential::spec_string() const {
  char buf[128];
  switch (kind_) {
    case Kind::Exponential:
      return "exp";
    case Kind::QExponential:
      std::snprintf(buf, sizeof buf, "qexp:%.17g", q_);
      return buf;
    case Kind::AffineQExp:
      std::snprintf(buf, sizeof buf, "affq:%.17g,%.17g,%.17g", q_, b_, a_);
      return buf;
    case Kind::NumericTable:
      return table_origin_.empty() ? "table:<memory>" : "table:" + table_origin_;
  }
  return "";
}

double DeformedExponential::support_lower() const {
  switch (kind_) {
    case Kind::Exponential:
      return -kInf;
    case Kind::QExponential:
      return q_ == 1.0 ? -kInf : -1.0 / (1.0 - q_);
    case Kind::AffineQExp:
      return q_ < 1.0 ? -b_ / (1.0 - q_) - a_ : -kInf;
    case Kind::NumericTable:
      return tu_.front();
  }
  return -kInf;
}

double DeformedExponential::domain_lower() const {
  return kind_ == Kind::NumericTable ? tu_.front() : -kInf;
}

double DeformedExponential::domain_upper() const {
  if (kind_ == Kind::NumericTable) return tu_.back();
  if (kind_ == Kind::AffineQExp && q_ > 1.0) return b_ / (q_ - 1.0) - a_;
  return kInf;
}

double DeformedExponential::table_phi_eval(double x) const {
  if (x < tu_.front() || x > tu_.back()) {
    throw DomainError("table phi: x = " + std::to_string(x) + " outside tabulated range");
  }
  return pchip_eval(tu_, tphi_, tslope_, x);
}

/* Central differences of the interpolant, switching to one-sided second-order
   stencils within a step of the table edges. */
double DeformedExponential::table_phi_deriv(double x, int order) const {
  const double lo = tu_.front(), hi = tu_.back();
  if (x < lo || x > hi) {
    throw DomainError("table derivative: x outside tabulated range");
  }
  auto f = [this](double t) { return pchip_eval(tu_, tphi_, tslope_, t); };
  if (order == 1) {
    double h = fd_step_first(x);
    if (x - h >= lo && x + h <= hi) return (f(x + h) - f(x - h)) / (2.0 * h);
    if (x + 2.0 * h <= hi) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
    if (x - 2.0 * h >= lo) return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
    throw DomainError("table derivative: range too narrow for the stencil");
  }
  double h = fd_step_second(x);
  if (x - h >= lo && x + h <= hi) return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  if (x + 3.0 * h <= hi) {
    return (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h);
  }
  if (x - 3.0 * h >= lo) {
    return (2.0 * f(x) - 5.0 * f(x - h) + 4.0 * f(x - 2.0 * h) - f(x - 3.0 * h)) / (h * h);
  }
  throw DomainError("table derivative: range too narrow for the stencil");
}

double DeformedExponential::phi(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      return std::exp(x);
    case Kind::QExponential: {
      if (q_ == 1.0) return std::exp(x);
      double w = 1.0 + (1.0 - q_) * x;
      if (w <= 0.0) return 0.0;
      return std::pow(w, 1.0 / (1.0 - q_));
    }
    case Kind::AffineQExp: {
      double v = (x + a_) / b_;
      if (q_ == 1.0) return std::exp(v);
      double w = 1.0 + (1.0 - q_) * v;
      if (w <= 0.0) {
        if (q_ < 1.0) return 0.0;
        throw DomainError("phi: x at or above the upper domain edge");
      }
      return std::pow(w, 1.0 / (1.0 - q_));
    }
    case Kind::NumericTable:
      return table_phi_eval(x);
  }
  return 0.0;
}

double DeformedExponential::phi_inv(double x) const {
  if (kind_ == Kind::NumericTable) {
    if (x < tphi_.front() || x > tphi_.back()) {
      throw DomainError("phi_inv: x = " + std::to_string(x) + " outside tabulated range");
    }
    // Bisection on the monotone interpolant down to rounding width.
    double lo = tu_.front(), hi = tu_.back();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::fmax(1.0, std::abs(lo)); ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (pchip_eval(tu_, tphi_, tslope_, mid) < x) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  if (!(x > 0.0)) {
    throw DomainError("phi_inv: x must be positive, got " + std::to_string(x));
  }
  switch (kind_) {
    case Kind::Exponential:
      return std::log(x);
    case Kind::QExponential:
      return lnq(x, q_);
    case Kind::AffineQExp:
      return b_ * lnq(x, q_) - a_;
    case Kind::NumericTable:
      break;
  }
  return 0.0;
}

double DeformedExponential::derivative(double x, int order, Deriv of) const {
  if (order != 1 && order != 2) throw DomainError("derivative: order must be 1 or 2");
  if (of == Deriv::Forward) {
    switch (kind_) {
      case Kind::Exponential:
        return std::exp(x);
      case Kind::QExponential: {
        if (q_ == 1.0) return std::exp(x);
        double w = 1.0 + (1.0 - q_) * x;
        if (w <= 0.0) throw DomainError("derivative: x at or below the support boundary");
        double e = order == 1 ? q_ / (1.0 - q_) : (2.0 * q_ - 1.0) / (1.0 - q_);
        return (order == 1 ? 1.0 : q_) * std::pow(w, e);
      }
      case Kind::AffineQExp: {
        double v = (x + a_) / b_;
        double scale = order == 1 ? b_ : b_ * b_;
        if (q_ == 1.0) return std::exp(v) / scale;
        double w = 1.0 + (1.0 - q_) * v;
        if (w <= 0.0) {
          throw DomainError(q_ < 1.0 ? "derivative: x at or below the support boundary"
                                     : "derivative: x at or above the upper domain edge");
        }
        double e = order == 1 ? q_ / (1.0 - q_) : (2.0 * q_ - 1.0) / (1.0 - q_);
        return (order == 1 ? 1.0 : q_) * std::pow(w, e) / scale;
      }
      case Kind::NumericTable:
        return table_phi_deriv(x, order);
    }
  }
  // Inverse derivatives.
  if (kind_ == Kind::NumericTable) {
    // Inverse-function rule at t = phi_inv(x): inv' = 1/phi'(t),
    // inv'' = -phi''(t)/phi'(t)^3.
    double t = phi_inv(x);
    double d1 = table_phi_deriv(t, 1);
    if (d1 == 0.0) throw SingularError("inverse derivative: flat interpolant");
    if (order == 1) return 1.0 / d1;
    return -table_phi_deriv(t, 2) / (d1 * d1 * d1);
  }
  if (!(x > 0.0)) throw DomainError("inverse derivative: x must be positive");
  switch (kind_) {
    case Kind::Exponential:
      return order == 1 ? 1.0 / x : -1.0 / (x * x);
    case Kind::QExponential:
      return order == 1 ? std::pow(x, -q_) : -q_ * std::pow(x, -q_ - 1.0);
    case Kind::AffineQExp:
      return order == 1 ? b_ * std::pow(x, -q_) : -q_ * b_ * std::pow(x, -q_ - 1.0);
    case Kind::NumericTable:
      break;
  }
  return 0.0;
}

DeformedExponential load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open table file '" + path + "'");
  std::vector<double> u, phi;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("table file '" + path + "': line " + std::to_string(lineno) +
                        " is not two comma-separated columns");
    }
    try {
      std::size_t p1 = 0, p2 = 0;
      std::string c1 = line.substr(0, comma), c2 = line.substr(comma + 1);
      double a = std::stod(c1, &p1);
      double b = std::stod(c2, &p2);
      if (p1 != c1.size() || p2 != c2.size()) throw std::invalid_argument(line);
      u.push_back(a);
      phi.push_back(b);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header row
      throw DomainError("table file '" + path + "': cannot parse line " +
                        std::to_string(lineno));
    }
  }
  return DeformedExponential::from_table(std::move(u), std::move(phi));
}

void write_table_csv(const DeformedExponential& f, const std::string& path) {
  if (f.kind() != DeformedExponential::Kind::NumericTable) {
    throw DomainError("write_table_csv: only table kinds can be serialized");
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write table file '" + path + "'");
  out << "u,phi\n";
  char buf[80];
  for (std::size_t i = 0; i < f.table_u().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.table_u()[i], f.table_phi()[i]);
    out << buf;
  }
}

std::vector<ConsistencyResidual> consistency_residuals(
    const DeformedExponential& f, std::span<const double> grid) {
  std::vector<ConsistencyResidual> out;
  out.reserve(grid.size());
  for (double x : grid) {
    if (!(x > 0.0 && x < 1.0)) {
      throw DomainError("consistency_residuals: grid points must lie in (0, 1)");
    }
    double t = f.phi_inv(x);
    double p1 = f.derivative(t, 1, Deriv::Forward);
    double p2 = f.derivative(t, 2, Deriv::Forward);
    double i1 = f.derivative(x, 1, Deriv::Inverse);
    double i2 = f.derivative(x, 2, Deriv::Inverse);
    if (p2 == 0.0 || i2 == 0.0) {
      throw SingularError("consistency_residuals: vanishing second derivative at x = " +
                          std::to_string(x));
    }
    out.push_back({x, std::abs(p1 * p1 / p2 + i1 / i2), std::abs(i1 * i1 / i2 + p1 / p2)});
  }
  return out;
}

}  // namespace phidiv
