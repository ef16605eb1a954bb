#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phidiv {

// Which function a derivative query refers to: phi itself or its inverse.
enum class Deriv { Forward, Inverse };

/* A deformed exponential phi: convex, non-decreasing, phi(-inf)=0, phi(inf)=inf,
   together with its inverse and first/second derivatives of both.

   Kinds:
     Exponential    phi(x) = e^x
     QExponential   phi(x) = [1 + (1-q)x]_+^{1/(1-q)},  q in (0, 1]
     AffineQExp     phi^{-1}(x) = b*lnq(x) - a,          q > 0, b > 0
     NumericTable   monotone samples (u_i, phi(u_i)), interpolated

   QExponential and AffineQExp with q < 1 vanish at a finite support boundary;
   phi is 0 at and below it, and derivative queries there raise DomainError.
   AffineQExp with q > 1 instead has a finite upper domain edge where phi
   diverges. NumericTable is defined only on its tabulated range. */
class DeformedExponential {
 public:
  enum class Kind { Exponential, QExponential, AffineQExp, NumericTable };

  static DeformedExponential exponential();
  static DeformedExponential q_exponential(double q);
  static DeformedExponential affine_q_exp(double q, double b, double a);

  // Strictly increasing u with strictly increasing positive phi values; >= 4 rows.
  static DeformedExponential from_table(std::vector<double> u,
                                        std::vector<double> phi_of_u);

  /* Tabulates the deformation whose ratio -inv'/inv'' equals g on [x_lo, x_hi],
     by fourth-order fixed-step integration of inv'' = -inv'/g(x) anchored at
     inv(1/2) = 0, inv'(1/2) = 1. g must be positive on the interval. */
  static DeformedExponential from_g(const std::function<double(double)>& g,
                                    double x_lo, double x_hi, double step);

  // "exp" | "qexp:<q>" | "affq:<q>,<b>,<a>" | "table:<csv path>"
  static DeformedExponential parse(std::string_view spec);

  Kind kind() const { return kind_; }
  std::string spec_string() const;

  double phi(double x) const;
  double phi_inv(double x) const;

  // order is 1 or 2; analytic kinds use closed forms, tables central differences.
  double derivative(double x, int order, Deriv of) const;

  // Point at or below which phi vanishes; -inf when phi is everywhere positive.
  double support_lower() const;

  // Tabulated domain edges (table kind only; others return +/- inf, except the
  // finite upper edge of AffineQExp with q > 1).
  double domain_lower() const;
  double domain_upper() const;

  const std::vector<double>& table_u() const { return tu_; }
  const std::vector<double>& table_phi() const { return tphi_; }

 private:
  DeformedExponential() = default;

  double table_phi_eval(double x) const;
  double table_phi_deriv(double x, int order) const;

  Kind kind_ = Kind::Exponential;
  double q_ = 1.0;
  double b_ = 1.0;
  double a_ = 0.0;
  std::vector<double> tu_, tphi_, tslope_;
  std::string table_origin_;
};

// Two-column CSV "u,phi" (header line optional), sorted ascending in u.
DeformedExponential load_table_csv(const std::string& path);
void write_table_csv(const DeformedExponential& f, const std::string& path);

struct ConsistencyResidual {
  double x;        // probe point in (0, 1)
  double forward;  // |phi'(t)^2/phi''(t) - g(x)| at t = phi_inv(x)
  double inverse;  // |inv'(x)^2/inv''(x) + h(t)|
};

/* Cross-checks the forward and inverse derivative implementations through the
   two exact ratio identities linking them; residuals are zero in exact
   arithmetic and bounded by the differencing error for tables. */
std::vector<ConsistencyResidual> consistency_residuals(
    const DeformedExponential& f, std::span<const double> grid);

}  // namespace phidiv
