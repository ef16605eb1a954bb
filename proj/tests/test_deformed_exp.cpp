#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "phidiv/deformed_exp.hpp"
#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

using phidiv::DeformedExponential;
using phidiv::Deriv;

namespace {

double fd1(const std::function<double(double)>& f, double x) {
  double h = phidiv::fd_step_first(x);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// A 3-point second difference cannot reach 1e-6 relative accuracy at this
// step size, so order 2 is checked as a first difference of the analytic
// first derivative instead.
double fd_of(const DeformedExponential& f, double x, Deriv which) {
  double h = phidiv::fd_step_first(x);
  return (f.derivative(x + h, 1, which) - f.derivative(x - h, 1, which)) / (2.0 * h);
}

}  // namespace

TEST_CASE("exponential kind basics") {
  auto f = DeformedExponential::exponential();
  CHECK(f.phi(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.phi(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(f.phi_inv(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f.derivative(0.0, 2, Deriv::Forward) == doctest::Approx(1.0));
  CHECK(f.derivative(0.5, 1, Deriv::Inverse) == doctest::Approx(2.0));
  CHECK(f.derivative(0.5, 2, Deriv::Inverse) == doctest::Approx(-4.0));
  CHECK(f.support_lower() == -std::numeric_limits<double>::infinity());
  CHECK(f.domain_upper() == std::numeric_limits<double>::infinity());
}

TEST_CASE("q-exponential closed forms at q = 0.5") {
  auto f = DeformedExponential::q_exponential(0.5);
  CHECK(f.phi(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // 1 + 0.5*(-3) < 0, so the positive-part clamp gives exactly zero.
  CHECK(f.phi(-3.0) == 0.0);
  CHECK(f.phi(f.support_lower()) == 0.0);
  CHECK(f.support_lower() == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(f.phi_inv(0.25) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f.derivative(0.25, 1, Deriv::Inverse) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.derivative(0.25, 2, Deriv::Inverse) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK_THROWS_AS(f.derivative(-2.0, 1, Deriv::Forward), phidiv::DomainError);
  CHECK_THROWS_AS(f.derivative(-2.5, 1, Deriv::Forward), phidiv::DomainError);
  CHECK_THROWS_AS(f.phi_inv(0.0), phidiv::DomainError);
  CHECK_THROWS_AS(f.phi_inv(-1.0), phidiv::DomainError);
}

TEST_CASE("q-exponential at q = 0.3, frozen inverse derivatives") {
  auto f = DeformedExponential::q_exponential(0.3);
  CHECK(f.phi_inv(0.2) == doctest::Approx(-0.96552668665921071).epsilon(1e-14));
  CHECK(f.derivative(0.2, 1, Deriv::Inverse) ==
        doctest::Approx(1.6206565966927624).epsilon(1e-14));
  CHECK(f.derivative(0.2, 2, Deriv::Inverse) ==
        doctest::Approx(-2.4309848950391433).epsilon(1e-14));
}

TEST_CASE("q-exponential parameter validation") {
  CHECK_THROWS_AS(DeformedExponential::q_exponential(0.0), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::q_exponential(1.2), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::q_exponential(-0.5), phidiv::DomainError);
}

TEST_CASE("q = 1 coincides with the exponential") {
  auto e = DeformedExponential::exponential();
  auto f = DeformedExponential::q_exponential(1.0);
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    CHECK(std::abs(f.phi(x) - e.phi(x)) < 1e-12 * std::fmax(1.0, e.phi(x)));
  }
  for (double x = 0.05; x < 1.0; x += 0.05) {
    CHECK(f.phi_inv(x) == doctest::Approx(e.phi_inv(x)).epsilon(1e-12));
    CHECK(f.derivative(x, 2, Deriv::Inverse) ==
          doctest::Approx(e.derivative(x, 2, Deriv::Inverse)).epsilon(1e-12));
  }
}

TEST_CASE("affine shift of the q-logarithm") {
  auto f = DeformedExponential::affine_q_exp(0.7, 1.5, -0.4);
  CHECK(f.phi_inv(0.3) == doctest::Approx(-1.1157734903202554).epsilon(1e-14));
  // b scales and a shifts the inverse; the curvature ratio is untouched.
  for (double x : {0.1, 0.35, 0.6, 0.9}) {
    double g = -f.derivative(x, 1, Deriv::Inverse) / f.derivative(x, 2, Deriv::Inverse);
    CHECK(g == doctest::Approx(x / 0.7).epsilon(1e-12));
  }
  auto g1 = DeformedExponential::affine_q_exp(0.5, 2.0, 1.0);
  CHECK(g1.phi_inv(1.0) == doctest::Approx(-1.0).epsilon(1e-14));

  CHECK_THROWS_AS(DeformedExponential::affine_q_exp(0.0, 1.0, 0.0), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::affine_q_exp(0.5, 0.0, 0.0), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::affine_q_exp(0.5, 1.0, NAN), phidiv::DomainError);
}

TEST_CASE("affine kind with q > 1 has a finite upper domain edge") {
  auto f = DeformedExponential::affine_q_exp(2.0, 1.0, 0.0);
  // phi^{-1}(x) = ln_2(x) = 1 - 1/x, so phi(u) = 1/(1-u) on (-inf, 1).
  CHECK(f.domain_upper() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.phi(0.5) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(f.phi_inv(2.0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(f.phi(-1e6) == doctest::Approx(1e-6).epsilon(1e-10));
  CHECK(f.support_lower() == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(f.phi(1.0), phidiv::DomainError);
  CHECK_THROWS_AS(f.phi(1.5), phidiv::DomainError);
}

TEST_CASE("round trip phi(phi_inv(x)) over the unit interval") {
  auto kinds = {DeformedExponential::exponential(),
                DeformedExponential::q_exponential(0.5),
                DeformedExponential::q_exponential(0.9),
                DeformedExponential::affine_q_exp(0.7, 1.5, -0.4),
                DeformedExponential::affine_q_exp(2.0, 1.0, 0.3)};
  for (const auto& f : kinds) {
    for (int k = 1; k <= 99; ++k) {
      double x = 0.01 * k;
      CHECK(std::abs(f.phi(f.phi_inv(x)) - x) < 1e-10);
    }
  }
}

TEST_CASE("phi is convex along random chords") {
  std::mt19937_64 rng(42);
  auto kinds = {DeformedExponential::exponential(),
                DeformedExponential::q_exponential(0.4),
                DeformedExponential::affine_q_exp(0.6, 2.0, 0.5)};
  for (const auto& f : kinds) {
    double lo = std::fmax(f.support_lower(), -8.0) + 0.05;
    for (int t = 0; t < 200; ++t) {
      double a = lo + (4.0 - lo) * phidiv::uniform01(rng());
      double b = lo + (4.0 - lo) * phidiv::uniform01(rng());
      double c = lo + (4.0 - lo) * phidiv::uniform01(rng());
      double x = std::min({a, b, c}), z = std::max({a, b, c});
      double y = a + b + c - x - z;
      if (z - x < 1e-8) continue;
      double chord = ((z - y) * f.phi(x) + (y - x) * f.phi(z)) / (z - x);
      CHECK(f.phi(y) <= chord + 1e-12);
    }
  }
}

TEST_CASE("closed-form derivatives match central differences") {
  std::mt19937_64 rng(7);
  auto kinds = {DeformedExponential::exponential(),
                DeformedExponential::q_exponential(0.5),
                DeformedExponential::q_exponential(0.8),
                DeformedExponential::affine_q_exp(0.7, 1.5, -0.4)};
  for (const auto& f : kinds) {
    auto phi = [&f](double t) { return f.phi(t); };
    auto inv = [&f](double t) { return f.phi_inv(t); };
    double lo = std::fmax(f.support_lower(), -6.0) + 0.2;
    for (int t = 0; t < 100; ++t) {
      double x = lo + (3.0 - lo) * phidiv::uniform01(rng());
      CHECK(f.derivative(x, 1, Deriv::Forward) ==
            doctest::Approx(fd1(phi, x)).epsilon(1e-6));
      CHECK(f.derivative(x, 2, Deriv::Forward) ==
            doctest::Approx(fd_of(f, x, Deriv::Forward)).epsilon(1e-6));
      double u = 0.05 + 0.9 * phidiv::uniform01(rng());
      CHECK(f.derivative(u, 1, Deriv::Inverse) ==
            doctest::Approx(fd1(inv, u)).epsilon(1e-6));
      CHECK(f.derivative(u, 2, Deriv::Inverse) ==
            doctest::Approx(fd_of(f, u, Deriv::Inverse)).epsilon(1e-6));
    }
  }
}

TEST_CASE("derivative ratio identities hold on the analytic kinds") {
  std::vector<double> grid;
  for (double x = 0.05; x < 0.951; x += 0.05) grid.push_back(x);
  for (const auto& f : {DeformedExponential::exponential(),
                        DeformedExponential::q_exponential(0.5),
                        DeformedExponential::q_exponential(0.25),
                        DeformedExponential::affine_q_exp(0.7, 1.5, -0.4)}) {
    for (const auto& r : phidiv::consistency_residuals(f, grid)) {
      CHECK(r.forward < 1e-8);
      CHECK(r.inverse < 1e-8);
    }
  }
}

TEST_CASE("numeric table reproduces the sampled q-exponential") {
  auto ref = DeformedExponential::q_exponential(0.5);
  std::vector<double> u, pu;
  for (int i = 0; i <= 2000; ++i) {
    double t = -1.9 + (1.4 + 1.9) * i / 2000.0;
    u.push_back(t);
    pu.push_back(ref.phi(t));
  }
  auto f = DeformedExponential::from_table(u, pu);
  CHECK(f.kind() == DeformedExponential::Kind::NumericTable);
  CHECK(f.domain_lower() == doctest::Approx(-1.9));
  CHECK(f.domain_upper() == doctest::Approx(1.4));
  for (double x = -1.7; x <= 1.3; x += 0.1) {
    CHECK(f.phi(x) == doctest::Approx(ref.phi(x)).epsilon(1e-8));
  }
  for (double v = 0.05; v <= 0.95; v += 0.05) {
    CHECK(f.phi_inv(v) == doctest::Approx(ref.phi_inv(v)).epsilon(1e-7));
    CHECK(f.derivative(v, 1, Deriv::Inverse) ==
          doctest::Approx(ref.derivative(v, 1, Deriv::Inverse)).epsilon(1e-4));
  }
  for (double x = -1.5; x <= 1.2; x += 0.3) {
    CHECK(f.derivative(x, 1, Deriv::Forward) ==
          doctest::Approx(ref.derivative(x, 1, Deriv::Forward)).epsilon(1e-4));
    CHECK(f.derivative(x, 2, Deriv::Forward) ==
          doctest::Approx(ref.derivative(x, 2, Deriv::Forward)).epsilon(1e-2));
  }
  CHECK_THROWS_AS(f.phi(-2.5), phidiv::DomainError);
  CHECK_THROWS_AS(f.phi(1.5), phidiv::DomainError);
}

TEST_CASE("table residuals stay within the differencing budget") {
  auto ref = DeformedExponential::exponential();
  std::vector<double> u, pu;
  for (int i = 0; i <= 4000; ++i) {
    double t = -8.0 + 8.5 * i / 4000.0;
    u.push_back(t);
    pu.push_back(ref.phi(t));
  }
  auto f = DeformedExponential::from_table(u, pu);
  std::vector<double> grid = {0.5};
  for (const auto& r : phidiv::consistency_residuals(f, grid)) {
    CHECK(r.forward < 1e-4);
    CHECK(r.inverse < 1e-4);
  }
}

TEST_CASE("table construction rejects malformed input") {
  using DE = DeformedExponential;
  CHECK_THROWS_AS(DE::from_table({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0}), phidiv::DomainError);
  CHECK_THROWS_AS(DE::from_table({0.0, 1.0, 1.0, 2.0}, {1.0, 2.0, 3.0, 4.0}),
                  phidiv::DomainError);
  CHECK_THROWS_AS(DE::from_table({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 2.0, 4.0}),
                  phidiv::DomainError);
  CHECK_THROWS_AS(DE::from_table({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, -1.0, 4.0}),
                  phidiv::DomainError);
  CHECK_THROWS_AS(DE::from_table({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}),
                  phidiv::ShapeError);
}

TEST_CASE("tabulating from a curvature ratio reproduces its defining property") {
  auto f = DeformedExponential::from_g([](double x) { return x; }, 0.01, 0.99, 1e-4);
  // Anchored at inv(1/2) = 0 with unit slope, so phi(0) = 1/2 exactly.
  CHECK(f.phi(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(f.derivative(0.5, 1, Deriv::Inverse) == doctest::Approx(1.0).epsilon(1e-6));
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double g = -f.derivative(x, 1, Deriv::Inverse) / f.derivative(x, 2, Deriv::Inverse);
    CHECK(g == doctest::Approx(x).epsilon(5e-3));
  }
  CHECK_THROWS_AS(DeformedExponential::from_g([](double x) { return x; }, 0.6, 0.99, 1e-4),
                  phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::from_g([](double x) { return x; }, 0.01, 0.99, 0.0),
                  phidiv::DomainError);
  CHECK_THROWS_AS(
      DeformedExponential::from_g([](double x) { return x - 0.3; }, 0.01, 0.99, 1e-4),
      phidiv::SingularError);
}

TEST_CASE("spec strings parse and round trip") {
  CHECK(DeformedExponential::parse("exp").kind() == DeformedExponential::Kind::Exponential);
  auto f = DeformedExponential::parse("qexp:0.5");
  CHECK(f.kind() == DeformedExponential::Kind::QExponential);
  CHECK(f.spec_string() == "qexp:0.5");
  auto g = DeformedExponential::parse("affq:0.5,2,-1");
  CHECK(g.spec_string() == "affq:0.5,2,-1");
  CHECK(g.phi_inv(1.0) == doctest::Approx(1.0).epsilon(1e-14));  // 2*lnq(1) - (-1)

  CHECK_THROWS_AS(DeformedExponential::parse("nope"), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::parse("qexp:abc"), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::parse("qexp:0.5,1"), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::parse("affq:1,2"), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::parse("table:"), phidiv::DomainError);
  CHECK_THROWS_AS(DeformedExponential::parse("watt:3"), phidiv::DomainError);
  try {
    DeformedExponential::parse("watt:3");
  } catch (const phidiv::DomainError& e) {
    CHECK(std::string(e.what()).find("qexp:<q>") != std::string::npos);
  }
}

TEST_CASE("csv round trip preserves the table bit for bit") {
  auto ref = DeformedExponential::q_exponential(0.5);
  std::vector<double> u, pu;
  for (int i = 0; i <= 50; ++i) {
    double t = -1.5 + 2.5 * i / 50.0;
    u.push_back(t);
    pu.push_back(ref.phi(t));
  }
  auto f = DeformedExponential::from_table(u, pu);
  std::string path = "/tmp/phidiv_test_table.csv";
  phidiv::write_table_csv(f, path);
  auto g = phidiv::load_table_csv(path);
  REQUIRE(g.table_u().size() == f.table_u().size());
  for (std::size_t i = 0; i < f.table_u().size(); ++i) {
    CHECK(g.table_u()[i] == f.table_u()[i]);
    CHECK(g.table_phi()[i] == f.table_phi()[i]);
  }
  auto h = DeformedExponential::parse("table:" + path);
  CHECK(h.spec_string() == "table:" + path);
  std::remove(path.c_str());
}
