#include <cmath>
#include <cstdio>
#include <numbers>

#include "phidiv/deformed_exp.hpp"

/* Emits the table fixture for a deformation outside the q-exponential class:
   its ratio g(x) = x*(1 + 0.3*sin^2(3*pi*x)) oscillates around the identity,
   so g is neither superadditive nor concave on (0, 1). */
int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <output.csv>\n", argv[0]);
    return 1;
  }
  auto g = [](double x) {
    double s = std::sin(3.0 * std::numbers::pi * x);
    return x * (1.0 + 0.3 * s * s);
  };
  auto f = phidiv::DeformedExponential::from_g(g, 1e-4, 1.0 - 1e-4, 1e-4);
  phidiv::write_table_csv(f, argv[1]);
  return 0;
}
