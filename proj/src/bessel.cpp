#include "mimcav/bessel.hpp"

#include <cmath>

#include "mimcav/errors.hpp"

namespace mimcav {

namespace {

// sum_k (-1)^k (x/2)^{2k+order} / (k! (k+order)!)
double series(double x, int order) {
  if (std::abs(x) > 5.0) throw DomainError("bessel series used outside |x| <= 5");
  const double h = 0.5 * x;
  const double h2 = h * h;
  double term = order == 0 ? 1.0 : h;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double bessel_j0(double x) { return series(x, 0); }
double bessel_j1(double x) { return series(x, 1); }

}  // namespace mimcav
