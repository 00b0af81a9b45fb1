#pragma once

namespace mimcav {

/// Bessel functions of the first kind by power series. Absolute error
/// below 1e-14 for |x| < 1; accurate to ~1e-12 up to |x| = 5.
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace mimcav
