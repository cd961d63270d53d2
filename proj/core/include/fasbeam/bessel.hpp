#pragma once

namespace fasbeam {

// Zero-order Bessel function of the first kind, J0(x), for real x.
// Absolute error below 1e-13 on [0, 100].
double bessel_j0(double x);

}  // namespace fasbeam
