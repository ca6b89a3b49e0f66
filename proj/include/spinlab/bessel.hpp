#pragma once

namespace spinlab {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Integer-order Bessel functions J_nu, Y_nu (nu = 0, 1), z > 0:
// power series for z <= kBesselSeriesLimit, Hankel asymptotic expansion beyond;
// the series runs in long double; absolute error stays below 1e-13.
inline constexpr double kBesselSeriesLimit = 16.0;

double bessel_j(int nu, double z);
double bessel_y(int nu, double z);

// Half-integer closed forms, Y_{1/2}(z) = -sqrt(2/(pi z)) cos z and Y_{3/2}.
double bessel_y_half(double z);
double bessel_y_three_halves(double z);

}  // namespace spinlab
