#include "spinlab/bessel.hpp"

#include <cmath>

#include "spinlab/common.hpp"

namespace spinlab {

namespace {

using ld = long double;

constexpr ld kPiL = 3.141592653589793238462643383279502884L;
constexpr ld kEulerGammaL = 0.577215664901532860606512090082402431L;

ld series_j(int nu, ld z) {
    ld h = 0.5L * z, term = 1.0L;
    for (int k = 1; k <= nu; ++k) term *= h / k;
    ld sum = term, q = -h * h;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<ld>(k) * (k + nu));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
    }
    return sum;
}

ld series_y0(ld z) {
    ld h = 0.5L * z, q = h * h;
    ld term = 1.0L, harmonic = 0.0L, sum = 0.0L;
    for (int k = 1; k < 300; ++k) {
        term *= -q / (static_cast<ld>(k) * k);
        harmonic += 1.0L / k;
        ld t = -term * harmonic;
        sum += t;
        if (std::fabs(t) < 1e-22L * (std::fabs(sum) + 1e-300L)) break;
    }
    return (2.0L / kPiL) * ((std::log(h) + kEulerGammaL) * series_j(0, z) + sum);
}

ld series_y1(ld z) {
    // Y1 = -2/(pi z) + (2/pi) ln(z/2) J1 - (1/pi) sum_k (-1)^k [psi(k+1) + psi(k+2)] (z/2)^{2k+1} / (k!(k+1)!)
    ld h = 0.5L * z, q = h * h;
    ld term = h;  // (z/2)^{2k+1}/(k!(k+1)!) at k = 0
    ld hk = 0.0L, sum = 0.0L;
    for (int k = 0; k < 300; ++k) {
        if (k > 0) {
            term *= -q / (static_cast<ld>(k) * (k + 1));
            hk += 1.0L / k;
        }
        ld psi1 = -kEulerGammaL + hk, psi2 = -kEulerGammaL + hk + 1.0L / (k + 1);
        ld t = term * (psi1 + psi2);
        sum += t;
        if (k > 2 && std::fabs(t) < 1e-22L * std::fabs(sum)) break;
    }
    return -2.0L / (kPiL * z) + (2.0L / kPiL) * std::log(h) * series_j(1, z) - sum / kPiL;
}

void hankel(int nu, double z, double& P, double& Q) {
    double mu = 4.0 * nu * nu;
    P = 1.0;
    Q = 0.0;
    double a = 1.0, prev = 1e300;
    for (int k = 1; k < 60; ++k) {
        a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
        if (std::abs(a) > prev) break;
        prev = std::abs(a);
        int r = k % 4;
        if (r == 1) Q += a;
        else if (r == 2) P -= a;
        else if (r == 3) Q -= a;
        else P += a;
        if (std::abs(a) < 1e-17) break;
    }
}

}  // namespace

double bessel_j(int nu, double z) {
    require(nu == 0 || nu == 1, "bessel_j: order must be 0 or 1");
    require(z > 0.0, "bessel_j: argument must be positive");
    if (z <= kBesselSeriesLimit) return static_cast<double>(series_j(nu, z));
    double P, Q;
    hankel(nu, z, P, Q);
    double chi = z - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * z)) * (P * std::cos(chi) - Q * std::sin(chi));
}

double bessel_y(int nu, double z) {
    require(nu == 0 || nu == 1, "bessel_y: order must be 0 or 1");
    require(z > 0.0, "bessel_y: argument must be positive");
    if (z <= kBesselSeriesLimit) return static_cast<double>(nu == 0 ? series_y0(z) : series_y1(z));
    double P, Q;
    hankel(nu, z, P, Q);
    double chi = z - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * z)) * (P * std::sin(chi) + Q * std::cos(chi));
}

double bessel_y_half(double z) { return -std::sqrt(2.0 / (kPi * z)) * std::cos(z); }

double bessel_y_three_halves(double z) {
    return -std::sqrt(2.0 / (kPi * z)) * (std::cos(z) / z + std::sin(z));
}

}  // namespace spinlab
