#pragma once

// Independent evaluation of the differential QPSK bit error probability by
// direct numerical integration of the Marcum Q integral.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace wbbn::testing
{

inline double marcumQ1Quadrature(double a, double b)
{
    // Q1(a, b) = integral_b^inf x exp(-(x^2 + a^2) / 2) I0(a x) dx
    auto integrand = [a](double x) {
        return x * std::exp(-(x * x + a * a) / 2.0) * std::cyl_bessel_i(0.0, a * x);
    };
    const double upper = b + a + 40.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, b, upper, 20, 1e-15);
}

inline double dqpskBerOracle(double gamma)
{
    const double a = std::sqrt(2.0 * gamma * (1.0 - 1.0 / std::sqrt(2.0)));
    const double b = std::sqrt(2.0 * gamma * (1.0 + 1.0 / std::sqrt(2.0)));
    return marcumQ1Quadrature(a, b) - 0.5 * std::cyl_bessel_i(0.0, a * b) * std::exp(-(a * a + b * b) / 2.0);
}

} // namespace wbbn::testing
