#include "emtm/quadrature.hpp"

#include "emtm/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>

namespace emtm {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
    // legendre_p_zeros returns the non-negative zeros in increasing order.
    std::vector<double> pos = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x;
    x.reserve(n);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (*it > 0.0) x.push_back(-*it);
    for (double v : pos) x.push_back(v);
    QuadratureRule rule;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (double xi : x) {
        const double dp = boost::math::legendre_p_prime(n, xi);
        const double w = 2.0 / ((1.0 - xi * xi) * dp * dp);
        rule.nodes.push_back(mid + half * xi);
        rule.weights.push_back(half * w);
    }
    return rule;
}

namespace {

// The rules cache node sets per frequency, so each thread keeps its own.
boost::math::quadrature::ooura_fourier_sin<double>& sin_rule() {
    thread_local boost::math::quadrature::ooura_fourier_sin<double> rule(1e-13, 8);
    return rule;
}

boost::math::quadrature::ooura_fourier_cos<double>& cos_rule() {
    thread_local boost::math::quadrature::ooura_fourier_cos<double> rule(1e-13, 8);
    return rule;
}

}  // namespace

std::complex<double> fourier_line(const std::function<std::complex<double>(double)>& g,
                                  double kappa) {
    // e^{-i kappa x} = cos(w x) - i s sin(w x) with w = |kappa|, s = sign(kappa).
    auto even = [&](double x) { return g(x) + g(-x); };
    auto odd = [&](double x) { return g(x) - g(-x); };
    if (kappa == 0.0) {
        boost::math::quadrature::exp_sinh<double> integrator;
        const double re = integrator.integrate([&](double x) { return even(x).real(); });
        const double im = integrator.integrate([&](double x) { return even(x).imag(); });
        return {re, im};
    }
    const double w = std::abs(kappa);
    const double s = kappa > 0 ? 1.0 : -1.0;
    const double cr = cos_rule().integrate([&](double x) { return even(x).real(); }, w).first;
    const double ci = cos_rule().integrate([&](double x) { return even(x).imag(); }, w).first;
    const double sr = sin_rule().integrate([&](double x) { return odd(x).real(); }, w).first;
    const double si = sin_rule().integrate([&](double x) { return odd(x).imag(); }, w).first;
    const std::complex<double> c(cr, ci), sn(sr, si);
    return c - std::complex<double>(0.0, s) * sn;
}

}  // namespace emtm
