#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace emtm {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Integral of exp(-i kappa x) g(x) over the real line for g with algebraic
// decay, by double-exponential (Ooura-Mori) quadrature on each half line.
std::complex<double> fourier_line(const std::function<std::complex<double>(double)>& g,
                                  double kappa);

}  // namespace emtm
