#include "doctest.h"

#include "emtm/errors.hpp"
#include "emtm/medium_model.hpp"
#include "emtm/quadrature.hpp"

using namespace emtm;

namespace {

// Integral of exp(-i K x) over [a, b].
cd segment_transform(double K, double a, double b) {
    if (K == 0.0) return b - a;
    return (std::exp(cd(0.0, -K * a)) - std::exp(cd(0.0, -K * b))) / cd(0.0, K);
}

}  // namespace

TEST_CASE("eta of inverse coefficients") {
    const ConstantBoxProfile p(cd(2.0, 0.5), 1.5, Box{-1, 1, -1, 1});
    CHECK(std::abs(p.eta(EtaKind::Eps, 0, 0) - cd(1.0, 0.5)) < 1e-15);
    CHECK(std::abs(p.eta(EtaKind::InvEps, 0, 0) - (1.0 / cd(2.0, 0.5) - 1.0)) < 1e-15);
    CHECK(std::abs(p.eta(EtaKind::InvMu, 0, 0) - (1.0 / 1.5 - 1.0)) < 1e-15);
    CHECK(std::abs(p.eta(EtaKind::Eps, 3, 0)) == 0.0);
}

TEST_CASE("medium validation") {
    auto box = std::make_shared<ConstantBoxProfile>(2.0, 1.0, Box{-1, 1, -1, 1});
    Medium m;
    m.layers = {{0.0, 1.0, box}, {0.5, 2.0, box}};
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.layers = {{1.0, 0.0, box}};
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.layers = {{0.0, 1.0, box}};
    m.points = {{0.5, 1.0}};
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.points = {{1.5, 1.0}};
    CHECK_NOTHROW(m.validate());
    CHECK(m.z_min() == 0.0);
    CHECK(m.z_max() == 1.5);
    CHECK_THROWS_AS(ConstantBoxProfile(0.0, 1.0, Box{-1, 1, -1, 1}), ValidationError);
    CHECK_THROWS_AS(GaussianProfile(-1.0, 0.0, 1.0), ValidationError);
    auto singular = std::make_shared<FunctionProfile>([](double x, double) { return cd(x, 0.0); },
                                                      [](double, double) { return cd(1.0); }, Box{-1, 1, -1, 1});
    Medium s;
    s.layers = {{0.0, 1.0, singular}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    CHECK(Medium{}.is_vacuum());
}

TEST_CASE("box transform matches the closed form") {
    const ConstantBoxProfile p(cd(1.5, 0.2), 1.0, Box{0.0, 1.0, -0.5, 1.5});
    for (auto [kx, ky] : {std::pair{0.0, 0.0}, {0.7, -1.3}, {2.9, 0.4}}) {
        const cd ref = cd(0.5, 0.2) * segment_transform(kx, 0.0, 1.0) * segment_transform(ky, -0.5, 1.5);
        CHECK(std::abs(fourier_eta(p, EtaKind::Eps, kx, ky) - ref) < 1e-12);
        const cd inv = (1.0 / cd(1.5, 0.2) - 1.0) * segment_transform(kx, 0.0, 1.0) * segment_transform(ky, -0.5, 1.5);
        CHECK(std::abs(fourier_eta(p, EtaKind::InvEps, kx, ky) - inv) < 1e-12);
        CHECK(std::abs(fourier_eta(p, EtaKind::Mu, kx, ky)) == 0.0);
    }
}

TEST_CASE("gaussian transform matches the closed form") {
    const double s = 0.4, A = 0.3;
    const GaussianProfile p(A, 0.0, s, 0.2, -0.1);
    for (auto [kx, ky] : {std::pair{0.0, 0.0}, {1.1, 0.3}, {-2.0, 2.5}}) {
        const cd ref = A * 2.0 * kPi * s * s * std::exp(-0.5 * s * s * (kx * kx + ky * ky)) *
                       std::exp(cd(0.0, -(kx * 0.2 - ky * 0.1)));
        CHECK(std::abs(fourier_eta(p, EtaKind::Eps, kx, ky) - ref) < 1e-10);
    }
}

TEST_CASE("transform rule for derivatives") {
    // FT of d/dx eta equals i Kx eta~ (derivative computed analytically on the quadrature lattice).
    const double s = 0.5, A = 0.4;
    const GaussianProfile p(A, 0.0, s);
    auto deta = [&](double x, double y) { return -x / (s * s) * A * std::exp(-(x * x + y * y) / (2 * s * s)); };
    const QuadratureRule q = gauss_legendre(64, -8 * s, 8 * s);
    for (auto [kx, ky] : {std::pair{0.9, -0.4}, {2.2, 1.0}}) {
        cd num = 0.0;
        for (std::size_t a = 0; a < q.nodes.size(); ++a)
            for (std::size_t b = 0; b < q.nodes.size(); ++b)
                num += q.weights[a] * q.weights[b] * deta(q.nodes[a], q.nodes[b]) *
                       std::exp(cd(0.0, -(kx * q.nodes[a] + ky * q.nodes[b])));
        const cd rule = cd(0.0, kx) * fourier_eta(p, EtaKind::Eps, kx, ky);
        CHECK(std::abs(num - rule) < 1e-8);
    }
    // analytic gradient of 1/eps against central differences
    const auto g = p.grad_inverse(true, 0.3, -0.2);
    const double h = 1e-5;
    const cd fdx = (1.0 / p.eps(0.3 + h, -0.2) - 1.0 / p.eps(0.3 - h, -0.2)) / (2 * h);
    const cd fdy = (1.0 / p.eps(0.3, -0.2 + h) - 1.0 / p.eps(0.3, -0.2 - h)) / (2 * h);
    CHECK(std::abs(g[0] - fdx) < 1e-8);
    CHECK(std::abs(g[1] - fdy) < 1e-8);
}

TEST_CASE("table profile interpolates bilinearly") {
    std::vector<double> xs{-1.0, 0.0, 1.0}, ys{-1.0, 1.0};
    std::vector<cd> v;
    for (double y : ys)
        for (double x : xs) v.push_back(2.0 + 0.5 * x + cd(0.0, 0.25) * y);
    const TableProfile t(xs, ys, v);
    CHECK(std::abs(t.eps(0.3, -0.4) - (2.0 + 0.15 + cd(0.0, -0.1))) < 1e-14);
    CHECK(std::abs(t.eps(5.0, 0.0) - 1.0) < 1e-15);
    CHECK(t.mu(0.1, 0.1) == 1.0);
}

TEST_CASE("delta L kernel entries") {
    const double k = 1.3;
    const TransverseVector p{0.2, -0.4}, q{0.5, 0.1};
    const cd f(0.3, 0.1), g(-0.2, 0.4);
    const Mat2 L = delta_L(p, q, f, g, k);
    const double c = 1.0 / (kFourPiSq * k);
    CHECK(std::abs(L(0, 0) - c * (-p.px * q.py * f)) < 1e-15);
    CHECK(std::abs(L(0, 1) - c * (p.px * q.px * f - k * k * g)) < 1e-15);
    CHECK(std::abs(L(1, 0) - c * (-p.py * q.py * f + k * k * g)) < 1e-15);
    CHECK(std::abs(L(1, 1) - c * (p.py * q.px * f)) < 1e-15);
}

TEST_CASE("transform table agrees with on-demand transforms") {
    GridPtr g = make_grid(1.0, 4, 8);
    const GaussianProfile p(cd(0.3, 0.05), 0.2, 0.6, 0.1, 0.0);
    const TransformTable t = build_transform_table(p, g, 48);
    double worst = 0.0, peak = 0.0;
    for (EtaKind kd : {EtaKind::Eps, EtaKind::Mu, EtaKind::InvEps, EtaKind::InvMu})
        for (int i = 0; i < g->size(); ++i)
            for (int j = 0; j < g->size(); ++j) {
                const auto& a = g->node(i);
                const auto& b = g->node(j);
                const cd direct = fourier_eta(p, kd, a.px - b.px, a.py - b.py, 48);
                worst = std::max(worst, std::abs(t[kd](i, j) - direct));
                peak = std::max(peak, std::abs(direct));
            }
    CHECK(worst <= 1e-12 * peak);
}

TEST_CASE("uniform layer gives a node-diagonal kernel") {
    GridPtr g = make_grid(1.0, 3, 6);
    const ConstantBoxProfile p(2.25, 1.0);
    const Eigen::MatrixXcd dH = delta_H_kernel(build_transform_table(p, g));
    const int n = g->size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) CHECK(dH.block<4, 4>(4 * i, 4 * j).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(fourier_eta(p, EtaKind::Eps, 0.0, 0.0), ValidationError);
}
