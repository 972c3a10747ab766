#include "doctest.h"

#include "emtm/errors.hpp"
#include "emtm/invisibility.hpp"
#include "emtm/quadrature.hpp"

using namespace emtm;

namespace {

InvisibleProfileParams params(cd ue, cd ve, cd um, cd vm) {
    InvisibleProfileParams p;
    p.alpha_x = 1.0;
    p.alpha_y = 1.0;
    p.az = 1.0;
    p.u_eps.coupling = ue;
    p.v_eps.coupling = ve;
    p.u_mu.coupling = um;
    p.v_mu.coupling = vm;
    return p;
}

}  // namespace

TEST_CASE("half-line transform against DE quadrature") {
    for (int m : {2, 3, 5})
        for (double a : {0.7, 1.3})
            for (double kappa : {0.4, 2.0, 5.0}) {
                auto h = [&](double x) { return std::pow(cd(x / a, 1.0), -m); };
                CHECK(std::abs(half_line_transform(m, kappa, a) - fourier_line(h, kappa)) < 1e-9);
            }
    CHECK(half_line_transform(3, -1.0, 1.0) == 0.0);
    CHECK(half_line_transform(3, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(half_line_transform(1, 1.0, 1.0), ValidationError);
}

TEST_CASE("seed transform is a product of line transforms") {
    SeedEta s;
    s.zu = cd(0.3, 0.1);
    s.zv = 0.2;
    s.ax = 0.8;
    s.ay = 1.2;
    auto gx = [&](double x) { return std::pow(cd(x / s.ax, 1.0), -2); };
    auto gy = [&](double y) { return std::pow(cd(y / s.ay, 1.0), -2); };
    for (auto [kx, ky] : {std::pair{2.5, 0.6}, {0.8, 3.1}, {3.0, 3.0}, {1.0, 1.0}}) {
        // the modulation e^{2ix} shifts the transform by 2
        const cd ref = s.zu * fourier_line(gx, kx - 2.0) * fourier_line(gy, ky) +
                       s.zv * fourier_line(gx, kx) * fourier_line(gy, ky - 2.0);
        CHECK(std::abs(s.power_transform(1, kx, ky) - ref) < 1e-9);
    }
    CHECK(s.power_transform(2, 1.9, 1.9) == 0.0);
}

TEST_CASE("series maps reproduce the pointwise functions") {
    SeedEta s;
    s.zu = 0.4;
    s.zv = cd(0.1, 0.2);
    for (SeriesMap map : {SeriesMap::Plain, SeriesMap::PairPlus, SeriesMap::PairMinus}) {
        const InvisibleProfile p(s, s, map);
        const auto& c = p.forward_coefficients();
        const auto& d = p.inverse_coefficients();
        for (cd eta : {cd(0.3, 0.0), cd(-0.2, 0.25), cd(0.0, -0.4)}) {
            cd f = 0.0, g = 0.0, pw = 1.0;
            for (std::size_t n = 0; n < c.size(); ++n) {
                f += c[n] * pw;
                g += d[n] * pw;
                pw *= eta;
            }
            cd ref = 1.0 + eta;
            if (map != SeriesMap::Plain) ref = 0.5 * ((map == SeriesMap::PairPlus ? eta : -eta) + std::sqrt(eta * eta + 4.0));
            CHECK(std::abs(f - ref) < 1e-13);
            CHECK(std::abs(g - 1.0 / ref) < 1e-13);
        }
    }
}

TEST_CASE("invisible profile has no transform below twice alpha") {
    const auto prof = make_invisible_profile(params(0.3, 0.2, 0.1, 0.1));
    for (double r : {0.0, 0.5, 1.0, 1.5, 1.99})
        for (double t : {0.0, 0.8, 2.4, 4.0})
            for (EtaKind kd : {EtaKind::Eps, EtaKind::Mu, EtaKind::InvEps, EtaKind::InvMu})
                CHECK(prof->analytic_transform(kd, r * std::cos(t), r * std::sin(t)) == 0.0);
    CHECK(std::abs(prof->analytic_transform(EtaKind::Eps, 3.0, 1.0)) > 1e-3);
    const ConditionReport c = check_transform_gap(*prof, 1.0, 1e-7);
    CHECK(c.passed);
    const SupportReport s = check_profile_support(*prof, 1e-7);
    CHECK(s.passed);
    CHECK(s.terms_checked > 0);
    // algebraic decay: the cut at 1e-12 of the peak leaves an L1 tail of order a^2 / R
    CHECK(prof->truncation_leakage() > 0.0);
    CHECK(prof->truncation_leakage() < 1e-4);
}

TEST_CASE("condition check flags ordinary media") {
    const GaussianProfile g(0.3, 0.0, 0.5);
    CHECK_FALSE(check_transform_gap(g, 1.0, 1e-7, 32).passed);
    Medium m;
    m.points.push_back({0.0, 1.0});
    CHECK_FALSE(check_transform_gap(m, 1.0, 1e-7).passed);
}

TEST_CASE("invisible profile validation") {
    InvisibleProfileParams p = params(0.3, 0.2, 0.0, 0.0);
    p.v_eps.nx = 2;
    CHECK_THROWS_AS(make_invisible_profile(p), ValidationError);
    CHECK_THROWS_AS(make_invisible_profile(params(0.7, 0.5, 0.0, 0.0)), ValidationError);
    p = params(0.3, 0.2, 0.0, 0.0);
    p.alpha_x = 0.0;
    CHECK_THROWS_AS(make_invisible_profile(p), ValidationError);
}

TEST_CASE("equivalent pair construction identities") {
    const InvisibleProfileParams p = params(cd(0.5, 0.1), 0.4, 0.3, 0.2);
    const EquivalencePair pair = build_equivalent_pair(p, p, 32);
    double worst = 0.0;
    for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0})
        for (double y : {-1.5, 0.0, 0.4, 2.2}) {
            const cd eta = pair.eps_seed.value(x, y);
            const cd e1 = pair.p1->eps(x, y), e2 = pair.p2->eps(x, y);
            worst = std::max({worst, std::abs(e1 - e2 - eta), std::abs(1.0 / e1 - 1.0 / e2 + eta)});
            const cd m = pair.mu_seed.value(x, y);
            worst = std::max({worst, std::abs(pair.p1->mu(x, y) - pair.p2->mu(x, y) - m)});
        }
    CHECK(worst < 1e-12);
    const ConditionReport c = check_pair_transform_match(*pair.p1, *pair.p2, pair.alpha, 1e-7, 32);
    CHECK(c.passed);
    InvisibleProfileParams other = p;
    other.u_eps.coupling = 0.2;
    CHECK_THROWS_AS(build_equivalent_pair(p, other), ValidationError);
}

TEST_CASE("inverse series and product support") {
    const SeriesSuiteReport r = inverse_series_suite();
    CHECK(r.product_support_passed);
    CHECK(r.families.size() >= 3);
    for (const auto& f : r.families) {
        INFO(f.name);
        CHECK(f.sup_beta < 1.0);
        CHECK(f.passed);
    }
    CHECK_THROWS_AS(inverse_series_family("bad", {cd(-1.0)}), ValidationError);
    const auto two = inverse_series_family("two", {cd(2.0)});
    // Q = 5/4, beta = -1/9
    CHECK(two.Q == doctest::Approx(1.25));
    CHECK(two.sup_beta == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("invisibility at low wavenumber on a small grid") {
    const Medium m = build_invisible_medium(params(0.3, 0.2, 0.1, 0.1), 32);
    PropagationOptions o;
    o.z_steps = 8;
    const InvisibilityReport rep = verify_invisibility(m, 1.0, {0.5, 2.0}, 4, 8, o);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].ratio <= 10.0);
    CHECK(rep.rows[1].ratio >= 100.0);
}
