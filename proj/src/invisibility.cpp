#include "emtm/invisibility.hpp"

#include "emtm/errors.hpp"
#include "emtm/quadrature.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace emtm {

namespace {

constexpr int kSeriesTerms = 160;
const cd kI(0.0, 1.0);

cd ipow_minus_i(int m) {
    switch (((m % 4) + 4) % 4) {
        case 0: return 1.0;
        case 1: return -kI;
        case 2: return -1.0;
        default: return kI;
    }
}

bool same_shape(const SeedTerm& a, const SeedTerm& b) {
    return a.ax == b.ax && a.ay == b.ay && a.nx == b.nx && a.ny == b.ny;
}

void check_term(const SeedTerm& t, const char* name) {
    if (!(t.ax > 0.0) || !(t.ay > 0.0)) throw ValidationError(std::string(name) + ": lengths ax, ay must be positive");
    if (t.nx < 1 || t.ny < 1) throw ValidationError(std::string(name) + ": nx, ny must be positive integers");
    if (!std::isfinite(std::abs(t.coupling))) throw ValidationError(std::string(name) + ": coupling not finite");
}

SeedEta seed_of(const InvisibleProfileParams& p, const SeedTerm& u, const SeedTerm& v) {
    if (u.coupling != 0.0 && v.coupling != 0.0 && !same_shape(u, v))
        throw ValidationError("u and v terms of one profile must share (ax, ay, nx, ny)");
    const SeedTerm& shape = (u.coupling != 0.0) ? u : v;
    SeedEta s;
    s.alpha_x = p.alpha_x;
    s.alpha_y = p.alpha_y;
    s.zu = u.coupling;
    s.zv = v.coupling;
    s.ax = shape.ax;
    s.ay = shape.ay;
    s.nx = shape.nx;
    s.ny = shape.ny;
    return s;
}

std::vector<double> forward_series(SeriesMap map) {
    std::vector<double> c(kSeriesTerms + 1, 0.0);
    c[0] = 1.0;
    if (map == SeriesMap::Plain) {
        c[1] = 1.0;
        return c;
    }
    // +-eta/2 + sqrt(1 + eta^2/4)
    c[1] = (map == SeriesMap::PairPlus) ? 0.5 : -0.5;
    double b = 1.0;
    for (int m = 1; 2 * m <= kSeriesTerms; ++m) {
        b *= (0.5 - (m - 1)) / m;
        c[2 * m] = b / std::pow(4.0, m);
    }
    return c;
}

std::vector<double> reciprocal_series(const std::vector<double>& c) {
    std::vector<double> d(c.size(), 0.0);
    d[0] = 1.0 / c[0];
    for (std::size_t n = 1; n < c.size(); ++n) {
        double s = 0.0;
        for (std::size_t k = 1; k <= n; ++k) s += c[k] * d[n - k];
        d[n] = -s / c[0];
    }
    return d;
}

double truncation_radius(double a, int n) { return a * std::sqrt(std::pow(10.0, 24.0 / (n + 1)) - 1.0); }

// Integral of (1 + x^2/a^2)^{-(n+1)/2} over the real line and its tail beyond |x| > R.
double line_integral(double a, int n) {
    return a * std::sqrt(kPi) * std::tgamma(0.5 * n) / std::tgamma(0.5 * (n + 1));
}
double tail_bound(double a, int n, double R) { return 2.0 * std::pow(a, n + 1) * std::pow(R, -n) / n; }

}  // namespace

void InvisibleProfileParams::validate() const {
    if (!(alpha_x > 0.0) || !(alpha_y > 0.0)) throw ValidationError("alpha_x and alpha_y must be positive");
    if (!(az > 0.0)) throw ValidationError("slab thickness az must be positive");
    check_term(u_eps, "u_eps");
    check_term(v_eps, "v_eps");
    check_term(u_mu, "u_mu");
    check_term(v_mu, "v_mu");
}

cd half_line_transform(int m, double kappa, double a) {
    if (m < 2) throw ValidationError("half_line_transform: order must be >= 2");
    if (!(kappa > 0.0)) return 0.0;
    const double t = a * kappa;
    const double logmag = std::log(2.0 * kPi * a) + (m - 1) * std::log(t) - t - std::lgamma(double(m));
    return std::exp(logmag) * ipow_minus_i(m);
}

cd SeedEta::shape(double x, double y) const {
    return 1.0 / (std::pow(cd(x / ax, 1.0), nx + 1) * std::pow(cd(y / ay, 1.0), ny + 1));
}

cd SeedEta::value(double x, double y) const {
    if (is_zero()) return 0.0;
    const cd g = shape(x, y);
    return std::polar(1.0, 2.0 * alpha_x * x) * zu * g + std::polar(1.0, 2.0 * alpha_y * y) * zv * g;
}

cd SeedEta::power_transform(int n, double Kx, double Ky) const {
    cd sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const int l = n - j;
        const double kx = Kx - 2.0 * alpha_x * j, ky = Ky - 2.0 * alpha_y * l;
        if (!(kx > 0.0) || !(ky > 0.0)) continue;
        const cd coef = boost::math::binomial_coefficient<double>(n, j) * (j ? std::pow(zu, j) : cd(1.0)) *
                        (l ? std::pow(zv, l) : cd(1.0));
        if (coef == 0.0) continue;
        sum += coef * half_line_transform((nx + 1) * n, kx, ax) * half_line_transform((ny + 1) * n, ky, ay);
    }
    return sum;
}

InvisibleProfile::InvisibleProfile(SeedEta e, SeedEta m, SeriesMap map)
    : eps_(e), mu_(m), map_(map), c_(forward_series(map)), d_(reciprocal_series(c_)) {
    const double radius = (map == SeriesMap::Plain) ? 1.0 : 2.0;
    for (const SeedEta* s : {&eps_, &mu_})
        if (!(s->sup_bound() < radius))
            throw ValidationError("invisible profile: |z_u| + |z_v| must stay below " + std::to_string(radius) +
                                  " so that Re eps, Re mu stay positive and the inverse series converges");
}

cd InvisibleProfile::apply(const SeedEta& s, double x, double y) const {
    const cd eta = s.value(x, y);
    switch (map_) {
        case SeriesMap::Plain: return 1.0 + eta;
        case SeriesMap::PairPlus: return 0.5 * (eta + std::sqrt(eta * eta + 4.0));
        case SeriesMap::PairMinus: return 0.5 * (-eta + std::sqrt(eta * eta + 4.0));
    }
    return 1.0;
}

cd InvisibleProfile::eps(double x, double y) const { return apply(eps_, x, y); }
cd InvisibleProfile::mu(double x, double y) const { return apply(mu_, x, y); }

std::optional<Box> InvisibleProfile::box() const {
    double rx = 1.0, ry = 1.0;
    for (const SeedEta* s : {&eps_, &mu_}) {
        if (s->is_zero()) continue;
        rx = std::max(rx, truncation_radius(s->ax, s->nx));
        ry = std::max(ry, truncation_radius(s->ay, s->ny));
    }
    return Box{-rx, rx, -ry, ry};
}

double InvisibleProfile::truncation_leakage() const {
    const Box b = *box();
    double leak = 0.0;
    for (const SeedEta* s : {&eps_, &mu_}) {
        if (s->is_zero()) continue;
        const double ix = line_integral(s->ax, s->nx), iy = line_integral(s->ay, s->ny);
        const double tx = tail_bound(s->ax, s->nx, b.x1), ty = tail_bound(s->ay, s->ny, b.y1);
        leak += s->sup_bound() * (tx * iy + ix * ty);
    }
    return leak;
}

cd InvisibleProfile::analytic_transform(EtaKind which, double Kx, double Ky) const {
    const bool eps_kind = (which == EtaKind::Eps || which == EtaKind::InvEps);
    const SeedEta& s = eps_kind ? eps_ : mu_;
    if (s.is_zero()) return 0.0;
    const std::vector<double>& coef = (which == EtaKind::Eps || which == EtaKind::Mu) ? c_ : d_;
    if (!(Kx > 0.0) || !(Ky > 0.0)) return 0.0;
    const int nmax = static_cast<int>(std::floor(Kx / (2.0 * s.alpha_x))) +
                     static_cast<int>(std::floor(Ky / (2.0 * s.alpha_y)));
    if (nmax > kSeriesTerms) throw ComputationError("invisible profile: transform needs more series terms");
    cd sum = 0.0;
    for (int n = 1; n <= nmax; ++n)
        if (coef[n] != 0.0) sum += coef[n] * s.power_transform(n, Kx, Ky);
    return sum;
}

std::shared_ptr<const InvisibleProfile> make_invisible_profile(const InvisibleProfileParams& p) {
    p.validate();
    return std::make_shared<const InvisibleProfile>(seed_of(p, p.u_eps, p.v_eps), seed_of(p, p.u_mu, p.v_mu),
                                                    SeriesMap::Plain);
}

Medium build_invisible_medium(const InvisibleProfileParams& p, int quad_points) {
    Medium m;
    m.quad_points = quad_points;
    m.layers.push_back({0.0, p.az, make_invisible_profile(p)});
    m.validate();
    return m;
}

namespace {

std::vector<std::pair<double, double>> disk_samples(double radius, int rings, int angles, bool closed) {
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (int s = 1; s <= rings; ++s) {
        double r = radius * s / rings;
        if (!closed && s == rings) r *= 1.0 - 1e-9;
        for (int a = 0; a < angles; ++a) {
            const double t = 2.0 * kPi * (a + 0.5 * (s % 2)) / angles;
            pts.push_back({r * std::cos(t), r * std::sin(t)});
        }
    }
    return pts;
}

const EtaKind kAllKinds[4] = {EtaKind::Eps, EtaKind::Mu, EtaKind::InvEps, EtaKind::InvMu};

}  // namespace

ConditionReport check_transform_gap(const Profile& prof, double alpha, double tol, int qp) {
    ConditionReport r;
    r.tolerance = tol;
    if (prof.laterally_uniform()) {
        const bool vac = prof.eta(EtaKind::Eps, 0, 0) == 0.0 && prof.eta(EtaKind::Mu, 0, 0) == 0.0;
        r.passed = vac;
        r.detail = vac ? "uniform vacuum layer" : "uniform layer: transform is a delta at K = 0";
        if (!vac) r.max_abs = std::numeric_limits<double>::infinity();
        return r;
    }
    for (auto [kx, ky] : disk_samples(2.0 * alpha, 12, 24, false))
        for (EtaKind kd : kAllKinds) r.max_abs = std::max(r.max_abs, std::abs(fourier_eta(prof, kd, kx, ky, qp)));
    for (auto [kx, ky] : disk_samples(6.0 * alpha, 18, 24, true))
        for (EtaKind kd : kAllKinds) r.reference = std::max(r.reference, std::abs(fourier_eta(prof, kd, kx, ky, qp)));
    r.passed = r.max_abs <= tol * r.reference;
    std::ostringstream os;
    os << "max |eta~| for |K| < 2 alpha: " << r.max_abs << ", reference peak: " << r.reference;
    r.detail = os.str();
    return r;
}

ConditionReport check_transform_gap(const Medium& m, double alpha, double tol) {
    ConditionReport r;
    r.tolerance = tol;
    r.passed = true;
    for (const Layer& l : m.layers) {
        const ConditionReport c = check_transform_gap(*l.profile, alpha, tol, m.quad_points);
        r.max_abs = std::max(r.max_abs, c.max_abs);
        r.reference = std::max(r.reference, c.reference);
        r.passed = r.passed && c.passed;
        r.detail += c.detail + "; ";
    }
    for (const PointImpulse& p : m.points) {
        if (p.coupling == 0.0) continue;
        r.max_abs = std::max(r.max_abs, std::abs(p.coupling));
        r.passed = false;
        r.detail += "point scatterer has a flat transform; ";
    }
    return r;
}

SupportReport check_profile_support(const InvisibleProfile& prof, double tol, int max_power) {
    SupportReport rep;
    for (const SeedEta* s : {&prof.eps_seed(), &prof.mu_seed()}) {
        if (s->is_zero()) continue;
        for (int n = 1; n <= max_power; ++n)
            for (int j = 0; j <= n; ++j) {
                const int l = n - j;
                // Terms with j >= 1 carry e^{2i alpha_x j x}: check x. Pure v-terms: check y.
                const bool use_x = j >= 1;
                const double alpha = use_x ? s->alpha_x : s->alpha_y;
                const double shift = 2.0 * alpha * (use_x ? j : l);
                const double a = use_x ? s->ax : s->ay;
                const int m = ((use_x ? s->nx : s->ny) + 1) * n;
                auto h = [a, m](double x) { return std::pow(cd(x / a, 1.0), -m); };
                const double kpeak = (m - 1) / a;
                const cd closed = half_line_transform(m, kpeak, a);
                const cd numeric = fourier_line(h, kpeak);
                const double peak = std::abs(closed);
                rep.max_closed_form_error = std::max(rep.max_closed_form_error, std::abs(numeric - closed) / peak);
                for (double frac : {-1.0, 0.0, 0.5, 0.95}) {
                    // kappa < 2 alpha; transform of e^{i shift x} h at kappa is h~(kappa - shift).
                    const double kappa = 2.0 * alpha * frac;
                    rep.max_violation = std::max(rep.max_violation, std::abs(fourier_line(h, kappa - shift)) / peak);
                }
                ++rep.terms_checked;
            }
    }
    rep.passed = rep.max_violation <= tol && rep.max_closed_form_error <= tol;
    return rep;
}

IncidentWave default_probe_wave(double k) {
    IncidentWave w;
    w.ctx = WaveContext(k);
    const double t = 0.7, p = 0.3;
    w.khat = Eigen::Vector3d(-std::sin(t) * std::cos(p), -std::sin(t) * std::sin(p), std::cos(t));
    const Eigen::Vector3d y(0, 1, 0);
    w.ehat = (y - y.dot(w.khat) * w.khat).normalized();
    w.side = Side::Left;
    return w;
}

double pipeline_noise_floor(GridPtr grid, const IncidentWave& wave, const PropagationOptions& opts) {
    const TransferMatrix vac = transfer_matrix(Medium{}, grid, opts);
    const ScatterResult r = solve(vac, wave);
    const double w = grid->weight(r.incident_node);
    const double scale = kFourPiSq * r.upsilon.norm() / std::sqrt(w);
    return std::max(r.T_minus.norm(), r.T_plus.norm()) +
           4.0 * grid->size() * std::numeric_limits<double>::epsilon() * scale;
}

InvisibilityReport verify_invisibility(const Medium& m, double alpha, const std::vector<double>& k_list, int n_r,
                                       int n_theta, const PropagationOptions& opts, const IncidentWave& probe) {
    InvisibilityReport rep;
    rep.alpha = alpha;
    for (double k : k_list) {
        GridPtr g = make_grid(k, n_r, n_theta);
        IncidentWave w = probe;
        w.ctx = WaveContext(k);
        const TransferMatrix tm = transfer_matrix(m, g, opts);
        const ScatterResult r = solve(tm, w);
        KReport row;
        row.k = k;
        row.norm_minus = r.T_minus.norm();
        row.norm_plus = r.T_plus.norm();
        row.floor = pipeline_noise_floor(g, w, opts);
        row.ratio = std::max(row.norm_minus, row.norm_plus) / row.floor;
        row.snap_distance = r.snap_distance;
        rep.rows.push_back(row);
    }
    return rep;
}

InvisibilityReport verify_invisibility(const Medium& m, double alpha, const std::vector<double>& k_list, int n_r,
                                       int n_theta, const PropagationOptions& opts) {
    return verify_invisibility(m, alpha, k_list, n_r, n_theta, opts, default_probe_wave(1.0));
}

void check_branch_continuity(const SeedEta& s, double half_width, int lattice) {
    cd prev = 0.0;
    bool first = true;
    for (int a = 0; a <= lattice; ++a)
        for (int b0 = 0; b0 <= lattice; ++b0) {
            const int b = (a % 2) ? lattice - b0 : b0;  // serpentine walk
            const double x = -half_width + 2.0 * half_width * a / lattice;
            const double y = -half_width + 2.0 * half_width * b / lattice;
            const cd eta = s.value(x, y);
            const cd root = std::sqrt(eta * eta + 4.0);
            if (!first && std::abs(root - prev) > std::abs(-root - prev)) {
                std::ostringstream os;
                os << "square-root branch jump at (x, y) = (" << x << ", " << y << ")";
                throw ComputationError(os.str());
            }
            const cd e1 = 0.5 * (eta + root), e2 = 0.5 * (-eta + root);
            if (!(e1.real() > 0.0) || !(e2.real() > 0.0)) {
                std::ostringstream os;
                os << "pair loses Re > 0 at (x, y) = (" << x << ", " << y << ")";
                throw ValidationError(os.str());
            }
            prev = root;
            first = false;
        }
}

namespace {

bool same_seed(const SeedEta& a, const SeedEta& b) {
    return a.alpha_x == b.alpha_x && a.alpha_y == b.alpha_y && a.zu == b.zu && a.zv == b.zv && a.ax == b.ax &&
           a.ay == b.ay && a.nx == b.nx && a.ny == b.ny;
}

}  // namespace

EquivalencePair build_equivalent_pair(const InvisibleProfileParams& p3, const InvisibleProfileParams& p4,
                                      int quad_points) {
    p3.validate();
    p4.validate();
    const SeedEta e3 = seed_of(p3, p3.u_eps, p3.v_eps), e4 = seed_of(p4, p4.u_eps, p4.v_eps);
    const SeedEta m3 = seed_of(p3, p3.u_mu, p3.v_mu), m4 = seed_of(p4, p4.u_mu, p4.v_mu);
    if (!same_seed(e3, e4) || !same_seed(m3, m4) || p3.az != p4.az)
        throw ValidationError("equivalent pair: seeds M3 and M4 must coincide so that the pair tends to vacuum");
    for (const SeedEta* s : {&e3, &m3}) {
        const double hw = 8.0 * std::max(s->ax, s->ay);
        check_branch_continuity(*s, hw, 160);
    }
    EquivalencePair pr;
    pr.alpha = p3.alpha();
    pr.eps_seed = e3;
    pr.mu_seed = m3;
    pr.p1 = std::make_shared<const InvisibleProfile>(e3, m3, SeriesMap::PairPlus);
    pr.p2 = std::make_shared<const InvisibleProfile>(e3, m3, SeriesMap::PairMinus);
    pr.m1.quad_points = pr.m2.quad_points = quad_points;
    pr.m1.layers.push_back({0.0, p3.az, pr.p1});
    pr.m2.layers.push_back({0.0, p3.az, pr.p2});
    return pr;
}

ConditionReport check_pair_transform_match(const Profile& a, const Profile& b, double alpha, double tol, int qp) {
    ConditionReport r;
    r.tolerance = tol;
    for (auto [kx, ky] : disk_samples(2.0 * alpha, 12, 24, true))
        for (EtaKind kd : kAllKinds)
            r.max_abs = std::max(r.max_abs, std::abs(fourier_eta(a, kd, kx, ky, qp) - fourier_eta(b, kd, kx, ky, qp)));
    for (auto [kx, ky] : disk_samples(6.0 * alpha, 18, 24, true))
        for (EtaKind kd : kAllKinds)
            r.reference = std::max(
                {r.reference, std::abs(fourier_eta(a, kd, kx, ky, qp)), std::abs(fourier_eta(b, kd, kx, ky, qp))});
    r.passed = r.max_abs <= tol * r.reference || r.max_abs == 0.0;
    std::ostringstream os;
    os << "max |eta~_1 - eta~_2| for |K| <= 2 alpha: " << r.max_abs << ", reference peak: " << r.reference;
    r.detail = os.str();
    return r;
}

EquivalenceReport verify_alpha_equivalence(const EquivalencePair& pair, const std::vector<double>& k_list, int n_r,
                                           int n_theta, const PropagationOptions& opts, int n_angles) {
    EquivalenceReport rep;
    rep.alpha = pair.alpha;
    for (double k : k_list) {
        GridPtr g = make_grid(k, n_r, n_theta);
        const IncidentWave w = default_probe_wave(k);
        const ScatterResult r1 = solve(transfer_matrix(pair.m1, g, opts), w);
        const ScatterResult r2 = solve(transfer_matrix(pair.m2, g, opts), w);
        EquivalenceRow row;
        row.k = k;
        for (int a = 0; a < n_angles; ++a)
            for (int b = 0; b < n_angles; ++b) {
                const double th = kPi * (a + 0.5) / n_angles, ph = 2.0 * kPi * b / n_angles;
                const Eigen::Vector3cd f1 = scattering_amplitude(r1, th, ph).f_es;
                const Eigen::Vector3cd f2 = scattering_amplitude(r2, th, ph).f_es;
                row.max_diff = std::max(row.max_diff, (f1 - f2).norm());
                row.max_scale = std::max(row.max_scale, f1.norm());
            }
        rep.rows.push_back(row);
    }
    return rep;
}

SeriesSuiteReport::Family inverse_series_family(const std::string& name, const std::vector<cd>& f) {
    SeriesSuiteReport::Family fam;
    fam.name = name;
    fam.m = std::numeric_limits<double>::infinity();
    for (const cd& v : f) {
        fam.m = std::min(fam.m, v.real());
        fam.M = std::max(fam.M, std::abs(v));
    }
    if (!(fam.m > 0.0)) throw ValidationError("inverse series family '" + name + "': Re f needs a positive lower bound");
    fam.Q = (fam.M * fam.M + 1.0) / (2.0 * fam.m);
    std::vector<cd> beta(f.size()), partial(f.size(), 0.0), power(f.size(), 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        beta[i] = (f[i] - 1.0 - fam.Q) / (1.0 + fam.Q);
        fam.sup_beta = std::max(fam.sup_beta, std::abs(beta[i]));
    }
    double prev = -1.0;
    for (int n = 0; n < 5000; ++n) {
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            partial[i] += power[i] / (1.0 + fam.Q);
            power[i] *= -beta[i];
            err = std::max(err, std::abs(partial[i] - 1.0 / f[i]));
        }
        fam.terms = n + 1;
        // Ratios are only meaningful above the rounding level.
        if (prev > 1e-12 && err > 1e-12) fam.max_ratio = std::max(fam.max_ratio, err / prev);
        prev = err;
        fam.final_error = err;
        if (err < 1e-13) break;
    }
    fam.passed = fam.sup_beta < 1.0 && fam.max_ratio <= fam.sup_beta + 1e-3 && fam.final_error < 1e-13;
    return fam;
}

SeriesSuiteReport inverse_series_suite() {
    SeriesSuiteReport rep;
    // Products of functions with transforms supported on K >= 2 alpha.
    const double alpha = 1.0;
    struct W {
        double a;
        int n;
    };
    const W w1{1.0, 1}, w2{1.5, 2};
    for (int axis = 0; axis < 2; ++axis) {
        (void)axis;
        auto h = [&](double x) {
            return std::pow(cd(x / w1.a, 1.0), -(w1.n + 1)) * std::pow(cd(x / w2.a, 1.0), -(w2.n + 1));
        };
        const double shift = 4.0 * alpha;  // e^{2i alpha x} squared
        double peak = 0.0;
        for (double d : {0.5, 1.0, 2.0, 3.0}) peak = std::max(peak, std::abs(fourier_line(h, d)));
        for (double frac : {-1.0, 0.0, 0.5, 0.95}) {
            const double kappa = 2.0 * alpha * frac;
            rep.product_support_violation =
                std::max(rep.product_support_violation, std::abs(fourier_line(h, kappa - shift)) / peak);
        }
    }
    rep.product_support_passed = rep.product_support_violation <= 1e-7;

    // Inverse-series families.
    std::vector<cd> lattice_invisible, lattice_gauss, lattice_complex;
    SeedEta s;
    s.zu = 0.3;
    s.zv = cd(0.2, 0.1);
    for (int a = 0; a <= 40; ++a)
        for (int b = 0; b <= 40; ++b) {
            const double x = -4.0 + 8.0 * a / 40, y = -4.0 + 8.0 * b / 40;
            lattice_invisible.push_back(1.0 + s.value(x, y));
            lattice_gauss.push_back(1.0 + 1.5 * std::exp(-(x * x + y * y)));
            lattice_complex.push_back(2.0 + cd(0.5, 0.8) * std::exp(-(x * x + y * y) / 2.0));
        }
    rep.families.push_back(inverse_series_family("constant 2", {cd(2.0)}));
    rep.families.push_back(inverse_series_family("vacuum", {cd(1.0)}));
    rep.families.push_back(inverse_series_family("invisible eps", lattice_invisible));
    rep.families.push_back(inverse_series_family("gaussian bump", lattice_gauss));
    rep.families.push_back(inverse_series_family("complex gaussian", lattice_complex));
    rep.passed = rep.product_support_passed;
    for (const auto& f : rep.families) rep.passed = rep.passed && f.passed;
    return rep;
}

}  // namespace emtm
