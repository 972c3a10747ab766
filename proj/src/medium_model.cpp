#include "emtm/medium_model.hpp"

#include "emtm/errors.hpp"
#include "emtm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emtm {

namespace {

constexpr double kSingular = 1e-12;

int kind_index(EtaKind k) { return static_cast<int>(k); }

}  // namespace

cd Profile::analytic_transform(EtaKind, double, double) const {
    throw ValidationError(type_name() + ": no analytic transform");
}

std::array<cd, 2> Profile::grad_inverse(bool inverse_eps, double x, double y) const {
    const double h = 1e-5;
    auto inv = [&](double xx, double yy) { return 1.0 / (inverse_eps ? eps(xx, yy) : mu(xx, yy)); };
    return {(inv(x + h, y) - inv(x - h, y)) / (2.0 * h), (inv(x, y + h) - inv(x, y - h)) / (2.0 * h)};
}

cd Profile::value(EtaKind which, double x, double y) const {
    switch (which) {
        case EtaKind::Eps: return eps(x, y);
        case EtaKind::Mu: return mu(x, y);
        case EtaKind::InvEps:
        case EtaKind::InvMu: {
            const cd f = (which == EtaKind::InvEps) ? eps(x, y) : mu(x, y);
            if (std::abs(f) < kSingular) throw ValidationError("singular medium: eps or mu vanishes");
            return 1.0 / f;
        }
    }
    return 1.0;
}

cd Profile::eta(EtaKind which, double x, double y) const {
    if (which == EtaKind::Eps) return eps(x, y) - 1.0;
    if (which == EtaKind::Mu) return mu(x, y) - 1.0;
    const cd e = ((which == EtaKind::InvEps) ? eps(x, y) : mu(x, y)) - 1.0;
    if (std::abs(1.0 + e) < kSingular) throw ValidationError("singular medium: eps or mu vanishes");
    return -e / (1.0 + e);
}

ConstantBoxProfile::ConstantBoxProfile(cd eps, cd mu, std::optional<Box> box)
    : eps_(eps), mu_(mu), box_(box) {
    if (std::abs(eps) < kSingular || std::abs(mu) < kSingular)
        throw ValidationError("constant_box: eps and mu must be nonzero");
    if (box_ && !(box_->x1 > box_->x0 && box_->y1 > box_->y0))
        throw ValidationError("constant_box: empty box");
}

bool ConstantBoxProfile::inside(double x, double y) const {
    return !box_ || (x >= box_->x0 && x <= box_->x1 && y >= box_->y0 && y <= box_->y1);
}

cd ConstantBoxProfile::eps(double x, double y) const { return inside(x, y) ? eps_ : 1.0; }
cd ConstantBoxProfile::mu(double x, double y) const { return inside(x, y) ? mu_ : 1.0; }

GaussianProfile::GaussianProfile(cd eps_amp, cd mu_amp, double sigma, double cx, double cy)
    : ea_(eps_amp), ma_(mu_amp), s_(sigma), cx_(cx), cy_(cy) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian: sigma must be positive");
    if (std::abs(1.0 + ea_) < kSingular || std::abs(1.0 + ma_) < kSingular)
        throw ValidationError("gaussian: singular peak value");
}

double GaussianProfile::bump(double x, double y) const {
    const double dx = x - cx_, dy = y - cy_;
    if (std::abs(dx) > 8.0 * s_ || std::abs(dy) > 8.0 * s_) return 0.0;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * s_ * s_));
}

cd GaussianProfile::eps(double x, double y) const { return 1.0 + ea_ * bump(x, y); }
cd GaussianProfile::mu(double x, double y) const { return 1.0 + ma_ * bump(x, y); }

std::optional<Box> GaussianProfile::box() const {
    return Box{cx_ - 8.0 * s_, cx_ + 8.0 * s_, cy_ - 8.0 * s_, cy_ + 8.0 * s_};
}

std::array<cd, 2> GaussianProfile::grad_inverse(bool inverse_eps, double x, double y) const {
    const cd a = inverse_eps ? ea_ : ma_;
    const double b = bump(x, y);
    const cd f = 1.0 + a * b;
    const double s2 = s_ * s_;
    // d(1/f) = -f' / f^2 with f' = a b (-(x - c) / s^2)
    const cd c = -a * b / (f * f);
    return {c * (-(x - cx_) / s2), c * (-(y - cy_) / s2)};
}

TableProfile::TableProfile(std::vector<double> xs, std::vector<double> ys, std::vector<cd> v)
    : xs_(std::move(xs)), ys_(std::move(ys)), v_(std::move(v)) {
    if (xs_.size() < 2 || ys_.size() < 2) throw ValidationError("custom_table: need at least 2x2 samples");
    if (v_.size() != xs_.size() * ys_.size()) throw ValidationError("custom_table: value count mismatch");
    if (!std::is_sorted(xs_.begin(), xs_.end()) || !std::is_sorted(ys_.begin(), ys_.end()))
        throw ValidationError("custom_table: coordinates must be increasing");
    for (const cd& e : v_)
        if (std::abs(e) < kSingular) throw ValidationError("custom_table: singular eps value");
}

cd TableProfile::eps(double x, double y) const {
    if (x < xs_.front() || x > xs_.back() || y < ys_.front() || y > ys_.back()) return 1.0;
    auto locate = [](const std::vector<double>& a, double t) {
        std::size_t i = std::upper_bound(a.begin(), a.end(), t) - a.begin();
        i = std::clamp<std::size_t>(i, 1, a.size() - 1) - 1;
        return i;
    };
    const std::size_t i = locate(xs_, x), j = locate(ys_, y);
    const double tx = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    const double ty = (y - ys_[j]) / (ys_[j + 1] - ys_[j]);
    const std::size_t nx = xs_.size();
    auto at = [&](std::size_t a, std::size_t b) { return v_[b * nx + a]; };
    return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
           tx * ty * at(i + 1, j + 1);
}

std::optional<Box> TableProfile::box() const {
    return Box{xs_.front(), xs_.back(), ys_.front(), ys_.back()};
}

FunctionProfile::FunctionProfile(Fn eps, Fn mu, Box box)
    : eps_(std::move(eps)), mu_(std::move(mu)), box_(box) {}

cd FunctionProfile::eps(double x, double y) const {
    if (x < box_.x0 || x > box_.x1 || y < box_.y0 || y > box_.y1) return 1.0;
    return eps_(x, y);
}

cd FunctionProfile::mu(double x, double y) const {
    if (x < box_.x0 || x > box_.x1 || y < box_.y0 || y > box_.y1) return 1.0;
    return mu_(x, y);
}

void Medium::validate() const {
    if (quad_points < 2) throw ValidationError("medium: quad_points must be >= 2");
    std::vector<Layer> sorted = layers;
    std::sort(sorted.begin(), sorted.end(), [](const Layer& a, const Layer& b) { return a.z0 < b.z0; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const Layer& l = sorted[i];
        if (!l.profile) throw ValidationError("medium: layer without profile");
        if (!(l.z1 > l.z0) || !std::isfinite(l.z0) || !std::isfinite(l.z1))
            throw ValidationError("medium: layer needs finite z0 < z1");
        if (i > 0 && l.z0 < sorted[i - 1].z1) throw ValidationError("medium: overlapping layers");
        const Profile& p = *l.profile;
        if (!p.laterally_uniform() && !p.has_analytic_transform() && !p.box())
            throw ValidationError("medium: unbounded transverse support");
        // Reject vanishing eps or mu on a sampling lattice.
        std::optional<Box> b = p.box();
        const Box s = b ? *b : Box{-1.0, 1.0, -1.0, 1.0};
        for (int a = 0; a <= 16; ++a)
            for (int c = 0; c <= 16; ++c) {
                const double x = s.x0 + (s.x1 - s.x0) * a / 16.0, y = s.y0 + (s.y1 - s.y0) * c / 16.0;
                p.eta(EtaKind::InvEps, x, y);
                p.eta(EtaKind::InvMu, x, y);
            }
    }
    for (const PointImpulse& pt : points) {
        if (!std::isfinite(pt.z0)) throw ValidationError("medium: point scatterer needs finite z0");
        for (const Layer& l : layers)
            if (pt.z0 > l.z0 && pt.z0 < l.z1)
                throw ValidationError("medium: point scatterer inside a layer is not supported");
    }
}

bool Medium::is_vacuum() const {
    if (!points.empty()) {
        for (const PointImpulse& p : points)
            if (p.coupling != 0.0) return false;
    }
    for (const Layer& l : layers) {
        const Profile& p = *l.profile;
        if (p.laterally_uniform()) {
            if (p.eps(0, 0) != 1.0 || p.mu(0, 0) != 1.0) return false;
            continue;
        }
        return false;
    }
    return true;
}

double Medium::z_min() const {
    double z = std::numeric_limits<double>::infinity();
    for (const Layer& l : layers) z = std::min(z, l.z0);
    for (const PointImpulse& p : points) z = std::min(z, p.z0);
    return z;
}

double Medium::z_max() const {
    double z = -std::numeric_limits<double>::infinity();
    for (const Layer& l : layers) z = std::max(z, l.z1);
    for (const PointImpulse& p : points) z = std::max(z, p.z0);
    return z;
}

const Layer* Medium::layer_at(double z) const {
    for (const Layer& l : layers)
        if (z >= l.z0 && z < l.z1) return &l;
    return nullptr;
}

cd Medium::value(EtaKind which, double x, double y, double z) const {
    const Layer* l = layer_at(z);
    return l ? l->profile->value(which, x, y) : cd(1.0);
}

cd Medium::eta(EtaKind which, double x, double y, double z) const {
    const Layer* l = layer_at(z);
    return l ? l->profile->eta(which, x, y) : cd(0.0);
}

cd eta(const Medium& m, EtaKind which, double x, double y, double z) { return m.eta(which, x, y, z); }

cd fourier_eta(const Profile& prof, EtaKind which, double Kx, double Ky, int quad_points) {
    if (prof.has_analytic_transform()) return prof.analytic_transform(which, Kx, Ky);
    if (prof.laterally_uniform())
        throw ValidationError("fourier_eta: uniform layer has a delta transform");
    const std::optional<Box> b = prof.box();
    if (!b) throw ValidationError("fourier_eta: unbounded support");
    const QuadratureRule qx = gauss_legendre(quad_points, b->x0, b->x1);
    const QuadratureRule qy = gauss_legendre(quad_points, b->y0, b->y1);
    cd sum = 0.0;
    for (int a = 0; a < quad_points; ++a) {
        const cd px = std::polar(qx.weights[a], -Kx * qx.nodes[a]);
        cd row = 0.0;
        for (int c = 0; c < quad_points; ++c)
            row += std::polar(qy.weights[c], -Ky * qy.nodes[c]) * prof.eta(which, qx.nodes[a], qy.nodes[c]);
        sum += px * row;
    }
    return sum;
}

cd fourier_eta(const Medium& m, EtaKind which, double Kx, double Ky, double z) {
    const Layer* l = m.layer_at(z);
    if (!l) return 0.0;
    return fourier_eta(*l->profile, which, Kx, Ky, m.quad_points);
}

Mat2 symbol_S(const Profile& prof, int sign, double x, double y, const TransverseVector& q,
              const WaveContext& ctx) {
    const bool plus = sign > 0;
    const cd f = prof.value(plus ? EtaKind::InvEps : EtaKind::InvMu, x, y);
    const cd g = prof.value(plus ? EtaKind::Mu : EtaKind::Eps, x, y);
    const std::array<cd, 2> d = prof.grad_inverse(plus, x, y);
    const double k = ctx.k, k2 = k * k, qx = q.px, qy = q.py;
    const cd I(0.0, 1.0);
    Mat2 S;
    S(0, 0) = qy * (-f * qx + I * d[0]);
    S(0, 1) = f * qx * qx - I * qx * d[0] - k2 * g;
    S(1, 0) = -f * qy * qy + I * qy * d[1] + k2 * g;
    S(1, 1) = qx * (f * qy - I * d[1]);
    return S / k;
}

Mat2 delta_L(const TransverseVector& p, const TransverseVector& q, cd ft, cd gt, double k) {
    const double k2 = k * k;
    Mat2 L;
    L(0, 0) = -p.px * q.py * ft;
    L(0, 1) = p.px * q.px * ft - k2 * gt;
    L(1, 0) = -p.py * q.py * ft + k2 * gt;
    L(1, 1) = p.py * q.px * ft;
    return L / (kFourPiSq * k);
}

Mat2 kernel_h(const Profile& prof, int sign, const TransverseVector& p, const TransverseVector& q,
              const WaveContext& ctx, int quad_points) {
    varpi(p, ctx);
    varpi(q, ctx);
    const double Kx = p.px - q.px, Ky = p.py - q.py;
    const bool plus = sign > 0;
    const cd ft = fourier_eta(prof, plus ? EtaKind::InvEps : EtaKind::InvMu, Kx, Ky, quad_points);
    const cd gt = fourier_eta(prof, plus ? EtaKind::Mu : EtaKind::Eps, Kx, Ky, quad_points);
    const Mat2 L = delta_L(p, q, ft, gt, ctx.k);
    return plus ? L : Mat2(-L);
}

Mat4 kernel_interaction(const Medium& m, double z, const TransverseVector& p, const TransverseVector& q,
                        const WaveContext& ctx) {
    const Layer* l = m.layer_at(z);
    if (!l) {
        varpi(p, ctx);
        varpi(q, ctx);
        return Mat4::Zero();
    }
    Mat4 dH = Mat4::Zero();
    dH.topRightCorner<2, 2>() = kernel_h(*l->profile, +1, p, q, ctx, m.quad_points);
    dH.bottomLeftCorner<2, 2>() = kernel_h(*l->profile, -1, p, q, ctx, m.quad_points);
    return exp_free(z, p, ctx) * dH * exp_free(-z, q, ctx);
}

TransformTable build_transform_table(const Profile& prof, GridPtr grid, int quad_points) {
    const int n = grid->size();
    TransformTable t;
    t.grid = grid;
    const EtaKind kinds[4] = {EtaKind::Eps, EtaKind::Mu, EtaKind::InvEps, EtaKind::InvMu};
    if (prof.laterally_uniform()) {
        for (EtaKind kd : kinds) {
            const cd e = prof.eta(kd, 0.0, 0.0);
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
            for (int i = 0; i < n; ++i) m(i, i) = kFourPiSq * e / grid->weight(i);
            t.eta[kind_index(kd)] = std::move(m);
        }
        return t;
    }
    if (prof.has_analytic_transform()) {
        for (EtaKind kd : kinds) {
            Eigen::MatrixXcd m(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const TransverseVector& a = grid->node(i);
                    const TransverseVector& b = grid->node(j);
                    m(i, j) = prof.analytic_transform(kd, a.px - b.px, a.py - b.py);
                }
            t.eta[kind_index(kd)] = std::move(m);
        }
        return t;
    }
    const std::optional<Box> b = prof.box();
    if (!b) throw ValidationError("transform table: unbounded support");
    const QuadratureRule qx = gauss_legendre(quad_points, b->x0, b->x1);
    const QuadratureRule qy = gauss_legendre(quad_points, b->y0, b->y1);
    const int nq = quad_points * quad_points;
    // E(i, r) = exp(-i p_i . r); table = E diag(w eta) E^H.
    Eigen::MatrixXcd E(n, nq);
    for (int a = 0; a < quad_points; ++a)
        for (int c = 0; c < quad_points; ++c) {
            const int r = a * quad_points + c;
            for (int i = 0; i < n; ++i) {
                const TransverseVector& p = grid->node(i);
                E(i, r) = std::polar(1.0, -(p.px * qx.nodes[a] + p.py * qy.nodes[c]));
            }
        }
    const Eigen::MatrixXcd Eh = E.adjoint();
    for (EtaKind kd : kinds) {
        Eigen::VectorXcd v(nq);
        for (int a = 0; a < quad_points; ++a)
            for (int c = 0; c < quad_points; ++c)
                v(a * quad_points + c) =
                    qx.weights[a] * qy.weights[c] * prof.eta(kd, qx.nodes[a], qy.nodes[c]);
        if (v.isZero(0.0)) {
            t.eta[kind_index(kd)] = Eigen::MatrixXcd::Zero(n, n);
            continue;
        }
        t.eta[kind_index(kd)] = (E * v.asDiagonal()) * Eh;
    }
    return t;
}

Eigen::MatrixXcd delta_H_kernel(const TransformTable& t) {
    const MomentumGrid& g = *t.grid;
    const int n = g.size();
    const double k = g.context().k;
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
    const Eigen::MatrixXcd& f1 = t[EtaKind::InvEps];
    const Eigen::MatrixXcd& g1 = t[EtaKind::Mu];
    const Eigen::MatrixXcd& f2 = t[EtaKind::InvMu];
    const Eigen::MatrixXcd& g2 = t[EtaKind::Eps];
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const cd a = f1(i, j), b = g1(i, j), c = f2(i, j), d = g2(i, j);
            if (a == 0.0 && b == 0.0 && c == 0.0 && d == 0.0) continue;
            K.block<2, 2>(4 * i, 4 * j + 2) = delta_L(g.node(i), g.node(j), a, b, k);
            K.block<2, 2>(4 * i + 2, 4 * j) = -delta_L(g.node(i), g.node(j), c, d, k);
        }
    return K;
}

}  // namespace emtm
