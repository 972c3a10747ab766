#include "emtm/analytic_models.hpp"

#include "emtm/errors.hpp"

#include <cmath>

namespace emtm {

PointScatterer::PointScatterer(cd z, const WaveContext& c) : coupling(z), ctx(c) {}

cd PointScatterer::denominator() const {
    const double k3 = ctx.k * ctx.k * ctx.k;
    return 1.0 - cd(0.0, 1.0) * coupling * k3 / (6.0 * kPi);
}

namespace {

void check_pole(cd den) {
    if (std::abs(den) < 1e-14) throw SpectralSingularity("point scatterer at its spectral singularity");
}

}  // namespace

cd point_t(double k, cd z) {
    if (z == 0.0) return 0.0;
    const cd den = 1.0 / z - cd(0.0, k * k * k / (6.0 * kPi));
    check_pole(den * z);
    return -k * k / den;
}

cd renormalized_coupling(cd bare, double lambda_L, double lambda_T, double k) {
    const cd den = 1.0 + (lambda_L * lambda_L * lambda_L - k * k * lambda_T) * bare / (6.0 * kPi);
    if (std::abs(den) < 1e-14) throw SpectralSingularity("renormalized coupling diverges");
    return bare / den;
}

Medium point_medium(cd coupling) {
    Medium m;
    m.points.push_back({0.0, coupling});
    return m;
}

Mat2 sigma2() {
    Mat2 s;
    s << 0.0, cd(0.0, -1.0), cd(0.0, 1.0), 0.0;
    return s;
}

Mat4 point_K() {
    Mat4 K = Mat4::Zero();
    K.bottomLeftCorner<2, 2>() = sigma2();
    return K;
}

TransferMatrix point_transfer_operator(const PointScatterer& ps, GridPtr grid) {
    OperatorF4 op = OperatorF4::identity(grid);
    const Mat4 blk = ps.ctx.k * ps.coupling / kFourPiSq * point_K();
    const int n = grid->size();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) op.kernel.block<4, 4>(4 * i, 4 * j) += blk;
    return {op, {}};
}

Vec2 point_X_minus(const PointScatterer& ps, const Vec4& u) {
    const cd den = ps.denominator();
    check_pole(den);
    return sigma2() * u.head<2>() / den;
}

Vec4 point_T_minus(const TransverseVector& p, const PointScatterer& ps, const Vec4& u) {
    const cd den = ps.denominator();
    check_pole(den);
    return -ps.coupling * ps.ctx.k * projector(2, p, ps.ctx) * point_K() * u / den;
}

Vec4 point_T_plus(const TransverseVector& p, const PointScatterer& ps, const Vec4& u) {
    const cd den = ps.denominator();
    check_pole(den);
    return ps.coupling * ps.ctx.k * projector(1, p, ps.ctx) * point_K() * u / den;
}

Mat2 disk_integral_sigma2_L0(const MomentumGrid& g) {
    Mat2 s = Mat2::Zero();
    for (int j = 0; j < g.size(); ++j) s += (g.weight(j) / g.varpi(j)) * sigma2() * free_L0(g.node(j), g.context());
    return s / kFourPiSq;
}

double point_fixed_point_residual(const PointScatterer& ps, const Vec4& u, const MomentumGrid& g) {
    const Vec2 X = point_X_minus(ps, u);
    const Vec2 rhs = -(ps.ctx.k * ps.coupling / 2.0) * (disk_integral_sigma2_L0(g) * X) + sigma2() * u.head<2>();
    return (X - rhs).norm();
}

PointAmplitude point_amplitude(const PointScatterer& ps, const IncidentWave& wave, double theta, double phi) {
    wave.validate();
    const Eigen::Vector3d r = scattering_direction(theta, phi);
    const Eigen::Vector3d e(wave.ehat.x(), wave.ehat.y(), 0.0);
    const cd t = point_t(ps.ctx.k, ps.coupling);
    PointAmplitude a;
    a.f_es = (t / (4.0 * kPi)) * r.cross(r.cross(e)).cast<cd>();
    const double re = r.dot(e);
    a.sigma_d = std::norm(t) * (e.squaredNorm() - re * re) / (16.0 * kPi * kPi);
    return a;
}

Eigen::Matrix2d J_matrix(const TransverseVector& p, const WaveContext& ctx) {
    varpi(p, ctx);
    const double k2 = ctx.k * ctx.k;
    Eigen::Matrix2d J;
    J << k2 - p.px * p.px, -p.px * p.py, -p.px * p.py, k2 - p.py * p.py;
    return J / k2;
}

FresnelCoefficients fresnel_slab(const FresnelSlab& s) {
    if (!(s.d > 0.0)) throw ValidationError("fresnel slab thickness must be positive");
    if (!(s.n.real() > 0.0)) throw ValidationError("fresnel slab index needs positive real part");
    const cd I(0.0, 1.0);
    const cd r12 = (1.0 - s.n) / (1.0 + s.n);
    const cd ph = std::exp(2.0 * I * s.n * s.ctx.k * s.d);
    const cd den = 1.0 - r12 * r12 * ph;
    return {r12 * (1.0 - ph) / den, (1.0 - r12 * r12) * std::exp(I * s.n * s.ctx.k * s.d) / den};
}

}  // namespace emtm
