#include "emtm/scattering_solver.hpp"

#include "emtm/errors.hpp"

#include <cmath>

namespace emtm {

void IncidentWave::validate() const {
    if (std::abs(khat.norm() - 1.0) > 1e-12) throw ValidationError("incident khat must be a unit vector");
    if (std::abs(ehat.norm() - 1.0) > 1e-12) throw ValidationError("incident ehat must be a unit vector");
    if (std::abs(ehat.dot(khat)) > 1e-12) throw ValidationError("incident polarization must be transverse to khat");
    if (side == Side::Left && !(khat.z() > 0.0)) throw ValidationError("left incidence needs khat.z > 0");
    if (side == Side::Right && !(khat.z() < 0.0)) throw ValidationError("right incidence needs khat.z < 0");
}

Vec4 incident_upsilon(const IncidentWave& wave) {
    wave.validate();
    const Eigen::Vector3d& k = wave.khat;
    const Eigen::Vector3d& e = wave.ehat;
    const Eigen::Vector3d kxe = k.cross(e);
    return Vec4(e.x(), e.y(), kxe.x(), kxe.y());
}

SnappedWave snap_to_grid(const IncidentWave& wave, const MomentumGrid& grid) {
    wave.validate();
    if (std::abs(wave.ctx.k - grid.context().k) > 1e-14 * grid.context().k)
        throw ValidationError("incident wavenumber differs from the grid wavenumber");
    const TransverseVector p = wave.transverse();
    const int j = grid.nearest_node(p);
    const TransverseVector& q = grid.node(j);
    const double k = grid.context().k;
    const double sgn = wave.khat.z() > 0 ? 1.0 : -1.0;
    SnappedWave s;
    s.node = j;
    s.distance = std::hypot(q.px - p.px, q.py - p.py);
    s.wave = wave;
    s.wave.khat = Eigen::Vector3d(q.px / k, q.py / k, sgn * grid.varpi(j) / k);
    s.wave.khat.normalize();
    Eigen::Vector3d e = wave.ehat - wave.ehat.dot(s.wave.khat) * s.wave.khat;
    if (e.norm() < 1e-8) throw ValidationError("polarization degenerates after snapping");
    s.wave.ehat = e.normalized();
    return s;
}

namespace {

using Dense = Eigen::MatrixXcd;

struct RangeBasis {
    Dense Q;  // 4N x 2N, orthonormal columns spanning range(Pi_2) per node
};

RangeBasis pi2_range_basis(const MomentumGrid& g) {
    const int n = g.size();
    RangeBasis b{Dense::Zero(4 * n, 2 * n)};
    for (int i = 0; i < n; ++i) {
        const Mat4 P = projector(2, g.node(i), g.context());
        Eigen::JacobiSVD<Mat4> svd(P, Eigen::ComputeFullU);
        b.Q.block<4, 2>(4 * i, 2 * i) = svd.matrixU().leftCols<2>();
    }
    return b;
}

Eigen::VectorXcd apply_projector(int j, const MomentumGrid& g, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    for (int i = 0; i < g.size(); ++i) out.segment<4>(4 * i) = projector(j, g.node(i), g.context()) * v.segment<4>(4 * i);
    return out;
}

Dense apply_projector_rows(int j, const MomentumGrid& g, const Dense& A) {
    Dense out(A.rows(), A.cols());
    for (int i = 0; i < g.size(); ++i)
        out.middleRows<4>(4 * i) = projector(j, g.node(i), g.context()) * A.middleRows<4>(4 * i);
    return out;
}

struct M22Solver {
    RangeBasis basis;
    Eigen::PartialPivLU<Dense> lu;
};

M22Solver factor_m22(const MomentumGrid& g, const Dense& A) {
    M22Solver s{pi2_range_basis(g), {}};
    const Dense AQ = A * s.basis.Q;
    const Dense reduced = s.basis.Q.adjoint() * apply_projector_rows(2, g, AQ);
    s.lu.compute(reduced);
    const double rc = s.lu.rcond();
    if (!(rc > 1e-13) || !std::isfinite(rc))
        throw SpectralSingularity("M22 is not invertible on its range (rcond = " + std::to_string(rc) + ")");
    return s;
}

Eigen::VectorXcd solve_m22(const M22Solver& s, const Eigen::VectorXcd& rhs) {
    return s.basis.Q * s.lu.solve(s.basis.Q.adjoint() * rhs);
}

ScatterResult prepare(const TransferMatrix& tm, const IncidentWave& wave, Side side, Eigen::VectorXcd& u) {
    if (wave.side != side) throw ValidationError("incident wave is on the wrong side for this solve");
    const MomentumGrid& g = *tm.grid();
    const SnappedWave s = snap_to_grid(wave, g);
    ScatterResult r;
    r.grid = tm.grid();
    r.side = side;
    r.wave = s.wave;
    r.incident_node = s.node;
    r.snap_distance = s.distance;
    r.upsilon = incident_upsilon(s.wave);
    u = Eigen::VectorXcd::Zero(4 * g.size());
    u.segment<4>(4 * s.node) = r.upsilon / g.weight(s.node);
    return r;
}

}  // namespace

ScatterResult solve_left(const TransferMatrix& tm, const IncidentWave& wave) {
    Eigen::VectorXcd u;
    ScatterResult r = prepare(tm, wave, Side::Left, u);
    const MomentumGrid& g = *r.grid;
    const Dense A = tm.op.action();
    const M22Solver s = factor_m22(g, A);
    const Eigen::VectorXcd P1u = apply_projector(1, g, u);
    const Eigen::VectorXcd rhs = -kFourPiSq * apply_projector(2, g, A * P1u);
    const Eigen::VectorXcd Tm = solve_m22(s, rhs);
    const Eigen::VectorXcd Tp =
        apply_projector(1, g, A * apply_projector(2, g, Tm)) + kFourPiSq * (apply_projector(1, g, A * P1u) - u);
    r.T_minus = FourField(r.grid, Tm);
    r.T_plus = FourField(r.grid, Tp);
    return r;
}

ScatterResult solve_right(const TransferMatrix& tm, const IncidentWave& wave) {
    Eigen::VectorXcd u;
    ScatterResult r = prepare(tm, wave, Side::Right, u);
    const MomentumGrid& g = *r.grid;
    const Dense A = tm.op.action();
    const M22Solver s = factor_m22(g, A);
    const Eigen::VectorXcd P2u = apply_projector(2, g, u);
    const Eigen::VectorXcd M22u = apply_projector(2, g, A * P2u);
    const Eigen::VectorXcd Tm = solve_m22(s, kFourPiSq * (u - M22u));
    const Eigen::VectorXcd Tp = apply_projector(1, g, A * apply_projector(2, g, Eigen::VectorXcd(Tm + kFourPiSq * u)));
    r.T_minus = FourField(r.grid, Tm);
    r.T_plus = FourField(r.grid, Tp);
    return r;
}

ScatterResult solve(const TransferMatrix& tm, const IncidentWave& wave) {
    return wave.side == Side::Left ? solve_left(tm, wave) : solve_right(tm, wave);
}

ScatterResult solve_explicit_inverse(const TransferMatrix& tm, const IncidentWave& wave) {
    Eigen::VectorXcd u;
    ScatterResult r = prepare(tm, wave, wave.side, u);
    const MomentumGrid& g = *r.grid;
    const Dense A = tm.op.action();
    const M22Solver s = factor_m22(g, A);
    // M22^{-1} = Q (Q^H M22 Q)^{-1} Q^H on the Pi_2 range.
    const Dense inv = s.basis.Q * s.lu.inverse() * s.basis.Q.adjoint();
    auto M = [&](int i, int j, const Eigen::VectorXcd& v) {
        return apply_projector(i, g, A * apply_projector(j, g, v));
    };
    if (wave.side == Side::Left) {
        const Eigen::VectorXcd M21u = M(2, 1, u);
        const Eigen::VectorXcd Tm = -kFourPiSq * (inv * M21u);
        const Eigen::VectorXcd Tp = kFourPiSq * (M(1, 1, u) - u - M(1, 2, inv * M21u));
        r.T_minus = FourField(r.grid, Tm);
        r.T_plus = FourField(r.grid, Tp);
    } else {
        const Eigen::VectorXcd Tm = kFourPiSq * (inv * u - u);
        const Eigen::VectorXcd Tp = kFourPiSq * M(1, 2, inv * u);
        r.T_minus = FourField(r.grid, Tm);
        r.T_plus = FourField(r.grid, Tp);
    }
    return r;
}

Eigen::Vector3d scattering_direction(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Vec4 upsilon_s(double theta, double phi, const Eigen::Vector3cd& e) {
    const Eigen::Vector3cd r = scattering_direction(theta, phi).cast<cd>();
    const Eigen::Vector3cd ex(1, 0, 0), ey(0, 1, 0);
    return Vec4(e.x(), e.y(), ex.cross(r).dot(e), ey.cross(r).dot(e));
}

Eigen::Matrix<cd, 3, 4> xi_dagger(double theta, double phi) {
    Eigen::Matrix<cd, 3, 4> X = Eigen::Matrix<cd, 3, 4>::Zero();
    X(0, 0) = 1.0;
    X(1, 1) = 1.0;
    X(2, 2) = std::sin(theta) * std::sin(phi);
    X(2, 3) = -std::sin(theta) * std::cos(phi);
    return X;
}

namespace {

// Barycentric Lagrange interpolation on arbitrary nodes.
std::vector<double> lagrange_weights(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const double lo = x.front(), hi = x.back(), s = 4.0 / (hi - lo + 1e-300);
    std::vector<double> w(n, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t m = 0; m < n; ++m)
            if (m != j) w[j] /= s * (x[j] - x[m]);
    return w;
}

template <class V>
V lagrange_eval(const std::vector<double>& x, const std::vector<double>& w, const std::vector<V>& f, double t) {
    V num = f[0] * 0.0;
    cd den = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = t - x[j];
        if (d == 0.0) return f[j];
        const double c = w[j] / d;
        num += c * f[j];
        den += c;
    }
    return num / den;
}

// Trigonometric interpolation on equispaced angles 2 pi j / n.
template <class V>
V trig_eval(const std::vector<V>& f, double t) {
    const int n = static_cast<int>(f.size());
    V num = f[0] * 0.0;
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = 0.5 * (t - 2.0 * kPi * j / n);
        const double sd = std::sin(d);
        if (std::abs(sd) < 1e-15) return f[j];
        const double c = ((j % 2) ? -1.0 : 1.0) * ((n % 2 == 0) ? std::cos(d) / sd : 1.0 / sd);
        num += c * f[j];
        den += c;
    }
    return num / den;
}

}  // namespace

Vec4 sample_varpi_T(const ScatterResult& r, double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi)) throw ValidationError("theta must lie in [0, pi]");
    const bool forward = std::cos(theta) >= 0.0;
    const FourField& T = forward ? r.T_plus : r.T_minus;
    const MomentumGrid& g = *r.grid;
    const int nr = g.radial_count(), nt = g.angular_count();
    const double radial = forward ? theta : kPi - theta;
    static thread_local std::vector<double> cached_x, cached_w;
    if (cached_x != g.radial_angles()) {
        cached_x = g.radial_angles();
        cached_w = lagrange_weights(cached_x);
    }
    std::vector<Vec4> ring_vals(nr);
    std::vector<Vec4> ring(nt);
    for (int ir = 0; ir < nr; ++ir) {
        for (int it = 0; it < nt; ++it) {
            const int i = ir * nt + it;
            ring[it] = g.varpi(i) * T.at(i);
        }
        ring_vals[ir] = trig_eval(ring, phi);
    }
    const Vec4 raw = lagrange_eval(cached_x, cached_w, ring_vals, radial);
    // Interpolation leaves the plane-wave subspace of the sampling direction; project back onto it.
    const Eigen::Vector3d dir = scattering_direction(theta, phi);
    const Eigen::Vector3d a = (std::abs(dir.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX())
                                  .cross(dir)
                                  .normalized();
    Eigen::Matrix<cd, 4, 2> U;
    U.col(0) = upsilon_s(theta, phi, a.cast<cd>());
    U.col(1) = upsilon_s(theta, phi, dir.cross(a).cast<cd>());
    return U * (U.adjoint() * U).ldlt().solve(U.adjoint() * raw);
}

Amplitude amplitude_from_varpi_T(const Vec4& wT, double theta, double phi) {
    Amplitude a;
    a.f_es = cd(0.0, -1.0 / (2.0 * kPi)) * (xi_dagger(theta, phi) * wT);
    const double nrm = a.f_es.norm();
    if (nrm == 0.0) return a;
    Eigen::Vector3cd e = a.f_es / nrm;
    int c = 0;
    while (c < 2 && std::abs(e(c)) <= 1e-14) ++c;
    const cd phase = std::abs(e(c)) > 0 ? e(c) / std::abs(e(c)) : cd(1.0);
    e /= phase;
    a.ehat_s = e;
    a.f = nrm * phase;
    return a;
}

double cross_section_from_varpi_T(const Vec4& wT, double theta) {
    const double c = std::cos(theta);
    return wT.squaredNorm() / (kFourPiSq * (1.0 + c * c));
}

cd projected_amplitude(const Vec4& wT, double theta, double phi, const Eigen::Vector3cd& ehat_s) {
    const double c = std::cos(theta);
    const double s = std::sqrt(1.0 + c * c);
    const Vec4 uhat = upsilon_s(theta, phi, ehat_s) / s;
    return cd(0.0, -1.0 / (2.0 * kPi * s)) * uhat.dot(wT);
}

Amplitude scattering_amplitude(const ScatterResult& r, double theta, double phi) {
    return amplitude_from_varpi_T(sample_varpi_T(r, theta, phi), theta, phi);
}

double differential_cross_section(const ScatterResult& r, double theta, double phi) {
    return cross_section_from_varpi_T(sample_varpi_T(r, theta, phi), theta);
}

std::pair<cd, cd> reconstruct_z_components(const Vec4& F, const TransverseVector& p, const WaveContext& ctx) {
    const double k = ctx.k;
    const cd Ez = -(p.px * F(3) - p.py * F(2)) / k;
    const cd Hz = (p.px * F(1) - p.py * F(0)) / k;
    return {Ez, Hz};
}

SpecularAmplitudes specular_amplitudes(const ScatterResult& r) {
    const double w = r.grid->weight(r.incident_node) / kFourPiSq;
    const Vec4 m = r.T_minus.at(r.incident_node) * w;
    const Vec4 p = r.T_plus.at(r.incident_node) * w;
    if (r.side == Side::Left) return {m, p};
    return {p, m};
}

}  // namespace emtm
