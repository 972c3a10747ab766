#include "emtm/momentum_core.hpp"

#include "emtm/errors.hpp"
#include "emtm/quadrature.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace emtm {

WaveContext::WaveContext(double kk) : k(kk) {
    if (!(kk > 0.0) || !std::isfinite(kk)) throw ValidationError("wavenumber must be finite and positive");
}

double TransverseVector::norm() const { return std::hypot(px, py); }

double varpi(const TransverseVector& p, const WaveContext& ctx) {
    const double p2 = p.px * p.px + p.py * p.py;
    const double k2 = ctx.k * ctx.k;
    if (!(p2 < k2)) throw DomainError("evanescent channel outside the momentum disk: |p| >= k");
    return std::sqrt(k2 - p2);
}

Mat2 free_L0(const TransverseVector& p, const WaveContext& ctx) {
    varpi(p, ctx);
    const double k = ctx.k, k2 = k * k;
    Mat2 L;
    L << -p.px * p.py, p.px * p.px - k2, k2 - p.py * p.py, p.px * p.py;
    return L / k;
}

Mat4 free_H0(const TransverseVector& p, const WaveContext& ctx) {
    const Mat2 L = free_L0(p, ctx);
    Mat4 H = Mat4::Zero();
    H.topRightCorner<2, 2>() = L;
    H.bottomLeftCorner<2, 2>() = -L;
    return H;
}

Mat4 projector(int j, const TransverseVector& p, const WaveContext& ctx) {
    if (j != 1 && j != 2) throw ValidationError("projector index must be 1 or 2");
    const double w = varpi(p, ctx);
    const double s = (j == 1) ? -1.0 : 1.0;
    return 0.5 * (Mat4::Identity() + (s / w) * free_H0(p, ctx));
}

Mat4 metric_eta_plus(const TransverseVector& p, const WaveContext& ctx) {
    const double w = varpi(p, ctx);
    const double k2 = ctx.k * ctx.k, w2 = w * w;
    const double px = p.px, py = p.py;
    Eigen::Matrix2d theta;
    theta << (k2 - py * py) * (k2 - py * py) + px * px * py * py, px * py * (k2 + w2),
        px * py * (k2 + w2), (k2 - px * px) * (k2 - px * px) + px * px * py * py;
    theta /= k2 * w2;
    Mat4 eta = Mat4::Identity();
    eta.topLeftCorner<2, 2>() = theta.cast<cd>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(theta);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ComputationError("metric_eta_plus: not positive definite");
    return eta;
}

Mat4 exp_free(double z, const TransverseVector& p, const WaveContext& ctx) {
    const double w = varpi(p, ctx);
    const double c = std::cos(w * z), s = std::sin(w * z);
    return c * Mat4::Identity() + cd(0.0, s / w) * free_H0(p, ctx);
}

MomentumGrid::MomentumGrid(const WaveContext& ctx, int n_r, int n_theta)
    : ctx_(ctx), n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 2 || n_theta < 4)
        throw ValidationError("momentum grid needs n_r >= 2 and n_theta >= 4");
    const QuadratureRule rule = gauss_legendre(n_r, 0.0, kPi / 2.0);
    phi_ = rule.nodes;
    const double k = ctx.k, dth = 2.0 * kPi / n_theta;
    nodes_.reserve(size());
    for (int ir = 0; ir < n_r; ++ir) {
        const double sp = std::sin(phi_[ir]), cp = std::cos(phi_[ir]);
        const double r = k * sp;
        for (int it = 0; it < n_theta; ++it) {
            const double th = dth * it;
            nodes_.push_back({r * std::cos(th), r * std::sin(th)});
            weights_.push_back(k * k * sp * cp * rule.weights[ir] * dth);
            varpi_.push_back(k * cp);
        }
    }
}

double MomentumGrid::angle(int it) const { return 2.0 * kPi * it / n_theta_; }

int MomentumGrid::nearest_node(const TransverseVector& p) const {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        const double d = std::hypot(nodes_[i].px - p.px, nodes_[i].py - p.py);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

namespace {

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
    }
}

}  // namespace

std::uint64_t MomentumGrid::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    fnv_mix(h, &ctx_.k, sizeof(double));
    fnv_mix(h, &n_r_, sizeof(int));
    fnv_mix(h, &n_theta_, sizeof(int));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        fnv_mix(h, &nodes_[i].px, sizeof(double));
        fnv_mix(h, &nodes_[i].py, sizeof(double));
        fnv_mix(h, &weights_[i], sizeof(double));
    }
    return h;
}

GridPtr make_grid(double k, int n_r, int n_theta) {
    return std::make_shared<const MomentumGrid>(WaveContext(k), n_r, n_theta);
}

FourField::FourField(GridPtr g) : grid(std::move(g)), values(Eigen::VectorXcd::Zero(4 * grid->size())) {}

FourField::FourField(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != 4 * grid->size()) throw ValidationError("FourField: value length must be 4 * nodes");
}

double FourField::norm() const {
    double s = 0.0;
    for (int i = 0; i < grid->size(); ++i) s += grid->weight(i) * at(i).squaredNorm();
    return std::sqrt(s);
}

Eigen::VectorXd component_weights(const MomentumGrid& g) {
    Eigen::VectorXd w(4 * g.size());
    for (int i = 0; i < g.size(); ++i) w.segment<4>(4 * i).setConstant(g.weight(i));
    return w;
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (!a || !b) throw ValidationError("operator without grid");
    if (a != b && a->hash() != b->hash()) throw ValidationError("grid mismatch between operators");
}

OperatorF4 OperatorF4::identity(GridPtr g) {
    const Eigen::VectorXd w = component_weights(*g);
    OperatorF4 op{g, Eigen::MatrixXcd::Zero(w.size(), w.size())};
    for (Eigen::Index i = 0; i < w.size(); ++i) op.kernel(i, i) = 1.0 / w(i);
    return op;
}

OperatorF4 OperatorF4::zero(GridPtr g) {
    const Eigen::Index n = 4 * g->size();
    return {g, Eigen::MatrixXcd::Zero(n, n)};
}

OperatorF4 OperatorF4::from_action(GridPtr g, const Eigen::MatrixXcd& action) {
    const Eigen::VectorXd w = component_weights(*g);
    if (action.rows() != w.size() || action.cols() != w.size())
        throw ValidationError("OperatorF4: action size does not match grid");
    return {g, action * w.cwiseInverse().asDiagonal()};
}

Eigen::MatrixXcd OperatorF4::action() const {
    return kernel * component_weights(*grid).asDiagonal();
}

OperatorF4 OperatorF4::compose(const OperatorF4& rhs) const {
    require_same_grid(grid, rhs.grid);
    return {grid, action() * rhs.kernel};
}

FourField OperatorF4::apply(const FourField& f) const {
    require_same_grid(grid, f.grid);
    return FourField(grid, action() * f.values);
}

OperatorF4 OperatorF4::operator+(const OperatorF4& rhs) const {
    require_same_grid(grid, rhs.grid);
    return {grid, kernel + rhs.kernel};
}

OperatorF4 OperatorF4::operator-(const OperatorF4& rhs) const {
    require_same_grid(grid, rhs.grid);
    return {grid, kernel - rhs.kernel};
}

OperatorF4 projector_operator(int j, GridPtr g) {
    OperatorF4 op = OperatorF4::zero(g);
    for (int i = 0; i < g->size(); ++i)
        op.kernel.block<4, 4>(4 * i, 4 * i) = projector(j, g->node(i), g->context()) / g->weight(i);
    return op;
}

}  // namespace emtm
