#include "emtm/transfer_engine.hpp"

#include "emtm/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <variant>

namespace emtm {

Method parse_method(const std::string& name) {
    if (name == "dyson") return Method::Dyson;
    if (name == "slab_exponential") return Method::SlabExponential;
    if (name == "ode_midpoint") return Method::OdeMidpoint;
    throw ValidationError("unknown propagation method '" + name + "'");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Dyson: return "dyson";
        case Method::SlabExponential: return "slab_exponential";
        case Method::OdeMidpoint: return "ode_midpoint";
    }
    return "?";
}

void PropagationOptions::validate() const {
    if (dyson_order < 1) throw ValidationError("dyson_order must be >= 1");
    if (z_steps < 1) throw ValidationError("z_steps must be >= 1");
}

OperatorF4 TransferMatrix::block(int i, int j) const {
    const OperatorF4 pi = projector_operator(i, grid());
    const OperatorF4 pj = (i == j) ? pi : projector_operator(j, grid());
    return pi.compose(op).compose(pj);
}

namespace {

using Dense = Eigen::MatrixXcd;
using BlockDiag = std::vector<Mat4>;

BlockDiag free_blocks(const MomentumGrid& g, double z) {
    BlockDiag e(g.size());
    for (int i = 0; i < g.size(); ++i) e[i] = exp_free(z, g.node(i), g.context());
    return e;
}

// L * A * R with block-diagonal L and R.
Dense conjugate(const BlockDiag& L, const Dense& A, const BlockDiag& R) {
    const int n = static_cast<int>(L.size());
    Dense out(A.rows(), A.cols());
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.block<4, 4>(4 * i, 4 * j) = L[i] * A.block<4, 4>(4 * i, 4 * j) * R[j];
    return out;
}

// Interaction-picture action exp(izH0) dH exp(-izH0) for a lab-frame action dH.
Dense interaction_action(const MomentumGrid& g, const Dense& dH, double z) {
    return conjugate(free_blocks(g, z), dH, free_blocks(g, -z));
}

Mat4 node_delta_H(const MomentumGrid& g, int i, const Profile& p) {
    const double k = g.context().k;
    const TransverseVector& q = g.node(i);
    Mat4 h = Mat4::Zero();
    h.topRightCorner<2, 2>() =
        delta_L(q, q, kFourPiSq * p.eta(EtaKind::InvEps, 0, 0), kFourPiSq * p.eta(EtaKind::Mu, 0, 0), k);
    h.bottomLeftCorner<2, 2>() =
        -delta_L(q, q, kFourPiSq * p.eta(EtaKind::InvMu, 0, 0), kFourPiSq * p.eta(EtaKind::Eps, 0, 0), k);
    return h;
}

// z-integrated lab-frame action of a point impulse.
Dense impulse_action(const MomentumGrid& g, const PointImpulse& pt) {
    const int n = g.size();
    const double k = g.context().k;
    Dense G = Dense::Zero(4 * n, 4 * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            G.block<2, 2>(4 * i + 2, 4 * j) = -delta_L(g.node(i), g.node(j), 0.0, pt.coupling, k) * g.weight(j);
    return G;
}

struct LayerEvent {
    double z0, z1;
    const Profile* profile;
};

using Event = std::variant<LayerEvent, PointImpulse>;

std::vector<Event> events_of(const Medium& m) {
    std::vector<Event> ev;
    for (const Layer& l : m.layers) ev.push_back(LayerEvent{l.z0, l.z1, l.profile.get()});
    for (const PointImpulse& p : m.points) ev.push_back(p);
    auto zof = [](const Event& e) {
        return std::holds_alternative<LayerEvent>(e) ? std::get<LayerEvent>(e).z0 : std::get<PointImpulse>(e).z0;
    };
    std::stable_sort(ev.begin(), ev.end(), [&](const Event& a, const Event& b) { return zof(a) < zof(b); });
    return ev;
}

// Generic steppers over a matrix type and an interaction-picture generator H(z).
template <class Mat, class HFn>
Mat ode_midpoint_layer(Mat U, const HFn& H, double z0, double z1, int steps) {
    const double h = (z1 - z0) / steps;
    const cd mi(0.0, -1.0);
    for (int s = 0; s < steps; ++s) {
        const double z = z0 + s * h;
        const Mat Umid = U + (mi * (0.5 * h)) * (H(z) * U);
        U = U + (mi * h) * (H(z + 0.5 * h) * Umid);
    }
    return U;
}

// Cauchy product with exp(-iG) = sum (-iG)^m / m! for the impulse term.
template <class Mat>
void dyson_impulse(std::vector<Mat>& D, const Mat& G) {
    const cd mi(0.0, -1.0);
    std::vector<Mat> pw{Mat::Identity(G.rows(), G.cols())};
    for (std::size_t m = 1; m < D.size(); ++m) pw.push_back((mi / double(m)) * (G * pw.back()));
    std::vector<Mat> out(D.size());
    for (std::size_t l = 0; l < D.size(); ++l) {
        out[l] = D[l];
        for (std::size_t m = 1; m <= l; ++m) out[l] += pw[m] * D[l - m];
    }
    D = std::move(out);
}

// Each step contributes the truncated series of exp(-i h H(midpoint)), so the
// order-by-order sums keep the equal-time terms of the ordered integrals.
template <class Mat, class HFn>
void dyson_layer(std::vector<Mat>& D, const HFn& H, double z0, double z1, int steps) {
    const double h = (z1 - z0) / steps;
    for (int s = 0; s < steps; ++s) dyson_impulse<Mat>(D, h * H(z0 + (s + 0.5) * h));
}

TransferMatrix uniform_transfer(const Medium& m, GridPtr grid, const PropagationOptions& opts) {
    const MomentumGrid& g = *grid;
    const WaveContext& ctx = g.context();
    const std::vector<Event> ev = events_of(m);
    OperatorF4 op = OperatorF4::zero(grid);
    const cd mi(0.0, -1.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.size(); ++i) {
        const TransverseVector& p = g.node(i);
        Mat4 U = Mat4::Identity();
        std::vector<Mat4> D(opts.dyson_order + 1, Mat4::Zero());
        D[0] = Mat4::Identity();
        for (const Event& e : ev) {
            const LayerEvent& L = std::get<LayerEvent>(e);
            const Mat4 dH = node_delta_H(g, i, *L.profile);
            auto H = [&](double z) -> Mat4 { return exp_free(z, p, ctx) * dH * exp_free(-z, p, ctx); };
            switch (opts.method) {
                case Method::OdeMidpoint: U = ode_midpoint_layer<Mat4>(U, H, L.z0, L.z1, opts.z_steps); break;
                case Method::Dyson: dyson_layer<Mat4>(D, H, L.z0, L.z1, opts.z_steps); break;
                case Method::SlabExponential: {
                    const Mat4 full = free_H0(p, ctx) + dH;
                    const Mat4 step = (mi * (L.z1 - L.z0) * full).exp();
                    U = exp_free(L.z1, p, ctx) * step * exp_free(-L.z0, p, ctx) * U;
                    break;
                }
            }
        }
        if (opts.method == Method::Dyson) {
            U = Mat4::Zero();
            for (const Mat4& d : D) U += d;
        }
        op.kernel.block<4, 4>(4 * i, 4 * i) = U / g.weight(i);
    }
    return {op, {}};
}

}  // namespace

OperatorF4 assemble_interaction(const Medium& m, double z, GridPtr grid) {
    const Layer* l = m.layer_at(z);
    if (!l) return OperatorF4::zero(grid);
    const TransformTable t = build_transform_table(*l->profile, grid, m.quad_points);
    const Dense dH = delta_H_kernel(t);
    const MomentumGrid& g = *grid;
    return {grid, conjugate(free_blocks(g, z), dH, free_blocks(g, -z))};
}

TransferMatrix transfer_matrix(const Medium& m, GridPtr grid, const PropagationOptions& opts) {
    opts.validate();
    m.validate();
    const MomentumGrid& g = *grid;
    const WaveContext& ctx = g.context();
    if (m.layers.empty() && m.points.empty()) return {OperatorF4::identity(grid), {}};

    const bool all_uniform =
        m.points.empty() && std::all_of(m.layers.begin(), m.layers.end(),
                                        [](const Layer& l) { return l.profile->laterally_uniform(); });
    if (all_uniform) return uniform_transfer(m, grid, opts);

    const int n4 = 4 * g.size();
    const Eigen::VectorXd w = component_weights(g);
    const cd mi(0.0, -1.0);
    std::vector<std::string> warnings;
    Dense U = Dense::Identity(n4, n4);
    std::vector<Dense> D;
    if (opts.method == Method::Dyson) {
        D.assign(opts.dyson_order + 1, Dense::Zero(n4, n4));
        D[0] = Dense::Identity(n4, n4);
    }

    for (const Event& e : events_of(m)) {
        if (std::holds_alternative<PointImpulse>(e)) {
            const PointImpulse& pt = std::get<PointImpulse>(e);
            const Dense G = interaction_action(g, impulse_action(g, pt), pt.z0);
            if (opts.method == Method::Dyson)
                dyson_impulse<Dense>(D, G);
            else
                U = Dense((mi * G).exp()) * U;
            continue;
        }
        const LayerEvent& L = std::get<LayerEvent>(e);
        const TransformTable t = build_transform_table(*L.profile, grid, m.quad_points);
        const Dense dH = delta_H_kernel(t) * w.asDiagonal();
        const double h = (L.z1 - L.z0) / opts.z_steps;
        if (opts.method != Method::SlabExponential && h * dH.norm() > 1.0)
            warnings.push_back("layer [" + std::to_string(L.z0) + ", " + std::to_string(L.z1) +
                               "): step times interaction norm exceeds 1; increase z_steps");
        auto H = [&](double z) -> Dense { return interaction_action(g, dH, z); };
        switch (opts.method) {
            case Method::OdeMidpoint: U = ode_midpoint_layer<Dense>(std::move(U), H, L.z0, L.z1, opts.z_steps); break;
            case Method::Dyson: dyson_layer<Dense>(D, H, L.z0, L.z1, opts.z_steps); break;
            case Method::SlabExponential: {
                Dense full = dH;
                for (int i = 0; i < g.size(); ++i) full.block<4, 4>(4 * i, 4 * i) += free_H0(g.node(i), ctx);
                const Dense step = (mi * (L.z1 - L.z0) * full).exp();
                U = conjugate(free_blocks(g, L.z1), step, free_blocks(g, -L.z0)) * U;
                break;
            }
        }
    }
    if (opts.method == Method::Dyson) {
        U = Dense::Zero(n4, n4);
        for (const Dense& d : D) U += d;
    }
    return {OperatorF4::from_action(grid, U), warnings};
}

TransferMatrix compose(const TransferMatrix& first, const TransferMatrix& second) {
    require_same_grid(first.grid(), second.grid());
    TransferMatrix out{second.op.compose(first.op), first.warnings};
    out.warnings.insert(out.warnings.end(), second.warnings.begin(), second.warnings.end());
    return out;
}

namespace {
constexpr char kMagic[8] = {'E', 'M', 'T', 'M', 'T', 'M', '0', '1'};
}

void save_transfer_matrix(const TransferMatrix& tm, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + path);
    const std::uint64_t h = tm.grid()->hash();
    const std::int64_t n = tm.op.kernel.rows();
    os.write(kMagic, sizeof kMagic);
    os.write(reinterpret_cast<const char*>(&h), sizeof h);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(tm.op.kernel.data()), sizeof(cd) * n * n);
}

TransferMatrix load_transfer_matrix(const std::string& path, GridPtr grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot read " + path);
    char magic[8];
    std::uint64_t h = 0;
    std::int64_t n = 0;
    is.read(magic, sizeof magic);
    is.read(reinterpret_cast<char*>(&h), sizeof h);
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!is || !std::equal(magic, magic + 8, kMagic)) throw ValidationError(path + ": not a transfer matrix file");
    if (h != grid->hash() || n != 4 * grid->size()) throw ValidationError(path + ": grid hash mismatch");
    OperatorF4 op = OperatorF4::zero(grid);
    is.read(reinterpret_cast<char*>(op.kernel.data()), sizeof(cd) * n * n);
    if (!is) throw ValidationError(path + ": truncated");
    return {op, {}};
}

}  // namespace emtm
