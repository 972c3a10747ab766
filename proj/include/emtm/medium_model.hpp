#pragma once

#include "emtm/momentum_core.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace emtm {

// eta_f = f - 1 for f in {eps, mu, 1/eps, 1/mu}.
enum class EtaKind { Eps, Mu, InvEps, InvMu };

struct Box {
    double x0, x1, y0, y1;
};

// Transverse profile of one z-uniform layer.
class Profile {
public:
    virtual ~Profile() = default;

    virtual cd eps(double x, double y) const = 0;
    virtual cd mu(double x, double y) const = 0;
    virtual std::string type_name() const = 0;

    // Uniform profiles have transforms 4 pi^2 eta delta(K).
    virtual bool laterally_uniform() const { return false; }
    // Bounded support used for quadrature; required unless uniform or analytic.
    virtual std::optional<Box> box() const { return std::nullopt; }
    virtual bool has_analytic_transform() const { return false; }
    virtual cd analytic_transform(EtaKind which, double Kx, double Ky) const;
    // Gradient of 1/eps (inverse_eps) or 1/mu. Only used by the pointwise symbol.
    virtual std::array<cd, 2> grad_inverse(bool inverse_eps, double x, double y) const;

    cd value(EtaKind which, double x, double y) const;
    cd eta(EtaKind which, double x, double y) const;
};

using ProfilePtr = std::shared_ptr<const Profile>;

class ConstantBoxProfile : public Profile {
public:
    // No box means the constant fills the whole layer.
    ConstantBoxProfile(cd eps, cd mu, std::optional<Box> box = std::nullopt);
    cd eps(double x, double y) const override;
    cd mu(double x, double y) const override;
    std::string type_name() const override { return "constant_box"; }
    bool laterally_uniform() const override { return !box_; }
    std::optional<Box> box() const override { return box_; }
    std::array<cd, 2> grad_inverse(bool, double, double) const override { return {0.0, 0.0}; }

private:
    cd eps_, mu_;
    std::optional<Box> box_;
    bool inside(double x, double y) const;
};

// 1 + A exp(-|r - c|^2 / (2 s^2)), cut off at 8 s.
class GaussianProfile : public Profile {
public:
    GaussianProfile(cd eps_amp, cd mu_amp, double sigma, double cx = 0.0, double cy = 0.0);
    cd eps(double x, double y) const override;
    cd mu(double x, double y) const override;
    std::string type_name() const override { return "gaussian"; }
    std::optional<Box> box() const override;
    std::array<cd, 2> grad_inverse(bool inverse_eps, double x, double y) const override;

private:
    cd ea_, ma_;
    double s_, cx_, cy_;
    double bump(double x, double y) const;
};

// Bilinear interpolation of tabulated eps on a regular (x, y) grid, mu = 1.
class TableProfile : public Profile {
public:
    TableProfile(std::vector<double> xs, std::vector<double> ys, std::vector<cd> eps_rowmajor_y);
    cd eps(double x, double y) const override;
    cd mu(double, double) const override { return 1.0; }
    std::string type_name() const override { return "custom_table"; }
    std::optional<Box> box() const override;

private:
    std::vector<double> xs_, ys_;
    std::vector<cd> v_;
};

class FunctionProfile : public Profile {
public:
    using Fn = std::function<cd(double, double)>;
    FunctionProfile(Fn eps, Fn mu, Box box);
    cd eps(double x, double y) const override;
    cd mu(double x, double y) const override;
    std::string type_name() const override { return "function"; }
    std::optional<Box> box() const override { return box_; }

private:
    Fn eps_, mu_;
    Box box_;
};

struct Layer {
    double z0, z1;
    ProfilePtr profile;
};

// Nonmagnetic point scatterer eps = 1 + coupling delta(x) delta(y) delta(z - z0).
struct PointImpulse {
    double z0;
    cd coupling;
};

struct Medium {
    std::vector<Layer> layers;
    std::vector<PointImpulse> points;
    int quad_points = 64;

    void validate() const;
    bool is_vacuum() const;
    bool has_support() const { return !layers.empty() || !points.empty(); }
    double z_min() const;
    double z_max() const;
    const Layer* layer_at(double z) const;

    cd value(EtaKind which, double x, double y, double z) const;
    cd eta(EtaKind which, double x, double y, double z) const;
};

cd eta(const Medium& m, EtaKind which, double x, double y, double z);

// Transform of eta over the plane, analytic when available, else tensor
// Gauss-Legendre over the support box.
cd fourier_eta(const Profile& prof, EtaKind which, double Kx, double Ky, int quad_points = 64);
cd fourier_eta(const Medium& m, EtaKind which, double Kx, double Ky, double z);

// Pointwise symbol S_{+/-}(r, iq); sign = +1 uses (1/eps, mu), -1 uses (1/mu, eps).
Mat2 symbol_S(const Profile& prof, int sign, double x, double y, const TransverseVector& q,
              const WaveContext& ctx);

// delta L(p, q) built from transforms ft (of the 1/f coefficient) and gt.
Mat2 delta_L(const TransverseVector& p, const TransverseVector& q, cd ft, cd gt, double k);

// Eta part of h_{+/-}(p, q); the vacuum delta part is dropped.
Mat2 kernel_h(const Profile& prof, int sign, const TransverseVector& p, const TransverseVector& q,
              const WaveContext& ctx, int quad_points = 64);

// e^{izH0(p)} dH(p, q) e^{-izH0(q)} for a layer containing z (zero outside layers).
Mat4 kernel_interaction(const Medium& m, double z, const TransverseVector& p, const TransverseVector& q,
                        const WaveContext& ctx);

// Transforms eta_f(p_i - p_j) for all node pairs and the four kinds.
struct TransformTable {
    GridPtr grid;
    std::array<Eigen::MatrixXcd, 4> eta;  // indexed by EtaKind
    const Eigen::MatrixXcd& operator[](EtaKind k) const { return eta[static_cast<int>(k)]; }
};

TransformTable build_transform_table(const Profile& prof, GridPtr grid, int quad_points = 64);

// Kernel of dH = H - H0 for a layer (lab frame, z independent).
Eigen::MatrixXcd delta_H_kernel(const TransformTable& t);

}  // namespace emtm
