#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace emtm {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPiSq = 4.0 * kPi * kPi;

struct WaveContext {
    double k = 1.0;
    WaveContext() = default;
    explicit WaveContext(double k);
};

struct TransverseVector {
    double px = 0.0;
    double py = 0.0;
    double norm() const;
};

double varpi(const TransverseVector& p, const WaveContext& ctx);
Mat2 free_L0(const TransverseVector& p, const WaveContext& ctx);
Mat4 free_H0(const TransverseVector& p, const WaveContext& ctx);
// Pi_j = (I + (-1)^j H0 / varpi) / 2, j in {1, 2}.
Mat4 projector(int j, const TransverseVector& p, const WaveContext& ctx);
Mat4 metric_eta_plus(const TransverseVector& p, const WaveContext& ctx);
// exp(i z H0(p)) in closed trigonometric form.
Mat4 exp_free(double z, const TransverseVector& p, const WaveContext& ctx);

// Polar product grid on the open disk |p| < k with p = k sin(phi).
// Node i = ir * n_theta + it.
class MomentumGrid {
public:
    MomentumGrid(const WaveContext& ctx, int n_r, int n_theta);

    const WaveContext& context() const { return ctx_; }
    int radial_count() const { return n_r_; }
    int angular_count() const { return n_theta_; }
    int size() const { return n_r_ * n_theta_; }

    const TransverseVector& node(int i) const { return nodes_[i]; }
    double weight(int i) const { return weights_[i]; }
    double varpi(int i) const { return varpi_[i]; }
    const std::vector<double>& radial_angles() const { return phi_; }
    double angle(int it) const;

    int nearest_node(const TransverseVector& p) const;
    std::uint64_t hash() const;

private:
    WaveContext ctx_;
    int n_r_, n_theta_;
    std::vector<double> phi_;
    std::vector<TransverseVector> nodes_;
    std::vector<double> weights_;
    std::vector<double> varpi_;
};

using GridPtr = std::shared_ptr<const MomentumGrid>;

GridPtr make_grid(double k, int n_r, int n_theta);

struct FourField {
    GridPtr grid;
    Eigen::VectorXcd values;

    FourField() = default;
    explicit FourField(GridPtr g);
    FourField(GridPtr g, Eigen::VectorXcd v);

    Vec4 at(int i) const { return values.segment<4>(4 * i); }
    // sqrt(sum_j w_j |F(p_j)|^2)
    double norm() const;
};

// Dense kernel on the grid; (M F)(p_i) = sum_j w_j M(p_i, p_j) F(p_j).
struct OperatorF4 {
    GridPtr grid;
    Eigen::MatrixXcd kernel;

    static OperatorF4 identity(GridPtr g);
    static OperatorF4 zero(GridPtr g);
    // Kernel from a plain matrix acting on node values.
    static OperatorF4 from_action(GridPtr g, const Eigen::MatrixXcd& action);

    Eigen::MatrixXcd action() const;
    // (*this) o rhs
    OperatorF4 compose(const OperatorF4& rhs) const;
    FourField apply(const FourField& f) const;
    OperatorF4 operator+(const OperatorF4& rhs) const;
    OperatorF4 operator-(const OperatorF4& rhs) const;
};

// w_j repeated over the 4 components of each node.
Eigen::VectorXd component_weights(const MomentumGrid& g);
OperatorF4 projector_operator(int j, GridPtr g);

void require_same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace emtm
