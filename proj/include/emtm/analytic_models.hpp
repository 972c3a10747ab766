#pragma once

#include "emtm/medium_model.hpp"
#include "emtm/momentum_core.hpp"
#include "emtm/scattering_solver.hpp"
#include "emtm/transfer_engine.hpp"

namespace emtm {

struct PointScatterer {
    cd coupling;
    WaveContext ctx;

    PointScatterer(cd coupling, const WaveContext& ctx);
    // 1 - i z k^3 / (6 pi); zero at the spectral singularity.
    cd denominator() const;
};

cd point_t(double k, cd coupling);
cd renormalized_coupling(cd bare, double lambda_L, double lambda_T, double k);

// Point scatterer at the origin as a Medium (impulse at z = 0).
Medium point_medium(cd coupling);

// I + k z dtilde K with the disk-averaging operator (constant kernel 1/4 pi^2).
TransferMatrix point_transfer_operator(const PointScatterer& ps, GridPtr grid);

// K = [[0, 0], [sigma_2, 0]]
Mat4 point_K();
Mat2 sigma2();

Vec4 point_T_minus(const TransverseVector& p, const PointScatterer& ps, const Vec4& upsilon);
Vec4 point_T_plus(const TransverseVector& p, const PointScatterer& ps, const Vec4& upsilon);

// X^- = sigma_2 Upsilon^+ / (1 - i z k^3 / 6 pi)
Vec2 point_X_minus(const PointScatterer& ps, const Vec4& upsilon);
// Residual of X = -(k z / 2) dtilde[varpi^{-1} sigma_2 L0] X + sigma_2 Upsilon^+ with the disk
// integral evaluated by the grid quadrature.
double point_fixed_point_residual(const PointScatterer& ps, const Vec4& upsilon, const MomentumGrid& grid);
// (1 / 4 pi^2) sum_j w_j varpi_j^{-1} sigma_2 L0(p_j)
Mat2 disk_integral_sigma2_L0(const MomentumGrid& grid);

struct PointAmplitude {
    Eigen::Vector3cd f_es;
    double sigma_d;
};

PointAmplitude point_amplitude(const PointScatterer& ps, const IncidentWave& wave, double theta, double phi);

Eigen::Matrix2d J_matrix(const TransverseVector& p, const WaveContext& ctx);

struct FresnelSlab {
    cd n;
    double d;
    WaveContext ctx;
};

struct FresnelCoefficients {
    cd r;  // reflected field at the entry face
    cd t;  // transmitted field at the exit face
};

FresnelCoefficients fresnel_slab(const FresnelSlab& slab);

}  // namespace emtm
