#pragma once

#include "emtm/momentum_core.hpp"
#include "emtm/transfer_engine.hpp"

#include <optional>
#include <utility>

namespace emtm {

enum class Side { Left, Right };

struct IncidentWave {
    WaveContext ctx;
    Eigen::Vector3d khat;
    Eigen::Vector3d ehat;
    Side side = Side::Left;

    void validate() const;
    TransverseVector transverse() const { return {ctx.k * khat.x(), ctx.k * khat.y()}; }
};

// Unit x/y components of e and of khat x e.
Vec4 incident_upsilon(const IncidentWave& wave);

struct SnappedWave {
    IncidentWave wave;
    int node = 0;
    double distance = 0.0;
};

// Moves the transverse momentum onto the nearest grid node, keeping the
// hemisphere and re-orthogonalizing the polarization.
SnappedWave snap_to_grid(const IncidentWave& wave, const MomentumGrid& grid);

struct ScatterResult {
    GridPtr grid;
    Side side = Side::Left;
    IncidentWave wave;  // after snapping
    int incident_node = 0;
    double snap_distance = 0.0;
    Vec4 upsilon;
    FourField T_minus;
    FourField T_plus;
};

ScatterResult solve_left(const TransferMatrix& tm, const IncidentWave& wave);
ScatterResult solve_right(const TransferMatrix& tm, const IncidentWave& wave);
ScatterResult solve(const TransferMatrix& tm, const IncidentWave& wave);
// Same solution through the explicit inverse of M22 on the Pi_2 range.
ScatterResult solve_explicit_inverse(const TransferMatrix& tm, const IncidentWave& wave);

Vec4 upsilon_s(double theta, double phi, const Eigen::Vector3cd& ehat_s);
Eigen::Matrix<cd, 3, 4> xi_dagger(double theta, double phi);
Eigen::Vector3d scattering_direction(double theta, double phi);

// varpi(k_s) T(k_s) by barycentric interpolation on the grid; T+ for cos(theta) >= 0.
Vec4 sample_varpi_T(const ScatterResult& r, double theta, double phi);

struct Amplitude {
    cd f = 0.0;
    std::optional<Eigen::Vector3cd> ehat_s;
    Eigen::Vector3cd f_es = Eigen::Vector3cd::Zero();
};

// From a sampled varpi*T at (theta, phi).
Amplitude amplitude_from_varpi_T(const Vec4& wT, double theta, double phi);
double cross_section_from_varpi_T(const Vec4& wT, double theta);
// f through the projection onto the normalized Upsilon_s.
cd projected_amplitude(const Vec4& wT, double theta, double phi, const Eigen::Vector3cd& ehat_s);

Amplitude scattering_amplitude(const ScatterResult& r, double theta, double phi);
double differential_cross_section(const ScatterResult& r, double theta, double phi);

// (Ez, Hz) of a vacuum four-component sample at transverse momentum p.
std::pair<cd, cd> reconstruct_z_components(const Vec4& F, const TransverseVector& p, const WaveContext& ctx);

// Plane-wave coefficients carried by the delta-like spike at the incident node:
// reflected (back hemisphere) and transmitted excess (forward hemisphere).
struct SpecularAmplitudes {
    Vec4 reflected;
    Vec4 transmitted_excess;
};
SpecularAmplitudes specular_amplitudes(const ScatterResult& r);

}  // namespace emtm
