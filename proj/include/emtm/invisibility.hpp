#pragma once

#include "emtm/medium_model.hpp"
#include "emtm/scattering_solver.hpp"
#include "emtm/transfer_engine.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

namespace emtm {

// w = coupling / ((x/ax + i)^(nx+1) (y/ay + i)^(ny+1)) on the slab 0 <= z <= az.
struct SeedTerm {
    cd coupling = 0.0;
    double ax = 1.0, ay = 1.0;
    int nx = 1, ny = 1;
};

struct InvisibleProfileParams {
    double alpha_x = 1.0, alpha_y = 1.0;
    double az = 1.0;
    SeedTerm u_eps, v_eps, u_mu, v_mu;

    double alpha() const { return std::min(alpha_x, alpha_y); }
    void validate() const;
};

// eta = e^{2i ax x} u + e^{2i ay y} v where u and v share the shape parameters.
struct SeedEta {
    double alpha_x = 1.0, alpha_y = 1.0;
    cd zu = 0.0, zv = 0.0;
    double ax = 1.0, ay = 1.0;
    int nx = 1, ny = 1;

    cd shape(double x, double y) const;
    cd value(double x, double y) const;
    double sup_bound() const { return std::abs(zu) + std::abs(zv); }
    bool is_zero() const { return zu == 0.0 && zv == 0.0; }
    // Exact 2D transform of eta^n (finite sum).
    cd power_transform(int n, double Kx, double Ky) const;
};

// Closed-form transform of (x/a + i)^{-m}: nonzero only for kappa > 0.
cd half_line_transform(int m, double kappa, double a);

enum class SeriesMap { Plain, PairPlus, PairMinus };

// f = F(eta) with F analytic at 0; transforms of f - 1 and 1/f - 1 are
// summed from the power series of F and 1/F.
class InvisibleProfile : public Profile {
public:
    InvisibleProfile(SeedEta eps_seed, SeedEta mu_seed, SeriesMap map);

    cd eps(double x, double y) const override;
    cd mu(double x, double y) const override;
    std::string type_name() const override { return "invisible_w"; }
    std::optional<Box> box() const override;
    bool has_analytic_transform() const override { return true; }
    cd analytic_transform(EtaKind which, double Kx, double Ky) const override;

    const SeedEta& eps_seed() const { return eps_; }
    const SeedEta& mu_seed() const { return mu_; }
    SeriesMap map() const { return map_; }
    const std::vector<double>& forward_coefficients() const { return c_; }
    const std::vector<double>& inverse_coefficients() const { return d_; }
    // Bound on the transform error caused by cutting the profile to box().
    double truncation_leakage() const;

private:
    SeedEta eps_, mu_;
    SeriesMap map_;
    std::vector<double> c_, d_;
    cd apply(const SeedEta& s, double x, double y) const;
};

std::shared_ptr<const InvisibleProfile> make_invisible_profile(const InvisibleProfileParams& p);
Medium build_invisible_medium(const InvisibleProfileParams& p, int quad_points = 64);

struct ConditionReport {
    double max_abs = 0.0;     // max |eta~| over the tested region
    double reference = 0.0;   // peak |eta~| over a wider region
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

// Samples |eta~_f(K)| for |K| < 2 alpha and f in {eps, mu, 1/eps, 1/mu}.
ConditionReport check_transform_gap(const Profile& prof, double alpha, double tol, int quad_points = 64);
ConditionReport check_transform_gap(const Medium& m, double alpha, double tol);

// Per-axis support of the separable series terms, checked by numerical 1D transforms.
struct SupportReport {
    double max_violation = 0.0;       // relative to peak, on the forbidden half lines
    double max_closed_form_error = 0.0;  // DE quadrature vs closed form, relative
    int terms_checked = 0;
    bool passed = false;
};
SupportReport check_profile_support(const InvisibleProfile& prof, double tol, int max_power = 3);

struct KReport {
    double k = 0.0;
    double norm_minus = 0.0, norm_plus = 0.0;
    double floor = 0.0;
    double ratio = 0.0;  // max(norm) / floor
    double snap_distance = 0.0;
};

struct InvisibilityReport {
    double alpha = 0.0;
    std::vector<KReport> rows;
};

// Noise floor of the pipeline for one incident wave on a grid: vacuum result
// plus dimension * eps_mach * 4 pi^2 |Upsilon| / sqrt(w_j0).
double pipeline_noise_floor(GridPtr grid, const IncidentWave& wave, const PropagationOptions& opts);

IncidentWave default_probe_wave(double k);

InvisibilityReport verify_invisibility(const Medium& m, double alpha, const std::vector<double>& k_list, int n_r,
                                       int n_theta, const PropagationOptions& opts);
InvisibilityReport verify_invisibility(const Medium& m, double alpha, const std::vector<double>& k_list, int n_r,
                                       int n_theta, const PropagationOptions& opts, const IncidentWave& probe_unit_k);

struct EquivalencePair {
    Medium m1, m2;
    std::shared_ptr<const InvisibleProfile> p1, p2;
    double alpha = 0.0;
    SeedEta eps_seed, mu_seed;
};

// eps_{1,2} = (+-eta + sqrt(eta^2 + 4)) / 2 from a seed with eta_3 = eta_4.
EquivalencePair build_equivalent_pair(const InvisibleProfileParams& seed3, const InvisibleProfileParams& seed4,
                                      int quad_points = 64);
// Continuity walk of the square-root branch over a lattice of the support.
void check_branch_continuity(const SeedEta& s, double half_width, int lattice);

ConditionReport check_pair_transform_match(const Profile& a, const Profile& b, double alpha, double tol,
                                         int quad_points = 64);

struct EquivalenceRow {
    double k = 0.0;
    double max_diff = 0.0;   // max over angles of |f1 e1 - f2 e2|
    double max_scale = 0.0;  // max over angles of |f1 e1|
};

struct EquivalenceReport {
    double alpha = 0.0;
    std::vector<EquivalenceRow> rows;
};

EquivalenceReport verify_alpha_equivalence(const EquivalencePair& pair, const std::vector<double>& k_list, int n_r,
                                           int n_theta, const PropagationOptions& opts, int n_angles = 12);

struct SeriesSuiteReport {
    double product_support_violation = 0.0;
    bool product_support_passed = false;
    struct Family {
        std::string name;
        double m = 0, M = 0, Q = 0, sup_beta = 0;
        double max_ratio = 0;     // worst successive error ratio
        double final_error = 0;
        int terms = 0;
        bool passed = false;
    };
    std::vector<Family> families;
    bool passed = false;
};

SeriesSuiteReport::Family inverse_series_family(const std::string& name, const std::vector<cd>& samples);
SeriesSuiteReport inverse_series_suite();

}  // namespace emtm
