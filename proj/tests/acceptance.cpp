// Acceptance run: one PASS/FAIL line per criterion.
#include "emtm/analytic_models.hpp"
#include "emtm/cli.hpp"
#include "emtm/errors.hpp"
#include "emtm/invisibility.hpp"
#include "emtm/scattering_solver.hpp"
#include "emtm/transfer_engine.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace emtm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double maxabs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

IncidentWave tilted_wave(double k, double theta, double phi) {
    IncidentWave w;
    w.ctx = WaveContext(k);
    w.khat = Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    const Eigen::Vector3d y(0, 1, 0);
    w.ehat = (y - y.dot(w.khat) * w.khat).normalized();
    return w;
}

Outcome c1_operator_identities() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double h2 = 0, psum = 0, porth = 0, metric = 0;
    for (int s = 0; s < 1000; ++s) {
        const WaveContext ctx(0.1 + 4.9 * U(rng));
        const double r = ctx.k * 0.99 * std::sqrt(U(rng)), t = 2.0 * kPi * U(rng);
        const TransverseVector p{r * std::cos(t), r * std::sin(t)};
        const double w = varpi(p, ctx);
        const Mat4 H = free_H0(p, ctx), I = Mat4::Identity();
        const Mat4 P1 = projector(1, p, ctx), P2 = projector(2, p, ctx);
        h2 = std::max(h2, maxabs(H * H - w * w * I));
        psum = std::max(psum, maxabs(P1 + P2 - I));
        porth = std::max({porth, maxabs(P1 * P1 - P1), maxabs(P2 * P2 - P2), maxabs(P1 * P2), maxabs(P2 * P1)});
        const Mat4 eta = metric_eta_plus(p, ctx);
        metric = std::max(metric, maxabs(H.adjoint() * eta - eta * H));
    }
    const bool ok = h2 <= 1e-12 && psum <= 1e-12 && porth <= 1e-12 && metric <= 1e-10;
    return {ok, "H0^2 " + sci(h2) + ", Pi sum " + sci(psum) + ", Pi products " + sci(porth) + ", metric " +
                    sci(metric)};
}

Outcome c2_disk_oracle() {
    const double k = 1.0;
    const MomentumGrid g(WaveContext(k), 24, 48);
    const Mat2 exact = cd(0.0, -k * k / (3.0 * kPi)) * Mat2::Identity();
    const double rel = (disk_integral_sigma2_L0(g) - exact).norm() / exact.norm();
    return {rel <= 1e-6, "relative error " + sci(rel) + " on 24x48"};
}

Outcome c3_point_end_to_end() {
    const double k = 1.0;
    GridPtr g = make_grid(k, 12, 24);
    const PointScatterer ps(cd(4.0, 1.5), WaveContext(k));
    const TransferMatrix tm = point_transfer_operator(ps, g);
    const ScatterResult r = solve_left(tm, tilted_wave(k, 0.4, 0.7));
    double node_err = 0.0, scale = 0.0;
    for (int i = 0; i < g->size(); ++i) {
        if (i == r.incident_node) continue;
        const Vec4 Tm = point_T_minus(g->node(i), ps, r.upsilon), Tp = point_T_plus(g->node(i), ps, r.upsilon);
        node_err = std::max({node_err, (r.T_minus.at(i) - Tm).norm(), (r.T_plus.at(i) - Tp).norm()});
        scale = std::max({scale, Tm.norm(), Tp.norm()});
    }
    node_err /= scale;
    double sig_err = 0.0;
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 8; ++b) {
            const double th = 0.05 + (kPi - 0.1) * a / 8.0, ph = 2.0 * kPi * b / 8.0 + 0.1;
            const double ref = point_amplitude(ps, r.wave, th, ph).sigma_d;
            const double got = differential_cross_section(r, th, ph);
            sig_err = std::max(sig_err, std::abs(got - ref) / std::max(ref, 1e-300));
        }
    const Eigen::MatrixXcd D = tm.op.action() - Eigen::MatrixXcd::Identity(4 * g->size(), 4 * g->size());
    const double nil = (D * D).norm();
    const bool ok = node_err <= 1e-8 && sig_err <= 1e-6 && nil <= 1e-12;
    return {ok, "nodewise " + sci(node_err) + ", sigma_d " + sci(sig_err) + ", |(M-I)^2| " + sci(nil)};
}

Outcome c4_dyson_termination() {
    GridPtr g = make_grid(1.0, 8, 16);
    const cd z(2.0, -0.5);
    PropagationOptions o;
    o.method = Method::Dyson;
    o.dyson_order = 1;
    const TransferMatrix d1 = transfer_matrix(point_medium(z), g, o);
    const TransferMatrix exact = point_transfer_operator(PointScatterer(z, WaveContext(1.0)), g);
    const double res = maxabs(d1.op.action() - exact.op.action());
    return {res <= 1e-12, "max residual " + sci(res)};
}

Outcome c5_fresnel_slab() {
    const double k = 1.0, n = 1.5, d = 2.0;
    GridPtr g = make_grid(k, 24, 8);
    Medium m;
    m.layers.push_back({0.0, d, std::make_shared<ConstantBoxProfile>(n * n, 1.0)});
    IncidentWave w;
    w.ctx = WaveContext(k);
    w.khat = Eigen::Vector3d(0, 0, 1);
    w.ehat = Eigen::Vector3d(1, 0, 0);
    const FresnelCoefficients ref = fresnel_slab({n, d, WaveContext(k)});
    PropagationOptions o;
    o.method = Method::OdeMidpoint;
    std::vector<double> rmag;
    double r_err = 0.0, t_err = 0.0;
    double snap = 0.0;
    for (int steps : {32, 64, 128, 256}) {
        o.z_steps = steps;
        const ScatterResult r = solve_left(transfer_matrix(m, g, o), w);
        const SpecularAmplitudes sp = specular_amplitudes(r);
        const Vec2 e = r.upsilon.head<2>();
        const double rr = sp.reflected.head<2>().norm() / e.norm();
        const double tt = (e + sp.transmitted_excess.head<2>()).norm() / e.norm();
        rmag.push_back(rr);
        r_err = std::abs(rr - std::abs(ref.r)) / std::abs(ref.r);
        t_err = std::abs(tt - std::abs(ref.t)) / std::abs(ref.t);
        snap = r.snap_distance;
    }
    const double ratio1 = (rmag[1] - rmag[0]) / (rmag[2] - rmag[1]);
    const double ratio2 = (rmag[2] - rmag[1]) / (rmag[3] - rmag[2]);
    const bool ok = r_err <= 0.01 && t_err <= 0.01 && std::abs(ratio2 - 4.0) <= 0.5;
    return {ok, "|r| " + fmt("%.6f", rmag.back()) + " vs " + fmt("%.6f", std::abs(ref.r)) + " (rel " + sci(r_err) +
                    "), |t| rel " + sci(t_err) + ", self-convergence ratios " + fmt("%.3f", ratio1) + ", " +
                    fmt("%.3f", ratio2) + ", snap " + sci(snap)};
}

Outcome c6_composition() {
    GridPtr g = make_grid(1.0, 8, 16);
    PropagationOptions o;
    o.method = Method::OdeMidpoint;
    o.z_steps = 16;
    auto bump = [](cd a, double s, double cx) { return std::make_shared<GaussianProfile>(a, 0.1, s, cx, 0.0); };
    const Layer l1{0.0, 0.7, bump(cd(0.5, 0.02), 0.5, 0.1)};
    const Layer l2{0.7, 1.2, bump(0.3, 0.7, -0.2)};
    const Layer l3{1.5, 2.0, std::make_shared<ConstantBoxProfile>(1.8, 1.0, Box{-0.8, 0.8, -0.5, 0.5})};
    auto med = [](std::vector<Layer> ls) {
        Medium m;
        m.quad_points = 48;
        m.layers = std::move(ls);
        return m;
    };
    const TransferMatrix m12 = transfer_matrix(med({l1, l2}), g, o);
    const TransferMatrix m1 = transfer_matrix(med({l1}), g, o), m2 = transfer_matrix(med({l2}), g, o);
    const TransferMatrix m3 = transfer_matrix(med({l3}), g, o);
    const Eigen::MatrixXcd A = m12.op.action();
    const double rel = (compose(m1, m2).op.action() - A).norm() / A.norm();
    const Eigen::MatrixXcd L = compose(compose(m1, m2), m3).op.action();
    const Eigen::MatrixXcd R = compose(m1, compose(m2, m3)).op.action();
    const double assoc = (L - R).norm() / L.norm();
    return {rel <= 1e-6 && assoc <= 1e-12, "two-slab vs composed " + sci(rel) + ", associativity " + sci(assoc)};
}

Outcome c7_amplitude_consistency() {
    const double k = 1.0;
    GridPtr g = make_grid(k, 8, 16);
    Medium m;
    m.quad_points = 48;
    m.layers.push_back({0.0, 0.8, std::make_shared<GaussianProfile>(cd(0.6, 0.05), 0.2, 0.6, 0.2, -0.1)});
    const ScatterResult r = solve(transfer_matrix(m, g), tilted_wave(k, 0.5, 0.3));
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double cs_err = 0.0, up_err = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const double th = kPi * U(rng), ph = 2.0 * kPi * U(rng);
        const Vec4 wT = sample_varpi_T(r, th, ph);
        const Amplitude A = amplitude_from_varpi_T(wT, th, ph);
        const double sig = cross_section_from_varpi_T(wT, th);
        if (A.ehat_s) {
            const cd f = projected_amplitude(wT, th, ph, *A.ehat_s);
            cs_err = std::max(cs_err, std::abs(sig - std::norm(f)) / sig);
        }
        const Eigen::Vector3d dir = scattering_direction(th, ph);
        const Eigen::Vector3d a = Eigen::Vector3d(U(rng) - 0.5, U(rng) - 0.5, U(rng) - 0.5).cross(dir).normalized();
        const Eigen::Vector3cd e = cd(0.8, 0.0) * a.cast<cd>() + cd(0.0, 0.6) * dir.cross(a).cast<cd>();
        const double c = std::cos(th);
        up_err = std::max(up_err, std::abs(upsilon_s(th, ph, e).squaredNorm() - (1.0 + c * c)));
    }
    return {cs_err <= 1e-12 && up_err <= 1e-13, "sigma vs |f|^2 " + sci(cs_err) + ", Upsilon norm " + sci(up_err)};
}

InvisibleProfileParams invisible_params() {
    InvisibleProfileParams p;
    p.alpha_x = p.alpha_y = 1.0;
    p.az = 1.0;
    p.u_eps.coupling = 0.3;
    p.v_eps.coupling = 0.2;
    p.u_mu.coupling = 0.1;
    p.v_mu.coupling = 0.1;
    return p;
}

Outcome c8_invisibility() {
    const InvisibleProfileParams p = invisible_params();
    const auto prof = make_invisible_profile(p);
    const Medium m = build_invisible_medium(p);
    PropagationOptions o;
    o.z_steps = 16;
    const double a = p.alpha();
    const InvisibilityReport rep = verify_invisibility(m, a, {0.5 * a, a, 2.0 * a}, 8, 16, o);
    const SupportReport sup = check_profile_support(*prof, 1e-7);
    const ConditionReport cond = check_transform_gap(*prof, a, 1e-7);
    const bool ok = rep.rows[0].ratio <= 10.0 && rep.rows[1].ratio <= 10.0 && rep.rows[2].ratio >= 100.0 &&
                    sup.passed && cond.passed;
    std::string d;
    for (const KReport& r : rep.rows) d += "k/alpha=" + fmt("%.2f", r.k / a) + " ratio " + sci(r.ratio) + "; ";
    d += "support violation " + sci(sup.max_violation) + ", DE vs closed form " + sci(sup.max_closed_form_error) +
         ", |eta~| below 2 alpha " + sci(cond.max_abs) + " of peak " + sci(cond.reference) + ", leakage bound " +
         sci(prof->truncation_leakage());
    return {ok, d};
}

Outcome c9_equivalence() {
    InvisibleProfileParams p = invisible_params();
    p.u_eps.coupling = cd(0.6, 0.1);
    p.v_eps.coupling = 0.5;
    p.u_mu.coupling = 0.4;
    p.v_mu.coupling = cd(0.2, -0.1);
    const EquivalencePair pair = build_equivalent_pair(p, p);
    double pw = 0.0;
    for (int a = 0; a <= 30; ++a)
        for (int b = 0; b <= 30; ++b) {
            const double x = -6.0 + 12.0 * a / 30, y = -6.0 + 12.0 * b / 30;
            const cd e1 = pair.p1->eps(x, y), e2 = pair.p2->eps(x, y);
            const cd m1 = pair.p1->mu(x, y), m2 = pair.p2->mu(x, y);
            const cd ee = pair.eps_seed.value(x, y), em = pair.mu_seed.value(x, y);
            pw = std::max({pw, std::abs(e1 - e2 - ee), std::abs(1.0 / e1 - 1.0 / e2 + ee), std::abs(m1 - m2 - em),
                           std::abs(1.0 / m1 - 1.0 / m2 + em)});
        }
    PropagationOptions o;
    o.z_steps = 16;
    const EquivalenceReport rep = verify_alpha_equivalence(pair, {0.5 * pair.alpha, pair.alpha}, 8, 16, o, 12);
    double diff = 0.0;
    for (const auto& r : rep.rows) diff = std::max(diff, r.max_diff);
    const ConditionReport cond = check_pair_transform_match(*pair.p1, *pair.p2, pair.alpha, 1e-7);
    const bool ok = diff <= 1e-5 && pw <= 1e-12 && cond.passed;
    return {ok, "max |f1 e1 - f2 e2| " + sci(diff) + ", pointwise identities " + sci(pw) +
                    ", transform difference below 2 alpha " + sci(cond.max_abs)};
}

Outcome c10_series_suite() {
    const SeriesSuiteReport r = inverse_series_suite();
    std::string d = "product support " + sci(r.product_support_violation) + "; ";
    int families_ok = 0;
    for (const auto& f : r.families) {
        d += f.name + ": sup|beta| " + fmt("%.4f", f.sup_beta) + " ratio " + fmt("%.4f", f.max_ratio) + "; ";
        if (f.passed) ++families_ok;
    }
    const bool ok = r.product_support_violation <= 1e-7 && families_ok >= 3 && families_ok == int(r.families.size());
    return {ok, d};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c11_determinism() {
    const fs::path d = fs::temp_directory_path() / "emtm_acceptance_determinism";
    fs::remove_all(d);
    fs::create_directories(d);
    const nlohmann::json cfg = {
        {"schema", "emtm.run/1"},
        {"command", "scatter"},
        {"wave", {{"k", 1.0}, {"khat", {0.0, 0.6, 0.8}}, {"ehat", {1.0, 0.0, 0.0}}, {"side", "left"}}},
        {"grid", {{"n_r", 6}, {"n_theta", 12}}},
        {"propagation", {{"method", "ode_midpoint"}, {"z_steps", 8}}},
        {"medium",
         {{"quad_points", 32},
          {"layers",
           {{{"z0", 0.0}, {"z1", 0.5}, {"profile", {{"type", "gaussian"}, {"eps_amp", 0.5}, {"sigma", 0.6}}}},
            {{"z0", 0.8},
             {"z1", 1.2},
             {"profile", {{"type", "constant_box"}, {"eps", {2.0, 0.1}}, {"box", {-0.5, 0.5, -0.5, 0.5}}}}}}}}},
        {"angles", {{"theta", {0.1, 0.9, 1.7, 2.6}}, {"phi", {0.0, 2.0, 4.0}}}}};
    std::ofstream(d / "config.json") << cfg.dump(2);
    std::vector<std::string> outs;
    for (int run = 0; run < 2; ++run) {
        const fs::path out = d / ("run" + std::to_string(run));
        const std::string cmd = std::string(EMTM_CLI_PATH) + " --config " + (d / "config.json").string() +
                                " --threads 4 --out " + out.string();
        if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed"};
        outs.push_back(slurp(out / "scatter.csv") + slurp(out / "meta.json"));
    }
    const bool same = outs[0] == outs[1] && !outs[0].empty();
    return {same, same ? "scatter.csv and meta.json identical across runs (" + std::to_string(outs[0].size()) + " bytes)"
                       : "outputs differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"operator identities", c1_operator_identities},
        {"disk quadrature oracle", c2_disk_oracle},
        {"point scatterer end to end", c3_point_end_to_end},
        {"Dyson termination", c4_dyson_termination},
        {"uniform slab vs Fresnel", c5_fresnel_slab},
        {"composition", c6_composition},
        {"amplitude and cross section consistency", c7_amplitude_consistency},
        {"broadband invisibility", c8_invisibility},
        {"alpha-equivalence", c9_equivalence},
        {"inverse series and product support", c10_series_suite},
        {"determinism", c11_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt("%.1f", secs) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
