#include "emtm/cli.hpp"

#include "emtm/analytic_models.hpp"
#include "emtm/errors.hpp"
#include "emtm/invisibility.hpp"
#include "emtm/medium_model.hpp"
#include "emtm/scattering_solver.hpp"
#include "emtm/transfer_engine.hpp"

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace emtm {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

const char* kSchema = "emtm.run/1";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- json helpers -------------------------------------------------------

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ValidationError("config " + where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where, std::string("missing field '") + key + "'");
    return j.at(key);
}

double get_num(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(where, "not finite");
    return v;
}

double num_or(const json& j, const char* key, double def, const std::string& where) {
    return j.contains(key) ? get_num(j.at(key), where + "." + key) : def;
}

int int_or(const json& j, const char* key, int def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer()) bad(where + "." + key, "expected an integer");
    return j.at(key).get<int>();
}

// Complex values are a number or [re, im].
cd get_complex(const json& j, const std::string& where) {
    if (j.is_number()) return get_num(j, where);
    if (j.is_array() && j.size() == 2) return {get_num(j[0], where + "[0]"), get_num(j[1], where + "[1]")};
    bad(where, "expected a number or [re, im]");
}

cd complex_or(const json& j, const char* key, cd def, const std::string& where) {
    return j.contains(key) ? get_complex(j.at(key), where + "." + key) : def;
}

Eigen::Vector3d get_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) bad(where, "expected [x, y, z]");
    return {get_num(j[0], where), get_num(j[1], where), get_num(j[2], where)};
}

std::vector<double> get_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a non-empty list of numbers");
    std::vector<double> v;
    for (const auto& e : j) v.push_back(get_num(e, where));
    return v;
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

// ---- sections -----------------------------------------------------------

struct GridSpec {
    int n_r = 24, n_theta = 48;
};

GridSpec parse_grid(const json& c) {
    GridSpec g;
    if (c.contains("grid")) {
        g.n_r = int_or(c["grid"], "n_r", g.n_r, "grid");
        g.n_theta = int_or(c["grid"], "n_theta", g.n_theta, "grid");
    }
    if (g.n_r < 1 || g.n_theta < 1) bad("grid", "n_r and n_theta must be positive");
    return g;
}

PropagationOptions parse_propagation(const json& c) {
    PropagationOptions o;
    if (c.contains("propagation")) {
        const json& p = c["propagation"];
        if (p.contains("method")) {
            if (!p["method"].is_string()) bad("propagation.method", "expected a string");
            o.method = parse_method(p["method"].get<std::string>());
        }
        o.z_steps = int_or(p, "z_steps", o.z_steps, "propagation");
        o.dyson_order = int_or(p, "dyson_order", o.dyson_order, "propagation");
    }
    o.validate();
    return o;
}

IncidentWave parse_wave(const json& c) {
    const json& w = need(c, "wave", "root");
    IncidentWave wave;
    wave.ctx = WaveContext(get_num(need(w, "k", "wave"), "wave.k"));
    wave.khat = get_vec3(need(w, "khat", "wave"), "wave.khat");
    wave.ehat = get_vec3(need(w, "ehat", "wave"), "wave.ehat");
    const std::string side = w.value("side", std::string("left"));
    if (side == "left")
        wave.side = Side::Left;
    else if (side == "right")
        wave.side = Side::Right;
    else
        bad("wave.side", "expected 'left' or 'right'");
    wave.validate();
    return wave;
}

std::vector<std::pair<double, double>> parse_angles(const json& c) {
    std::vector<double> th{0.0}, ph{0.0};
    if (c.contains("angles")) {
        const json& a = c["angles"];
        th = get_list(need(a, "theta", "angles"), "angles.theta");
        ph = get_list(need(a, "phi", "angles"), "angles.phi");
    }
    for (double t : th)
        if (t < 0.0 || t > kPi) bad("angles.theta", "theta must lie in [0, pi]");
    std::vector<std::pair<double, double>> out;
    for (double t : th)
        for (double p : ph) out.push_back({t, p});
    return out;
}

std::optional<Box> parse_box(const json& j, const std::string& where) {
    if (!j.contains("box")) return std::nullopt;
    const auto v = get_list(j["box"], where + ".box");
    if (v.size() != 4) bad(where + ".box", "expected [x0, x1, y0, y1]");
    if (!(v[0] < v[1]) || !(v[2] < v[3])) bad(where + ".box", "empty box");
    return Box{v[0], v[1], v[2], v[3]};
}

SeedTerm parse_seed_term(const json& p, const char* key, const std::string& where) {
    SeedTerm t;
    if (!p.contains(key)) return t;
    const json& j = p[key];
    const std::string w = where + "." + key;
    t.coupling = complex_or(j, "coupling", 0.0, w);
    t.ax = num_or(j, "ax", 1.0, w);
    t.ay = num_or(j, "ay", 1.0, w);
    t.nx = int_or(j, "nx", 1, w);
    t.ny = int_or(j, "ny", 1, w);
    return t;
}

InvisibleProfileParams parse_invisible(const json& p, const std::string& where, double az) {
    InvisibleProfileParams ip;
    ip.alpha_x = num_or(p, "alpha_x", 1.0, where);
    ip.alpha_y = num_or(p, "alpha_y", 1.0, where);
    ip.az = num_or(p, "az", az, where);
    ip.u_eps = parse_seed_term(p, "u_eps", where);
    ip.v_eps = parse_seed_term(p, "v_eps", where);
    ip.u_mu = parse_seed_term(p, "u_mu", where);
    ip.v_mu = parse_seed_term(p, "v_mu", where);
    ip.validate();
    return ip;
}

// Plain-text table with x y z Re Im columns on a regular (x, y) lattice at one depth.
ProfilePtr load_table(const fs::path& path, double z0, double z1, const std::string& where) {
    std::ifstream in(path);
    if (!in) bad(where, "cannot open table file " + path.string());
    std::map<std::pair<double, double>, cd> cells;
    std::vector<double> xs, ys;
    std::optional<double> depth;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y, z, re, im;
        if (!(ls >> x)) continue;
        if (!(ls >> y >> z >> re >> im)) bad(where, "table line " + std::to_string(lineno) + " needs 5 columns");
        if (depth && z != *depth) bad(where, "depth-dependent tables are not supported; use one file per layer");
        if (z < z0 || z > z1) bad(where, "table depth outside the layer");
        depth = z;
        cells[{y, x}] = {re, im};
        xs.push_back(x);
        ys.push_back(y);
    }
    auto uniq = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    xs = uniq(xs);
    ys = uniq(ys);
    if (xs.size() < 2 || ys.size() < 2 || cells.size() != xs.size() * ys.size())
        bad(where, "table must fill a regular x-y lattice with at least 2 points per axis");
    std::vector<cd> vals;
    for (double y : ys)
        for (double x : xs) vals.push_back(cells.at({y, x}));
    return std::make_shared<TableProfile>(xs, ys, vals);
}

ProfilePtr parse_profile(const json& p, const std::string& where, double z0, double z1, const fs::path& base) {
    const std::string type = need(p, "type", where).get<std::string>();
    if (type == "constant_box")
        return std::make_shared<ConstantBoxProfile>(complex_or(p, "eps", 1.0, where), complex_or(p, "mu", 1.0, where),
                                                    parse_box(p, where));
    if (type == "gaussian") {
        double cx = 0.0, cy = 0.0;
        if (p.contains("center")) {
            const auto c = get_list(p["center"], where + ".center");
            if (c.size() != 2) bad(where + ".center", "expected [x, y]");
            cx = c[0];
            cy = c[1];
        }
        return std::make_shared<GaussianProfile>(complex_or(p, "eps_amp", 0.0, where),
                                                 complex_or(p, "mu_amp", 0.0, where),
                                                 get_num(need(p, "sigma", where), where + ".sigma"), cx, cy);
    }
    if (type == "invisible_w") return make_invisible_profile(parse_invisible(p, where, z1 - z0));
    if (type == "custom_table") {
        const std::string f = need(p, "file", where).get<std::string>();
        fs::path path(f);
        if (path.is_relative()) path = base / path;
        return load_table(path, z0, z1, where);
    }
    bad(where + ".type", "unknown profile type '" + type + "'");
}

Medium parse_medium(const json& c, const fs::path& base) {
    Medium m;
    if (!c.contains("medium")) return m;
    const json& md = c["medium"];
    m.quad_points = int_or(md, "quad_points", m.quad_points, "medium");
    if (md.contains("layers")) {
        int i = 0;
        for (const json& l : md["layers"]) {
            const std::string w = "medium.layers[" + std::to_string(i++) + "]";
            const double z0 = get_num(need(l, "z0", w), w + ".z0"), z1 = get_num(need(l, "z1", w), w + ".z1");
            m.layers.push_back({z0, z1, parse_profile(need(l, "profile", w), w + ".profile", z0, z1, base)});
        }
    }
    if (md.contains("points")) {
        int i = 0;
        for (const json& pt : md["points"]) {
            const std::string w = "medium.points[" + std::to_string(i++) + "]";
            m.points.push_back({num_or(pt, "z", 0.0, w), get_complex(need(pt, "coupling", w), w + ".coupling")});
        }
    }
    m.validate();
    return m;
}

// ---- output -------------------------------------------------------------

class Csv {
public:
    Csv(const fs::path& path, const std::string& hash, const std::vector<std::string>& cols)
        : out_(path, std::ios::binary), hash_(hash) {
        if (!out_) throw ValidationError("cannot write " + path.string());
        out_ << "config_hash";
        for (const auto& c : cols) out_ << ',' << c;
        out_ << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        out_ << hash_;
        for (const auto& c : cells) out_ << ',' << c;
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::string hash_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<std::string> vec3_cells(const Eigen::Vector3cd& v) {
    std::vector<std::string> c;
    for (int i = 0; i < 3; ++i) {
        c.push_back(num(v[i].real()));
        c.push_back(num(v[i].imag()));
    }
    return c;
}

const std::vector<std::string> kFesCols{"fes_x_re", "fes_x_im", "fes_y_re", "fes_y_im", "fes_z_re", "fes_z_im"};

json options_json(const PropagationOptions& o) {
    return {{"method", method_name(o.method)}, {"z_steps", o.z_steps}, {"dyson_order", o.dyson_order}};
}

// ---- commands -----------------------------------------------------------

void cmd_scatter(const json& c, const fs::path& out, const std::string& hash, json& meta, const fs::path& base) {
    const Medium m = parse_medium(c, base);
    const IncidentWave wave = parse_wave(c);
    const GridSpec gs = parse_grid(c);
    const PropagationOptions opts = parse_propagation(c);
    const auto angles = parse_angles(c);
    GridPtr g = make_grid(wave.ctx.k, gs.n_r, gs.n_theta);
    const TransferMatrix tm = transfer_matrix(m, g, opts);
    const ScatterResult r = solve(tm, wave);

    std::vector<std::string> cols{"theta", "phi", "sigma_d"};
    cols.insert(cols.end(), kFesCols.begin(), kFesCols.end());
    Csv csv(out / "scatter.csv", hash, cols);
    for (auto [th, ph] : angles) {
        const Vec4 wT = sample_varpi_T(r, th, ph);
        std::vector<std::string> row{num(th), num(ph), num(cross_section_from_varpi_T(wT, th))};
        const auto f = vec3_cells(amplitude_from_varpi_T(wT, th, ph).f_es);
        row.insert(row.end(), f.begin(), f.end());
        csv.row(row);
    }
    const SpecularAmplitudes sp = specular_amplitudes(r);
    json spec = json::object();
    spec["reflected"] = json::array();
    spec["transmitted_excess"] = json::array();
    for (int i = 0; i < 4; ++i) {
        spec["reflected"].push_back(complex_json(sp.reflected[i]));
        spec["transmitted_excess"].push_back(complex_json(sp.transmitted_excess[i]));
    }
    meta["grid_hash"] = hex64(g->hash());
    meta["grid"] = {{"n_r", gs.n_r}, {"n_theta", gs.n_theta}};
    meta["options"] = options_json(opts);
    meta["snap_distance"] = r.snap_distance;
    meta["incident_node"] = r.incident_node;
    meta["noise_floor"] = pipeline_noise_floor(g, wave, opts);
    meta["norm_T_minus"] = r.T_minus.norm();
    meta["norm_T_plus"] = r.T_plus.norm();
    meta["specular"] = spec;
    meta["warnings"] = tm.warnings;
    meta["tables"] = {"scatter.csv"};
}

void cmd_point(const json& c, const fs::path& out, const std::string& hash, json& meta) {
    const json& pj = need(c, "point", "root");
    const cd z = get_complex(need(pj, "coupling", "point"), "point.coupling");
    const IncidentWave wave = parse_wave(c);
    const auto angles = parse_angles(c);
    std::vector<double> ks{wave.ctx.k};
    if (c.contains("k_list")) ks = get_list(c["k_list"], "k_list");
    for (double k : ks) WaveContext check(k);

    Csv sweep(out / "t_sweep.csv", hash, {"k", "t_re", "t_im", "abs_t2_over_16pi2"});
    for (double k : ks) {
        const cd t = point_t(k, z);
        sweep.row({num(k), num(t.real()), num(t.imag()), num(std::norm(t) / (16.0 * kPi * kPi))});
    }

    const PointScatterer ps(z, wave.ctx);
    std::vector<std::string> cols{"theta", "phi", "sigma_d", "sigma_d_grid"};
    cols.insert(cols.end(), kFesCols.begin(), kFesCols.end());
    Csv csv(out / "point_sigma.csv", hash, cols);
    const GridSpec gs = parse_grid(c);
    GridPtr g = make_grid(wave.ctx.k, gs.n_r, gs.n_theta);
    const ScatterResult r = solve(point_transfer_operator(ps, g), wave);
    for (auto [th, ph] : angles) {
        const PointAmplitude a = point_amplitude(ps, wave, th, ph);
        std::vector<std::string> row{num(th), num(ph), num(a.sigma_d), num(differential_cross_section(r, th, ph))};
        const auto f = vec3_cells(a.f_es);
        row.insert(row.end(), f.begin(), f.end());
        csv.row(row);
    }
    meta["coupling"] = complex_json(z);
    meta["grid_hash"] = hex64(g->hash());
    meta["grid"] = {{"n_r", gs.n_r}, {"n_theta", gs.n_theta}};
    meta["snap_distance"] = r.snap_distance;
    meta["tables"] = {"t_sweep.csv", "point_sigma.csv"};
}

json condition_json(const ConditionReport& r) {
    return {{"max_abs", r.max_abs}, {"reference", r.reference}, {"tolerance", r.tolerance}, {"passed", r.passed},
            {"detail", r.detail}};
}

void write_profile_table(const fs::path& path, const std::string& hash, const Profile& p, double half, int n) {
    Csv csv(path, hash, {"x", "y", "eps_re", "eps_im", "mu_re", "mu_im"});
    for (int b = 0; b <= n; ++b)
        for (int a = 0; a <= n; ++a) {
            const double x = -half + 2.0 * half * a / n, y = -half + 2.0 * half * b / n;
            const cd e = p.eps(x, y), m = p.mu(x, y);
            csv.row({num(x), num(y), num(e.real()), num(e.imag()), num(m.real()), num(m.imag())});
        }
}

void cmd_invisible_design(const json& c, const fs::path& out, const std::string& hash, json& meta) {
    const json& ij = need(c, "invisible", "root");
    const InvisibleProfileParams ip = parse_invisible(ij, "invisible", 1.0);
    const auto prof = make_invisible_profile(ip);
    const double tol = num_or(ij, "tolerance", 1e-7, "invisible");
    const double half = num_or(ij, "table_half_width", 4.0, "invisible");
    const int n = int_or(ij, "table_points", 40, "invisible");
    if (n < 1 || !(half > 0.0)) bad("invisible", "table_points and table_half_width must be positive");
    write_profile_table(out / "profile.csv", hash, *prof, half, n);

    const Medium m = build_invisible_medium(ip);
    const ConditionReport cond = check_transform_gap(*prof, ip.alpha(), tol);
    const SupportReport sup = check_profile_support(*prof, tol);
    meta["alpha"] = ip.alpha();
    meta["support_box"] = {prof->box()->x0, prof->box()->x1, prof->box()->y0, prof->box()->y1};
    meta["truncation_leakage"] = prof->truncation_leakage();
    meta["transform_condition"] = condition_json(cond);
    meta["support_condition"] = {{"max_violation", sup.max_violation},
                                 {"max_closed_form_error", sup.max_closed_form_error},
                                 {"terms_checked", sup.terms_checked},
                                 {"passed", sup.passed}};
    meta["tables"] = {"profile.csv"};

    if (c.contains("k_list")) {
        const auto ks = get_list(c["k_list"], "k_list");
        const GridSpec gs = parse_grid(c);
        const PropagationOptions opts = parse_propagation(c);
        const InvisibilityReport rep = verify_invisibility(m, ip.alpha(), ks, gs.n_r, gs.n_theta, opts);
        Csv csv(out / "invisibility.csv", hash, {"k", "k_over_alpha", "norm_T_minus", "norm_T_plus", "noise_floor",
                                                   "ratio", "snap_distance"});
        for (const KReport& r : rep.rows)
            csv.row({num(r.k), num(r.k / ip.alpha()), num(r.norm_minus), num(r.norm_plus), num(r.floor),
                     num(r.ratio), num(r.snap_distance)});
        meta["grid"] = {{"n_r", gs.n_r}, {"n_theta", gs.n_theta}};
        meta["options"] = options_json(opts);
        meta["tables"].push_back("invisibility.csv");
    }
}

void cmd_equivalence(const json& c, const fs::path& out, const std::string& hash, json& meta) {
    const json& sj = need(c, "seed", "root");
    const InvisibleProfileParams ip = parse_invisible(sj, "seed", 1.0);
    const EquivalencePair pair = build_equivalent_pair(ip, ip, int_or(sj, "quad_points", 64, "seed"));
    const double tol = num_or(sj, "tolerance", 1e-7, "seed");
    const ConditionReport cond = check_pair_transform_match(*pair.p1, *pair.p2, pair.alpha, tol);
    meta["alpha"] = pair.alpha;
    meta["transform_condition"] = condition_json(cond);
    meta["tables"] = json::array();

    const double half = num_or(sj, "table_half_width", 4.0, "seed");
    const int n = int_or(sj, "table_points", 40, "seed");
    if (n < 1 || !(half > 0.0)) bad("seed", "table_points and table_half_width must be positive");
    write_profile_table(out / "profile_1.csv", hash, *pair.p1, half, n);
    write_profile_table(out / "profile_2.csv", hash, *pair.p2, half, n);
    meta["tables"].push_back("profile_1.csv");
    meta["tables"].push_back("profile_2.csv");

    if (c.contains("k_list")) {
        const auto ks = get_list(c["k_list"], "k_list");
        const GridSpec gs = parse_grid(c);
        const PropagationOptions opts = parse_propagation(c);
        const int na = int_or(c, "n_angles", 12, "root");
        const EquivalenceReport rep = verify_alpha_equivalence(pair, ks, gs.n_r, gs.n_theta, opts, na);
        Csv csv(out / "equivalence.csv", hash, {"k", "k_over_alpha", "max_amplitude_diff", "max_amplitude"});
        for (const EquivalenceRow& r : rep.rows)
            csv.row({num(r.k), num(r.k / pair.alpha), num(r.max_diff), num(r.max_scale)});
        meta["grid"] = {{"n_r", gs.n_r}, {"n_theta", gs.n_theta}};
        meta["options"] = options_json(opts);
        meta["tables"].push_back("equivalence.csv");
    }
}

struct Check {
    std::string name;
    double value, tolerance;
    bool passed() const { return value <= tolerance; }
};

std::vector<Check> selftest_checks() {
    std::vector<Check> out;
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double h2 = 0, pisum = 0, piorth = 0, metric = 0;
    for (int s = 0; s < 200; ++s) {
        const WaveContext ctx(0.2 + 4.0 * U(rng));
        const double r = ctx.k * 0.98 * std::sqrt(U(rng)), t = 2.0 * kPi * U(rng);
        const TransverseVector p{r * std::cos(t), r * std::sin(t)};
        const double w = varpi(p, ctx);
        const Mat4 H = free_H0(p, ctx), P1 = projector(1, p, ctx), P2 = projector(2, p, ctx);
        const Mat4 I = Mat4::Identity();
        h2 = std::max(h2, (H * H - w * w * I).cwiseAbs().maxCoeff() / (ctx.k * ctx.k));
        pisum = std::max(pisum, (P1 + P2 - I).cwiseAbs().maxCoeff());
        piorth = std::max({piorth, (P1 * P2).cwiseAbs().maxCoeff(), (P1 * P1 - P1).cwiseAbs().maxCoeff()});
        const Mat4 eta = metric_eta_plus(p, ctx);
        metric = std::max(metric, (H.adjoint() - eta * H * eta.inverse()).cwiseAbs().maxCoeff() / ctx.k);
    }
    out.push_back({"H0^2 = varpi^2 I", h2, 1e-12});
    out.push_back({"Pi_1 + Pi_2 = I", pisum, 1e-12});
    out.push_back({"Pi_i Pi_j = delta_ij Pi_j", piorth, 1e-12});
    out.push_back({"eta+ pseudo-Hermiticity", metric, 1e-10});

    const MomentumGrid g(WaveContext(1.3), 24, 48);
    const Mat2 disk = disk_integral_sigma2_L0(g);
    const double k2 = 1.3 * 1.3;
    const Mat2 exact = cd(0.0, -k2 / (3.0 * kPi)) * Mat2::Identity();
    out.push_back({"disk integral oracle", (disk - exact).norm() / exact.norm(), 1e-6});

    const SeriesSuiteReport lem = inverse_series_suite();
    out.push_back({"product support preservation", lem.product_support_violation, 1e-7});
    for (const auto& f : lem.families) {
        const double excess = f.sup_beta < 1.0 && f.final_error < 1e-13 ? std::max(0.0, f.max_ratio - f.sup_beta)
                                                                         : std::numeric_limits<double>::infinity();
        out.push_back({"inverse series " + f.name + ": ratio above sup|beta|", excess, 1e-3});
    }
    return out;
}

void cmd_selftest(const fs::path& out, const std::string& hash, json& meta) {
    const auto checks = selftest_checks();
    Csv csv(out / "selftest.csv", hash, {"check", "value", "tolerance", "passed"});
    bool all = true;
    for (const Check& ch : checks) {
        csv.row({"\"" + ch.name + "\"", num(ch.value), num(ch.tolerance), ch.passed() ? "1" : "0"});
        all = all && ch.passed();
    }
    meta["passed"] = all;
    meta["tables"] = {"selftest.csv"};
    if (!all) throw ComputationError("selftest failed; see selftest.csv");
}

}  // namespace

void run_config(const json& config, const std::string& out_dir, const std::string& base_dir) {
    if (!config.is_object()) bad("root", "expected an object");
    if (!config.contains("schema") || config["schema"] != kSchema)
        bad("schema", std::string("expected \"") + kSchema + "\"");
    if (!config.contains("command") || !config["command"].is_string()) bad("command", "missing");
    const std::string command = config["command"].get<std::string>();
    static const char* known[] = {"scatter", "point", "invisible-design", "equivalence", "selftest"};
    if (std::find(std::begin(known), std::end(known), command) == std::end(known))
        bad("command", "unknown command '" + command + "'");

    const fs::path out(out_dir);
    fs::create_directories(out);
    const std::string hash = hex64(fnv1a(config.dump()));
    json meta;
    meta["schema"] = kSchema;
    meta["command"] = command;
    meta["config_hash"] = hash;
    meta["config"] = config;

    auto finish = [&] { write_json(out / "meta.json", meta); };
    try {
        if (command == "scatter")
            cmd_scatter(config, out, hash, meta, base_dir);
        else if (command == "point")
            cmd_point(config, out, hash, meta);
        else if (command == "invisible-design")
            cmd_invisible_design(config, out, hash, meta);
        else if (command == "equivalence")
            cmd_equivalence(config, out, hash, meta);
        else
            cmd_selftest(out, hash, meta);
    } catch (const std::exception& e) {
        meta["error"] = e.what();
        finish();
        throw;
    }
    finish();
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Momentum-space transfer-matrix scattering engine"};
    std::string config_path, out_dir = ".", grid, k_override;
    int threads = 0;
    app.add_option("--config", config_path, "JSON run config")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = runtime default)");
    app.add_option("--grid", grid, "override grid as NR,NT");
    app.add_option("--k", k_override, "override wave number");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
        if (threads < 0) throw ValidationError("--threads must be >= 0");
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot open config " + config_path);
        json config;
        try {
            config = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!grid.empty()) {
            int nr = 0, nt = 0;
            char comma = 0;
            std::istringstream gs(grid);
            if (!(gs >> nr >> comma >> nt) || comma != ',' || nr < 1 || nt < 1)
                throw ValidationError("--grid expects NR,NT with positive integers");
            config["grid"] = {{"n_r", nr}, {"n_theta", nt}};
        }
        if (!k_override.empty()) {
            std::size_t pos = 0;
            double k = 0;
            try {
                k = std::stod(k_override, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != k_override.size()) throw ValidationError("--k expects a number");
            if (!config.contains("wave") || !config["wave"].is_object()) config["wave"] = json::object();
            config["wave"]["k"] = k;
        }
        const fs::path base = fs::path(config_path).parent_path();
        run_config(config, out_dir, base.empty() ? "." : base.string());
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const ComputationError& e) {
        std::cerr << "computation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace emtm
