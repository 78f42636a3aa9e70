// atsp: command-line driver for the experiments. Exit status 0 when every
// check passes, 2 when an inequality check fails, 1 on usage errors.

#include <algorithm>
#include <climits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atsp/arcs.hpp"
#include "atsp/curve_builder.hpp"
#include "atsp/experiments.hpp"
#include "atsp/moduli.hpp"
#include "atsp/nets.hpp"
#include "atsp/snowflake.hpp"
#include "json.hpp"

using namespace atsp;
using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Sink {
    std::string out_dir;
    std::string subcommand;
    std::vector<std::string> formats;

    bool wants(const std::string& f) const { return std::find(formats.begin(), formats.end(), f) != formats.end(); }

    void write(const std::string& file, const std::string& content) const {
        if (out_dir.empty()) {
            std::cout << content;
            return;
        }
        std::filesystem::path dir = std::filesystem::path(out_dir) / subcommand;
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
        f << content;
    }
    void report(const json& j) const {
        if (wants("json")) write("report.json", j.dump(2) + "\n");
    }
    void csv(const CsvTable& t) const {
        if (wants("csv")) write(t.name + ".csv", t.str());
    }
    void svg(const std::string& name, const std::string& doc) const {
        if (wants("svg")) write(name + ".svg", doc);
    }
};

void require_formats(const Sink& s, std::initializer_list<const char*> allowed) {
    for (const auto& f : s.formats) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || f == a;
        if (!ok) throw UsageError("format '" + f + "' is not available for " + s.subcommand);
    }
}

json checks_array(const std::vector<Check>& checks) {
    json a = json::array();
    for (const auto& c : checks) a.push_back(c);
    return a;
}

int finish(const Sink& sink, json report, const std::vector<Check>& checks) {
    bool pass = all_pass(checks);
    report["checks"] = checks_array(checks);
    report["pass"] = pass;
    sink.report(report);
    if (!sink.out_dir.empty() || !sink.wants("json"))
        for (const auto& c : checks)
            if (!c.pass) std::cerr << "FAIL " << c.name << ": " << c.rule << " (value " << fmt(c.value) << ")\n";
    return pass ? 0 : 2;
}

json with_hash(json config) {
    json j;
    j["config"] = config;
    j["config_hash"] = config_hash(config);
    return j;
}

// {"p": .., "points": [[..], ..]}, a bare array of coordinate arrays, or an
// array of {"p": .., "coords": [..]} vectors.
PointCloud load_points(const std::string& path, double p_flag) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    double p = p_flag;
    json pts;
    if (j.is_object()) {
        p = j.value("p", p_flag);
        pts = j.at("points");
    } else {
        pts = j;
    }
    if (!pts.is_array() || pts.empty()) throw UsageError(path + ": expected a non-empty array of points");
    std::vector<std::vector<double>> rows;
    for (const auto& x : pts) {
        if (x.is_object()) {
            p = x.value("p", p);
            rows.push_back(x.at("coords").get<std::vector<double>>());
        } else {
            rows.push_back(x.get<std::vector<double>>());
        }
    }
    if (!(p > 1.0) || !std::isfinite(p)) throw UsageError(path + ": p must be a finite number above 1");
    PointCloud P(p, rows.front().size());
    for (const auto& r : rows) {
        if (r.size() != P.dim()) throw UsageError(path + ": points of different dimension");
        P.push_back(r);
    }
    return P;
}

json cloud_json(const PointCloud& P, const std::vector<std::size_t>* order = nullptr) {
    json a = json::array();
    std::size_t n = order ? order->size() : P.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto x = P[order ? (*order)[i] : i];
        a.push_back(std::vector<double>(x.begin(), x.end()));
    }
    return a;
}

// ------------------------------------------------------------ subcommands

struct TriangleArgs {
    double p = 5.0, l = 1.0;
    double log_h_max = -1.5, log_h_min = -3.0;
    int count = 7;
    double slope_tol_axial = 0.05, slope_tol_diagonal = 0.02, coef_tol = 0.05;
};

int run_triangle(const TriangleArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "csv"});
    if (!(a.p > 1.0) || a.count < 2 || !(a.l > 0.0) || !(a.log_h_min < a.log_h_max))
        throw UsageError("triangle-excess: need p > 1, l > 0, count >= 2 and h-min < h-max");
    std::vector<double> hs;
    for (int i = 0; i < a.count; ++i)
        hs.push_back(std::pow(10.0, a.log_h_max + (a.log_h_min - a.log_h_max) * i / (a.count - 1)));
    json config{{"experiment", "triangle-excess"}, {"p", a.p},          {"l", a.l},
                {"log10_h_max", a.log_h_max},      {"log10_h_min", a.log_h_min}, {"count", a.count},
                {"slope_tol_axial", a.slope_tol_axial}, {"slope_tol_diagonal", a.slope_tol_diagonal},
                {"coef_tol", a.coef_tol}};
    json report = with_hash(config);
    std::vector<Check> checks;
    CsvTable t{"triangle_excess", 1, {"base", "p", "l", "h", "excess"}, {}};
    // excess(l, h) = l E(h / l); leading terms (2h)^p / p (axial) and 2 (p - 1) h^2 (diagonal) at l = 1.
    for (auto base : {TriangleBase::Axial, TriangleBase::Diagonal}) {
        bool axial = base == TriangleBase::Axial;
        std::string name = axial ? "axial" : "diagonal";
        auto fit = triangle_excess_exponents(a.p, base, hs, a.l);
        double slope = axial ? a.p : 2.0;
        double coef = axial ? std::pow(2.0, a.p) / a.p * std::pow(a.l, 1.0 - a.p) : 2.0 * (a.p - 1.0) / a.l;
        double tol = axial ? a.slope_tol_axial : a.slope_tol_diagonal;
        report[name] = {{"slope", fit.slope},
                        {"coefficient", fit.coefficient},
                        {"expected_slope", slope},
                        {"expected_coefficient", coef},
                        {"h", fit.h},
                        {"excess", fit.excess}};
        checks.push_back({name + "-slope", std::abs(fit.slope - slope) <= tol, fit.slope, slope,
                          "|fitted slope - " + fmt(slope) + "| <= " + fmt(tol)});
        double rel = std::abs(fit.coefficient / coef - 1.0);
        checks.push_back({name + "-coefficient", rel <= a.coef_tol, rel, a.coef_tol,
                          "relative error of the fitted coefficient against " + fmt(coef)});
        for (std::size_t i = 0; i < fit.h.size(); ++i)
            t.add({name, fmt(a.p), fmt(a.l), fmt(fit.h[i]), fmt(fit.excess[i])});
    }
    sink.csv(t);
    return finish(sink, report, checks);
}

struct CurveArgs {
    std::string schedule = "prop4";
    std::string mode;
    double p = 2.0;
    int n = 4;
};

CurveSpec curve_of(const CurveArgs& a) {
    try {
        return parse_curve(a.schedule, a.mode, a.p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

json curve_config(const CurveSpec& c, int n) {
    return {{"schedule", c.name}, {"mode", mode_name(c.mode)}, {"p", c.p}, {"n", n}};
}

struct SnowflakeArgs {
    CurveArgs curve;
    bool markers = false;
    std::vector<std::size_t> axes{0, 1};
};

int run_snowflake(const SnowflakeArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "csv", "svg"});
    auto spec = curve_of(a.curve);
    auto c = generate(spec.schedule, spec.mode, spec.p, a.curve.n);
    json config = curve_config(spec, a.curve.n);
    config["experiment"] = "snowflake";
    json report = with_hash(config);
    report["schedule"] = spec.schedule.describe();
    report["vertices"] = c.vertices.size();
    report["dimension"] = c.vertices.dim();
    report["r_n"] = c.r_n;
    report["eta"] = c.eta;
    report["s"] = c.s;
    report["length"] = length_pnorm(c);
    auto brackets = length_brackets(spec.schedule, spec.mode, spec.p, a.curve.n);
    json br = json::array();
    bool brackets_ok = true;
    for (const auto& b : brackets) {
        br.push_back({{"generation", b.n}, {"value", b.value}, {"lower", b.lower}, {"upper", b.upper}, {"holds", b.holds}});
        brackets_ok = brackets_ok && b.holds;
    }
    report["length_brackets"] = br;
    auto ec = check_edges(c);
    std::vector<Check> checks{
        {"length-brackets", brackets_ok, 0.0, 0.0, "Lip(gamma_j) inside its exponential bracket for every j <= n"},
        {"edges", ec.ok, ec.worst_rel, 1e-12, "every edge has length r_n, relative; no repeated vertices"}};
    if (sink.wants("json")) {
        json v{{"p", spec.p}, {"generation", a.curve.n}, {"birth", c.birth}, {"points", cloud_json(c.vertices)}};
        sink.write("vertices.json", v.dump() + "\n");
    }
    if (sink.wants("csv")) {
        std::vector<std::string> cols{"index", "birth"};
        for (std::size_t d = 0; d < c.vertices.dim(); ++d) cols.push_back("x" + std::to_string(d));
        CsvTable t{"snowflake_vertices", 1, cols, {}};
        for (std::size_t i = 0; i < c.vertices.size(); ++i) {
            std::vector<std::string> row{fmt(static_cast<long long>(i)), fmt(static_cast<long long>(c.birth[i]))};
            for (double x : c.vertices[i]) row.push_back(fmt(x));
            t.add(std::move(row));
        }
        sink.csv(t);
        CsvTable b{"snowflake_brackets", 1, {"generation", "value", "lower", "upper", "holds"}, {}};
        for (const auto& x : brackets)
            b.add({fmt(static_cast<long long>(x.n)), fmt(x.value), fmt(x.lower), fmt(x.upper), x.holds ? "1" : "0"});
        sink.csv(b);
    }
    if (sink.wants("svg")) {
        SvgOptions o;
        o.markers = a.markers;
        if (spec.mode == SnowflakeMode::Lp) {
            o.project = true;
            o.axis_x = a.axes.at(0);
            o.axis_y = a.axes.at(1);
        }
        sink.svg("curve", render_svg(c.vertices, o, c.birth));
    }
    return finish(sink, report, checks);
}

struct JonesArgs {
    CurveArgs curve;
    std::string input;
    double A = 4.0;
    double exponent = 2.0;
    int k_max = INT_MIN;
    int margin = 4;
    std::uint64_t seed = 0;
};

int run_jones(const JonesArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "csv"});
    if (!(a.A > 1.0) || !(a.exponent > 0.0)) throw UsageError("jones-sum: need A > 1 and exponent > 0");
    json config{{"experiment", "jones-sum"}, {"A", a.A}, {"exponent", a.exponent}, {"seed", a.seed},
                {"margin", a.margin}};
    PointCloud E(2.0, 2);
    int k_cut = a.k_max;
    if (!a.input.empty()) {
        E = load_points(a.input, a.curve.p);
        config["input"] = std::filesystem::path(a.input).filename().string();
        config["points_hash"] = git_blob_sha1(cloud_json(E).dump());
    } else {
        auto spec = curve_of(a.curve);
        auto c = generate(spec.schedule, spec.mode, spec.p, a.curve.n);
        config["curve"] = curve_config(spec, a.curve.n);
        if (k_cut == INT_MIN) k_cut = finest_level_for_spacing(a.A, c.r_n, a.margin);
        E = std::move(c.vertices);
    }
    config["k_max"] = k_cut == INT_MIN ? json("auto") : json(k_cut);
    double diam = diameter(E);
    if (!(diam > 0.0)) throw UsageError("jones-sum: the point set has a single point");
    int k_min = diam_level(diam);
    if (k_cut == INT_MIN) {
        // first level at which the net is all of E
        auto probe = build_nets(E, k_min, k_min + 40, a.seed);
        k_cut = probe.k_max;
        for (int k = k_min; k <= probe.k_max; ++k)
            if (probe.level_size(k) == E.size()) {
                k_cut = k;
                break;
            }
    }
    if (k_cut < k_min) throw UsageError("jones-sum: k_max is coarser than the diameter level");
    auto h = build_nets(E, k_min, k_cut, a.seed);
    auto nets_ok = verify_nets(h);
    auto G = make_family(h, a.A);
    FitCache cache;
    auto betas = evaluate_family(E, G, k_cut, &cache);
    auto J = jones_sum_from(betas, diam, a.A, k_min, a.exponent, k_cut);
    json report = with_hash(config);
    report["diam"] = J.diam;
    report["total"] = J.total;
    report["k_min"] = k_min;
    report["k_cutoff"] = k_cut;
    report["coarse_bound"] = std::isfinite(J.coarse_bound) ? json(J.coarse_bound) : json("inf");
    json lv = json::array();
    for (const auto& l : J.per_level)
        lv.push_back({{"k", l.k}, {"balls", l.balls}, {"contribution", l.contribution}, {"max_beta", l.max_beta}});
    report["per_level"] = lv;
    CsvTable t{"jones_sum", 1, {"k", "center_index", "beta", "diam", "contribution"}, {}};
    for (const auto& b : betas)
        t.add({fmt(static_cast<long long>(b.k)), fmt(static_cast<long long>(b.center)), fmt(b.beta),
               fmt(2.0 * b.radius), fmt(std::pow(b.beta, a.exponent) * 2.0 * b.radius)});
    sink.csv(t);
    std::vector<Check> checks{{"nets", nets_ok.ok, 0.0, 0.0,
                               "nesting, separation and covering of every level" +
                                   (nets_ok.message.empty() ? std::string() : ": " + nets_ok.message)}};
    return finish(sink, report, checks);
}

struct FiltrationArgs {
    CurveArgs curve;
    int n0 = 0;
    int n1 = -1;
    double c = -1.0;
    double rho = 4.0;
    bool with_beta = false;
};

int run_filtration(const FiltrationArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "csv"});
    auto spec = curve_of(a.curve);
    int n1 = a.n1 < 0 ? a.curve.n - 1 : a.n1;
    double c = a.c > 0.0 ? a.c : convexity_constant(spec.p);
    auto curve = generate(spec.schedule, spec.mode, spec.p, a.curve.n);
    FiltrationReport F;
    try {
        F = verify_filtration(curve.vertices, a.n0, n1, spec.p, c, a.rho, a.with_beta);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json config = curve_config(spec, a.curve.n);
    config["experiment"] = "filtration-check";
    config["n0"] = a.n0;
    config["n1"] = n1;
    config["c"] = c;
    config["rho"] = a.rho;
    config["with_beta"] = a.with_beta;
    json report = with_hash(config);
    report["depth"] = F.depth;
    report["convexity_power"] = F.p;
    report["A_upper"] = F.A_upper;
    report["A_lower"] = F.A_lower;
    report["arcs"] = F.arcs.size();
    report["delta_sum"] = F.delta_sum;
    report["var_minus_edges"] = F.var_minus_edges;
    report["I"] = F.I;
    report["I_bound"] = F.I_bound;
    report["K"] = F.K;
    report["excess_worst_ratio"] = F.excess_worst_ratio;
    std::vector<Check> checks{
        {"axioms", F.axioms_ok, 0.0, 0.0, "filtration axioms" + (F.axioms_message.empty() ? "" : ": " + F.axioms_message)},
        {"d-triangle-excess", F.excess_failures == 0, static_cast<double>(F.excess_failures), 0.0,
         "arcs with 2c d^p / Diam^(p-1) > Delta"},
        {"d-sum", F.dsum_failures == 0, static_cast<double>(F.dsum_failures), 0.0,
         "arcs with beta_tilde Diam above the descendant d sum"},
        {"delta-nonnegative", F.delta_nonneg, 0.0, 0.0, "Delta >= 0 on every arc"},
        {"delta-sum", F.delta_sum_ok, F.delta_sum, F.var_minus_edges, "sum Delta <= sum var - sum |Edge|"},
        {"aggregate", F.aggregate_ok, F.I, F.I_bound, "(sum beta_tilde^p Diam)^(1/p) against its bound"}};
    if (a.with_beta)
        checks.push_back({"beta-le-beta-tilde", F.beta_le_beta_tilde, 0.0, 0.0, "optimizer beta <= beta_tilde"});
    CsvTable t{"filtration_arcs", 1,
               {"level", "index", "delta", "d", "beta_tilde", "beta", "diam", "excess_lhs", "excess_ok", "dsum",
                "dsum_ok"},
               {}};
    for (const auto& r : F.arcs)
        t.add({fmt(static_cast<long long>(r.level)), fmt(static_cast<long long>(r.index)), fmt(r.delta), fmt(r.d),
               fmt(r.beta_tilde), fmt(r.beta), fmt(r.diam), fmt(r.excess_lhs), r.excess_ok ? "1" : "0", fmt(r.dsum),
               r.dsum_ok ? "1" : "0"});
    sink.csv(t);
    return finish(sink, report, checks);
}

struct FitArgs {
    std::string input;
    double p = 2.0;
    double A = 240.0;
    double exponent = 0.0;
    std::uint64_t seed = 0;
    int k_max = INT_MIN;
    bool markers = false;
};

int run_fit(const FitArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "svg"});
    if (a.input.empty()) throw UsageError("fit-curve: --input is required");
    auto E = load_points(a.input, a.p);
    double s = a.exponent > 0.0 ? a.exponent : std::min(E.p(), 2.0);
    CertificateOptions opt;
    opt.seed = a.seed;
    opt.k_max = a.k_max;
    opt.fit.seed = a.seed;
    json config{{"experiment", "fit-curve"},
                {"input", std::filesystem::path(a.input).filename().string()},
                {"points_hash", git_blob_sha1(cloud_json(E).dump())},
                {"p", E.p()},
                {"A", a.A},
                {"exponent", s},
                {"seed", a.seed},
                {"k_max", a.k_max == INT_MIN ? json("auto") : json(a.k_max)}};
    CertificateReport C;
    try {
        C = certificate_check(E, a.A, s, opt);
    } catch (const AxiomViolation& e) {
        json report = with_hash(config);
        report["axiom_violation"] = {{"axiom", e.axiom}, {"k", e.k}, {"message", e.what()}};
        return finish(sink, report, {{"axioms", false, 0.0, 0.0, e.what()}});
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json report = with_hash(config);
    report["certificate"] = {{"diam", C.diam},
                             {"k0", C.k0},
                             {"k_max", C.k_max},
                             {"exponent", C.s_exponent},
                             {"jones", C.jones},
                             {"length", C.length},
                             {"ratio", C.ratio},
                             {"points", C.points},
                             {"tour_points", C.tour_points},
                             {"covers_all", C.covers_all},
                             {"sums",
                              {{"S_1", C.sums.S_1},
                               {"S_V", C.sums.S_V},
                               {"S_rho", C.sums.S_rho},
                               {"flat_pairs", C.sums.flat_pairs},
                               {"non_flat", C.sums.non_flat},
                               {"worst_tau1_ratio", C.sums.worst_tau1_ratio}}}};
    report["polyline"] = {{"p", E.p()}, {"order", C.tour}, {"points", cloud_json(E, &C.tour)}};
    std::vector<Check> checks{
        {"axioms", C.axioms.ok, 0.0, 0.0, "net sequence axioms" + (C.axioms.ok ? "" : ": " + C.axioms.message)},
        {"covers", C.covers_all, static_cast<double>(C.tour_points), static_cast<double>(C.points),
         "the polyline visits every input point"},
        {"tau1", C.sums.tau1_ok, C.sums.worst_tau1_ratio, 1.0, "tau_1 <= 6 alpha + 9 alpha^2 on flat pairs"},
        {"cross", C.sums.cross_ok, C.sums.S_1, C.sums.S_V, "S_1 <= S_V / alpha1"}};
    if (sink.wants("svg")) {
        if (E.dim() != 2) throw UsageError("fit-curve: SVG output needs planar input");
        SvgOptions o;
        o.markers = a.markers;
        sink.svg("polyline", render_svg(E.subset(C.tour), o));
    }
    return finish(sink, report, checks);
}

struct ModuliArgs {
    double p = 3.0;
    int grid = 20;
    std::uint64_t seed = 0;
};

int run_moduli(const ModuliArgs& a, const Sink& sink) {
    require_formats(sink, {"json", "csv"});
    if (!(a.p > 1.0) || a.grid < 2) throw UsageError("moduli: need p > 1 and grid >= 2");
    json config{{"experiment", "moduli"}, {"p", a.p}, {"grid", a.grid}, {"seed", a.seed}};
    json report = with_hash(config);
    CsvTable t{"moduli", 1, {"modulus", "p", "t_or_eps", "closed_form", "asymptotic", "numeric"}, {}};
    bool closed = a.p == 2.0;
    double worst_rho = 0.0;
    json rows = json::array();
    for (int i = 0; i < a.grid; ++i) {
        double x = std::pow(10.0, -2.0 + 2.0 * i / (a.grid - 1));  // 0.01 .. 1
        double num = rho_numeric(a.p, x, a.seed);
        double up = rho_upper(a.p, x);
        worst_rho = std::max(worst_rho, num / up);
        t.add({"rho", fmt(a.p), fmt(x), closed ? fmt(rho_l2(x)) : "", fmt(rho_lp_main_term(a.p, x)), fmt(num)});
        rows.push_back({{"modulus", "rho"}, {"t", x}, {"asymptotic", rho_lp_main_term(a.p, x)}, {"numeric", num},
                        {"upper", up}});
    }
    for (int i = 0; i < a.grid; ++i) {
        double e = 0.02 * std::pow(100.0, static_cast<double>(i) / (a.grid - 1));  // 0.02 .. 2
        double num = delta_numeric(a.p, e, a.seed);
        t.add({"delta", fmt(a.p), fmt(e), closed ? fmt(delta_l2(e)) : "", fmt(delta_lp_main_term(a.p, e)), fmt(num)});
        rows.push_back({{"modulus", "delta"}, {"eps", e}, {"asymptotic", delta_lp_main_term(a.p, e)}, {"numeric", num}});
    }
    report["rows"] = rows;
    double c = convexity_constant(a.p);
    auto V = validate_convexity_constant(a.p, c);
    report["convexity_constant"] = c;
    report["convexity_power"] = convexity_power(a.p);
    std::vector<Check> checks{
        {"rho-envelope", worst_rho <= 1.0 + 1e-12, worst_rho, 1.0, "sampled rho over rho_upper on t in [0.01, 1]"},
        {"convexity-constant", V.ok, V.worst_ratio, 1.0,
         "min over eps in [0.02, 2] of delta_numeric / (c eps^max(p,2))"}};
    sink.csv(t);
    return finish(sink, report, checks);
}

int emit_report(const Sink& sink, const json& report, bool pass) {
    sink.report(report);
    if (!pass && (!sink.out_dir.empty() || !sink.wants("json")))
        for (const auto& c : report.at("checks"))
            if (!c.at("pass").get<bool>())
                std::cerr << "FAIL " << c.at("name").get<std::string>() << ": " << c.at("rule").get<std::string>()
                          << "\n";
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jones beta numbers, snowflake curves and traveling salesman certificates in l_p"};
    app.require_subcommand(1);
    Sink sink;
    sink.formats = {"json"};
    auto common = [&sink](CLI::App* sub) {
        sub->add_option("--out", sink.out_dir, "write files under DIR/<subcommand>/ instead of stdout");
        sub->add_option("--format", sink.formats, "json, csv or svg; repeatable")
            ->check(CLI::IsMember({"json", "csv", "svg"}))
            ->expected(1, 3);
    };
    auto curve_opts = [](CLI::App* sub, CurveArgs& c) {
        sub->add_option("--schedule", c.schedule, "segment, prop2, prop4, prop3, prop1, pq or const:<eta>");
        sub->add_option("--mode", c.mode, "planar or lp (default by schedule)")->check(CLI::IsMember({"planar", "lp"}));
        sub->add_option("--p", c.p, "exponent of l_p");
        sub->add_option("--n", c.n, "generation");
    };

    TriangleArgs tri;
    auto* s_tri = app.add_subcommand("triangle-excess", "fit excess exponents of thin triangles in l_p^2");
    s_tri->add_option("--p", tri.p);
    s_tri->add_option("--l", tri.l, "base length");
    s_tri->add_option("--log-h-max", tri.log_h_max);
    s_tri->add_option("--log-h-min", tri.log_h_min);
    s_tri->add_option("--count", tri.count);
    common(s_tri);

    SnowflakeArgs sf;
    auto* s_sf = app.add_subcommand("snowflake", "generate a snowflake curve");
    curve_opts(s_sf, sf.curve);
    s_sf->add_flag("--markers", sf.markers, "vertex markers coloured by birth generation");
    s_sf->add_option("--axes", sf.axes, "coordinates drawn for lp curves")->expected(2);
    common(s_sf);

    JonesArgs js;
    auto* s_js = app.add_subcommand("jones-sum", "beta numbers and the Jones sum over a multiresolution family");
    curve_opts(s_js, js.curve);
    s_js->add_option("--input", js.input, "points.json instead of a generated curve");
    s_js->add_option("--A", js.A);
    s_js->add_option("--exponent", js.exponent);
    s_js->add_option("--k-max", js.k_max);
    s_js->add_option("--margin", js.margin);
    s_js->add_option("--seed", js.seed);
    common(s_js);

    FiltrationArgs fc;
    auto* s_fc = app.add_subcommand("filtration-check", "filtration inequalities on 4-adic arcs of a snowflake");
    curve_opts(s_fc, fc.curve);
    s_fc->add_option("--n0", fc.n0);
    s_fc->add_option("--n1", fc.n1, "default n - 1");
    s_fc->add_option("--c", fc.c, "convexity constant (default by p)");
    s_fc->add_flag("--with-beta", fc.with_beta, "also run the line-fit beta on every arc");
    common(s_fc);

    FitArgs fit;
    auto* s_fit = app.add_subcommand("fit-curve", "polyline through a point set and its Jones certificate");
    s_fit->add_option("--input", fit.input)->required();
    s_fit->add_option("--p", fit.p, "exponent when the file does not give one");
    s_fit->add_option("--A", fit.A);
    s_fit->add_option("--exponent", fit.exponent, "Jones exponent (default min(p, 2))");
    s_fit->add_option("--seed", fit.seed);
    s_fit->add_option("--k-max", fit.k_max);
    s_fit->add_flag("--markers", fit.markers);
    common(s_fit);

    PqGapConfig pq;
    auto* s_pq = app.add_subcommand("pq-gap", "l_p against l_q lengths of the pq curve");
    s_pq->add_option("--p", pq.p);
    s_pq->add_option("--q", pq.q)->expected(1, 16);
    s_pq->add_option("--n", pq.n);
    common(s_pq);

    SharpnessConfig sh;
    std::string prop = "prop4";
    auto* s_sh = app.add_subcommand("sharpness", "trend checks of the sharpness examples");
    s_sh->add_option("--prop", prop)->check(CLI::IsMember({"prop1", "prop2", "prop3", "prop4"}));
    s_sh->add_option("--p", sh.p);
    s_sh->add_option("--eps", sh.eps);
    s_sh->add_option("--n", sh.n, "finest generation");
    s_sh->add_option("--n-min", sh.n_min);
    s_sh->add_option("--A", sh.A, "window constant of the optimizer sums");
    s_sh->add_option("--A-lower", sh.A_lower, "window constant of the lower-bound series");
    s_sh->add_option("--seed", sh.seed);
    common(s_sh);

    NecessaryConfig nc;
    auto* s_nc = app.add_subcommand("necessary-check", "S_{max(2,p)} over length across generations");
    s_nc->add_option("--schedule", nc.curve);
    s_nc->add_option("--mode", nc.mode)->check(CLI::IsMember({"planar", "lp"}));
    s_nc->add_option("--p", nc.p);
    s_nc->add_option("--A", nc.A);
    s_nc->add_option("--n-min", nc.n_min);
    s_nc->add_option("--n", nc.n_max, "finest generation");
    s_nc->add_option("--band", nc.band);
    s_nc->add_option("--seed", nc.seed);
    common(s_nc);

    ModuliArgs mo;
    auto* s_mo = app.add_subcommand("moduli", "moduli of smoothness and convexity profiles");
    s_mo->add_option("--p", mo.p);
    s_mo->add_option("--grid", mo.grid);
    s_mo->add_option("--seed", mo.seed);
    common(s_mo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto* sub = app.get_subcommands().front();
        sink.subcommand = sub->get_name();
        if (sub == s_tri) return run_triangle(tri, sink);
        if (sub == s_sf) return run_snowflake(sf, sink);
        if (sub == s_js) return run_jones(js, sink);
        if (sub == s_fc) return run_filtration(fc, sink);
        if (sub == s_fit) return run_fit(fit, sink);
        if (sub == s_mo) return run_moduli(mo, sink);
        if (sub == s_pq) {
            require_formats(sink, {"json", "csv"});
            PqGapReport R;
            try {
                R = run_pq_gap(pq);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            sink.csv(table(R));
            return emit_report(sink, to_json(R), R.pass);
        }
        if (sub == s_sh) {
            require_formats(sink, {"json", "csv"});
            sh.prop = parse_proposition(prop);
            SharpnessReport R;
            try {
                R = run_sharpness(sh);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            for (const auto& t : tables(R)) sink.csv(t);
            return emit_report(sink, to_json(R), R.pass);
        }
        if (sub == s_nc) {
            require_formats(sink, {"json", "csv"});
            NecessaryReport R;
            try {
                R = run_necessary_check(nc);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            sink.csv(table(R));
            return emit_report(sink, to_json(R), R.pass);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
