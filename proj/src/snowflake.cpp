#include "atsp/snowflake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "atsp/beta.hpp"
#include "atsp/projections.hpp"

namespace atsp {

// ---------------------------------------------------------------- schedules

namespace {

constexpr double kEtaLp = 1.0 / 16.0;

// Smallest integer i0 >= 1 with (1 + i0) log(1 + i0)^a >= target.
double smallest_shift(double target, double a) {
    auto f = [&](double i0) { return (1.0 + i0) * std::pow(std::log1p(i0), a); };
    double lo = 1.0, hi = 1.0;
    if (f(lo) >= target) return lo;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1.0) {
        double mid = std::floor(0.5 * (lo + hi));
        (f(mid) >= target ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double HeightSchedule::i0() const { return std::exp(log_i0); }

double HeightSchedule::eta(int i) const {
    if (i < 1) throw std::invalid_argument("HeightSchedule::eta: index must be >= 1");
    if (kind == Kind::Constant) return eta_bar;
    double L = log_i0 + std::log1p(i * std::exp(-log_i0));
    double base = shift ? i + std::exp(log_i0) : static_cast<double>(i);
    return std::pow(delta / (base * std::pow(L, a)), 1.0 / ps);
}

std::string HeightSchedule::name() const {
    switch (kind) {
        case Kind::Constant: return "const";
        case Kind::Prop2: return "prop2";
        case Kind::Prop4: return "prop4";
        case Kind::Prop3: return "prop3";
        case Kind::Prop1: return "prop1";
        case Kind::Pq: return "pq";
    }
    return "?";
}

nlohmann::json HeightSchedule::describe() const {
    nlohmann::json j;
    j["schedule"] = name();
    if (kind == Kind::Constant) {
        j["eta"] = eta_bar;
        return j;
    }
    j["power"] = ps;
    j["delta"] = delta;
    j["log_exponent"] = a;
    j["log_i0"] = log_i0;
    double i0v = i0();
    if (i0v < 9.0e15)
        j["i0"] = std::round(i0v);
    else
        j["i0"] = nullptr;
    j["shifted"] = shift;
    j["eta_1"] = eta(1);
    return j;
}

HeightSchedule HeightSchedule::constant(double e) {
    if (!(e >= 0.0) || e >= 0.5) throw std::invalid_argument("HeightSchedule::constant: eta must lie in [0, 1/2)");
    HeightSchedule h;
    h.kind = Kind::Constant;
    h.eta_bar = e;
    return h;
}

HeightSchedule HeightSchedule::prop2() {
    HeightSchedule h;
    h.kind = Kind::Prop2;
    h.ps = 2.0;
    h.delta = 0.25;
    h.a = 1.0;
    h.log_i0 = std::log(15.0);
    return h;
}

HeightSchedule HeightSchedule::prop4() {
    HeightSchedule h;
    h.kind = Kind::Prop4;
    h.ps = 2.0;
    h.delta = 0.25;
    h.a = 2.0;
    h.log_i0 = std::log(2.0);
    return h;
}

namespace {

HeightSchedule log_schedule(HeightSchedule::Kind kind, double p, double a) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("HeightSchedule: p must be in (1, inf)");
    HeightSchedule h;
    h.kind = kind;
    h.ps = p;
    h.delta = 1.0;
    h.a = a;
    h.log_i0 = std::log(smallest_shift(std::pow(16.0, p), a));
    return h;
}

}  // namespace

HeightSchedule HeightSchedule::prop3(double p) { return log_schedule(Kind::Prop3, p, 1.0); }
HeightSchedule HeightSchedule::prop1(double p) { return log_schedule(Kind::Prop1, p, 2.0); }

HeightSchedule HeightSchedule::pq(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("HeightSchedule: p must be in (1, inf)");
    HeightSchedule h;
    h.kind = Kind::Pq;
    h.ps = p;
    h.delta = 1.0;
    h.a = 1.0;
    h.shift = false;
    // eta_1^p = 1/log(1 + i0) <= 16^{-p}
    const double T = std::pow(16.0, p);
    if (T < 36.0) {
        double i0 = std::ceil(std::expm1(T));
        while (std::log1p(i0) < T) i0 += 1.0;
        while (i0 > 1.0 && std::log1p(i0 - 1.0) >= T) i0 -= 1.0;
        h.log_i0 = std::log(i0);
    } else {
        h.log_i0 = T;  // i0 = e^T, too large to store
    }
    return h;
}

HeightSchedule HeightSchedule::parse(const std::string& s, double p) {
    if (s == "prop2") return prop2();
    if (s == "prop4") return prop4();
    if (s == "prop3") return prop3(p);
    if (s == "prop1") return prop1(p);
    if (s == "pq") return pq(p);
    for (const char* pre : {"const:", "constant:"}) {
        std::string P(pre);
        if (s.rfind(P, 0) == 0) {
            std::size_t used = 0;
            double e = std::stod(s.substr(P.size()), &used);
            if (used != s.size() - P.size()) break;
            return constant(e);
        }
    }
    throw std::invalid_argument("unknown schedule '" + s + "'");
}

// ---------------------------------------------------------------- refinement

double solve_s(double p, double eta) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("solve_s: p must be in (1, inf)");
    if (!(eta >= 0.0) || eta >= 0.5) throw std::invalid_argument("solve_s: eta must lie in [0, 1/2)");
    if (eta == 0.0) return 0.25;
    const double ep = std::pow(eta, p);
    auto f = [&](double s) { return std::pow(s, p) - std::pow(0.5 - s, p) - ep; };
    double lo = 0.25, hi = 0.5;
    // f(1/4) = -eta^p < 0 < f(1/2)
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (std::fabs(fm) < 1e-14 && hi - lo < 1e-15) return mid;
        (fm > 0.0 ? hi : lo) = mid;
    }
    return std::fabs(f(lo)) <= std::fabs(f(hi)) ? lo : hi;
}

namespace {

double s_for(SnowflakeMode mode, double p, double eta) {
    if (mode == SnowflakeMode::Planar) {
        if (eta > 1.0 / std::sqrt(12.0) * (1.0 + 1e-15))
            throw std::invalid_argument("planar snowflake: eta exceeds 1/sqrt(12)");
        return 0.25 + eta * eta;
    }
    return solve_s(p, eta);
}

// Children of edge vector v. Writes four vectors of length d into out.
void bump_edge(std::span<const double> v, double s, double eta, SnowflakeMode mode, const NormKernel& k,
               std::size_t axis, double* out) {
    const std::size_t d = v.size();
    const double len = k.norm(v);
    if (!(len > 0.0)) throw std::invalid_argument("refine: zero-length segment");
    double* c0 = out;
    double* c1 = out + d;
    double* c2 = out + 2 * d;
    double* c3 = out + 3 * d;
    for (std::size_t j = 0; j < d; ++j) {
        c0[j] = c3[j] = s * v[j];
        c1[j] = c2[j] = (0.5 - s) * v[j];
    }
    if (mode == SnowflakeMode::Planar) {
        // left normal times eta |v|
        double nx = -v[1] * eta, ny = v[0] * eta;
        c1[0] += nx;
        c1[1] += ny;
        c2[0] -= nx;
        c2[1] -= ny;
    } else {
        if (axis >= d || v[axis] != 0.0) throw std::invalid_argument("refine: bump axis must be a fresh coordinate");
        c1[axis] += eta * len;
        c2[axis] -= eta * len;
    }
    const double want = s * len;
    for (int c = 1; c <= 2; ++c) {
        double got = k.norm(std::span<const double>(out + c * d, d));
        if (std::fabs(got - want) > 1e-12 * want)
            throw std::logic_error("refine: sub-segment lengths differ from s|v|");
    }
}

int trailing_base4(std::uint64_t k) {
    int t = 0;
    while (k % 4 == 0) {
        k /= 4;
        ++t;
    }
    return t;
}

}  // namespace

std::array<std::vector<double>, 5> refine(std::span<const double> x, std::span<const double> y, double eta,
                                          SnowflakeMode mode, double p, std::size_t bump_axis) {
    if (x.size() != y.size()) throw std::invalid_argument("refine: dimension mismatch");
    const std::size_t d = x.size();
    if (mode == SnowflakeMode::Planar) {
        if (d != 2) throw std::invalid_argument("refine: planar mode needs 2 coordinates");
        p = 2.0;
    }
    double s = s_for(mode, p, eta);
    NormKernel k(p);
    std::vector<double> v(d), kids(4 * d);
    for (std::size_t j = 0; j < d; ++j) v[j] = y[j] - x[j];
    bump_edge(v, s, eta, mode, k, bump_axis, kids.data());
    std::array<std::vector<double>, 5> pts;
    pts[0].assign(x.begin(), x.end());
    for (int c = 0; c < 4; ++c) {
        pts[c + 1] = pts[c];
        for (std::size_t j = 0; j < d; ++j) pts[c + 1][j] += kids[c * d + j];
    }
    // land exactly on y
    pts[4].assign(y.begin(), y.end());
    return pts;
}

// ---------------------------------------------------------------- curves

PointCloud SnowflakeCurve::generation(int j) const {
    if (j < 0 || j > n) throw std::out_of_range("SnowflakeCurve::generation: j outside [0, n]");
    std::size_t stride = std::size_t{1} << (2 * (n - j));
    std::size_t m = (std::size_t{1} << (2 * j)) + 1;
    PointCloud out(vertices.p(), vertices.dim());
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(vertices[i * stride]);
    return out;
}

double SnowflakeCurve::r(int j) const {
    if (j < 0 || j > n) throw std::out_of_range("SnowflakeCurve::r: j outside [0, n]");
    double v = 1.0;
    for (int i = 0; i < j; ++i) v *= s[i];
    return v;
}

SnowflakeCurve generate(const HeightSchedule& schedule, SnowflakeMode mode, double p, int n,
                        const GenerateOptions& opt) {
    if (n < 0) throw std::invalid_argument("generate: n must be nonnegative");
    if (mode == SnowflakeMode::Planar) {
        p = 2.0;
        if (n > opt.max_planar) throw std::invalid_argument("generate: planar generation cap exceeded");
    } else {
        if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("generate: p must be in (1, inf)");
        if (n > opt.max_lp) throw std::invalid_argument("generate: lp generation cap exceeded");
    }
    const std::size_t d = mode == SnowflakeMode::Planar ? 2 : std::max<std::size_t>(2, n + 1);
    NormKernel k(p);

    SnowflakeCurve c{mode, p, n, schedule, PointCloud(p, d), PointCloud(p, d), {}, {}, {}, 1.0};
    std::vector<double> E(d, 0.0);
    E[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        double eta = schedule.eta(i);
        double s = s_for(mode, p, eta);
        c.eta.push_back(eta);
        c.s.push_back(s);
        c.r_n *= s;
        std::vector<double> next(4 * E.size());
        const std::size_t m = E.size() / d;
        for (std::size_t e = 0; e < m; ++e)
            bump_edge(std::span<const double>(E.data() + e * d, d), s, eta, mode, k, static_cast<std::size_t>(i),
                      next.data() + 4 * e * d);
        E.swap(next);
    }
    const std::size_t m = E.size() / d;
    c.edges.reserve(m);
    for (std::size_t e = 0; e < m; ++e) c.edges.push_back(std::span<const double>(E.data() + e * d, d));

    // Vertices as compensated prefix sums of the edges.
    c.vertices.reserve(m + 1);
    std::vector<double> pos(d, 0.0), comp(d, 0.0);
    c.vertices.push_back(pos);
    for (std::size_t e = 0; e < m; ++e) {
        for (std::size_t j = 0; j < d; ++j) {
            double y = E[e * d + j] - comp[j];
            double t = pos[j] + y;
            comp[j] = (t - pos[j]) - y;
            pos[j] = t;
        }
        c.vertices.push_back(pos);
    }
    // The last vertex is e_1 exactly.
    auto last = c.vertices.at_mut(m);
    std::fill(last.begin(), last.end(), 0.0);
    last[0] = 1.0;

    c.birth.resize(m + 1);
    for (std::size_t v = 0; v <= m; ++v)
        c.birth[v] = (v == 0 || v == m) ? 0 : n - trailing_base4(static_cast<std::uint64_t>(v));
    return c;
}

double length_pnorm(const SnowflakeCurve& c) {
    NormKernel k(c.p);
    double L = 0.0;
    for (std::size_t e = 0; e < c.edges.size(); ++e) L += k.norm(c.edges[e]);
    return L;
}

double length_qnorm(const SnowflakeCurve& c, double q) {
    NormKernel k(q);
    double L = 0.0;
    for (std::size_t e = 0; e < c.edges.size(); ++e) L += k.norm(c.edges[e]);
    return L;
}

double lp_curve_qlength(const HeightSchedule& schedule, double p, double q, int n) {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("lp_curve_qlength: q must be in (1, inf)");
    // Every generation-i edge has p-norm r_i; its children's q-norms depend only
    // on its own q-norm, and the two outer (and two inner) children agree.
    std::vector<std::pair<double, double>> cur{{1.0, 1.0}};  // (q-norm, multiplicity)
    double r = 1.0;
    for (int i = 1; i <= n; ++i) {
        double eta = schedule.eta(i);
        double s = solve_s(p, eta);
        std::vector<std::pair<double, double>> next;
        next.reserve(2 * cur.size());
        const double bump = std::pow(eta * r, q);
        for (auto [vq, mult] : cur) {
            next.push_back({s * vq, 2.0 * mult});
            next.push_back({std::pow(std::pow((0.5 - s) * vq, q) + bump, 1.0 / q), 2.0 * mult});
        }
        cur.swap(next);
        r *= s;
    }
    double L = 0.0;
    for (auto [vq, mult] : cur) L += vq * mult;
    return L;
}

EdgeCheck check_edges(const SnowflakeCurve& c, double rel_tol) {
    NormKernel k(c.p);
    EdgeCheck out{true, 0.0};
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        double rel = std::fabs(k.norm(c.edges[e]) - c.r_n) / c.r_n;
        out.worst_rel = std::max(out.worst_rel, rel);
    }
    out.ok = out.worst_rel <= rel_tol;
    std::vector<std::size_t> idx(c.vertices.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto lex = [&](std::size_t a, std::size_t b) {
        auto x = c.vertices[a], y = c.vertices[b];
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    };
    std::sort(idx.begin(), idx.end(), lex);
    for (std::size_t i = 1; i < idx.size(); ++i) {
        auto x = c.vertices[idx[i - 1]], y = c.vertices[idx[i]];
        if (std::equal(x.begin(), x.end(), y.begin())) out.ok = false;
    }
    return out;
}

std::vector<LengthBracket> length_brackets(const HeightSchedule& schedule, SnowflakeMode mode, double p, int n_max,
                                           double rel_slack) {
    std::vector<LengthBracket> out;
    double prod = 1.0, sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        double eta = schedule.eta(n);
        double lo, hi;
        if (mode == SnowflakeMode::Planar) {
            prod *= 1.0 + 4.0 * eta * eta;
            sum += eta * eta;
            lo = std::exp(10.0 / 3.0 * sum);
            hi = std::exp(4.0 * sum);
        } else {
            if (eta > kEtaLp * (1.0 + 1e-14)) throw std::invalid_argument("length_brackets: lp bracket needs eta <= 1/16");
            prod *= 4.0 * solve_s(p, eta);
            sum += std::pow(4.0 * eta, p);
            lo = std::exp(sum / (4.0 * p));
            hi = std::exp(sum / p);
        }
        bool holds = prod >= lo * (1.0 - rel_slack) && prod <= hi * (1.0 + rel_slack);
        out.push_back({n, prod, lo, hi, holds});
    }
    return out;
}

double qlength_bound(const HeightSchedule& schedule, double p, double q, int n) {
    if (!(q > p)) throw std::invalid_argument("qlength_bound: needs q > p");
    const double Cq = std::pow(8.0, q) / q;
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) sum += std::pow(schedule.eta(i), q) * std::pow(static_cast<double>(i), q / p - 1.0);
    return std::exp(Cq * sum);
}

std::vector<double> edge_lengths(const HeightSchedule& schedule, SnowflakeMode mode, double p, int m_max) {
    if (m_max < 0) throw std::invalid_argument("edge_lengths: m_max must be >= 0");
    double q = mode == SnowflakeMode::Planar ? 2.0 : p;
    std::vector<double> r(static_cast<std::size_t>(m_max) + 1, 1.0);
    for (int m = 1; m <= m_max; ++m) r[m] = r[m - 1] * solve_s(q, schedule.eta(m));
    return r;
}

std::vector<RoughBound> rough_r_bounds(const HeightSchedule& schedule, int n_max) {
    auto r = edge_lengths(schedule, SnowflakeMode::Planar, 2.0, n_max);
    std::vector<RoughBound> out;
    for (int n = 1; n <= n_max; ++n) {
        double q = std::ldexp(1.0, -2 * n);
        double lo = 0.3 * std::log(n + 16.0) * q, hi = 1.1 * std::log(n + 15.0) * q;
        out.push_back({n, r[n], lo, hi, lo < r[n] && r[n] < hi});
    }
    return out;
}

SeriesBracket log_square_series(long N) {
    if (N < 3) throw std::invalid_argument("log_square_series: N must be >= 3");
    // smallest terms first
    long double sum = 0.0L;
    for (long n = N; n >= 3; --n) {
        long double l = std::log(static_cast<long double>(n));
        sum += 1.0L / (static_cast<long double>(n) * l * l);
    }
    double partial = static_cast<double>(sum);
    return {N, partial, static_cast<double>(sum + 1.0L / std::log(static_cast<long double>(N + 1))),
            static_cast<double>(sum + 1.0L / std::log(static_cast<long double>(N)))};
}

// ---------------------------------------------------------------- vertex betas

PointCloud clip_polyline_to_ball(const PointCloud& poly, std::span<const double> center, double radius) {
    const std::size_t d = poly.dim();
    NormKernel k(poly.p());
    const double R = radius * (1.0 + kBallSlack);
    PointCloud out(poly.p(), d);
    std::vector<double> dir(d), pt(d);
    auto at = [&](std::size_t e, double t) {
        auto a = poly[e];
        for (std::size_t j = 0; j < d; ++j) pt[j] = a[j] + t * dir[j];
        return std::span<const double>(pt);
    };
    for (std::size_t e = 0; e + 1 < poly.size(); ++e) {
        auto a = poly[e], b = poly[e + 1];
        for (std::size_t j = 0; j < d; ++j) dir[j] = b[j] - a[j];
        double len = k.norm(dir);
        double da = k.dist(a, center), db = k.dist(b, center);
        if (std::min(da, db) > R + len) continue;
        auto sd = detail::segment_distance(center.data(), a.data(), dir.data(), d, k);
        if (sd.distance > R) continue;
        auto g = [&](double t) { return k.dist(at(e, t), center) - R; };
        double t_lo = 0.0, t_hi = 1.0;
        boost::math::tools::eps_tolerance<double> tol(50);
        if (da > R) {
            boost::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve(g, 0.0, sd.t, da - R, sd.distance - R, tol, it);
            t_lo = r.second;  // inside end of the bracket
        }
        if (db > R) {
            boost::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve(g, sd.t, 1.0, sd.distance - R, db - R, tol, it);
            t_hi = r.first;
        }
        out.push_back(at(e, t_lo));
        out.push_back(at(e, t_hi));
    }
    // drop exact duplicates (shared vertices of consecutive edges)
    PointCloud uniq(poly.p(), d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < uniq.size() && !dup; ++j)
            dup = std::equal(out[i].begin(), out[i].end(), uniq[j].begin());
        if (!dup) uniq.push_back(out[i]);
    }
    return uniq;
}

VertexBetaReport vertex_beta_bounds_check(const SnowflakeCurve& c, int j, double tol) {
    if (j < 0 || j > c.n) throw std::invalid_argument("vertex_beta_bounds_check: j outside [0, n]");
    PointCloud poly = c.generation(j);
    const double rj = c.r(j);
    const double lower_c = c.mode == SnowflakeMode::Planar ? std::sqrt(3.0) / 4.0 : 0.25;
    VertexBetaReport rep{j, rj, true, tol, {}};
    const std::uint64_t last = poly.size() - 1;
    for (std::size_t v = 0; v < poly.size(); ++v) {
        int birth = (v == 0 || v == last) ? 0 : j - trailing_base4(v);
        double eta = birth > 0 ? c.eta[birth - 1] : 0.0;
        PointCloud W = clip_polyline_to_ball(poly, poly[v], rj);
        double b = 0.0;
        if (W.size() > 2) {
            std::vector<std::size_t> idx(W.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            b = fit_line_minmax(W, idx).width / (2.0 * rj);
        }
        VertexBeta vb{v, birth, b, lower_c * eta, 2.0 * eta, false};
        vb.ok = b >= vb.lower - tol && b <= vb.upper + tol;
        rep.ok = rep.ok && vb.ok;
        rep.vertices.push_back(vb);
    }
    return rep;
}

// ---------------------------------------------------------------- triangle excess

double triangle_excess(double p, TriangleBase base, double l, double h) {
    if (!(p > 1.0) || !(l > 0.0) || !(h >= 0.0)) throw std::invalid_argument("triangle_excess: bad arguments");
    const double u = 2.0 * h / l;
    if (base == TriangleBase::Axial) {
        // 2((l/2)^p + h^p)^{1/p} - l
        return l * std::expm1(std::log1p(std::pow(u, p)) / p);
    }
    // 2^{1-1/p} (l/2) ((1-u)^p + (1+u)^p)^{1/p} - l
    double D = 0.5 * (std::expm1(p * std::log1p(u)) + std::expm1(p * std::log1p(-u)));
    return l * std::expm1(std::log1p(D) / p);
}

std::array<std::array<double, 2>, 3> triangle_points(double p, TriangleBase base, double l, double h) {
    if (base == TriangleBase::Axial) return {{{0.0, 0.0}, {l / 2, h}, {l, 0.0}}};
    const double w = std::pow(2.0, -1.0 / p);
    return {{{0.0, 0.0}, {w * l / 2 - w * h, w * l / 2 + w * h}, {w * l, w * l}}};
}

ExponentFit triangle_excess_exponents(double p, TriangleBase base, const std::vector<double>& h_grid, double l) {
    if (h_grid.size() < 2) throw std::invalid_argument("triangle_excess_exponents: need at least two heights");
    ExponentFit f{0.0, 0.0, h_grid, {}};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(h_grid.size());
    for (double h : h_grid) {
        double e = triangle_excess(p, base, l, h);
        f.excess.push_back(e);
        double x = std::log(h / l), y = std::log(e / l);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.coefficient = std::exp((sy - f.slope * sx) / m);
    return f;
}

}  // namespace atsp
