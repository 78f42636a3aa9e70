#include "atsp/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "atsp/nets.hpp"
#include "atsp/projections.hpp"

namespace atsp {

namespace {

std::size_t edges_of(const PointCloud& path) {
    if (path.size() < 2) throw std::invalid_argument("arc: path needs at least two vertices");
    return path.size() - 1;
}

std::size_t param_to_index(const PointCloud& path, double t) {
    const double N = static_cast<double>(edges_of(path));
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("arc: parameter outside [0, 1]");
    double x = t * N;
    double r = std::round(x);
    if (std::fabs(x - r) > 1e-9 * std::max(1.0, N)) throw std::invalid_argument("arc: parameter off the vertex grid");
    return static_cast<std::size_t>(r);
}

double seg_dist(std::span<const double> x, std::span<const double> a, std::span<const double> b,
                const NormKernel& k) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = b[i] - a[i];
    return detail::segment_distance(x.data(), a.data(), d.data(), n, k).distance;
}

bool le_slack(double lhs, double rhs, double scale) { return lhs <= rhs * (1.0 + 1e-12) + 1e-15 * scale; }

}  // namespace

double Arc::a() const { return static_cast<double>(lo) / static_cast<double>(edges_of(*path)); }
double Arc::b() const { return static_cast<double>(hi) / static_cast<double>(edges_of(*path)); }

PointCloud Arc::image() const {
    std::vector<std::size_t> idx(vertex_count());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = lo + i;
    return path->subset(idx);
}

double Arc::edge_length() const { return NormKernel(path->p()).dist(start(), end()); }

Arc make_arc(const PointCloud& path, std::size_t lo, std::size_t hi) {
    if (!(lo < hi) || hi > edges_of(path)) throw std::invalid_argument("arc: need lo < hi <= #edges");
    return Arc{&path, lo, hi};
}

Arc arc_from_params(const PointCloud& path, double a, double b) {
    return make_arc(path, param_to_index(path, a), param_to_index(path, b));
}

int four_adic_depth(const PointCloud& path) {
    std::size_t e = edges_of(path);
    int N = 0;
    while (e % 4 == 0) {
        e /= 4;
        ++N;
    }
    if (e != 1) throw std::invalid_argument("filtration: edge count is not a power of 4");
    return N;
}

Arc dyadic_arc(const PointCloud& path, int level, std::size_t j) {
    const int N = four_adic_depth(path);
    if (level < 0 || level > N) throw std::invalid_argument("dyadic_arc: level outside 0..N");
    const std::size_t len = std::size_t{1} << (2 * (N - level));
    if (j >= (std::size_t{1} << (2 * level))) throw std::invalid_argument("dyadic_arc: index out of range");
    return make_arc(path, j * len, (j + 1) * len);
}

std::vector<Arc> children(const Arc& tau) {
    const std::size_t e = tau.hi - tau.lo;
    if (e % 4 != 0) throw std::invalid_argument("children: edge count not divisible by 4");
    const std::size_t q = e / 4;
    std::vector<Arc> out;
    for (std::size_t i = 0; i < 4; ++i) out.push_back(Arc{tau.path, tau.lo + i * q, tau.lo + (i + 1) * q});
    return out;
}

double arc_diam(const Arc& tau) { return diameter(tau.image()); }

double arc_variation(const Arc& tau) {
    NormKernel k(tau.path->p());
    double s = 0.0;
    for (std::size_t i = tau.lo; i < tau.hi; ++i) s += k.dist((*tau.path)[i], (*tau.path)[i + 1]);
    return s;
}

ArcBetaTilde arc_beta_tilde(const Arc& tau) {
    ArcBetaTilde r;
    r.diam = arc_diam(tau);
    if (r.diam == 0.0) {
        r.degenerate = true;
        r.witness = tau.lo;
        return r;
    }
    NormKernel k(tau.path->p());
    double best = 0.0;
    r.witness = tau.lo;
    for (std::size_t i = tau.lo; i <= tau.hi; ++i) {
        double v = seg_dist((*tau.path)[i], tau.start(), tau.end(), k);
        if (v > best) {
            best = v;
            r.witness = i;
        }
    }
    r.value = best / r.diam;
    return r;
}

double arc_beta(const Arc& tau, const FitOptions& opt) {
    ArcBetaTilde bt = arc_beta_tilde(tau);
    if (bt.degenerate) return 0.0;
    PointCloud img = tau.image();
    std::vector<std::size_t> idx(img.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    FitOptions o = opt;
    o.chord_first = 0;
    o.chord_last = static_cast<int>(img.size() - 1);
    double b = fit_line_minmax(img, idx, o).width / bt.diam;
    if (b > bt.value * (1.0 + 1e-12) + 1e-15)
        throw std::logic_error("arc_beta: line fit exceeds the arc beta number");
    return std::min(b, bt.value);
}

double curve_pseudometric(const PointCloud& path, double a, double b) {
    if (a > b) throw std::invalid_argument("curve_pseudometric: need a <= b");
    std::size_t i = param_to_index(path, a), j = param_to_index(path, b);
    if (i == j) return 0.0;
    return arc_diam(make_arc(path, i, j));
}

double delta_excess(const Arc& tau, const std::vector<Arc>& kids) {
    if (kids.empty()) throw std::invalid_argument("delta_excess: no children");
    std::size_t at = tau.lo;
    for (const Arc& c : kids) {
        if (c.path != tau.path || c.lo != at || c.hi <= c.lo)
            throw std::invalid_argument("delta_excess: children do not tile the arc");
        at = c.hi;
    }
    if (at != tau.hi) throw std::invalid_argument("delta_excess: children do not tile the arc");
    double s = 0.0;
    for (const Arc& c : kids) s += c.edge_length();
    return s - tau.edge_length();
}

double discretized_edge_distance(const Arc& tau, const std::vector<Arc>& kids) {
    NormKernel k(tau.path->p());
    double d = 0.0;
    for (const Arc& c : kids) {
        d = std::max(d, seg_dist(c.start(), tau.start(), tau.end(), k));
        d = std::max(d, seg_dist(c.end(), tau.start(), tau.end(), k));
    }
    return d;
}

double edge_excess(const Arc& inner, const Arc& outer) {
    NormKernel k(outer.path->p());
    return std::max(seg_dist(inner.start(), outer.start(), outer.end(), k),
                    seg_dist(inner.end(), outer.start(), outer.end(), k));
}

Filtration make_filtration(const PointCloud& path, int n0, int n1, double rho) {
    Filtration F;
    F.path = &path;
    F.depth = four_adic_depth(path);
    if (n0 < 0 || n1 < n0 || n1 + 1 > F.depth)
        throw std::invalid_argument("filtration: need 0 <= n0 <= n1 < N (children are required)");
    if (!(rho > 1.0)) throw std::invalid_argument("filtration: rho must exceed 1");
    F.n0 = n0;
    F.n1 = n1;
    F.rho = rho;
    F.A_upper = 0.0;
    F.A_lower = INFINITY;
    for (int m = n0; m < F.depth; ++m) {
        std::vector<Arc> lv;
        std::vector<double> dm;
        const std::size_t count = std::size_t{1} << (2 * m);
        for (std::size_t j = 0; j < count; ++j) {
            lv.push_back(dyadic_arc(path, m, j));
            dm.push_back(arc_diam(lv.back()));
            double scaled = dm.back() * std::pow(rho, m);
            F.A_upper = std::max(F.A_upper, scaled);
            F.A_lower = std::min(F.A_lower, scaled);
        }
        F.levels.push_back(std::move(lv));
        F.diams.push_back(std::move(dm));
    }
    return F;
}

AxiomCheck check_filtration_axioms(const Filtration& F) {
    AxiomCheck r;
    auto fail = [&](const std::string& m) {
        if (r.ok) r.message = m;
        r.ok = false;
    };
    const std::size_t total = F.path->size() - 1;
    for (std::size_t L = 0; L < F.levels.size(); ++L) {
        const auto& lv = F.levels[L];
        const int m = F.n0 + static_cast<int>(L);
        // partitioning and trivial overlaps: consecutive, sharing only endpoints
        if (lv.empty() || lv.front().lo != 0 || lv.back().hi != total) fail("level " + std::to_string(m) + " does not cover [0,1]");
        for (std::size_t j = 0; j + 1 < lv.size(); ++j)
            if (lv[j].hi != lv[j + 1].lo) fail("level " + std::to_string(m) + " arcs overlap or leave a gap");
        // tree structure: unique parent
        if (L > 0) {
            const auto& up = F.levels[L - 1];
            for (const Arc& a : lv) {
                int parents = 0;
                for (const Arc& b : up)
                    if (b.lo <= a.lo && a.hi <= b.hi) ++parents;
                if (parents != 1) fail("arc without a unique parent at level " + std::to_string(m));
            }
        }
        for (double d : F.diams[L])
            if (!(d > 0.0)) fail("degenerate arc at level " + std::to_string(m));
    }
    if (!(F.A_lower > 0.0) || !(F.A_lower <= F.A_upper)) fail("geometric diameter constants invalid");
    return r;
}

FiltrationReport verify_filtration(const PointCloud& path, int n0, int n1, double p_convexity, double c, double rho,
                                   bool with_beta) {
    if (!(p_convexity >= 2.0)) throw std::invalid_argument("verify_filtration: convexity power must be >= 2");
    if (!(c > 0.0)) throw std::invalid_argument("verify_filtration: c must be positive");
    Filtration F = make_filtration(path, n0, n1, rho);
    FiltrationReport R;
    R.n0 = n0;
    R.n1 = n1;
    R.depth = F.depth;
    R.p = p_convexity;
    R.c = c;
    R.rho = rho;
    R.A_upper = F.A_upper;
    R.A_lower = F.A_lower;
    const double p = p_convexity;
    R.K = std::pow(2.0 * c, -1.0 / p) * std::pow(F.A_upper / F.A_lower, (p - 1.0) / p) /
          (1.0 - std::pow(rho, (1.0 - p) / p));
    AxiomCheck ax = check_filtration_axioms(F);
    R.axioms_ok = ax.ok;
    R.axioms_message = ax.message;

    // Per-arc quantities for every level n0..N-1.
    const std::size_t nl = F.levels.size();
    std::vector<std::vector<double>> dval(nl), delta(nl), btil(nl);
    for (std::size_t L = 0; L < nl; ++L) {
        for (const Arc& a : F.levels[L]) {
            auto kids = children(a);
            dval[L].push_back(discretized_edge_distance(a, kids));
            delta[L].push_back(delta_excess(a, kids));
            btil[L].push_back(arc_beta_tilde(a).value);
        }
    }
    // Level-n0 edge lengths and variations.
    double var0 = 0.0, edges0 = 0.0;
    for (const Arc& a : F.levels[0]) {
        var0 += arc_variation(a);
        edges0 += a.edge_length();
    }
    R.var_minus_edges = var0 - edges0;
    for (std::size_t L = 0; L < nl; ++L)
        for (double v : delta[L]) {
            R.delta_sum += v;
            if (v < -1e-15 * var0) R.delta_nonneg = false;
        }
    // Both sides are differences of O(var0) sums over every edge; allow for their rounding.
    R.delta_sum_ok = R.delta_sum <= R.var_minus_edges + 1e-12 * var0;

    double Ip = 0.0;
    for (int m = n0; m <= n1; ++m) {
        const std::size_t L = static_cast<std::size_t>(m - n0);
        for (std::size_t j = 0; j < F.levels[L].size(); ++j) {
            ArcRecord a;
            a.level = m;
            a.index = j;
            a.diam = F.diams[L][j];
            a.delta = delta[L][j];
            a.d = dval[L][j];
            a.beta_tilde = btil[L][j];
            a.excess_lhs = 2.0 * c * std::pow(a.d, p) / std::pow(a.diam, p - 1.0);
            a.excess_ok = le_slack(a.excess_lhs, a.delta, a.diam);
            if (a.delta > 0.0) R.excess_worst_ratio = std::max(R.excess_worst_ratio, a.excess_lhs / a.delta);
            else if (a.excess_lhs > 0.0) R.excess_worst_ratio = INFINITY;
            if (!a.excess_ok) ++R.excess_failures;
            // Maximal-descendant chain down to level N-1.
            double s = 0.0;
            for (std::size_t LL = L; LL < nl; ++LL) {
                const std::size_t span = std::size_t{1} << (2 * (LL - L));
                double mx = 0.0;
                for (std::size_t q = j * span; q < (j + 1) * span; ++q) mx = std::max(mx, dval[LL][q]);
                s += mx;
            }
            a.dsum = s;
            a.dsum_ok = le_slack(a.beta_tilde * a.diam, s, a.diam);
            if (!a.dsum_ok) ++R.dsum_failures;
            if (with_beta) {
                a.beta = arc_beta(F.levels[L][j]);
                if (a.beta > a.beta_tilde * (1.0 + 1e-12) + 1e-15) R.beta_le_beta_tilde = false;
            }
            Ip += std::pow(a.beta_tilde, p) * a.diam;
            R.arcs.push_back(a);
        }
    }
    R.I = std::pow(Ip, 1.0 / p);
    R.I_bound = R.K * std::pow(std::max(R.var_minus_edges, 0.0), 1.0 / p);
    R.aggregate_ok = le_slack(R.I, R.I_bound, R.I_bound);
    R.ok = R.axioms_ok && R.excess_failures == 0 && R.dsum_failures == 0 && R.delta_nonneg && R.delta_sum_ok &&
           R.aggregate_ok && R.beta_le_beta_tilde;
    return R;
}

}  // namespace atsp
