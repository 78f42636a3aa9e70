#include "atsp/curve_builder.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

#include "atsp/moduli.hpp"

namespace atsp {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Rounding allowance for distance-to-line comparisons at scale rk.
double line_slack(double rk, double r0) { return 1e-12 * rk + 1e-13 * r0; }

// Level of first appearance and position in the finest level (V[k] are prefixes).
struct LevelIndex {
    std::vector<int> level_of;
    std::vector<std::size_t> pos_of;
};

LevelIndex index_levels(const NetSequenceData& D) {
    const std::size_t n = D.E().size();
    LevelIndex ix{std::vector<int>(n, INT_MAX), std::vector<std::size_t>(n, npos)};
    for (std::size_t k = 0; k < D.V.size(); ++k)
        for (std::size_t j = 0; j < D.V[k].size(); ++j) {
            std::size_t v = D.V[k][j];
            if (ix.level_of[v] == INT_MAX) {
                ix.level_of[v] = static_cast<int>(k);
                ix.pos_of[v] = j;
            }
        }
    return ix;
}

double line_param(const PointCloud& E, std::size_t i, const Line& L, const NormKernel& kern) {
    return detail::line_distance(E[i].data(), L.anchor().coords().data(), L.direction().coords().data(), E.dim(),
                                 kern)
        .t_star;
}

double line_dist(const PointCloud& E, std::size_t i, const Line& L, const NormKernel& kern) {
    return detail::line_distance(E[i].data(), L.anchor().coords().data(), L.direction().coords().data(), E.dim(),
                                 kern)
        .distance;
}

// Members of V_{level} within radius of E[v].
std::vector<std::size_t> level_ball(const SpatialGrid& grid, const LevelIndex& ix, const PointCloud& E,
                                    std::size_t v, double radius, int level) {
    std::vector<std::size_t> out;
    for (auto j : grid.within(E[v], radius))
        if (ix.level_of[j] <= level) out.push_back(j);
    return out;
}

double resolve_alpha0(const NetSequenceData& D, double alpha0) {
    double a0 = alpha0 > 0.0 ? alpha0 : D.alpha1();
    if (!(a0 < 1.0 / 6.0)) throw std::invalid_argument("alpha0 must be below 1/6");
    return a0;
}

FlatPairSet flat_pairs_impl(const NetSequenceData& D, const LevelIndex& ix, int k, double a0) {
    const PointCloud& E = D.E();
    FlatPairSet out{k, a0, {}};
    const double rk = D.rho.at(k) * D.r0;
    const double R = 14.0 * D.A_star * rk;
    const LpSpace sp(E.p(), E.dim());
    SpatialGrid grid(E, R);
    std::vector<std::size_t> verts(D.V[k]);
    std::sort(verts.begin(), verts.end());
    for (auto v : verts) {
        const std::size_t j = ix.pos_of[v];
        const double a = D.alpha[k][j];
        if (a >= a0) continue;
        auto members = level_ball(grid, ix, E, v, R, k);
        std::vector<LpVector> pts;
        std::size_t self = npos;
        for (std::size_t m = 0; m < members.size(); ++m) {
            if (members[m] == v) self = m;
            pts.push_back(E.vector(members[m]));
        }
        const double a_eff = std::min(a + line_slack(rk, D.r0) / rk, 0.166);
        auto ord = order_flat_set(pts, D.lines[k][j], rk, a_eff);
        auto it = std::find(ord.order.begin(), ord.order.end(), self);
        const std::size_t pos = static_cast<std::size_t>(it - ord.order.begin());
        auto consider = [&](std::size_t m, int side) {
            if (ord.params[m] == ord.params[self])
                throw std::logic_error("flat_pairs: two points share a projection parameter");
            double d = dist(pts[m], pts[self]);
            if (d >= rk * (1.0 - kBallSlack) && d < R) out.pairs.push_back({v, members[m], side});
        };
        if (pos > 0) consider(ord.order[pos - 1], -1);
        if (pos + 1 < ord.order.size()) consider(ord.order[pos + 1], +1);
    }
    return out;
}

std::vector<std::size_t> between_chain_impl(const NetSequenceData& D, const LevelIndex& ix, const SpatialGrid& grid,
                                            int k, const FlatPair& pr) {
    const PointCloud& E = D.E();
    NormKernel kern(E.p());
    const double rk = D.rho.at(k) * D.r0;
    const double R = 14.0 * D.A_star * rk;
    const Line& L = D.lines[k][ix.pos_of[pr.v]];
    const double tv = line_param(E, pr.v, L, kern), tw = line_param(E, pr.vp, L, kern);
    const double lo = std::min(tv, tw), hi = std::max(tv, tw);
    std::vector<std::pair<double, std::size_t>> sel;
    for (auto x : level_ball(grid, ix, E, pr.v, R, k + 1)) {
        double t = x == pr.v ? tv : x == pr.vp ? tw : line_param(E, x, L, kern);
        if (t >= lo && t <= hi) sel.push_back({t, x});
    }
    std::sort(sel.begin(), sel.end());
    if (tw < tv) std::reverse(sel.begin(), sel.end());
    std::vector<std::size_t> chain;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (i > 0 && sel[i].first == sel[i - 1].first)
            throw std::logic_error("between_chain: two points share a projection parameter");
        chain.push_back(sel[i].second);
    }
    return chain;
}

double excess_of_chain(const PointCloud& E, const std::vector<std::size_t>& chain, double s) {
    NormKernel kern(E.p());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) sum += std::pow(kern.dist(E[chain[i]], E[chain[i + 1]]), s);
    double d = kern.dist(E[chain.front()], E[chain.back()]);
    double ds = std::pow(d, s);
    return std::max(sum - ds, 0.0) / ds;
}

}  // namespace

AxiomViolation::AxiomViolation(std::string ax, int k_, std::size_t v_, const std::string& detail)
    : std::runtime_error("axiom " + ax + " fails at k=" + std::to_string(k_) +
                         (v_ == npos ? std::string() : ", v=" + std::to_string(v_)) + ": " + detail),
      axiom(std::move(ax)),
      k(k_),
      v(v_) {}

AxiomReport verify_axioms(const NetSequenceData& D) {
    const PointCloud& E = D.E();
    NormKernel kern(E.p());
    const std::size_t K = D.V.size();
    auto fail = [](const char* ax, int k, std::size_t v, const std::string& msg) {
        return AxiomReport{false, ax, k, v, msg};
    };
    if (K == 0 || D.rho.size() != K || D.alpha.size() != K || D.lines.size() != K)
        return fail("V0", -1, npos, "level arrays are empty or inconsistent");
    if (D.rho[0] != 1.0) return fail("V0", 0, npos, "rho_0 must be 1");
    for (std::size_t k = 0; k + 1 < K; ++k) {
        double lo = D.xi1 * D.rho[k], hi = D.xi2 * D.rho[k];
        if (D.rho[k + 1] < lo * (1.0 - kBallSlack) || D.rho[k + 1] > hi * (1.0 + kBallSlack))
            return fail("V0", static_cast<int>(k), npos, "rho_{k+1} outside [xi1 rho_k, xi2 rho_k]");
    }
    for (auto v : D.V[0])
        if (kern.dist(E[v], E[D.x0]) > D.C_star * D.r0 * (1.0 + kBallSlack))
            return fail("V1", 0, v, "outside B(x0, C* r0)");

    std::vector<char> mark(E.size(), 0);
    for (std::size_t k = 0; k + 1 < K; ++k) {
        for (auto v : D.V[k + 1]) mark[v] = 1;
        for (auto v : D.V[k])
            if (!mark[v]) return fail("V2", static_cast<int>(k), v, "missing from V_{k+1}");
        for (std::size_t j = 0; j < D.V[k].size(); ++j)
            if (D.V[k + 1][j] != D.V[k][j]) return fail("V2", static_cast<int>(k), D.V[k][j], "V_k is not a prefix of V_{k+1}");
        for (auto v : D.V[k + 1]) mark[v] = 0;
    }
    auto ix = index_levels(D);

    for (std::size_t k = 0; k < K; ++k) {
        const int ki = static_cast<int>(k);
        const double rk = D.rho[k] * D.r0;
        if (D.alpha[k].size() != D.V[k].size() || D.lines[k].size() != D.V[k].size())
            return fail("V5", ki, npos, "alpha/line arrays do not match V_k");
        {
            SpatialGrid grid(E, rk);
            for (auto v : D.V[k])
                for (auto j : level_ball(grid, ix, E, v, rk, ki))
                    if (j != v && kern.dist(E[v], E[j]) < rk * (1.0 - kBallSlack)) {
                        std::ostringstream os;
                        os << "|v - " << j << "| < rho_k r0";
                        return fail("V3", ki, v, os.str());
                    }
        }
        if (k + 1 == K) break;
        const double rk1 = D.rho[k + 1] * D.r0;
        {
            const double R = D.C_star * rk1;
            SpatialGrid grid(E, R);
            for (auto v : D.V[k + 1]) {
                if (ix.level_of[v] <= ki) continue;
                bool found = false;
                for (auto j : level_ball(grid, ix, E, v, R, ki))
                    if (kern.dist(E[v], E[j]) < R * (1.0 + kBallSlack)) {
                        found = true;
                        break;
                    }
                if (!found) return fail("V4", ki + 1, v, "no parent in V_k within C* rho_{k+1} r0");
            }
        }
        {
            const double R = 30.0 * D.A_star * rk;
            SpatialGrid grid(E, R);
            for (std::size_t j = 0; j < D.V[k].size(); ++j) {
                const std::size_t v = D.V[k][j];
                const double allowed = D.alpha[k][j] * rk1 * (1.0 + kBallSlack) + line_slack(rk, D.r0);
                for (auto x : level_ball(grid, ix, E, v, R, ki + 1)) {
                    double d = line_dist(E, x, D.lines[k][j], kern);
                    if (d > allowed) {
                        std::ostringstream os;
                        os << "point " << x << " at distance " << d << " > " << allowed << " from L_{k,v}";
                        return fail("V5", ki, v, os.str());
                    }
                }
            }
        }
    }
    return {};
}

NetSequenceData from_multiresolution(const PointCloud& E, const NetHierarchy& h, double A_G, const FitOptions& opt,
                                     FitCache* cache) {
    if (!(A_G >= 240.0) || !std::isfinite(A_G))
        throw std::invalid_argument("from_multiresolution: inflation factor must be at least 240");
    if (!h.points || h.points->size() != E.size() || h.points->dim() != E.dim() || h.points->p() != E.p())
        throw std::invalid_argument("from_multiresolution: hierarchy was built on a different set");
    const double dE = diameter(E);
    if (!(dE > 0.0)) throw std::invalid_argument("from_multiresolution: E needs two distinct points");
    const int k0 = diam_level(dE);
    if (h.k_min > k0 || h.k_max < k0)
        throw std::invalid_argument("from_multiresolution: hierarchy must contain level k0 = " + std::to_string(k0));

    FitCache local;
    FitCache& fc = cache ? *cache : local;
    const LpSpace sp(E.p(), E.dim());

    NetSequenceData D;
    D.points = h.points;
    D.k0 = k0;
    D.r0 = std::ldexp(1.0, -k0);
    D.A_G = A_G;
    const int K = h.k_max - k0;
    for (int k = 0; k <= K; ++k) {
        const auto n_k = static_cast<std::ptrdiff_t>(h.level_size(k0 + k));
        D.V.emplace_back(h.order.begin(), h.order.begin() + n_k);
        D.rho.push_back(std::ldexp(1.0, -k));
    }
    D.x0 = D.V[0].front();

    for (int k = 0; k <= K; ++k) {
        const double r = A_G * D.rho[k] * D.r0;
        SpatialGrid grid(E, r);
        std::vector<double> al, be;
        std::vector<Line> ls;
        for (auto v : D.V[k]) {
            auto idx = grid.within(E[v], r);
            double b = 0.0;
            if (idx.size() > 2) {
                const LineFit& f = fc.get(E, idx, opt);
                b = f.width / (2.0 * r);
                ls.emplace_back(LpVector(sp, f.anchor), LpVector(sp, f.direction));
            } else if (idx.size() == 2) {
                ls.push_back(Line::through(E.vector(idx[0]), E.vector(idx[1])));
            } else {
                ls.emplace_back(E.vector(v), LpVector::basis(sp, 0));
            }
            be.push_back(b);
            al.push_back(8.0 * A_G * b);
            D.ball_betas.push_back({k0 + k, v, r, b, idx.size()});
        }
        D.alpha.push_back(std::move(al));
        D.beta.push_back(std::move(be));
        D.lines.push_back(std::move(ls));
    }

    auto rep = verify_axioms(D);
    if (!rep.ok) throw AxiomViolation(rep.axiom, rep.k, rep.v, rep.message);
    return D;
}

FlatPairSet flat_pairs(const NetSequenceData& D, int k, double alpha0) {
    if (k < 0 || static_cast<std::size_t>(k) >= D.V.size()) throw std::out_of_range("flat_pairs: bad level");
    return flat_pairs_impl(D, index_levels(D), k, resolve_alpha0(D, alpha0));
}

std::vector<std::size_t> between_chain(const NetSequenceData& D, int k, const FlatPair& pair) {
    if (k < 0 || static_cast<std::size_t>(k) + 1 >= D.V.size())
        throw std::out_of_range("between_chain: level k needs a successor");
    const double R = 14.0 * D.A_star * D.rho[k] * D.r0;
    SpatialGrid grid(D.E(), R);
    return between_chain_impl(D, index_levels(D), grid, k, pair);
}

double variation_excess(const NetSequenceData& D, int k, const FlatPair& pair, double s) {
    if (!(s >= 1.0)) throw std::invalid_argument("variation_excess: s must be at least 1");
    return excess_of_chain(D.E(), between_chain(D, k, pair), s);
}

NetSums sums(const NetSequenceData& D, double s, double alpha0) {
    if (!(s >= 1.0)) throw std::invalid_argument("sums: s must be at least 1");
    const double a0 = resolve_alpha0(D, alpha0);
    const double p = D.E().p();
    auto ix = index_levels(D);
    NetSums out;
    out.s = s;
    out.alpha0 = a0;
    // Levels with a successor; the last level has no V_{k+1} to measure excess against.
    for (std::size_t k = 0; k + 1 < D.V.size(); ++k) {
        const int ki = static_cast<int>(k);
        const double rho = D.rho[k];
        for (std::size_t j = 0; j < D.V[k].size(); ++j) {
            const double a = D.alpha[k][j];
            out.S_V += a * rho;
            out.S_rho += rho_upper(p, 102.0 * a) * rho;
            if (a >= a0) {
                out.S_s += std::pow(rho, s);
                out.S_1 += rho;
                out.non_flat++;
            }
        }
        auto F = flat_pairs_impl(D, ix, ki, a0);
        if (F.pairs.empty()) continue;
        SpatialGrid grid(D.E(), 14.0 * D.A_star * rho * D.r0);
        for (const auto& pr : F.pairs) {
            auto chain = between_chain_impl(D, ix, grid, ki, pr);
            const double t1 = excess_of_chain(D.E(), chain, 1.0);
            const double ts = s == 1.0 ? t1 : excess_of_chain(D.E(), chain, s);
            out.S_s += ts * std::pow(rho, s);
            out.S_1 += t1 * rho;
            out.flat_pairs++;
            const double a = D.alpha[k][ix.pos_of[pr.v]];
            const double bound = 6.0 * a + 9.0 * a * a;
            if (t1 > bound * (1.0 + 1e-9) + 1e-12) out.tau1_ok = false;
            if (bound > 0.0) out.worst_tau1_ratio = std::max(out.worst_tau1_ratio, t1 / bound);
            else if (t1 > 0.0) out.worst_tau1_ratio = INFINITY;
        }
    }
    out.cross_ok = out.S_1 <= out.S_V / D.alpha1() * (1.0 + 1e-12) + 1e-15;
    return out;
}

double polyline_length(const PointCloud& E, const std::vector<std::size_t>& tour) {
    NormKernel kern(E.p());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < tour.size(); ++i) sum += kern.dist(E[tour[i]], E[tour[i + 1]]);
    return sum;
}

CurveBuild build_curve(const NetSequenceData& D, double alpha0) {
    const double a0 = resolve_alpha0(D, alpha0);
    const PointCloud& E = D.E();
    NormKernel kern(E.p());
    const std::size_t n = E.size();
    auto ix = index_levels(D);
    auto dd = [&](std::size_t a, std::size_t b) { return kern.dist(E[a], E[b]); };

    std::vector<std::size_t> next(n, npos), prev(n, npos), parent_of(n, npos);
    std::vector<int> round(n, -1);
    std::size_t head = D.V[0].front(), tail = head;
    CurveBuild out;

    auto link_after = [&](std::size_t a, std::size_t x) {
        std::size_t b = next[a];
        next[a] = x;
        prev[x] = a;
        next[x] = b;
        if (b != npos) prev[b] = x;
        else tail = x;
    };
    auto link_before = [&](std::size_t b, std::size_t x) {
        std::size_t a = prev[b];
        prev[b] = x;
        next[x] = b;
        prev[x] = a;
        if (a != npos) next[a] = x;
        else head = x;
    };
    auto edge_cost = [&](std::size_t a, std::size_t b, std::size_t x) { return dd(a, x) + dd(x, b) - dd(a, b); };

    // Cheapest of: edge before p, edge after p, or a free end at p.
    auto insert_near = [&](std::size_t p, std::size_t x) {
        double best = INFINITY;
        int choice = 0;
        if (prev[p] != npos) {
            double c = edge_cost(prev[p], p, x);
            if (c < best) best = c, choice = 1;
        }
        if (next[p] != npos) {
            double c = edge_cost(p, next[p], x);
            if (c < best) best = c, choice = 2;
        }
        if (prev[p] == npos) {
            double c = dd(p, x);
            if (c < best) best = c, choice = 3;
        }
        if (next[p] == npos) {
            double c = dd(p, x);
            if (c < best) best = c, choice = 4;
        }
        if (choice == 1 || choice == 3) link_before(p, x);
        else link_after(p, x);
    };

    // V_0: global cheapest insertion.
    for (std::size_t i = 1; i < D.V[0].size(); ++i) {
        const std::size_t x = D.V[0][i];
        double best = dd(head, x), attach = best;
        std::size_t at = npos;
        int how = 0;  // 0 prepend, 1 append, 2 inside after `at`
        if (dd(tail, x) <= best) best = dd(tail, x), attach = best, how = 1;
        for (std::size_t a = head; next[a] != npos; a = next[a]) {
            double c = edge_cost(a, next[a], x);
            if (c < best) best = c, at = a, how = 2, attach = std::min(dd(a, x), dd(next[a], x));
        }
        if (how == 0) link_before(head, x);
        else if (how == 1) link_after(tail, x);
        else link_after(at, x);
        out.max_attach = std::max(out.max_attach, attach);
        out.cheapest_insertions++;
    }

    for (std::size_t k = 0; k + 1 < D.V.size(); ++k) {
        const int ki = static_cast<int>(k);
        const double R = D.C_star * D.rho[k + 1] * D.r0;
        SpatialGrid grid(E, R);
        std::vector<std::size_t> fresh(D.V[k + 1].begin() + static_cast<std::ptrdiff_t>(D.V[k].size()), D.V[k + 1].end());
        std::sort(fresh.begin(), fresh.end());
        for (auto x : fresh) {
            std::size_t p = npos;
            double pd = INFINITY;
            for (auto c : level_ball(grid, ix, E, x, R, ki)) {
                double d = dd(c, x);
                if (d < pd || (d == pd && c < p)) pd = d, p = c;
            }
            if (p == npos)
                for (auto c : D.V[k]) {
                    double d = dd(c, x);
                    if (d < pd || (d == pd && c < p)) pd = d, p = c;
                }
            parent_of[x] = p;
            round[x] = ki + 1;

            const std::size_t pj = ix.pos_of[p];
            bool placed = false;
            if (D.alpha[k][pj] < a0) {
                const Line& L = D.lines[k][pj];
                auto t = [&](std::size_t y) { return line_param(E, y, L, kern); };
                const double tp = t(p), tx = t(x);
                const int sgn = tx > tp ? 1 : tx < tp ? -1 : 0;
                if (sgn != 0) {
                    auto toward = [&](std::size_t y) {
                        return y != npos && (t(y) - tp) * sgn > 0.0;
                    };
                    const bool fwd = toward(next[p]), bwd = toward(prev[p]);
                    int dir = 0;
                    if (fwd && bwd) dir = edge_cost(p, next[p], x) <= edge_cost(prev[p], p, x) ? 1 : -1;
                    else if (fwd) dir = 1;
                    else if (bwd) dir = -1;
                    else if (next[p] == npos) dir = 1;
                    else if (prev[p] == npos) dir = -1;
                    if (dir != 0) {
                        auto step = [&](std::size_t y) { return dir > 0 ? next[y] : prev[y]; };
                        // Walk past siblings already placed between p and x.
                        std::size_t cur = p, nb = step(p);
                        while (nb != npos && parent_of[nb] == p && round[nb] == ki + 1 &&
                               (t(nb) - tp) * sgn < (tx - tp) * sgn) {
                            cur = nb;
                            nb = step(cur);
                        }
                        if (dir > 0) link_after(cur, x);
                        else link_before(cur, x);
                        out.max_attach = std::max(out.max_attach, dd(cur, x));
                        out.flat_insertions++;
                        placed = true;
                    }
                }
            }
            if (!placed) {
                insert_near(p, x);
                out.max_attach = std::max(out.max_attach, pd);
                out.cheapest_insertions++;
            }
        }
    }

    for (std::size_t a = head; a != npos; a = next[a]) out.tour.push_back(a);
    out.length = polyline_length(E, out.tour);
    out.ceiling = static_cast<double>(out.tour.size()) * 2.0 * out.max_attach;
    return out;
}

CertificateReport certificate_check(const PointCloud& E, double A_G, double s_exponent,
                                    const CertificateOptions& opt) {
    if (!(s_exponent > 0.0)) throw std::invalid_argument("certificate_check: exponent must be positive");
    CertificateReport R;
    R.diam = diameter(E);
    if (!(R.diam > 0.0)) throw std::invalid_argument("certificate_check: E needs two distinct points");
    R.k0 = diam_level(R.diam);
    R.s_exponent = s_exponent;
    R.points = E.size();

    int k_max = opt.k_max;
    auto h = build_nets(E, R.k0, opt.k_max != INT_MIN ? opt.k_max : R.k0 + opt.max_levels, opt.seed);
    if (k_max == INT_MIN) {
        // Once X_ks = E the points are 2^-ks separated, so windows of radius
        // A_G 2^-k < 2^-ks hold one point and contribute nothing further.
        k_max = h.k_max;
        for (int k = R.k0; k <= h.k_max; ++k)
            if (h.level_size(k) == E.size()) {
                k_max = std::min(h.k_max, k + static_cast<int>(std::ceil(std::log2(A_G))) + 1);
                break;
            }
        h.prefix.resize(static_cast<std::size_t>(k_max - h.k_min + 1));
        h.k_max = k_max;
    }
    R.k_max = k_max;

    FitCache cache;
    auto D = from_multiresolution(E, h, A_G, opt.fit, &cache);
    R.axioms = verify_axioms(D);
    R.sums = sums(D, 1.0);
    auto C = build_curve(D);
    R.length = C.length;
    R.tour_points = C.tour.size();
    R.covers_all = C.tour.size() == E.size();
    R.tour = std::move(C.tour);
    auto J = jones_sum_from(D.ball_betas, R.diam, A_G, R.k0, s_exponent, k_max);
    R.jones = J.total;
    R.ratio = R.length / R.jones;
    return R;
}

}  // namespace atsp
