#include "atsp/beta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <gsl/gsl_multimin.h>

namespace atsp {

Ball::Ball(LpVector center, double radius) : center_(std::move(center)), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("Ball: radius must be positive");
}

std::vector<std::size_t> ball_members(const PointCloud& E, std::span<const double> center, double radius) {
    NormKernel k(E.p());
    std::vector<std::size_t> out;
    const double lim = radius * (1.0 + kBallSlack);
    for (std::size_t i = 0; i < E.size(); ++i)
        if (k.dist(E[i], center) <= lim) out.push_back(i);
    return out;
}

double sup_distance(const PointCloud& P, const std::vector<std::size_t>& idx, std::span<const double> anchor,
                    std::span<const double> direction) {
    NormKernel k(P.p());
    double s = 0.0;
    for (std::size_t i : idx)
        s = std::max(s, detail::line_distance(P[i].data(), anchor.data(), direction.data(), P.dim(), k).distance);
    return s;
}

namespace {

// Local working copy: points translated to the first point and scaled to unit size.
struct Work {
    std::size_t n = 0;  // ambient dimension
    std::size_t k = 0;  // number of points
    std::vector<double> x;
    std::vector<double> origin;
    double scale = 1.0;
    const double* pt(std::size_t i) const { return x.data() + i * n; }
};

Work make_work(const PointCloud& P, const std::vector<std::size_t>& idx) {
    Work w;
    w.n = P.dim();
    w.k = idx.size();
    w.origin.assign(P[idx[0]].begin(), P[idx[0]].end());
    NormKernel nk(P.p());
    double s = 0.0;
    for (std::size_t i : idx) s = std::max(s, nk.dist(P[i], w.origin));
    w.scale = s > 0.0 ? s : 1.0;
    w.x.resize(w.k * w.n);
    for (std::size_t a = 0; a < w.k; ++a)
        for (std::size_t j = 0; j < w.n; ++j) w.x[a * w.n + j] = (P[idx[a]][j] - w.origin[j]) / w.scale;
    return w;
}

void normalize(std::vector<double>& d, const NormKernel& k) {
    double nd = k.norm(d);
    for (double& v : d) v /= nd;
}

double sup_local(const Work& w, const std::vector<std::size_t>& which, const double* a, const double* d,
                 const NormKernel& k) {
    double s = 0.0;
    for (std::size_t i : which) s = std::max(s, detail::line_distance(w.pt(i), a, d, w.n, k).distance);
    return s;
}

std::vector<double> all_dists(const Work& w, const double* a, const double* d, const NormKernel& k) {
    std::vector<double> out(w.k);
    for (std::size_t i = 0; i < w.k; ++i) out[i] = detail::line_distance(w.pt(i), a, d, w.n, k).distance;
    return out;
}

// Exact planar fit: for any norm on R^2 the optimal line is parallel to an edge
// of the convex hull, and for a fixed direction the best offset is the midline
// of the supporting strip. Strip half-width = phi-width / (2 |phi|_{p'}).
void fit_planar(const Work& w, const NormKernel& k, LineFit& out) {
    std::vector<std::size_t> ord(w.k);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        const double *pa = w.pt(a), *pb = w.pt(b);
        return pa[0] < pb[0] || (pa[0] == pb[0] && pa[1] < pb[1]);
    });
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double *po = w.pt(o), *pa = w.pt(a), *pb = w.pt(b);
        return (pa[0] - po[0]) * (pb[1] - po[1]) - (pa[1] - po[1]) * (pb[0] - po[0]);
    };
    std::vector<std::size_t> H(2 * w.k);
    std::size_t h = 0;
    for (std::size_t i = 0; i < w.k; ++i) {
        while (h >= 2 && cross(H[h - 2], H[h - 1], ord[i]) <= 0) --h;
        H[h++] = ord[i];
    }
    for (std::size_t i = w.k - 1, t = h + 1; i-- > 0;) {
        while (h >= t && cross(H[h - 2], H[h - 1], ord[i]) <= 0) --h;
        H[h++] = ord[i];
    }
    H.resize(h > 1 ? h - 1 : h);
    const std::size_t m = H.size();
    const double pp = conjugate_exponent(k.p);
    NormKernel dual(pp);

    double best = INFINITY;
    std::size_t bi = 0, bj = 0;
    if (m < 3) {
        // All points collinear.
        std::size_t a = ord.front(), b = ord.back();
        out.direction = {w.pt(b)[0] - w.pt(a)[0], w.pt(b)[1] - w.pt(a)[1]};
        if (out.direction[0] == 0.0 && out.direction[1] == 0.0) out.direction = {1.0, 0.0};
        normalize(out.direction, k);
        out.anchor = {w.pt(a)[0], w.pt(a)[1]};
        out.method = "planar-hull-exact";
        return;
    }
    std::size_t j = 1;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t i1 = (i + 1) % m;
        const double* a = w.pt(H[i]);
        double ex = w.pt(H[i1])[0] - a[0], ey = w.pt(H[i1])[1] - a[1];
        auto phi = [&](std::size_t q) {
            const double* z = w.pt(H[q]);
            return ex * (z[1] - a[1]) - ey * (z[0] - a[0]);
        };
        if (j == i) j = i1;
        while (phi((j + 1) % m) > phi(j)) j = (j + 1) % m;
        std::array<double, 2> coef{-ey, ex};
        double width = phi(j) / (2.0 * dual.norm(coef));
        if (width < best) {
            best = width;
            bi = i;
            bj = j;
        }
    }
    const double* a = w.pt(H[bi]);
    const double* b = w.pt(H[(bi + 1) % m]);
    const double* far = w.pt(H[bj]);
    out.direction = {b[0] - a[0], b[1] - a[1]};
    normalize(out.direction, k);
    out.anchor = {a[0] + 0.5 * (far[0] - a[0]), a[1] + 0.5 * (far[1] - a[1])};
    out.method = "planar-hull-exact";
}

// Smoothed minimax: F = mu log sum exp(f_i / mu) over the active points,
// with f_i = dist(x_i, a + R d). By the envelope theorem the gradient of f_i
// is -g_i in a and -t_i g_i in d, where g_i is the norm gradient at the
// residual. The dominant coordinate of d and of a stay fixed.
// A stage stops after this many iterations that each gain less than
// kFlatTol * mu. Tuned for about 1e-5 relative accuracy of the sup.
constexpr double kFlatTol = 1e-4;
constexpr int kFlatCount = 5;

struct SmoothCtx {
    const Work* w;
    const NormKernel* k;
    const std::vector<std::size_t>* active;
    std::vector<double> a0, d0;
    std::vector<std::size_t> free_coords;
    double mu = 1.0;
    // scratch
    std::vector<double> a, d, f, t, g;
    // best exact sup seen on the active set
    double best = INFINITY;
    std::vector<double> best_a, best_d;
};

void unpack(const gsl_vector* v, SmoothCtx& c) {
    const std::size_t m = c.free_coords.size();
    c.a = c.a0;
    c.d = c.d0;
    for (std::size_t j = 0; j < m; ++j) {
        c.d[c.free_coords[j]] += gsl_vector_get(v, j);
        c.a[c.free_coords[j]] += gsl_vector_get(v, m + j);
    }
}

// Fills f, t and (if want_grad) the residual gradients g (row per active point).
void eval_points(SmoothCtx& c, bool want_grad) {
    const Work& w = *c.w;
    const std::size_t n = w.n, na = c.active->size();
    const bool warm = c.t.size() == na;
    c.f.resize(na);
    c.t.resize(na);
    if (want_grad) c.g.assign(na * n, 0.0);
    const double p = c.k->p;
    std::vector<double> r(n);
    for (std::size_t q = 0; q < na; ++q) {
        const double* x = w.pt((*c.active)[q]);
        auto ld = warm ? detail::line_distance_warm(x, c.a.data(), c.d.data(), n, *c.k, c.t[q])
                       : detail::line_distance(x, c.a.data(), c.d.data(), n, *c.k);
        c.f[q] = ld.distance;
        c.t[q] = ld.t_star;
        if (!want_grad || ld.distance == 0.0) continue;
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = x[j] - c.a[j] - ld.t_star * c.d[j];
            m = std::max(m, std::fabs(r[j]));
        }
        if (m == 0.0) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += c.k->pow_p(r[j] / m);
        double nr = std::pow(s, 1.0 / p);  // |r| / m
        for (std::size_t j = 0; j < n; ++j) c.g[q * n + j] = c.k->psi(r[j] / (m * nr));
    }
    double mx = 0.0;
    for (double v : c.f) mx = std::max(mx, v);
    if (mx < c.best) {
        c.best = mx;
        c.best_a = c.a;
        c.best_d = c.d;
    }
}

double smooth_value(SmoothCtx& c, std::vector<double>* weights) {
    double mx = 0.0;
    for (double v : c.f) mx = std::max(mx, v);
    double s = 0.0;
    if (weights) weights->resize(c.f.size());
    for (std::size_t q = 0; q < c.f.size(); ++q) {
        double e = std::exp((c.f[q] - mx) / c.mu);
        s += e;
        if (weights) (*weights)[q] = e;
    }
    if (weights)
        for (double& e : *weights) e /= s;
    return mx + c.mu * std::log(s);
}

double sm_f(const gsl_vector* v, void* params) {
    auto& c = *static_cast<SmoothCtx*>(params);
    unpack(v, c);
    eval_points(c, false);
    return smooth_value(c, nullptr);
}

void sm_fdf(const gsl_vector* v, void* params, double* fv, gsl_vector* grad) {
    auto& c = *static_cast<SmoothCtx*>(params);
    unpack(v, c);
    eval_points(c, true);
    std::vector<double> wts;
    double F = smooth_value(c, &wts);
    if (fv) *fv = F;
    const std::size_t n = c.w->n, m = c.free_coords.size();
    gsl_vector_set_zero(grad);
    for (std::size_t q = 0; q < c.f.size(); ++q) {
        if (wts[q] < 1e-300) continue;
        for (std::size_t j = 0; j < m; ++j) {
            double gj = c.g[q * n + c.free_coords[j]];
            *gsl_vector_ptr(grad, j) -= wts[q] * c.t[q] * gj;
            *gsl_vector_ptr(grad, m + j) -= wts[q] * gj;
        }
    }
}

void sm_df(const gsl_vector* v, void* params, gsl_vector* grad) { sm_fdf(v, params, nullptr, grad); }

// Continuation in mu from mu_hi to mu_lo (relative to the current sup).
// Returns the best exact sup over the active set and the witness attaining it.
double refine(const Work& w, const NormKernel& k, const std::vector<std::size_t>& active, std::vector<double>& a,
              std::vector<double>& d, double mu_hi, double mu_lo) {
    SmoothCtx c;
    c.w = &w;
    c.k = &k;
    c.active = &active;
    std::size_t dom = 0;
    for (std::size_t j = 1; j < w.n; ++j)
        if (std::fabs(d[j]) > std::fabs(d[dom])) dom = j;
    // Dominant coordinate of d set to 1 so the free part is well scaled.
    c.d0 = d;
    for (double& v : c.d0) v /= d[dom];
    c.a0 = a;
    for (std::size_t j = 0; j < w.n; ++j)
        if (j != dom) c.free_coords.push_back(j);
    const std::size_t dimv = 2 * c.free_coords.size();

    gsl_vector* x = gsl_vector_calloc(dimv);
    unpack(x, c);
    eval_points(c, false);
    if (c.best > 0.0) {
        gsl_multimin_function_fdf fn{&sm_f, &sm_df, &sm_fdf, dimv, &c};
        gsl_multimin_fdfminimizer* s =
            gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dimv);
        const double sup0 = c.best;
        for (double mu = mu_hi * sup0; mu >= mu_lo * c.best * 0.999; mu *= 0.1) {
            c.mu = mu;
            gsl_multimin_fdfminimizer_set(s, &fn, x, 0.1 * c.best, 0.1);
            double prev = gsl_multimin_fdfminimizer_minimum(s);
            int flat = 0;
            for (int it = 0; it < 40 + 10 * static_cast<int>(dimv); ++it) {
                if (gsl_multimin_fdfminimizer_iterate(s)) break;
                double F = gsl_multimin_fdfminimizer_minimum(s);
                // Only the value matters, and only to within mu.
                flat = prev - F < kFlatTol * mu ? flat + 1 : 0;
                prev = F;
                if (flat >= kFlatCount) break;
                if (gsl_multimin_test_gradient(gsl_multimin_fdfminimizer_gradient(s), 1e-6 * mu) == GSL_SUCCESS)
                    break;
            }
            gsl_vector_memcpy(x, gsl_multimin_fdfminimizer_x(s));
        }
        gsl_multimin_fdfminimizer_free(s);
    }
    gsl_vector_free(x);
    a = c.best_a;
    d = c.best_d;
    normalize(d, k);
    return c.best;
}

// Active-set refinement: optimize over the points currently farthest from the
// line and re-check the full set until no other point exceeds the sup.
double refine_active(const Work& w, const NormKernel& k, std::vector<double>& a, std::vector<double>& d,
                     const std::vector<std::size_t>& seed_points, double mu_hi, double mu_lo) {
    std::vector<double> dists = all_dists(w, a.data(), d.data(), k);
    double full = *std::max_element(dists.begin(), dists.end());
    std::vector<char> in(w.k, 0);
    std::vector<std::size_t> active;
    auto add_top = [&](std::size_t count) {
        std::vector<std::size_t> ord(w.k);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) { return dists[x] > dists[y]; });
        std::size_t added = 0;
        for (std::size_t i : ord) {
            if (added >= count) break;
            if (!in[i]) {
                in[i] = 1;
                active.push_back(i);
                ++added;
            }
        }
    };
    for (std::size_t i : seed_points)
        if (!in[i]) {
            in[i] = 1;
            active.push_back(i);
        }
    add_top(w.k <= 16 ? w.k : 12);
    for (int round = 0; round < 16; ++round) {
        std::vector<double> ta = a, td = d;
        double act = refine(w, k, active, ta, td, round == 0 ? mu_hi : std::max(mu_lo, 1e-3 * mu_hi), mu_lo);
        std::vector<double> nd = all_dists(w, ta.data(), td.data(), k);
        double nfull = *std::max_element(nd.begin(), nd.end());
        if (nfull < full) {
            full = nfull;
            a = ta;
            d = td;
        }
        if (nfull <= act * (1.0 + 1e-12) + 1e-15 || active.size() == w.k) break;
        dists = nd;
        add_top(8);
    }
    return full;
}

// inf_L sup_c dist(c, L) >= w_lb where, for the chord a-b,
// H <= w (2 + 2 (R + 2w) / (D - 2w)) with H = max dist(c, line ab),
// R = max |c - a|, D = |a - b|. Holds in every normed space.
double chord_lower_bound(const Work& w, const NormKernel& k, std::size_t ia, std::size_t ib) {
    const double* a = w.pt(ia);
    const double* b = w.pt(ib);
    std::vector<double> dir(w.n);
    for (std::size_t j = 0; j < w.n; ++j) dir[j] = b[j] - a[j];
    double D = k.norm(dir);
    if (D == 0.0) return 0.0;
    double H = 0.0, R = 0.0;
    for (std::size_t i = 0; i < w.k; ++i) {
        H = std::max(H, detail::line_distance(w.pt(i), a, dir.data(), w.n, k).distance);
        R = std::max(R, k.dist({w.pt(i), w.n}, {a, w.n}));
    }
    if (H == 0.0) return 0.0;
    auto g = [&](double x) { return x * (2.0 + 2.0 * (R + 2.0 * x) / (D - 2.0 * x)); };
    double lo = 0.0, hi = 0.5 * D;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * D; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < H)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::pair<std::size_t, std::size_t> diameter_pair(const Work& w, const NormKernel& k) {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    if (w.k <= 2000) {
        for (std::size_t i = 0; i < w.k; ++i)
            for (std::size_t j = i + 1; j < w.k; ++j) {
                double d = k.dist({w.pt(i), w.n}, {w.pt(j), w.n});
                if (d > best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        return {bi, bj};
    }
    // Repeated farthest-point sweeps.
    std::size_t cur = 0;
    for (int sweep = 0; sweep < 4; ++sweep) {
        std::size_t far = cur;
        double fd = -1.0;
        for (std::size_t i = 0; i < w.k; ++i) {
            double d = k.dist({w.pt(i), w.n}, {w.pt(cur), w.n});
            if (d > fd) {
                fd = d;
                far = i;
            }
        }
        if (fd > best) {
            best = fd;
            bi = cur;
            bj = far;
        }
        cur = far;
    }
    return {std::min(bi, bj), std::max(bi, bj)};
}

std::vector<std::size_t> farthest_subsample(const Work& w, const NormKernel& k, std::size_t start, std::size_t m) {
    std::vector<std::size_t> S{start};
    std::vector<double> dmin(w.k, INFINITY);
    while (S.size() < std::min(m, w.k)) {
        std::size_t last = S.back();
        std::size_t far = 0;
        double fd = -1.0;
        for (std::size_t i = 0; i < w.k; ++i) {
            dmin[i] = std::min(dmin[i], k.dist({w.pt(i), w.n}, {w.pt(last), w.n}));
            if (dmin[i] > fd) {
                fd = dmin[i];
                far = i;
            }
        }
        if (fd <= 0.0) break;
        S.push_back(far);
    }
    return S;
}

}  // namespace

LineFit fit_line_minmax(const PointCloud& P, const std::vector<std::size_t>& idx, const FitOptions& opt) {
    LineFit out;
    const std::size_t n = P.dim();
    if (idx.empty()) {
        out.anchor.assign(n, 0.0);
        out.direction.assign(n, 0.0);
        out.direction[0] = 1.0;
        out.method = "empty";
        return out;
    }
    Work w = make_work(P, idx);
    NormKernel k(P.p());
    auto finish = [&](LineFit& f, double lower_local) {
        // Back to original coordinates.
        for (std::size_t j = 0; j < n; ++j) f.anchor[j] = w.origin[j] + w.scale * f.anchor[j];
        f.width = sup_distance(P, idx, f.anchor, f.direction);
        f.lower = std::min(f.width, lower_local * w.scale);
    };

    if (w.k <= 2) {
        std::size_t b = w.k == 2 ? 1 : 0;
        out.anchor.assign(w.pt(0), w.pt(0) + n);
        out.direction.assign(w.pt(b), w.pt(b) + n);
        bool zero = std::all_of(out.direction.begin(), out.direction.end(), [](double v) { return v == 0.0; });
        if (zero) out.direction[0] = 1.0;
        normalize(out.direction, k);
        out.method = "exact-pair";
        finish(out, 0.0);
        out.lower = 0.0;
        return out;
    }

    if (n == 2) {
        fit_planar(w, k, out);
        finish(out, 0.0);
        out.lower = out.width;
        return out;
    }

    auto [di, dj] = diameter_pair(w, k);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> probe;
    if (static_cast<int>(w.k) <= opt.all_pairs_limit) {
        for (std::size_t i = 0; i < w.k; ++i) {
            probe.push_back(i);
            for (std::size_t j = i + 1; j < w.k; ++j) pairs.push_back({i, j});
        }
    } else {
        probe = farthest_subsample(w, k, di, static_cast<std::size_t>(opt.subsample));
        for (std::size_t a = 0; a < probe.size(); ++a)
            for (std::size_t b = a + 1; b < probe.size(); ++b) pairs.push_back({probe[a], probe[b]});
        pairs.push_back({di, dj});
        // A few random points help the probe see the bulk of the set.
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::size_t> U(0, w.k - 1);
        for (int r = 0; r < 48; ++r) probe.push_back(U(rng));
    }
    if (opt.chord_first >= 0 && opt.chord_last >= 0 && opt.chord_first != opt.chord_last)
        pairs.push_back({static_cast<std::size_t>(opt.chord_first), static_cast<std::size_t>(opt.chord_last)});

    struct Start {
        double val;
        std::size_t i, j;
    };
    std::vector<Start> starts;
    std::vector<double> dir(n);
    for (auto [i, j] : pairs) {
        for (std::size_t c = 0; c < n; ++c) dir[c] = w.pt(j)[c] - w.pt(i)[c];
        if (k.norm(dir) == 0.0) continue;
        normalize(dir, k);
        starts.push_back({sup_local(w, probe, w.pt(i), dir.data(), k), i, j});
    }
    std::sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) {
        return a.val < b.val || (a.val == b.val && (a.i < b.i || (a.i == b.i && a.j < b.j)));
    });
    if (starts.empty()) {
        // Every point coincides.
        out.anchor.assign(w.pt(0), w.pt(0) + n);
        out.direction.assign(n, 0.0);
        out.direction[0] = 1.0;
        out.method = "exact-pair";
        finish(out, 0.0);
        return out;
    }

    // Coarse pass on each start, then polish the best one.
    double best = INFINITY;
    std::vector<double> ba, bd;
    const std::size_t nstart = std::min<std::size_t>(starts.size(), static_cast<std::size_t>(opt.starts_refined));
    if (opt.chord_first >= 0 && opt.chord_last >= 0) {
        // The chord line is a candidate in its own right, so the result never exceeds it.
        const double* a0 = w.pt(static_cast<std::size_t>(opt.chord_first));
        const double* a1 = w.pt(static_cast<std::size_t>(opt.chord_last));
        std::vector<double> d(n);
        for (std::size_t c = 0; c < n; ++c) d[c] = a1[c] - a0[c];
        if (k.norm(d) > 0.0) {
            normalize(d, k);
            std::vector<double> a(a0, a0 + n);
            auto all = all_dists(w, a.data(), d.data(), k);
            best = *std::max_element(all.begin(), all.end());
            ba = a;
            bd = d;
        }
    }
    for (std::size_t s = 0; s < nstart; ++s) {
        std::vector<double> a(w.pt(starts[s].i), w.pt(starts[s].i) + n);
        std::vector<double> d(n);
        for (std::size_t c = 0; c < n; ++c) d[c] = w.pt(starts[s].j)[c] - a[c];
        normalize(d, k);
        double v = refine_active(w, k, a, d, {starts[s].i, starts[s].j, di, dj}, 0.1, 1e-2);
        if (v < best) {
            best = v;
            ba = a;
            bd = d;
        }
    }
    refine_active(w, k, ba, bd, {di, dj}, 1e-3, std::clamp(opt.rel_accuracy, 1e-10, 1e-3));
    out.anchor = ba;
    out.direction = bd;
    out.method = "multistart-smoothed-bfgs";
    finish(out, chord_lower_bound(w, k, di, dj));
    return out;
}

BetaResult beta(const PointCloud& E, const Ball& Q, const FitOptions& opt) {
    if (E.dim() != Q.center().dim() || E.p() != Q.center().p()) throw std::invalid_argument("beta: space mismatch");
    auto idx = ball_members(E, Q.center().coords(), Q.radius());
    LpSpace sp(E.p(), E.dim());
    if (idx.size() <= 1) {
        return BetaResult{0.0, Line(Q.center(), LpVector::basis(sp, 0)), "trivial", 0.0, idx.size()};
    }
    LineFit f = fit_line_minmax(E, idx, opt);
    Line L(LpVector(sp, f.anchor), LpVector(sp, f.direction));
    // Recompute with the normalized witness so value and witness agree exactly.
    double v = sup_distance(E, idx, L.anchor().coords(), L.direction().coords()) / Q.diam();
    double lower = f.lower / Q.diam();
    return BetaResult{v, L, f.method, std::max(0.0, v - lower), idx.size()};
}

BetaResult beta(const std::vector<LpVector>& E, const Ball& Q, const FitOptions& opt) {
    if (E.empty()) {
        LpSpace sp = Q.center().space();
        return BetaResult{0.0, Line(Q.center(), LpVector::basis(sp, 0)), "trivial", 0.0, 0};
    }
    return beta(PointCloud::from_vectors(E), Q, opt);
}

BilipReport beta_bilip_check(const PointCloud& E, std::span<const double> center, double radius, double p1, double p2,
                             double slack) {
    PointCloud E1 = E.with_p(p1), E2 = E.with_p(p2);
    const double n = static_cast<double>(E.dim());
    // Q is the l_{p1} ball; its l_{p2} diameter is 2r max(1, n^{1/p2 - 1/p1}).
    auto idx = ball_members(E1, center, radius);
    double diam1 = 2.0 * radius;
    double diam2 = 2.0 * radius * std::max(1.0, std::pow(n, 1.0 / p2 - 1.0 / p1));
    double b1 = 0.0, b2 = 0.0;
    if (idx.size() > 1) {
        b1 = fit_line_minmax(E1, idx).width / diam1;
        b2 = fit_line_minmax(E2, idx).width / diam2;
    }
    double C = std::pow(n, std::fabs(1.0 / p1 - 1.0 / p2));
    bool ok = b2 <= C * C * b1 + slack && b1 <= C * C * b2 + slack;
    return {b1, b2, C, ok};
}

}  // namespace atsp
