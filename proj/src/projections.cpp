#include "atsp/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "atsp/moduli.hpp"

namespace atsp {

Line::Line(LpVector anchor, LpVector direction) : anchor_(std::move(anchor)), direction_(std::move(direction)) {
    if (!(anchor_.space() == direction_.space())) throw std::invalid_argument("Line: anchor and direction spaces differ");
    double n = direction_.norm();
    if (!(n > 0.0)) throw std::invalid_argument("Line: zero direction");
    direction_ = direction_ * (1.0 / n);
}

Line Line::through(const LpVector& a, const LpVector& b) { return Line(a, b - a); }

LpVector Line::at(double t) const { return anchor_ + direction_ * t; }

namespace detail {

namespace {

// Minimizer of t -> |y - t d|_p for y already shifted by the anchor.
// Uses the strictly increasing derivative sum_i d_i psi(t d_i - y_i).
double argmin_param(const double* y, const double* d, std::size_t n, const NormKernel& k) {
    if (k.p == 2.0) {
        double yd = 0.0, dd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            yd += y[i] * d[i];
            dd += d[i] * d[i];
        }
        return yd / dd;
    }
    double ny = k.norm({y, n});
    if (ny == 0.0) return 0.0;
    double nd = k.norm({d, n});
    auto h = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += d[i] * k.psi(t * d[i] - y[i]);
        return s;
    };
    // |t d| <= |y| + |y - t d| <= 2|y| at the minimizer.
    double B = 2.0 * ny / nd * (1.0 + 1e-9) + 1e-300;
    double lo = -B, hi = B;
    double hlo = h(lo), hhi = h(hi);
    if (hlo >= 0.0) return lo;
    if (hhi <= 0.0) return hi;
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, boost::math::tools::eps_tolerance<double>(52),
                                                iters);
    double t = 0.5 * (r.first + r.second);
    return t;
}

double residual_norm(const double* y, const double* d, std::size_t n, double t, const NormKernel& k) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(y[i] - t * d[i]));
    if (m == 0.0) return 0.0;
    double s = 0.0, inv = 1.0 / m;
    for (std::size_t i = 0; i < n; ++i) s += k.pow_p((y[i] - t * d[i]) * inv);
    return k.p == 2.0 ? m * std::sqrt(s) : m * std::pow(s, 1.0 / k.p);
}

constexpr std::size_t kStack = 32;

}  // namespace

LineDistance line_distance(const double* x, const double* a, const double* d, std::size_t n, const NormKernel& k) {
    double ybuf[kStack];
    std::vector<double> yheap;
    double* y = ybuf;
    if (n > kStack) {
        yheap.resize(n);
        y = yheap.data();
    }
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] - a[i];
        m = std::max(m, std::fabs(y[i]));
    }
    if (m == 0.0) return {0.0, 0.0};
    // Scale so the root finder works on O(1) numbers.
    double inv = 1.0 / m;
    for (std::size_t i = 0; i < n; ++i) y[i] *= inv;
    double t = argmin_param(y, d, n, k);
    double dist = residual_norm(y, d, n, t, k);
    return {dist * m, t * m};
}

LineDistance line_distance_warm(const double* x, const double* a, const double* d, std::size_t n,
                                const NormKernel& k, double t0) {
    if (k.p == 2.0 || !std::isfinite(t0)) return line_distance(x, a, d, n, k);
    double ybuf[kStack];
    std::vector<double> yheap;
    double* y = ybuf;
    if (n > kStack) {
        yheap.resize(n);
        y = yheap.data();
    }
    double ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] - a[i];
        ym = std::max(ym, std::fabs(y[i]));
    }
    if (ym == 0.0) return {0.0, 0.0};
    // h(t) = sum d_i psi(t d_i - y_i) is increasing; h'(t) = (p-1) sum d_i^2 |t d_i - y_i|^(p-2).
    double lo = -INFINITY, hi = INFINITY, t = t0;
    double dm = 0.0;
    for (std::size_t i = 0; i < n; ++i) dm = std::max(dm, std::fabs(d[i]));
    const double tol = 1e-15 * (ym / dm + std::fabs(t0));
    for (int it = 0; it < 20; ++it) {
        double h = 0.0, hp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double u = t * d[i] - y[i];
            double au = std::fabs(u);
            double pm1 = k.pow_pm1(au);
            h += d[i] * (u < 0 ? -pm1 : pm1);
            hp += au > 0.0 ? d[i] * d[i] * pm1 / au : (k.p < 2.0 && d[i] != 0.0 ? INFINITY : 0.0);
        }
        if (h == 0.0) {
            lo = hi = t;
            break;
        }
        if (h < 0.0)
            lo = t;
        else
            hi = t;
        double step = h / ((k.p - 1.0) * hp);
        double tn = t - step;
        if (!std::isfinite(tn) || tn <= lo || tn >= hi) {
            if (!std::isfinite(lo) || !std::isfinite(hi)) break;
            tn = 0.5 * (lo + hi);
        }
        if (std::fabs(tn - t) <= tol) {
            t = tn;
            lo = hi = t;
            break;
        }
        t = tn;
    }
    if (lo != hi) return line_distance(x, a, d, n, k);
    return {residual_norm(y, d, n, t, k), t};
}

SegmentDistance segment_distance(const double* x, const double* a, const double* d, std::size_t n,
                                 const NormKernel& k) {
    bool degenerate = true;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] != 0.0) degenerate = false;
    if (degenerate) return {k.dist({x, n}, {a, n}), 0.0};
    LineDistance ld = line_distance(x, a, d, n, k);
    // The distance is convex in t, so clamping the unconstrained minimizer is exact.
    double t = std::clamp(ld.t_star, 0.0, 1.0);
    if (t == ld.t_star) return {ld.distance, t};
    double zbuf[kStack];
    std::vector<double> zheap;
    double* z = zbuf;
    if (n > kStack) {
        zheap.resize(n);
        z = zheap.data();
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + t * d[i];
    return {k.dist({x, n}, {z, n}), t};
}

}  // namespace detail

LineDistance dist_to_line(const LpVector& x, const Line& L) {
    if (!(x.space() == L.space())) throw std::invalid_argument("dist_to_line: space mismatch");
    NormKernel k(x.p());
    return detail::line_distance(x.coords().data(), L.anchor().coords().data(), L.direction().coords().data(),
                                 x.dim(), k);
}

LpVector metric_projection(const LpVector& x, const Line& L) { return L.at(dist_to_line(x, L).t_star); }

SegmentDistance dist_to_segment(const LpVector& x, const LpVector& a, const LpVector& b) {
    if (!(x.space() == a.space()) || !(a.space() == b.space()))
        throw std::invalid_argument("dist_to_segment: space mismatch");
    NormKernel k(x.p());
    LpVector d = b - a;
    return detail::segment_distance(x.coords().data(), a.coords().data(), d.coords().data(), x.dim(), k);
}

LpVector j_projection(const LpVector& x, const Line& L) {
    if (!(x.space() == L.space())) throw std::invalid_argument("j_projection: space mismatch");
    LpVector Jv = duality_map(L.direction());
    double c = pairing(Jv, x - L.anchor());
    return L.anchor() + L.direction() * c;
}

LpVector j_perp(const LpVector& x, const Line& L) { return x - j_projection(x, L); }

FlatnessViolation::FlatnessViolation(std::size_t idx, double d, double a)
    : std::runtime_error("point " + std::to_string(idx) + " is " + std::to_string(d) +
                         " from the line, allowed " + std::to_string(a)),
      index(idx),
      distance(d),
      allowed(a) {}

SeparationViolation::SeparationViolation(std::size_t i_, std::size_t j_, double d, double dl)
    : std::runtime_error("points " + std::to_string(i_) + " and " + std::to_string(j_) + " are " +
                         std::to_string(d) + " apart, below separation " + std::to_string(dl)),
      i(i_),
      j(j_),
      distance(d),
      delta(dl) {}

OrderedFlatSet order_flat_set(const std::vector<LpVector>& V, const Line& L, double delta, double alpha) {
    if (!(alpha >= 0.0) || alpha >= 1.0 / 6.0)
        throw std::invalid_argument("order_flat_set: alpha must lie in [0, 1/6)");
    if (!(delta > 0.0)) throw std::invalid_argument("order_flat_set: delta must be positive");
    const std::size_t n = V.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = dist(V[i], V[j]);
            if (d < delta) throw SeparationViolation(i, j, d, delta);
        }
    std::vector<double> params(n), jparams(n);
    LpVector Jv = duality_map(L.direction());
    for (std::size_t i = 0; i < n; ++i) {
        LineDistance ld = dist_to_line(V[i], L);
        if (ld.distance > alpha * delta) throw FlatnessViolation(i, ld.distance, alpha * delta);
        params[i] = ld.t_star;
        jparams[i] = pairing(Jv, V[i] - L.anchor());
    }
    std::vector<std::size_t> order(n), jorder(n);
    std::iota(order.begin(), order.end(), 0);
    std::iota(jorder.begin(), jorder.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return params[a] < params[b]; });
    std::stable_sort(jorder.begin(), jorder.end(),
                     [&](std::size_t a, std::size_t b) { return jparams[a] < jparams[b]; });
    return OrderedFlatSet{V, L, std::move(order), std::move(params), alpha, delta, std::move(jorder)};
}

double chain_variation(const OrderedFlatSet& o, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < o.order.size(); ++i)
        sum += std::pow(dist(o.points[o.order[i + 1]], o.points[o.order[i]]), s);
    return sum;
}

double chain_bound_banach(const OrderedFlatSet& o, double s) {
    if (o.order.size() < 2) return 0.0;
    double span = dist(o.points[o.order.front()], o.points[o.order.back()]);
    return std::pow(1.0 + 3.0 * o.alpha, 2.0 * s) * std::pow(span, s);
}

double chain_bound_smooth(const OrderedFlatSet& o, double s) {
    if (o.order.size() < 2) return 0.0;
    double span = dist(o.points[o.order.front()], o.points[o.order.back()]);
    double rho = rho_upper(o.line.space().p(), 102.0 * o.alpha);
    return std::pow(1.0 + rho, s) * std::pow(span, s);
}

}  // namespace atsp
