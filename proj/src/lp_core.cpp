#include "atsp/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace atsp {

double conjugate_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("conjugate_exponent: p must be in (1, inf)");
    return p / (p - 1.0);
}

AbsPow::AbsPow(double e) : e_(e), kind_(Kind::General) {
    double w = std::floor(e);
    double frac = e - w;
    if (e >= 0 && w <= 16) {
        whole_ = static_cast<int>(w);
        if (frac == 0.0)
            kind_ = Kind::Integer;
        else if (frac == 0.5)
            kind_ = Kind::Half;
        else if (frac == 0.25)
            kind_ = Kind::Quarter;
        else if (frac == 0.75)
            kind_ = Kind::ThreeQuarter;
    }
}

double AbsPow::operator()(double u) const {
    double a = std::fabs(u);
    if (kind_ == Kind::General) return std::pow(a, e_);
    double r = 1.0;
    for (int i = 0; i < whole_; ++i) r *= a;
    switch (kind_) {
        case Kind::Integer: return r;
        case Kind::Half: return r * std::sqrt(a);
        case Kind::Quarter: return r * std::sqrt(std::sqrt(a));
        case Kind::ThreeQuarter: {
            double s = std::sqrt(a);
            return r * s * std::sqrt(s);
        }
        default: return std::pow(a, e_);
    }
}

NormKernel::NormKernel(double p_) : p(p_), pow_p(p_), pow_pm1(p_ - 1.0) {}

double NormKernel::norm(std::span<const double> x) const {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    double inv = 1.0 / m;
    for (double v : x) s += pow_p(v * inv);
    if (p == 2.0) return m * std::sqrt(s);
    return m * std::pow(s, 1.0 / p);
}

double NormKernel::dist(std::span<const double> x, std::span<const double> y) const {
    double m = 0.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    double inv = 1.0 / m;
    for (std::size_t i = 0; i < n; ++i) s += pow_p((x[i] - y[i]) * inv);
    if (p == 2.0) return m * std::sqrt(s);
    return m * std::pow(s, 1.0 / p);
}

double lp_norm(std::span<const double> x, double p) { return NormKernel(p).norm(x); }

double lp_dist(std::span<const double> x, std::span<const double> y, double p) {
    return NormKernel(p).dist(x, y);
}

LpSpace::LpSpace(double p, std::size_t dim) : p_(p), dim_(dim) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("LpSpace: p must be in (1, inf)");
    if (dim < 2) throw std::invalid_argument("LpSpace: dim must be at least 2");
}

LpVector::LpVector(LpSpace space, std::vector<double> coords) : space_(space), coords_(std::move(coords)) {
    if (coords_.size() != space_.dim()) throw std::invalid_argument("LpVector: coordinate count does not match dim");
    for (double v : coords_)
        if (!std::isfinite(v)) throw std::invalid_argument("LpVector: non-finite coordinate");
}

LpVector LpVector::zero(LpSpace space) { return LpVector(space, std::vector<double>(space.dim(), 0.0)); }

LpVector LpVector::basis(LpSpace space, std::size_t i) {
    if (i >= space.dim()) throw std::out_of_range("LpVector::basis");
    std::vector<double> c(space.dim(), 0.0);
    c[i] = 1.0;
    return LpVector(space, std::move(c));
}

double LpVector::norm() const { return lp_norm(coords_, p()); }

LpVector LpVector::with_p(double q) const { return LpVector(LpSpace(q, dim()), coords_); }

static void require_same(const LpSpace& a, const LpSpace& b) {
    if (!(a == b)) throw std::invalid_argument("LpVector: space mismatch");
}

LpVector LpVector::operator+(const LpVector& o) const {
    require_same(space_, o.space_);
    std::vector<double> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
    return LpVector(space_, std::move(c));
}

LpVector LpVector::operator-(const LpVector& o) const {
    require_same(space_, o.space_);
    std::vector<double> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
    return LpVector(space_, std::move(c));
}

LpVector LpVector::operator-() const { return *this * -1.0; }

LpVector LpVector::operator*(double s) const {
    std::vector<double> c(coords_);
    for (double& v : c) v *= s;
    return LpVector(space_, std::move(c));
}

double norm(const LpVector& x) { return x.norm(); }

double dist(const LpVector& x, const LpVector& y) {
    require_same(x.space(), y.space());
    return lp_dist(x.coords(), y.coords(), x.p());
}

LpVector duality_map(const LpVector& x) {
    const double p = x.p();
    LpSpace dual = x.space().dual();
    double m = 0.0;
    for (double v : x.coords()) m = std::max(m, std::fabs(v));
    if (m == 0.0) return LpVector::zero(dual);
    // J is positively homogeneous of degree one, so work with x/m.
    std::vector<double> y(x.dim());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] / m;
    double ny = lp_norm(y, p);
    AbsPow pm1(p - 1.0);
    double scale = m * std::pow(ny, 2.0 - p);
    for (double& v : y) v = (v < 0 ? -pm1(v) : pm1(v)) * scale;
    return LpVector(dual, std::move(y));
}

double pairing(const LpVector& f, const LpVector& x) {
    if (f.dim() != x.dim()) throw std::invalid_argument("pairing: dimension mismatch");
    if (std::fabs(1.0 / f.p() + 1.0 / x.p() - 1.0) > 1e-12)
        throw std::invalid_argument("pairing: f is not in the dual space of x");
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) s += f[i] * x[i];
    return s;
}

void to_json(nlohmann::json& j, const LpVector& v) {
    j = nlohmann::json{{"p", v.p()}, {"coords", std::vector<double>(v.coords().begin(), v.coords().end())}};
}

LpVector lp_vector_from_json(const nlohmann::json& j) {
    if (!j.contains("p") || !j.contains("coords")) throw std::invalid_argument("LpVector json needs p and coords");
    auto coords = j.at("coords").get<std::vector<double>>();
    std::size_t n = coords.size();
    return LpVector(LpSpace(j.at("p").get<double>(), n), std::move(coords));
}

PointCloud::PointCloud(double p, std::size_t dim) : p_(p), dim_(dim) {
    LpSpace check(p, dim);
    (void)check;
}

PointCloud PointCloud::from_vectors(const std::vector<LpVector>& v) {
    if (v.empty()) throw std::invalid_argument("PointCloud::from_vectors: empty input");
    PointCloud pc(v.front().p(), v.front().dim());
    pc.reserve(v.size());
    for (const auto& x : v) {
        require_same(x.space(), v.front().space());
        pc.push_back(x.coords());
    }
    return pc;
}

LpVector PointCloud::vector(std::size_t i) const {
    auto s = (*this)[i];
    return LpVector(LpSpace(p_, dim_), std::vector<double>(s.begin(), s.end()));
}

void PointCloud::push_back(std::span<const double> x) {
    if (x.size() != dim_) throw std::invalid_argument("PointCloud::push_back: wrong dimension");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("PointCloud::push_back: non-finite coordinate");
    data_.insert(data_.end(), x.begin(), x.end());
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& idx) const {
    PointCloud out(p_, dim_);
    out.reserve(idx.size());
    for (std::size_t i : idx) out.data_.insert(out.data_.end(), data_.begin() + i * dim_, data_.begin() + (i + 1) * dim_);
    return out;
}

PointCloud PointCloud::with_p(double q) const {
    PointCloud out(q, dim_);
    out.data_ = data_;
    return out;
}

}  // namespace atsp
