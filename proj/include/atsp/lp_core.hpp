#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace atsp {

// Conjugate exponent p' with 1/p + 1/p' = 1. Throws for p <= 1.
double conjugate_exponent(double p);

// Evaluates |u|^e for a fixed exponent. Small integer, half and quarter
// exponents are done with multiplications and square roots.
class AbsPow {
public:
    explicit AbsPow(double e);
    double operator()(double u) const;
    double exponent() const { return e_; }

private:
    enum class Kind { Integer, Half, Quarter, ThreeQuarter, General };
    double e_;
    Kind kind_;
    int whole_ = 0;
};

// Exponent-specific kernels shared by the norm, distance and projection code.
struct NormKernel {
    explicit NormKernel(double p);
    double p;
    AbsPow pow_p;    // |u|^p
    AbsPow pow_pm1;  // |u|^(p-1)

    double norm(std::span<const double> x) const;
    double dist(std::span<const double> x, std::span<const double> y) const;
    // sign(u)|u|^(p-1)
    double psi(double u) const { return u < 0 ? -pow_pm1(u) : pow_pm1(u); }
};

double lp_norm(std::span<const double> x, double p);
double lp_dist(std::span<const double> x, std::span<const double> y, double p);

class LpSpace {
public:
    LpSpace(double p, std::size_t dim);
    double p() const { return p_; }
    std::size_t dim() const { return dim_; }
    LpSpace dual() const { return LpSpace(conjugate_exponent(p_), dim_); }
    bool operator==(const LpSpace& o) const { return p_ == o.p_ && dim_ == o.dim_; }

private:
    double p_;
    std::size_t dim_;
};

class LpVector {
public:
    LpVector(LpSpace space, std::vector<double> coords);
    static LpVector zero(LpSpace space);
    static LpVector basis(LpSpace space, std::size_t i);

    const LpSpace& space() const { return space_; }
    double p() const { return space_.p(); }
    std::size_t dim() const { return space_.dim(); }
    std::span<const double> coords() const { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    double norm() const;
    // Same coordinates viewed in another exponent.
    LpVector with_p(double q) const;

    LpVector operator+(const LpVector& o) const;
    LpVector operator-(const LpVector& o) const;
    LpVector operator-() const;
    LpVector operator*(double s) const;
    friend LpVector operator*(double s, const LpVector& v) { return v * s; }

private:
    LpSpace space_;
    std::vector<double> coords_;
};

double norm(const LpVector& x);
double dist(const LpVector& x, const LpVector& y);

// J(x) = |x|^{2-p} (|x_i|^{p-2} x_i), an element of l_{p'}. J(0) = 0.
LpVector duality_map(const LpVector& x);

// <f, x> for f in the dual space of x.
double pairing(const LpVector& f, const LpVector& x);

void to_json(nlohmann::json& j, const LpVector& v);
LpVector lp_vector_from_json(const nlohmann::json& j);

// Flat storage for many points of one space. Generated curves and nets use
// this instead of vectors of LpVector.
class PointCloud {
public:
    PointCloud(double p, std::size_t dim);
    static PointCloud from_vectors(const std::vector<LpVector>& v);

    double p() const { return p_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const { return data_.empty(); }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> at_mut(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    LpVector vector(std::size_t i) const;

    void push_back(std::span<const double> x);
    void push_back(const LpVector& v) { push_back(v.coords()); }
    void reserve(std::size_t n) { data_.reserve(n * dim_); }
    const std::vector<double>& data() const { return data_; }

    PointCloud subset(const std::vector<std::size_t>& idx) const;
    // Same coordinates, different exponent.
    PointCloud with_p(double q) const;

private:
    double p_;
    std::size_t dim_;
    std::vector<double> data_;
};

}  // namespace atsp
