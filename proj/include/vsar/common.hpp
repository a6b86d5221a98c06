#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsar {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kC = 299792458.0;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Error families map onto cli exit codes (config -> 2, numeric -> 3).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::logic_error {
    using std::logic_error::logic_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense row-major 2-D array.
template <class T>
class Array2D {
public:
    Array2D() = default;
    Array2D(std::size_t rows, std::size_t cols, T v = T{})
        : rows_(rows), cols_(cols), d_(rows * cols, v) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }
    bool empty() const { return d_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    T* row(std::size_t r) { return d_.data() + r * cols_; }
    const T* row(std::size_t r) const { return d_.data() + r * cols_; }

    T* data() { return d_.data(); }
    const T* data() const { return d_.data(); }
    std::vector<T>& vec() { return d_; }
    const std::vector<T>& vec() const { return d_; }

    void fill(T v) { std::fill(d_.begin(), d_.end(), v); }

    Array2D transposed() const {
        Array2D t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> d_;
};

using CArray = Array2D<cplx>;
using RArray = Array2D<double>;

// Uniform sample axis: value(i) = start + i * step.
struct Axis {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;
    std::string unit;

    double at(double i) const { return start + i * step; }
    double index_of(double v) const { return (v - start) / step; }
    double end() const { return at(static_cast<double>(count) - 1.0); }
};

// Centered axis of n samples with the given step; sample n/2 sits at 0.
inline Axis centered_axis(std::size_t n, double step, std::string unit = {}) {
    return Axis{-static_cast<double>(n / 2) * step, step, n, std::move(unit)};
}

inline double energy(const CArray& a) {
    double e = 0.0;
    for (const auto& v : a.vec()) e += std::norm(v);
    return e;
}

}  // namespace vsar
