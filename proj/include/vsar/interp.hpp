#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"

namespace vsar {

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double a = kPi * x;
    return std::sin(a) / a;
}

// Kaiser-windowed sinc with M taps.
class KaiserSinc {
public:
    explicit KaiserSinc(std::size_t taps = 16, double beta = 5.0) : M_(taps), beta_(beta) {
        if (taps < 2) throw ParameterError("interpolation kernel needs at least 2 taps");
        i0b_ = std::cyl_bessel_i(0.0, beta_);
        // tabulated at 1/1024 sample for speed
        const std::size_t n = (M_ / 2 + 1) * kRes + 1;
        table_.resize(n);
        for (std::size_t i = 0; i < n; ++i) table_[i] = eval(static_cast<double>(i) / kRes);
    }

    std::size_t taps() const { return M_; }

    double eval(double d) const {
        const double r = 2.0 * d / static_cast<double>(M_);
        if (std::abs(r) >= 1.0) return 0.0;
        return sinc(d) * std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) / i0b_;
    }

    double operator()(double d) const {
        const double a = std::abs(d) * kRes;
        const auto i = static_cast<std::size_t>(a);
        if (i + 1 >= table_.size()) return 0.0;
        const double f = a - static_cast<double>(i);
        return table_[i] + f * (table_[i + 1] - table_[i]);
    }

    // Interpolates x (length n) at fractional index pos; zero outside.
    cplx at(const cplx* x, std::size_t n, double pos) const {
        const long h = static_cast<long>(M_ / 2);
        const long i0 = static_cast<long>(std::floor(pos));
        cplx acc{};
        for (long i = i0 - h + 1; i <= i0 + h; ++i) {
            if (i < 0 || i >= static_cast<long>(n)) continue;
            acc += x[i] * (*this)(pos - static_cast<double>(i));
        }
        return acc;
    }

    // Strided variant for columns.
    cplx at(const cplx* x, std::size_t n, std::size_t stride, double pos) const {
        const long h = static_cast<long>(M_ / 2);
        const long i0 = static_cast<long>(std::floor(pos));
        cplx acc{};
        for (long i = i0 - h + 1; i <= i0 + h; ++i) {
            if (i < 0 || i >= static_cast<long>(n)) continue;
            acc += x[static_cast<std::size_t>(i) * stride] * (*this)(pos - static_cast<double>(i));
        }
        return acc;
    }

private:
    static constexpr std::size_t kRes = 1024;
    std::size_t M_;
    double beta_, i0b_;
    std::vector<double> table_;
};

inline double lanczos3(double d) {
    d = std::abs(d);
    if (d >= 3.0) return 0.0;
    return sinc(d) * sinc(d / 3.0);
}

namespace detail {

// Six Lanczos-3 weights for offsets f + 2 - k, k = 0..5, f in [0, 1). The shifted sines
// follow from sin(pi f) and sin/cos(pi f / 3) by angle addition.
inline void lanczos3_weights(double f, double* w) {
    static const double s3[6] = {std::sin(2 * kPi / 3), std::sin(kPi / 3), 0.0, std::sin(-kPi / 3),
                                 std::sin(-2 * kPi / 3), std::sin(-kPi)};
    static const double c3[6] = {std::cos(2 * kPi / 3), std::cos(kPi / 3), 1.0, std::cos(-kPi / 3),
                                 std::cos(-2 * kPi / 3), std::cos(-kPi)};
    if (f < 1e-9) {
        for (int k = 0; k < 6; ++k) w[k] = k == 2 ? 1.0 : 0.0;
        return;
    }
    const double sp = std::sin(kPi * f), st = std::sin(kPi * f / 3), ct = std::cos(kPi * f / 3);
    for (int k = 0; k < 6; ++k) {
        const double d = f + 2.0 - k;
        if (std::abs(d) >= 3.0) {
            w[k] = 0.0;
            continue;
        }
        const double s1 = (k & 1) ? -sp : sp;
        const double s2 = st * c3[k] + ct * s3[k];
        w[k] = 3.0 * s1 * s2 / (kPi * kPi * d * d);
    }
}

}  // namespace detail

// Lanczos-3 interpolation of a complex image at fractional (row, col); zero outside.
inline cplx lanczos3_at(const CArray& a, double r, double c) {
    const long r0 = static_cast<long>(std::floor(r)), c0 = static_cast<long>(std::floor(c));
    double wr[6], wc[6];
    detail::lanczos3_weights(r - static_cast<double>(r0), wr);
    detail::lanczos3_weights(c - static_cast<double>(c0), wc);
    const long R = static_cast<long>(a.rows()), C = static_cast<long>(a.cols());
    const bool inside = r0 - 2 >= 0 && r0 + 3 < R && c0 - 2 >= 0 && c0 + 3 < C;
    cplx acc{};
    for (int i = 0; i < 6; ++i) {
        const long rr = r0 - 2 + i;
        if (!inside && (rr < 0 || rr >= R)) continue;
        double re = 0, im = 0;
        const cplx* p = a.row(static_cast<std::size_t>(rr));
        for (int j = 0; j < 6; ++j) {
            const long cc = c0 - 2 + j;
            if (!inside && (cc < 0 || cc >= C)) continue;
            re += p[cc].real() * wc[j];
            im += p[cc].imag() * wc[j];
        }
        acc += cplx(re, im) * wr[i];
    }
    return acc;
}

}  // namespace vsar
