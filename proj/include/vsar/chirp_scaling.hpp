#pragma once

// Interpolation-free affine resampling by chirp scaling.
//
// For a band-limited sequence x on a centered grid the operator produces
//     y(j) = sqrt(s) * x(s*j + b)
// using only unit-modulus multiplies and orthonormal FFTs:
//     FFT -> shift/chirp (beta1) -> IFFT -> chirp (a) -> FFT -> chirp (beta2)
//     -> IFFT -> chirp (c)
// with a = (s-1)/beta1, beta2 = -beta1/s, c = -s(s-1)/beta1.
// Every stage is unitary, so the adjoint is the exact inverse on the work grid.

#include <cmath>
#include <vector>

#include "common.hpp"
#include "fft.hpp"

namespace vsar {

struct ScaleMap {
    double s = 1.0;  // scale, input samples per output sample
    double b = 0.0;  // offset in input samples
};

class ChirpScaler {
public:
    // band: highest |frequency| of the input in cycles/sample (<= 0.5).
    ChirpScaler(std::size_t in_len, std::size_t out_len, ScaleMap m, double band = 0.45,
                std::size_t min_work = 0)
        : in_len_(in_len), out_len_(out_len), s_(m.s) {
        if (!(m.s > 0.0) || !std::isfinite(m.s) || !std::isfinite(m.b))
            throw NumericError("chirp scaling: invalid scale");
        // integer part of the output offset is handled by placement
        j0_ = static_cast<long>(std::lround(-m.b / m.s));
        bp_ = m.s * static_cast<double>(j0_) + m.b;

        const double U = 0.5 * static_cast<double>(in_len) + std::abs(bp_);
        const double ds = std::abs(m.s - 1.0);
        pure_shift_ = ds < 1e-13;
        if (!pure_shift_) {
            const double room = 0.5 - m.s * band - ds * band;
            if (room < 0.02) throw NumericError("chirp scaling: scale too large for signal band");
            beta1_ = 1.5 * ds * U / room;
            if (beta1_ < 1.0) beta1_ = 1.0;
            a_ = (m.s - 1.0) / beta1_;
            beta2_ = -beta1_ / m.s;
            c_ = -m.s * (m.s - 1.0) / beta1_;
        }
        double need = 2.0 * (U + beta1_ * band) + 8.0;
        need = std::max(need, 2.0 * U / m.s + 8.0);
        need = std::max(need, 1.2 * static_cast<double>(in_len));
        // multiple of 4 keeps the centering sign of the folded transforms at +1
        const std::size_t want = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(need)), min_work);
        L_ = 4 * good_fft_size((want + 3) / 4);
        build_tables();
    }

    std::size_t work_len() const { return L_; }
    double beta1() const { return beta1_; }

    // Extra spectral filter applied with the first frequency-domain multiply; nu is the
    // input frequency in cycles/sample. The adjoint applies its conjugate.
    template <class F>
    void set_prefilter(F&& pre) {
        const double Ld = static_cast<double>(L_);
        for (std::size_t k = 0; k < L_; ++k) h1_[k] *= pre((static_cast<double>(k) - Ld / 2) / Ld);
    }

    void forward(const cplx* in, cplx* out) const {
        std::vector<cplx> w(L_, cplx{});
        const long h = static_cast<long>(L_ / 2), hin = static_cast<long>(in_len_ / 2);
        for (std::size_t i = 0; i < in_len_; ++i) {
            long p = static_cast<long>(i) - hin + h;
            if (p >= 0 && p < static_cast<long>(L_)) w[p] = (p & 1) ? -in[i] : in[i];
        }
        run(w, false);
        const long hout = static_cast<long>(out_len_ / 2);
        for (std::size_t j = 0; j < out_len_; ++j) {
            long p = static_cast<long>(j) - hout - j0_ + h;
            out[j] = (p >= 0 && p < static_cast<long>(L_)) ? ((p & 1) ? -norm_ : norm_) * w[p] : cplx{};
        }
    }

    void adjoint(const cplx* out, cplx* in) const {
        std::vector<cplx> w(L_, cplx{});
        const long h = static_cast<long>(L_ / 2), hout = static_cast<long>(out_len_ / 2);
        for (std::size_t j = 0; j < out_len_; ++j) {
            long p = static_cast<long>(j) - hout - j0_ + h;
            if (p >= 0 && p < static_cast<long>(L_)) w[p] = (p & 1) ? -out[j] : out[j];
        }
        run(w, true);
        const long hin = static_cast<long>(in_len_ / 2);
        for (std::size_t i = 0; i < in_len_; ++i) {
            long p = static_cast<long>(i) - hin + h;
            in[i] = (p >= 0 && p < static_cast<long>(L_)) ? ((p & 1) ? -norm_ : norm_) * w[p] : cplx{};
        }
    }

    std::vector<cplx> forward(const std::vector<cplx>& in) const {
        std::vector<cplx> out(out_len_);
        forward(in.data(), out.data());
        return out;
    }
    std::vector<cplx> adjoint(const std::vector<cplx>& out) const {
        std::vector<cplx> in(in_len_);
        adjoint(out.data(), in.data());
        return in;
    }

private:
    // t[k] = exp(j pi q w^2 + j 2 pi l w), w = k - L/2, by recurrence reseeded every 64 samples.
    static void chirp_table(std::vector<cplx>& t, std::size_t L, double q, double l) {
        t.resize(L);
        const double h = static_cast<double>(L / 2);
        cplx v, d;
        const cplx dd = std::polar(1.0, 2 * kPi * q);
        for (std::size_t k = 0; k < L; ++k) {
            const double w = static_cast<double>(k) - h;
            if ((k & 63) == 0) {
                v = std::polar(1.0, kPi * q * w * w + 2 * kPi * l * w);
                d = std::polar(1.0, kPi * q * (2 * w + 1) + 2 * kPi * l);
            } else {
                v *= d;
                d *= dd;
            }
            t[k] = v;
        }
    }

    // w[k] *= exp(+-j (pi q u^2 + 2 pi l u)), u = k - L/2, same recurrence as chirp_table.
    static void apply_chirp(std::vector<cplx>& w, double q, double l, bool conj) {
        const std::size_t L = w.size();
        const double h = static_cast<double>(L / 2);
        const double sg = conj ? -1.0 : 1.0;
        cplx v, d;
        const cplx dd = std::polar(1.0, sg * 2 * kPi * q);
        for (std::size_t k = 0; k < L; ++k) {
            const double u = static_cast<double>(k) - h;
            if ((k & 63) == 0) {
                v = std::polar(1.0, sg * (kPi * q * u * u + 2 * kPi * l * u));
                d = std::polar(1.0, sg * (kPi * q * (2 * u + 1) + 2 * kPi * l));
            } else {
                v *= d;
                d *= dd;
            }
            w[k] *= v;
        }
    }

    void build_tables() {
        const double Ld = static_cast<double>(L_);
        norm_ = pure_shift_ ? 1.0 / Ld : 1.0 / (Ld * Ld);
        // frequency tables use nu = w / L; only the first one is stored (it may carry a prefilter)
        chirp_table(h1_, L_, -beta1_ / (Ld * Ld), bp_ / Ld);
        q2_ = -beta2_ / (Ld * Ld);
    }

    static void mul(std::vector<cplx>& w, const std::vector<cplx>& t, bool conj) {
        if (conj)
            for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::conj(t[i]);
        else
            for (std::size_t i = 0; i < w.size(); ++i) w[i] *= t[i];
    }

    // Centered orthonormal transforms written as S F S / sqrt(L) with S = diag((-1)^k); the inner
    // sign flips cancel against the diagonal tables, the outer ones and the scale are applied
    // when data enters and leaves the work buffer.
    void run(std::vector<cplx>& w, bool adj) const {
        if (!adj) {
            fft_inplace(w, Dir::Forward);
            mul(w, h1_, false);
            fft_inplace(w, Dir::Inverse);
            if (pure_shift_) return;
            apply_chirp(w, a_, 0.0, false);
            fft_inplace(w, Dir::Forward);
            apply_chirp(w, q2_, 0.0, false);
            fft_inplace(w, Dir::Inverse);
            apply_chirp(w, c_, 0.0, false);
        } else {
            if (!pure_shift_) {
                apply_chirp(w, c_, 0.0, true);
                fft_inplace(w, Dir::Forward);
                apply_chirp(w, q2_, 0.0, true);
                fft_inplace(w, Dir::Inverse);
                apply_chirp(w, a_, 0.0, true);
            }
            fft_inplace(w, Dir::Forward);
            mul(w, h1_, true);
            fft_inplace(w, Dir::Inverse);
        }
    }

    std::size_t in_len_, out_len_, L_ = 0;
    double s_;
    long j0_ = 0;
    double bp_ = 0.0;
    double norm_ = 1.0;
    bool pure_shift_ = false;
    double beta1_ = 0.0, a_ = 0.0, beta2_ = 0.0, c_ = 0.0;
    double q2_ = 0.0;
    std::vector<cplx> h1_;
};

// Direct O(N*M) band-limited (Dirichlet) evaluation of y(j) = sqrt(s) x(s*j+b); used as a
// reference in tests and for small problems.
inline std::vector<cplx> dirichlet_resample(const std::vector<cplx>& x, std::size_t out_len, ScaleMap m) {
    const std::size_t n = x.size();
    std::vector<cplx> X(x);
    cfft(X, Dir::Forward);
    std::vector<cplx> y(out_len);
    const double hn = static_cast<double>(n / 2);
    const double ho = static_cast<double>(out_len / 2);
    for (std::size_t j = 0; j < out_len; ++j) {
        const double pos = m.s * (static_cast<double>(j) - ho) + m.b;
        cplx acc{};
        for (std::size_t k = 0; k < n; ++k) {
            const double nu = (static_cast<double>(k) - hn) / static_cast<double>(n);
            acc += X[k] * std::polar(1.0, 2 * kPi * nu * pos);
        }
        y[j] = acc * std::sqrt(m.s / static_cast<double>(n));
    }
    return y;
}

}  // namespace vsar
