#pragma once

// Point-target and whole-image quality measures, and the analytic operation-count model.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "fft.hpp"
#include "pfa.hpp"

namespace vsar {

struct ProfileMetrics {
    double irw = 0;    // -3 dB width (m)
    double pslr = 0;   // dB
    double islr = 0;   // dB
};

struct PointReport {
    double x = 0, y = 0;     // interpolated peak position (m)
    double peak = 0;         // peak magnitude
    ProfileMetrics range;    // along x
    ProfileMetrics azimuth;  // along y
};

struct PointMetricsOptions {
    double search = 0.375;      // peak search radius around the approximate position (m)
    std::size_t window = 64;    // analysis window (pixels, even)
    std::size_t upsample = 16;
};

namespace detail {

inline void fft2_centered(CArray& a, Dir d) {
    cfft_rows(a, d);
    cfft_cols(a, d);
}

// Profile measures on a finely sampled magnitude-squared profile with peak at index p.
inline ProfileMetrics profile_metrics(const std::vector<double>& pw, std::size_t p, double step) {
    ProfileMetrics m;
    const double pk = pw[p];
    const double half = 0.5 * pk;
    auto cross = [&](int dir) {
        long i = static_cast<long>(p);
        while (i + dir >= 0 && i + dir < static_cast<long>(pw.size()) && pw[static_cast<std::size_t>(i + dir)] > half) i += dir;
        if (i + dir < 0 || i + dir >= static_cast<long>(pw.size())) return static_cast<double>(i);
        const double a = pw[static_cast<std::size_t>(i)], b = pw[static_cast<std::size_t>(i + dir)];
        return static_cast<double>(i) + dir * (a - half) / (a - b);
    };
    m.irw = (cross(+1) - cross(-1)) * step;
    // first nulls: first local minima walking out of the mainlobe
    auto null_at = [&](int dir) {
        long i = static_cast<long>(p);
        while (i + dir >= 0 && i + dir < static_cast<long>(pw.size()) &&
               pw[static_cast<std::size_t>(i + dir)] <= pw[static_cast<std::size_t>(i)])
            i += dir;
        return i;
    };
    const long lo = null_at(-1), hi = null_at(+1);
    double side_max = 0, side_e = 0, main_e = 0;
    for (long i = 0; i < static_cast<long>(pw.size()); ++i) {
        const double v = pw[static_cast<std::size_t>(i)];
        if (i > lo && i < hi) {
            main_e += v;
        } else {
            side_e += v;
            side_max = std::max(side_max, v);
        }
    }
    m.pslr = side_max > 0 ? 10 * std::log10(side_max / pk) : -std::numeric_limits<double>::infinity();
    m.islr = side_e > 0 ? 10 * std::log10(side_e / main_e) : -std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace detail

// Peak analysis: a window around the strongest pixel near approx is brought to baseband by its
// spectral centroid, zero padded in frequency and cut through the peak along x and y.
inline PointReport point_metrics(const ComplexImage& img, double ax, double ay, const PointMetricsOptions& opt = {}) {
    if (img.pix.empty()) throw ParameterError("point_metrics: empty image");
    const double fc = img.col_of(ax), fr = img.row_of(ay);
    const long rad_c = static_cast<long>(std::ceil(opt.search / std::abs(img.dx)));
    const long rad_r = static_cast<long>(std::ceil(opt.search / std::abs(img.dy)));
    long bc = -1, br = -1;
    double best = 0;
    for (long r = std::lround(fr) - rad_r; r <= std::lround(fr) + rad_r; ++r)
        for (long c = std::lround(fc) - rad_c; c <= std::lround(fc) + rad_c; ++c) {
            if (r < 0 || c < 0 || r >= static_cast<long>(img.ny()) || c >= static_cast<long>(img.nx())) continue;
            const double v = std::abs(img.pix(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
            if (v > best) {
                best = v;
                bc = c;
                br = r;
            }
        }
    if (bc < 0 || !(best > 0)) throw NumericError("point_metrics: no peak near the requested position");

    const std::size_t w = opt.window & ~std::size_t{1};
    const long h = static_cast<long>(w / 2);
    CArray win(w, w);
    for (long r = 0; r < static_cast<long>(w); ++r)
        for (long c = 0; c < static_cast<long>(w); ++c) {
            const long rr = br - h + r, cc = bc - h + c;
            if (rr < 0 || cc < 0 || rr >= static_cast<long>(img.ny()) || cc >= static_cast<long>(img.nx())) continue;
            win(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                img.pix(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
        }
    detail::fft2_centered(win, Dir::Forward);
    // circular spectral centroid per axis
    cplx sx{}, sy{};
    for (std::size_t r = 0; r < w; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const double p = std::norm(win(r, c));
            sx += p * std::polar(1.0, 2 * kPi * static_cast<double>(c) / static_cast<double>(w));
            sy += p * std::polar(1.0, 2 * kPi * static_cast<double>(r) / static_cast<double>(w));
        }
    auto centroid = [&](cplx s) {
        double a = std::arg(s);
        if (a < 0) a += 2 * kPi;
        return static_cast<long>(std::lround(a / (2 * kPi) * static_cast<double>(w))) % static_cast<long>(w);
    };
    const long kx = centroid(sx), ky = centroid(sy);
    // move the centroid to the center of a zero-padded spectrum
    const std::size_t W = w * opt.upsample;
    CArray big(W, W);
    const long H = static_cast<long>(W / 2);
    for (long r = 0; r < static_cast<long>(w); ++r)
        for (long c = 0; c < static_cast<long>(w); ++c) {
            long dr = r - ky, dc = c - kx;
            dr = ((dr % static_cast<long>(w)) + static_cast<long>(w) + h) % static_cast<long>(w) - h;
            dc = ((dc % static_cast<long>(w)) + static_cast<long>(w) + h) % static_cast<long>(w) - h;
            big(static_cast<std::size_t>(H + dr), static_cast<std::size_t>(H + dc)) =
                win(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    detail::fft2_centered(big, Dir::Inverse);
    std::size_t pr = 0, pc = 0;
    double pk = 0;
    for (std::size_t r = 0; r < W; ++r)
        for (std::size_t c = 0; c < W; ++c) {
            const double v = std::norm(big(r, c));
            if (v > pk) {
                pk = v;
                pr = r;
                pc = c;
            }
        }
    std::vector<double> px(W), py(W);
    for (std::size_t i = 0; i < W; ++i) {
        px[i] = std::norm(big(pr, i));
        py[i] = std::norm(big(i, pc));
    }
    const double up = static_cast<double>(opt.upsample);
    PointReport rep;
    // window pixel h sits at the coarse peak pixel
    rep.x = img.x(static_cast<double>(bc) + (static_cast<double>(pc) - static_cast<double>(H)) / up);
    rep.y = img.y(static_cast<double>(br) + (static_cast<double>(pr) - static_cast<double>(H)) / up);
    rep.peak = std::sqrt(pk) * up;
    rep.range = detail::profile_metrics(px, pc, std::abs(img.dx) / up);
    rep.azimuth = detail::profile_metrics(py, pr, std::abs(img.dy) / up);
    return rep;
}

struct ImageMetrics {
    double entropy = 0;
    double rmse = 0;
    double psnr = 0;
    bool exact = false;   // images identical; psnr holds the sentinel
    double ssim = 0;
};

constexpr double kPsnrSentinel = 999.0;

inline RArray normalized_magnitude(const CArray& a) {
    RArray m(a.rows(), a.cols());
    double mx = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m.vec()[i] = std::abs(a.vec()[i]);
        mx = std::max(mx, m.vec()[i]);
    }
    if (mx > 0)
        for (auto& v : m.vec()) v /= mx;
    return m;
}

// Shannon entropy (bits) of the 256-bin histogram of a [0, 1] image.
inline double entropy(const RArray& m) {
    if (m.empty()) throw ParameterError("entropy: empty image");
    std::vector<double> hist(256, 0.0);
    for (double v : m.vec()) hist[static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)] += 1;
    double e = 0;
    const double n = static_cast<double>(m.size());
    for (double c : hist)
        if (c > 0) e -= (c / n) * std::log2(c / n);
    return e;
}

inline double ssim(const RArray& a, const RArray& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError("ssim: dimension mismatch");
    constexpr int R = 5;
    if (a.rows() < 2 * R + 1 || a.cols() < 2 * R + 1) throw ParameterError("ssim: image smaller than the window");
    double g[2 * R + 1], gs = 0;
    for (int i = -R; i <= R; ++i) gs += g[i + R] = std::exp(-0.5 * i * i / (1.5 * 1.5));
    for (double& v : g) v /= gs;
    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
    // separable Gaussian moments over valid positions
    const std::size_t ny = a.rows() - 2 * R, nx = a.cols() - 2 * R;
    auto blur = [&](auto f) {
        RArray h(a.rows(), nx);
        for (std::size_t r = 0; r < a.rows(); ++r)
            for (std::size_t c = 0; c < nx; ++c) {
                double s = 0;
                for (int k = 0; k <= 2 * R; ++k) s += g[k] * f(r, c + static_cast<std::size_t>(k));
                h(r, c) = s;
            }
        RArray o(ny, nx);
        for (std::size_t r = 0; r < ny; ++r)
            for (std::size_t c = 0; c < nx; ++c) {
                double s = 0;
                for (int k = 0; k <= 2 * R; ++k) s += g[k] * h(r + static_cast<std::size_t>(k), c);
                o(r, c) = s;
            }
        return o;
    };
    const RArray ma = blur([&](std::size_t r, std::size_t c) { return a(r, c); });
    const RArray mb = blur([&](std::size_t r, std::size_t c) { return b(r, c); });
    const RArray aa = blur([&](std::size_t r, std::size_t c) { return a(r, c) * a(r, c); });
    const RArray bb = blur([&](std::size_t r, std::size_t c) { return b(r, c) * b(r, c); });
    const RArray ab = blur([&](std::size_t r, std::size_t c) { return a(r, c) * b(r, c); });
    double s = 0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        const double mu1 = ma.vec()[i], mu2 = mb.vec()[i];
        const double v1 = aa.vec()[i] - mu1 * mu1, v2 = bb.vec()[i] - mu2 * mu2, cv = ab.vec()[i] - mu1 * mu2;
        s += ((2 * mu1 * mu2 + C1) * (2 * cv + C2)) / ((mu1 * mu1 + mu2 * mu2 + C1) * (v1 + v2 + C2));
    }
    return s / static_cast<double>(ma.size());
}

// Metrics of img against reference on magnitudes normalized to [0, 1].
inline ImageMetrics image_metrics(const CArray& img, const CArray& ref) {
    if (img.rows() != ref.rows() || img.cols() != ref.cols()) throw ParameterError("image_metrics: dimension mismatch");
    const RArray a = normalized_magnitude(img), b = normalized_magnitude(ref);
    ImageMetrics m;
    m.entropy = entropy(a);
    double se = 0;
    for (std::size_t i = 0; i < a.size(); ++i) se += (a.vec()[i] - b.vec()[i]) * (a.vec()[i] - b.vec()[i]);
    m.rmse = std::sqrt(se / static_cast<double>(a.size()));
    m.exact = se == 0;
    m.psnr = m.exact ? kPsnrSentinel : 20 * std::log10(1.0 / m.rmse);
    m.ssim = ssim(a, b);
    return m;
}

inline ImageMetrics image_metrics(const ComplexImage& img, const ComplexImage& ref) {
    return image_metrics(img.pix, ref.pix);
}

// Floating point operation counts of the five image formers.
enum class Algorithm { bpa, pfa_lospi, ucsa, pcs_pfa, bs_pcs_pfa };

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "bpa") return Algorithm::bpa;
    if (s == "pfa-lospi") return Algorithm::pfa_lospi;
    if (s == "ucsa") return Algorithm::ucsa;
    if (s == "pcs-pfa") return Algorithm::pcs_pfa;
    if (s == "bs-pcs-pfa") return Algorithm::bs_pcs_pfa;
    throw ParameterError("unknown algorithm: " + s);
}

struct CostModel {
    double Na = 1024, Nr = 1024, Nx = 1024, Ny = 1024, M = 16, N = 8;
    // as_printed selects the typeset forms of the backprojection and interpolation-PFA counts;
    // the default uses the forms consistent with the published ratios.
    bool as_printed = false;

    void validate() const {
        for (double v : {Na, Nr, Nx, Ny, M, N})
            if (!(v > 0)) throw ParameterError("cost model: all counts must be positive");
    }
};

inline double flops(const CostModel& m, Algorithm a) {
    m.validate();
    const double NaNr = m.Na * m.Nr;
    switch (a) {
        case Algorithm::bpa: {
            const double last = m.as_printed ? 5 * m.M * m.Na * std::log2(m.M * m.Nr)
                                             : 5 * m.M * NaNr * std::log2(m.M * m.Nr);
            return 5 * NaNr * std::log2(m.Nr) + 6 * NaNr + 8 * m.Na * m.Nx * m.Ny + last;
        }
        case Algorithm::pfa_lospi:
            return (m.as_printed ? 10 : 15) * NaNr * std::log2(m.Nr) + (4 * m.M * m.M + 10 * m.M) * NaNr;
        case Algorithm::ucsa:
            return 10 * NaNr * std::log2(m.Nr) + 30 * NaNr * std::log2(2 * (m.Nr + m.Na)) + 4 * (2 * m.M - 1) * NaNr;
        case Algorithm::pcs_pfa:
            return 30 * NaNr * std::log2(m.Na) + 42 * NaNr;
        case Algorithm::bs_pcs_pfa:
            return 15 * NaNr * std::log2((m.Na * m.Na + m.Nr * m.Nr) / m.N) +
                   5 * NaNr * std::log2(NaNr / (m.N * m.N)) + 90 * NaNr;
    }
    return 0;
}

struct RatioReport {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
};

inline RatioReport ratio_report(const CostModel& m) {
    const double c5 = flops(m, Algorithm::bs_pcs_pfa);
    return {c5 / flops(m, Algorithm::bpa), c5 / flops(m, Algorithm::pfa_lospi), c5 / flops(m, Algorithm::ucsa),
            c5 / flops(m, Algorithm::pcs_pfa)};
}

}  // namespace vsar
