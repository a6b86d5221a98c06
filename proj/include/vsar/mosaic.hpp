#pragma once

// Registration of neighbouring sub-images by phase correlation and feathered assembly onto the
// ground canvas.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "beamseg.hpp"
#include "common.hpp"
#include "fft.hpp"

namespace vsar {

struct RegistrationResult {
    long dx = 0, dy = 0;          // integer displacement of b relative to a (pixels)
    double sub_dx = 0, sub_dy = 0;  // parabolic refinement of the same peak
    double peak = 0;              // correlation peak value
    double confidence = 1;        // peak over the strongest value outside its neighbourhood
};

namespace detail {

inline void fft2_plain(CArray& a, Dir d) {
    for (std::size_t r = 0; r < a.rows(); ++r) fft_inplace(a.row(r), a.cols(), d);
    std::vector<cplx> col(a.rows());
    for (std::size_t c = 0; c < a.cols(); ++c) {
        for (std::size_t r = 0; r < a.rows(); ++r) col[r] = a(r, c);
        fft_inplace(col, d);
        for (std::size_t r = 0; r < a.rows(); ++r) a(r, c) = col[r];
    }
}

inline long wrap(std::size_t i, std::size_t n) {
    const long v = static_cast<long>(i);
    return v > static_cast<long>(n) / 2 ? v - static_cast<long>(n) : v;
}

}  // namespace detail

// Phase correlation on real (magnitude) strips: b(x) = a(x - d) returns d.
// The cross-power denominator is floored at 1e-6 of its maximum.
inline RegistrationResult register_pair(const RArray& a, const RArray& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.empty())
        throw ParameterError("register_pair: strips must have the same non-zero size");
    auto flat = [](const RArray& s) {
        const auto [lo, hi] = std::minmax_element(s.vec().begin(), s.vec().end());
        return !(*hi - *lo > 0);
    };
    if (flat(a) || flat(b)) throw NumericError("register_pair: flat strip, registration has no confidence");
    const std::size_t R = a.rows(), C = a.cols();
    CArray A(R, C), B(R, C);
    for (std::size_t i = 0; i < a.size(); ++i) {
        A.vec()[i] = a.vec()[i];
        B.vec()[i] = b.vec()[i];
    }
    detail::fft2_plain(A, Dir::Forward);
    detail::fft2_plain(B, Dir::Forward);
    CArray X(R, C);
    double mx = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        X.vec()[i] = B.vec()[i] * std::conj(A.vec()[i]);
        mx = std::max(mx, std::abs(X.vec()[i]));
    }
    const double eps = 1e-6 * mx;
    for (auto& v : X.vec()) v /= std::max(std::abs(v), eps);
    detail::fft2_plain(X, Dir::Inverse);
    std::size_t br = 0, bc = 0;
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c)
            if (X(r, c).real() > X(br, bc).real()) {
                br = r;
                bc = c;
            }
    RegistrationResult res;
    res.peak = X(br, bc).real() / static_cast<double>(R * C);
    res.dy = detail::wrap(br, R);
    res.dx = detail::wrap(bc, C);
    double second = 0;
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const long dr = std::abs(detail::wrap((r + R - br) % R, R)), dc = std::abs(detail::wrap((c + C - bc) % C, C));
            if (dr <= 1 && dc <= 1) continue;
            second = std::max(second, X(r, c).real() / static_cast<double>(R * C));
        }
    res.confidence = second > 0 ? std::max(1.0, res.peak / second) : 1e9;
    auto par = [](double m, double z, double p) {
        const double d = m - 2 * z + p;
        return d != 0 ? 0.5 * (m - p) / d : 0.0;
    };
    res.sub_dx = static_cast<double>(res.dx) +
                 par(X(br, (bc + C - 1) % C).real(), X(br, bc).real(), X(br, (bc + 1) % C).real());
    res.sub_dy = static_cast<double>(res.dy) +
                 par(X((br + R - 1) % R, bc).real(), X(br, bc).real(), X((br + 1) % R, bc).real());
    return res;
}

inline RArray magnitude(const CArray& a) {
    RArray m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) m.vec()[i] = std::abs(a.vec()[i]);
    return m;
}

inline RegistrationResult register_pair(const ComplexImage& a, const ComplexImage& b) {
    return register_pair(magnitude(a.pix), magnitude(b.pix));
}

struct MosaicOptions {
    bool register_blocks = true;
    double min_confidence = 2.0;   // pairwise offsets below this are ignored
    double min_strip_energy = 1e-6; // relative to the strongest strip
    bool equalize_gain = true;
};

struct MosaicReport {
    std::vector<long> off_x, off_y;   // per-block shifts applied (pixels)
    std::vector<double> gain;         // per-block gain applied
    std::size_t pairs_used = 0;
    double loop_residual = 0;         // largest pairwise disagreement after reconciliation (pixels)
    std::vector<std::string> warnings;
};

namespace detail {

struct Edge {
    std::size_t a, b;
    double dx, dy, lg;   // b relative to a: shift and log gain
    bool shift_ok, gain_ok;
};

// Overlap window of two patches in canvas pixels; false when they do not overlap.
inline bool overlap_window(const BlockImage& A, const BlockImage& B, long& c0, long& c1, long& r0, long& r1) {
    c0 = std::max(A.c0, B.c0);
    r0 = std::max(A.r0, B.r0);
    c1 = std::min(A.c0 + static_cast<long>(A.patch.nx()), B.c0 + static_cast<long>(B.patch.nx())) - 1;
    r1 = std::min(A.r0 + static_cast<long>(A.patch.ny()), B.r0 + static_cast<long>(B.patch.ny())) - 1;
    return c1 > c0 + 3 && r1 > r0 + 3;
}

// Largest 2^a 3^b 5^c not above n.
inline long smooth_floor(long n) {
    for (long m = n; m > 1; --m) {
        long k = m;
        for (long p : {2L, 3L, 5L})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
    return 1;
}

inline RArray strip(const BlockImage& A, long c0, long c1, long r0, long r1) {
    RArray s(static_cast<std::size_t>(r1 - r0 + 1), static_cast<std::size_t>(c1 - c0 + 1));
    for (long r = r0; r <= r1; ++r)
        for (long c = c0; c <= c1; ++c)
            s(static_cast<std::size_t>(r - r0), static_cast<std::size_t>(c - c0)) =
                std::abs(A.patch.pix(static_cast<std::size_t>(r - A.r0), static_cast<std::size_t>(c - A.c0)));
    return s;
}

// Least squares over the block graph with one anchored node (Gauss-Seidel).
inline std::vector<double> solve_graph(std::size_t n, std::size_t anchor, const std::vector<Edge>& E,
                                       double Edge::*val, bool Edge::*ok) {
    std::vector<double> x(n, 0.0);
    for (int it = 0; it < 500; ++it) {
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == anchor) continue;
            double s = 0;
            int k = 0;
            for (const auto& e : E) {
                if (!(e.*ok)) continue;
                if (e.b == i) {
                    s += x[e.a] + e.*val;
                    ++k;
                } else if (e.a == i) {
                    s += x[e.b] - e.*val;
                    ++k;
                }
            }
            if (k == 0) continue;
            const double v = s / k;
            change = std::max(change, std::abs(v - x[i]));
            x[i] = v;
        }
        if (change < 1e-9) break;
    }
    return x;
}

inline double feather(double d, double half, double ov) {
    return std::clamp((half - d) / (2 * ov), 0.0, 1.0);
}

}  // namespace detail

// Places every block at its true center, shifted by the reconciled registration offsets and
// scaled by the reconciled overlap gains, with linear feathering across each overlap.
inline ComplexImage assemble(std::vector<BlockImage>& blocks, const SegmentationPlan& plan, const CanvasSpec& cv,
                             const MosaicOptions& opt = {}, MosaicReport* report = nullptr) {
    const std::size_t nb = blocks.size();
    MosaicReport rep;
    rep.off_x.assign(nb, 0);
    rep.off_y.assign(nb, 0);
    rep.gain.assign(nb, 1.0);
    if (nb > 1 && (opt.register_blocks || opt.equalize_gain)) {
        std::vector<detail::Edge> E;
        double emax = 0;
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t b = a + 1; b < nb; ++b) {
                const auto& A = blocks[a].block;
                const auto& B = blocks[b].block;
                if (std::abs(A.i - B.i) + std::abs(A.j - B.j) == 1) pairs.emplace_back(a, b);
            }
        std::vector<detail::Edge> cand(pairs.size());
        std::vector<double> en(pairs.size(), 0.0);
        parallel_for(pairs.size(), [&](std::size_t k) {
            const auto [a, b] = pairs[k];
            detail::Edge e{a, b, 0, 0, 0, false, false};
            long c0, c1, r0, r1;
            if (detail::overlap_window(blocks[a], blocks[b], c0, c1, r0, r1)) {
                // trim to transform-friendly sizes
                c1 = c0 + detail::smooth_floor(c1 - c0 + 1) - 1;
                r1 = r0 + detail::smooth_floor(r1 - r0 + 1) - 1;
                const RArray sa = detail::strip(blocks[a], c0, c1, r0, r1);
                const RArray sb = detail::strip(blocks[b], c0, c1, r0, r1);
                double ea = 0, eb = 0;
                for (std::size_t i = 0; i < sa.size(); ++i) {
                    ea += sa.vec()[i] * sa.vec()[i];
                    eb += sb.vec()[i] * sb.vec()[i];
                }
                en[k] = std::min(ea, eb);
                try {
                    const RegistrationResult rr = register_pair(sa, sb);
                    if (rr.confidence >= opt.min_confidence) {
                        e.dx = static_cast<double>(rr.dx);
                        e.dy = static_cast<double>(rr.dy);
                        e.shift_ok = true;
                    }
                } catch (const NumericError&) {
                }
                // median magnitude ratio over pixels well above the strip floor
                const double ma = *std::max_element(sa.vec().begin(), sa.vec().end());
                std::vector<double> ratios;
                for (std::size_t i = 0; i < sa.size(); ++i)
                    if (sa.vec()[i] > 0.1 * ma && sb.vec()[i] > 0.1 * ma) ratios.push_back(sb.vec()[i] / sa.vec()[i]);
                if (ratios.size() >= 4) {
                    std::nth_element(ratios.begin(), ratios.begin() + static_cast<long>(ratios.size() / 2), ratios.end());
                    e.lg = std::log(std::clamp(ratios[ratios.size() / 2], 0.25, 4.0));
                    e.gain_ok = true;
                }
            }
            cand[k] = e;
        });
        for (double v : en) emax = std::max(emax, v);
        for (std::size_t k = 0; k < cand.size(); ++k) {
            if (en[k] <= opt.min_strip_energy * emax) continue;
            cand[k].shift_ok = cand[k].shift_ok && opt.register_blocks;
            cand[k].gain_ok = cand[k].gain_ok && opt.equalize_gain;
            if (cand[k].shift_ok || cand[k].gain_ok) E.push_back(cand[k]);
        }
        rep.pairs_used = E.size();
        const std::size_t anchor = plan.index(plan.N / 2, plan.N / 2) < nb ? plan.index(plan.N / 2, plan.N / 2) : 0;
        const auto ox = detail::solve_graph(nb, anchor, E, &detail::Edge::dx, &detail::Edge::shift_ok);
        const auto oy = detail::solve_graph(nb, anchor, E, &detail::Edge::dy, &detail::Edge::shift_ok);
        const auto lg = detail::solve_graph(nb, anchor, E, &detail::Edge::lg, &detail::Edge::gain_ok);
        for (const auto& e : E) {
            if (!e.shift_ok) continue;
            const double r = std::max(std::abs(ox[e.b] - ox[e.a] - e.dx), std::abs(oy[e.b] - oy[e.a] - e.dy));
            rep.loop_residual = std::max(rep.loop_residual, r);
        }
        if (rep.loop_residual > 2.0)
            rep.warnings.push_back("mosaic: inconsistent registration loop; offsets reconciled by least squares");
        for (std::size_t i = 0; i < nb; ++i) {
            // a patch seen shifted by +d is moved back by -d
            rep.off_x[i] = -std::lround(ox[i]);
            rep.off_y[i] = -std::lround(oy[i]);
            rep.gain[i] = std::exp(-lg[i]);
        }
    }

    ComplexImage out;
    out.pix = CArray(cv.ny, cv.nx);
    out.x0 = cv.x0;
    out.y0 = cv.y0;
    out.dx = cv.dx;
    out.dy = cv.dy;
    out.coords = CoordSys::GOCS;
    RArray wsum(cv.ny, cv.nx);
    for (std::size_t k = 0; k < nb; ++k) {
        const BlockImage& bi = blocks[k];
        const SubBlock& b = bi.block;
        const double ov = std::max(plan.overlap, 1e-9);
        for (std::size_t r = 0; r < bi.patch.ny(); ++r) {
            const long rr = bi.r0 + static_cast<long>(r) + rep.off_y[k];
            if (rr < 0 || rr >= static_cast<long>(cv.ny)) continue;
            const double wy = plan.N == 1 ? 1.0 : detail::feather(std::abs(bi.patch.y(static_cast<double>(r)) - b.Y), b.half, ov);
            for (std::size_t c = 0; c < bi.patch.nx(); ++c) {
                const long cc = bi.c0 + static_cast<long>(c) + rep.off_x[k];
                if (cc < 0 || cc >= static_cast<long>(cv.nx)) continue;
                const double wx =
                    plan.N == 1 ? 1.0 : detail::feather(std::abs(bi.patch.x(static_cast<double>(c)) - b.X), b.half, ov);
                const double w = wx * wy;
                if (w <= 0) continue;
                out.pix(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) += w * rep.gain[k] * bi.patch.pix(r, c);
                wsum(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) += w;
            }
        }
    }
    for (std::size_t i = 0; i < out.pix.size(); ++i)
        if (wsum.vec()[i] > 0) out.pix.vec()[i] /= wsum.vec()[i];
    if (report) *report = rep;
    return out;
}

}  // namespace vsar
