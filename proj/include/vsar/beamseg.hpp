#pragma once

// Beam-segmenting fast filtering: the coarse ground-frame image is cut into sub-blocks, each crop
// is carried back to a decimated phase history that holds only that block's energy, re-referenced
// to the block center and refocused locally.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "common.hpp"
#include "echo_sim.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "interp.hpp"
#include "parallel.hpp"
#include "pcs_engine.hpp"
#include "pfa.hpp"
#include "wce.hpp"

namespace vsar {

enum class Rounding { floor, round, ceil };

inline Rounding rounding_from_string(const std::string& s) {
    if (s == "floor") return Rounding::floor;
    if (s == "round") return Rounding::round;
    if (s == "ceil") return Rounding::ceil;
    throw ParameterError("unknown rounding policy: " + s);
}

struct SubBlock {
    int i = 0, j = 0;          // column (x) and row (y) index in the layout
    double X = 0, Y = 0;       // true center (m)
    double Xs = 0, Ys = 0;     // distorted center (m)
    double half = 0;           // half side of the ground footprint including overlap (m)
    long c0 = 0, r0 = 0;       // crop origin in coarse pixels
    std::size_t wc = 0;        // crop side (pixels)
    bool clipped = false;      // crop ran past the coarse image and was zero padded
};

struct SegmentationPlan {
    int N = 1;
    double W_r = 0;       // largest admissible sub-block size (m)
    double pitch = 0;     // block spacing R_size / N (m)
    double overlap = 0;   // overlap on each side of a block (m)
    double R_size = 0;
    std::vector<SubBlock> blocks;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j * N + i); }
};

inline int segmentation_level(double R_size, double W_r, Rounding pol) {
    const double r = R_size / W_r;
    double n = 0;
    switch (pol) {
        case Rounding::floor: n = std::floor(r); break;
        case Rounding::round: n = std::round(r); break;
        case Rounding::ceil: n = std::ceil(r); break;
    }
    // a scene that already fits in one block is one block
    if (R_size <= W_r) n = 1;
    return static_cast<int>(n);
}

// Uniform N x N layout. N_override > 0 pins the level; overlap < 0 selects the default.
inline SegmentationPlan plan_segmentation(double R_size, double gamma, double rho_x, Rounding pol = Rounding::round,
                                          int N_override = 0, double overlap = -1.0) {
    if (!(gamma > 0)) throw ParameterError("segmentation: gamma must be positive");
    if (!(R_size > 0)) throw ParameterError("segmentation: scene size must be positive");
    SegmentationPlan p;
    p.R_size = R_size;
    p.W_r = std::sqrt(0.5) * gamma;
    p.N = N_override > 0 ? N_override : segmentation_level(R_size, p.W_r, pol);
    if (p.N < 1) throw ParameterError("segmentation: level below 1");
    p.pitch = R_size / p.N;
    p.overlap = overlap >= 0 ? overlap : std::max(10 * rho_x, 0.05 * p.W_r);
    if (!(p.overlap > 0)) throw ParameterError("segmentation: overlap must be positive");
    for (int j = 0; j < p.N; ++j)
        for (int i = 0; i < p.N; ++i) {
            SubBlock b;
            b.i = i;
            b.j = j;
            b.X = -R_size / 2 + p.pitch * (i + 0.5);
            b.Y = -R_size / 2 + p.pitch * (j + 0.5);
            b.half = p.pitch / 2 + p.overlap;
            p.blocks.push_back(b);
        }
    return p;
}

// Places each block's crop on the coarse image around its distorted center. The crop spans the
// distorted footprint plus margin_m on every side.
inline void attach_crops(SegmentationPlan& plan, const ComplexImage& coarse, const FrameGeometry& f,
                         double margin_m = 1.0) {
    for (auto& b : plan.blocks) {
        const Point2 c = distortion_map(b.X, b.Y, f);
        b.Xs = c.x;
        b.Ys = c.y;
        double ext = b.half;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0}) {
                const Point2 d = distortion_map(b.X + sx * b.half, b.Y + sy * b.half, f);
                ext = std::max({ext, std::abs(d.x - c.x), std::abs(d.y - c.y)});
            }
        const double side = 2 * (ext + margin_m) / std::min(coarse.dx, coarse.dy);
        b.wc = static_cast<std::size_t>(std::ceil(side / 2)) * 2;
        const long cc = std::lround(coarse.col_of(c.x)), rc = std::lround(coarse.row_of(c.y));
        b.c0 = cc - static_cast<long>(b.wc / 2);
        b.r0 = rc - static_cast<long>(b.wc / 2);
        b.clipped = b.c0 < 0 || b.r0 < 0 || b.c0 + static_cast<long>(b.wc) > static_cast<long>(coarse.nx()) ||
                    b.r0 + static_cast<long>(b.wc) > static_cast<long>(coarse.ny());
    }
}

// Complex crop at the block's window; pixels outside the coarse image are zero.
inline ComplexImage extract_subimage(const ComplexImage& coarse, const SubBlock& b) {
    if (b.wc == 0) throw ParameterError("extract_subimage: block has no crop window");
    ComplexImage s;
    s.pix = CArray(b.wc, b.wc);
    s.dx = coarse.dx;
    s.dy = coarse.dy;
    s.x0 = coarse.x(static_cast<double>(b.c0));
    s.y0 = coarse.y(static_cast<double>(b.r0));
    s.coords = coarse.coords;
    s.frame = coarse.frame;
    for (std::size_t r = 0; r < b.wc; ++r) {
        const long rr = b.r0 + static_cast<long>(r);
        if (rr < 0 || rr >= static_cast<long>(coarse.ny())) continue;
        for (std::size_t c = 0; c < b.wc; ++c) {
            const long cc = b.c0 + static_cast<long>(c);
            if (cc < 0 || cc >= static_cast<long>(coarse.nx())) continue;
            s.pix(r, c) = coarse.pix(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
        }
    }
    return s;
}

inline Trajectory decimate(const Trajectory& tr, std::size_t D) {
    if (D == 0) throw ParameterError("decimate: factor must be positive");
    const long n = static_cast<long>(tr.size()), mc = n / 2;
    const long J = std::min(mc, n - 1 - mc) / static_cast<long>(D);
    Trajectory o = tr;
    o.pos.clear();
    o.t.clear();
    for (long j = -J; j <= J; ++j) {
        const auto m = static_cast<std::size_t>(mc + j * static_cast<long>(D));
        o.pos.push_back(tr.pos[m]);
        o.t.push_back(tr.t[m]);
    }
    return o;
}

// Decimated phase history of one sub-block, deskewed, sampled in fast frequency.
struct SubBeam {
    EchoMatrix data;      // rows: decimated pulses; columns: f = fast.at(k) (Hz)
    Trajectory traj;      // decimated trajectory
    PcsPlan plan;         // plan of the local inverse
    std::size_t D = 1;    // pulse decimation
    double xc = 0, yc = 0;  // crop center (m)
};

struct SubBeamOptions {
    double pad_x = 1.25;   // spectral zero padding over the crop (range)
    double pad_y = 1.5;    // spectral zero padding over the crop (azimuth)
};

// Crop -> rectangular sub-spectrum -> inverse chirp scaling onto decimated pulses, then the
// crop-center modulation is restored so the result is referenced to the scene center again.
inline SubBeam beam_segment(const ComplexImage& crop, const PcsPlan& full, const Trajectory& tr,
                            const RadarParams& prm, const SubBeamOptions& opt = {}) {
    const std::size_t wc = crop.nx();
    if (wc != crop.ny() || wc < 8) throw ParameterError("beam_segment: crop must be square");
    if (tr.size() != full.pulses()) throw ParameterError("beam_segment: trajectory does not match the plan");
    SubBeam sb;
    sb.xc = crop.x(static_cast<double>(wc / 2));
    sb.yc = crop.y(static_cast<double>(wc / 2));
    const KGrid& G = full.grid;

    const ColumnMap& mid = full.cols[G.nx / 2];
    const double alpha = mid.empty() ? 1.0 : mid.alpha;
    sb.D = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(static_cast<double>(G.ny) / (opt.pad_y * static_cast<double>(wc) * alpha))));
    const double tk = std::abs(std::tan(full.theta_k));
    KGrid g;
    g.nx = good_fft_size(static_cast<std::size_t>(std::ceil(opt.pad_x * static_cast<double>(wc) * (1.0 + tk))));
    g.ny = good_fft_size(static_cast<std::size_t>(std::ceil(static_cast<double>(G.ny) / (static_cast<double>(sb.D) * alpha))));
    g.kx0 = G.kx0;
    g.ky0 = G.ky0;
    g.dkx = 2 * kPi / (static_cast<double>(g.nx) * crop.dx);
    g.dky = 2 * kPi / (static_cast<double>(g.ny) * crop.dy);

    sb.traj = decimate(tr, sb.D);
    const ApertureGeometry gd = aperture_geometry(sb.traj);
    const double df = g.dkx / full.kx_scale;
    const auto nr = static_cast<std::size_t>(2 * std::ceil(0.55 * prm.B / df) + 16);
    ContentExtent ext;
    const double cph = std::cos(gd.phi_k());
    ext.slant = 0.5 * static_cast<double>(wc) * crop.dx * cph *
                (std::abs(std::cos(full.theta_k)) + std::abs(std::sin(full.theta_k)));
    ext.y = 0.5 * static_cast<double>(wc) * crop.dy;
    sb.plan = make_pcs_plan(gd, prm, nr, df, g, full.kx_scale, ext, false, 8.0);

    // baseband sub-spectrum: S(K) exp(-j K . c) on the coarse K grid
    EchoMatrix wr;
    wr.domain = Domain::wavenumber_rect;
    wr.data = CArray(g.ny, g.nx);
    const long oy = static_cast<long>(g.ny / 2) - static_cast<long>(wc / 2);
    const long ox = static_cast<long>(g.nx / 2) - static_cast<long>(wc / 2);
    std::vector<cplx> ex(wc);
    for (std::size_t c = 0; c < wc; ++c) ex[c] = std::polar(1.0, g.kx0 * (crop.x(static_cast<double>(c)) - sb.xc));
    for (std::size_t r = 0; r < wc; ++r) {
        const cplx ey = std::polar(1.0, g.ky0 * (crop.y(static_cast<double>(r)) - sb.yc));
        cplx* dst = wr.data.row(static_cast<std::size_t>(oy + static_cast<long>(r))) + ox;
        for (std::size_t c = 0; c < wc; ++c) dst[c] = crop.pix(r, c) * (ex[c] * ey);
    }
    cfft2(wr.data, Dir::Inverse);

    sb.data = inverse_pcs(wr, sb.plan);
    sb.data.domain = Domain::phase_history_sub;
    sb.data.fast = centered_axis(nr, df, "Hz");
    sb.data.slow = Axis{sb.traj.t.front(), sb.traj.size() > 1 ? sb.traj.t[1] - sb.traj.t[0] : 1.0, sb.traj.size(), "s"};
    sb.data.rvp_removed = true;

    // restore exp(j K(m, f) . c) with the wavenumbers the mapping actually assigned
    const PcsPlan& P = sb.plan;
    std::vector<long> valid;
    for (std::size_t q = 0; q < g.nx; ++q)
        if (!P.cols[q].empty()) valid.push_back(static_cast<long>(q));
    if (valid.empty()) throw NumericError("beam_segment: sub plan has no populated columns");
    parallel_for(P.pulses(), [&](std::size_t m) {
        const auto& rf = P.range[m];
        const double kxs = P.kx_scale / rf.xi;
        cplx* row = sb.data.data.row(m);
        const double md = static_cast<double>(m);
        for (std::size_t k = 0; k < nr; ++k) {
            const double f = sb.data.fast.at(static_cast<double>(k));
            const double KX = kxs * (prm.fc + f);
            const double qf = (f - rf.beta) / rf.xi / P.dfp + static_cast<double>(g.nx / 2);
            // nearest populated columns around qf
            auto it = std::lower_bound(valid.begin(), valid.end(), static_cast<long>(std::floor(qf)));
            long qa, qb;
            if (it == valid.end()) {
                qa = qb = valid.back();
            } else if (*it > qf || it == valid.begin()) {
                qb = *it;
                qa = it == valid.begin() ? qb : *(it - 1);
            } else {
                qa = *it;
                qb = (it + 1) == valid.end() ? qa : *(it + 1);
            }
            double w = 0;
            if (qb != qa) w = std::clamp((qf - static_cast<double>(qa)) / static_cast<double>(qb - qa), 0.0, 1.0);
            const ColumnMap& A = P.cols[static_cast<std::size_t>(qa)];
            const ColumnMap& B = P.cols[static_cast<std::size_t>(qb)];
            const double KY = (1 - w) * (A.ky_a * md + A.ky_b) + w * (B.ky_a * md + B.ky_b);
            row[k] *= std::polar(1.0, KX * sb.xc + KY * sb.yc);
        }
    });
    return sb;
}

// Fast-frequency value of column k; time axes are converted with the chirp rate.
inline double fast_frequency(const EchoMatrix& e, const RadarParams& prm, std::size_t k) {
    const double v = e.fast.at(static_cast<double>(k));
    return e.fast.unit == "s" ? prm.Kr * v : v;
}

// Re-references the dechirp from the scene center to (X, Y):
// multiplies by exp(j 4 pi / c (fc + f)(R_i(t) - R_a(t))).
inline EchoMatrix second_moco(const EchoMatrix& sub, const Trajectory& tr, const RadarParams& prm, double X,
                              double Y) {
    if (sub.domain != Domain::phase_history_sub && sub.domain != Domain::dechirped)
        throw DomainError(std::string("second_moco: expected phase_history_sub input, got ") + to_string(sub.domain));
    if (tr.size() != sub.pulses()) throw ParameterError("second_moco: trajectory does not match the pulses");
    EchoMatrix out = sub;
    const auto Ri = slant_range_to_point(tr, X, Y);
    const auto Ra = slant_range_to_point(tr, 0.0, 0.0);
    parallel_for(sub.pulses(), [&](std::size_t m) {
        const double d = Ri[m] - Ra[m];
        cplx* row = out.data.row(m);
        // phase is linear in k: rotate by a fixed step, reseeded every 64 samples
        const double ph0 = 4 * kPi / prm.c * (prm.fc + fast_frequency(sub, prm, 0)) * d;
        const double dph = 4 * kPi / prm.c * (fast_frequency(sub, prm, 1) - fast_frequency(sub, prm, 0)) * d;
        const cplx step = std::polar(1.0, dph);
        cplx v;
        for (std::size_t k = 0; k < sub.samples(); ++k) {
            if ((k & 63) == 0) v = std::polar(1.0, ph0 + dph * static_cast<double>(k));
            row[k] *= v;
            v *= step;
        }
    });
    return out;
}

struct AutofocusResult {
    double qpe = 0;          // accumulated quadratic phase at the aperture edge (rad)
    int iterations = 0;
    double last_shift = 0;   // bins
    bool applied = false;
    std::string warning;
};

namespace detail {

// Magnitude image of a run of pulses: range transform, azimuth transform padded to len.
inline RArray look_magnitude(const EchoMatrix& e, std::size_t m0, std::size_t n, std::size_t len) {
    const std::size_t nr = e.samples();
    CArray a(len, nr);
    const std::size_t off = len / 2 - n / 2;
    for (std::size_t m = 0; m < n; ++m) std::copy(e.data.row(m0 + m), e.data.row(m0 + m) + nr, a.row(off + m));
    cfft_rows(a, Dir::Forward);
    cfft_cols(a, Dir::Forward);
    RArray r(len, nr);
    for (std::size_t i = 0; i < a.size(); ++i) r.vec()[i] = std::abs(a.vec()[i]);
    return r;
}

}  // namespace detail

inline void apply_qpe(EchoMatrix& e, double q) {
    const double c = static_cast<double>(e.pulses() - 1) / 2;
    const double h = static_cast<double>(e.pulses()) / 2;
    for (std::size_t m = 0; m < e.pulses(); ++m) {
        const double u = (static_cast<double>(m) - c) / h;
        const cplx w = std::polar(1.0, q * u * u);
        cplx* row = e.data.row(m);
        for (std::size_t k = 0; k < e.samples(); ++k) row[k] *= w;
    }
}

// Map-Drift: two half-aperture looks, their azimuth drift gives the quadratic phase error.
// The correction exp(-j Q u^2), u in [-1, 1] across the aperture, is applied in place.
inline AutofocusResult mapdrift_autofocus(EchoMatrix& e, int max_iter = 5, double tol = 0.1,
                                          double min_corr = 0.2) {
    AutofocusResult res;
    const std::size_t na = e.pulses();
    if (na < 64) throw ParameterError("mapdrift: at least 64 pulses are required");
    const std::size_t n = na / 2;
    const std::size_t len = good_fft_size(2 * n);
    for (int it = 0; it < max_iter; ++it) {
        const RArray A = detail::look_magnitude(e, 0, n, len);
        const RArray B = detail::look_magnitude(e, na - n, n, len);
        // azimuth cross-correlation summed over range, via transforms along columns
        std::vector<cplx> acc(len, cplx{});
        double ea = 0, eb = 0;
        std::vector<cplx> fa(len), fb(len);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            double ma = 0, mb = 0;
            for (std::size_t r = 0; r < len; ++r) {
                ma += A(r, k);
                mb += B(r, k);
            }
            ma /= static_cast<double>(len);
            mb /= static_cast<double>(len);
            for (std::size_t r = 0; r < len; ++r) {
                fa[r] = A(r, k) - ma;
                fb[r] = B(r, k) - mb;
                ea += std::norm(fa[r]);
                eb += std::norm(fb[r]);
            }
            fft_inplace(fa, Dir::Forward);
            fft_inplace(fb, Dir::Forward);
            for (std::size_t r = 0; r < len; ++r) acc[r] += fb[r] * std::conj(fa[r]);
        }
        fft_inplace(acc, Dir::Inverse);
        std::size_t best = 0;
        for (std::size_t r = 1; r < len; ++r)
            if (acc[r].real() > acc[best].real()) best = r;
        const double peak = acc[best].real() / static_cast<double>(len);
        const double coef = (ea > 0 && eb > 0) ? peak / std::sqrt(ea * eb) : 0.0;
        if (coef < min_corr) {
            res.warning = "mapdrift: correlation peak not significant; no correction applied";
            break;
        }
        const double ym = acc[(best + len - 1) % len].real(), y0 = acc[best].real(), yp = acc[(best + 1) % len].real();
        const double den = ym - 2 * y0 + yp;
        double shift = static_cast<double>(best);
        if (shift > static_cast<double>(len) / 2) shift -= static_cast<double>(len);
        if (std::abs(den) > 0) shift += 0.5 * (ym - yp) / den;
        // drift in bins of an n-pulse look
        const double drift = shift * static_cast<double>(n) / static_cast<double>(len);
        res.last_shift = drift;
        res.iterations = it + 1;
        if (std::abs(drift) < tol) break;
        const double q = kPi * drift;
        apply_qpe(e, -q);
        res.qpe += q;
        res.applied = true;
    }
    return res;
}

// Output raster shared by all blocks.
struct CanvasSpec {
    double x0 = 0, y0 = 0, dx = 0.1, dy = 0.1;
    std::size_t nx = 0, ny = 0;

    static CanvasSpec square(double side, double dx, double dy) {
        CanvasSpec c;
        c.dx = dx;
        c.dy = dy;
        c.nx = static_cast<std::size_t>(std::llround(side / dx)) + 1;
        c.ny = static_cast<std::size_t>(std::llround(side / dy)) + 1;
        c.x0 = -static_cast<double>(c.nx / 2) * dx;
        c.y0 = -static_cast<double>(c.ny / 2) * dy;
        return c;
    }
    double x(double c) const { return x0 + c * dx; }
    double y(double r) const { return y0 + r * dy; }
};

// Canvas patch of one block; pixel (r, c) of pix sits on canvas pixel (r0 + r, c0 + c).
struct BlockImage {
    SubBlock block;
    ComplexImage patch;
    long c0 = 0, r0 = 0;
    AutofocusResult focus;
    bool skipped_resampling = false;
};

namespace detail {

inline void footprint(const CanvasSpec& cv, const SubBlock& b, long& c0, long& c1, long& r0, long& r1) {
    c0 = std::max(0L, static_cast<long>(std::ceil((b.X - b.half - cv.x0) / cv.dx)));
    c1 = std::min(static_cast<long>(cv.nx) - 1, static_cast<long>(std::floor((b.X + b.half - cv.x0) / cv.dx)));
    r0 = std::max(0L, static_cast<long>(std::ceil((b.Y - b.half - cv.y0) / cv.dy)));
    r1 = std::min(static_cast<long>(cv.ny) - 1, static_cast<long>(std::floor((b.Y + b.half - cv.y0) / cv.dy)));
}

inline BlockImage empty_patch(const CanvasSpec& cv, const SubBlock& b) {
    BlockImage bi;
    bi.block = b;
    long c0, c1, r0, r1;
    footprint(cv, b, c0, c1, r0, r1);
    if (c1 < c0 || r1 < r0) throw ParameterError("sub-block footprint lies outside the canvas");
    bi.c0 = c0;
    bi.r0 = r0;
    bi.patch.pix = CArray(static_cast<std::size_t>(r1 - r0 + 1), static_cast<std::size_t>(c1 - c0 + 1));
    bi.patch.dx = cv.dx;
    bi.patch.dy = cv.dy;
    bi.patch.x0 = cv.x(static_cast<double>(c0));
    bi.patch.y0 = cv.y(static_cast<double>(r0));
    return bi;
}

}  // namespace detail

// Local image of a re-referenced sub-beam by a chirp-scaling PFA about the block center.
// Coordinates are ground axes relative to (X, Y).
inline ComplexImage subblock_local_image(const EchoMatrix& sub, const Trajectory& tr, const RadarParams& prm,
                                         const SubBlock& b, double dx, double dy, double content_half) {
    const ApertureGeometry gi = aperture_geometry(tr, b.X, b.Y);
    ContentExtent ext;
    ext.slant = content_half * std::cos(gi.phi_k()) *
                (std::abs(std::cos(gi.theta_k())) + std::abs(std::sin(gi.theta_k())));
    ext.y = content_half;
    const double df = sub.fast.unit == "s" ? prm.Kr * sub.fast.step : sub.fast.step;
    const PcsPlan pl = make_grid_plan(gi, prm, sub.samples(), df, dx, dy, ext, !sub.rvp_removed);
    EchoMatrix in = sub;
    in.domain = Domain::dechirped;
    EchoMatrix wr = apcs(rpcs(in, pl), pl);
    return image_from_grid(wr, pl.grid, CoordSys::GOCS, true);
}

// Renders the local image onto the block footprint: every canvas point is looked up at the
// position where the planar model about (X, Y) images it.
inline BlockImage render_local(const ComplexImage& local, const Trajectory& tr, const SubBlock& b,
                               const CanvasSpec& cv) {
    BlockImage bi = detail::empty_patch(cv, b);
    const NumericDistortion dmap(tr, {b.X, b.Y});
    parallel_for(bi.patch.ny(), [&](std::size_t r) {
        const double y = bi.patch.y(static_cast<double>(r));
        for (std::size_t c = 0; c < bi.patch.nx(); ++c) {
            const double x = bi.patch.x(static_cast<double>(c));
            const Point2 d = dmap({x, y});
            // interpolate the baseband samples, then restore the carrier at the exact point
            bi.patch.pix(r, c) = lanczos3_at(local.pix, local.row_of(d.y), local.col_of(d.x)) *
                                 std::polar(1.0, -(local.kcx * d.x + local.kcy * d.y));
        }
    });
    return bi;
}

// Resampling-free sub-block image: 2-D transform of the polar sub-beam, each canvas point read
// at its delay and Doppler relative to the block center.
inline BlockImage subblock_direct(const EchoMatrix& sub, const Trajectory& tr, const RadarParams& prm,
                                  const SubBlock& b, const CanvasSpec& cv) {
    const std::size_t na = sub.pulses(), nr = sub.samples();
    const std::size_t pa = good_fft_size(2 * na), pr = good_fft_size(2 * nr);
    CArray a(pa, pr);
    const std::size_t oa = pa / 2 - na / 2, orr = pr / 2 - nr / 2;
    for (std::size_t m = 0; m < na; ++m) std::copy(sub.data.row(m), sub.data.row(m) + nr, a.row(oa + m) + orr);
    cfft2(a, Dir::Forward);
    const double df = sub.fast.unit == "s" ? prm.Kr * sub.fast.step : sub.fast.step;
    const double dt = sub.slow.step;
    const std::size_t mc = na / 2;
    const double tn = tr.t[std::min(mc + 1, na - 1)], tp = tr.t[mc > 0 ? mc - 1 : 0];
    const auto rng = [&](std::size_t i, double x, double y) {
        const Vec3& q = tr.pos[i];
        return std::sqrt((q.x - x) * (q.x - x) + (q.y - y) * (q.y - y) + q.z * q.z);
    };
    const double Ri0 = rng(mc, b.X, b.Y);
    const double Ri1 = (rng(std::min(mc + 1, na - 1), b.X, b.Y) - rng(mc > 0 ? mc - 1 : 0, b.X, b.Y)) / (tn - tp);
    BlockImage bi = detail::empty_patch(cv, b);
    bi.skipped_resampling = true;
    const double k0 = 4 * kPi / prm.c;
    parallel_for(bi.patch.ny(), [&](std::size_t r) {
        const double y = bi.patch.y(static_cast<double>(r));
        for (std::size_t c = 0; c < bi.patch.nx(); ++c) {
            const double x = bi.patch.x(static_cast<double>(c));
            const double d0 = rng(mc, x, y) - Ri0;
            const double d1 = (rng(std::min(mc + 1, na - 1), x, y) - rng(mc > 0 ? mc - 1 : 0, x, y)) / (tn - tp) - Ri1;
            // exp(-j k0 (fc + f)(d0 + d1 t)) peaks at these transform bins
            const double col = -static_cast<double>(pr) * df * 2 * d0 / prm.c + static_cast<double>(pr / 2);
            const double row = -static_cast<double>(pa) * dt * 2 * prm.fc * d1 / prm.c + static_cast<double>(pa / 2);
            bi.patch.pix(r, c) = lanczos3_at(a, row, col) * std::polar(1.0, k0 * prm.fc * d0);
        }
    });
    return bi;
}

}  // namespace vsar
