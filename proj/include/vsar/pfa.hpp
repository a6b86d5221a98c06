#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"
#include "echo_sim.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "interp.hpp"
#include "parallel.hpp"
#include "pcs_engine.hpp"

namespace vsar {

enum class CoordSys { GOCS, LOS };

// Focused image; rows run along y, columns along x. Pixel (r, c) sits at (x(c), y(r)).
// When kcx or kcy is non-zero the samples are baseband: the image value at (x, y) is
// pix * exp(-j (kcx x + kcy y)).
struct ComplexImage {
    CArray pix;
    double x0 = 0, y0 = 0;
    double dx = 1, dy = 1;
    int frame = 0;
    CoordSys coords = CoordSys::GOCS;
    double kcx = 0, kcy = 0;

    std::size_t nx() const { return pix.cols(); }
    std::size_t ny() const { return pix.rows(); }
    double x(double c) const { return x0 + c * dx; }
    double y(double r) const { return y0 + r * dy; }
    double col_of(double xv) const { return (xv - x0) / dx; }
    double row_of(double yv) const { return (yv - y0) / dy; }
};

struct PfaOptions {
    double dx = 0.1, dy = 0.1;   // output pixel spacing (m)
    double scene_half = 50.0;    // half side of the region holding scatterers (m)
    std::size_t kernel = 16;     // interpolation taps (LOSPI only)
};

// Image from a rectangular wavenumber grid: I = exp(-j(kx0 x + ky0 y)) * DFT2(S).
// With baseband set the carrier is recorded instead of applied.
inline ComplexImage image_from_grid(const EchoMatrix& wr, const KGrid& g, CoordSys cs = CoordSys::GOCS,
                                    bool baseband = false) {
    ComplexImage img;
    img.pix = wr.data;
    cfft2(img.pix, Dir::Forward);
    img.dx = g.dx();
    img.dy = g.dy();
    img.x0 = -static_cast<double>(g.nx / 2) * img.dx;
    img.y0 = -static_cast<double>(g.ny / 2) * img.dy;
    img.coords = cs;
    if (baseband) {
        img.kcx = g.kx0;
        img.kcy = g.ky0;
        return img;
    }
    std::vector<cplx> ex(g.nx), ey(g.ny);
    for (std::size_t c = 0; c < g.nx; ++c) ex[c] = std::polar(1.0, -g.kx0 * img.x(static_cast<double>(c)));
    for (std::size_t r = 0; r < g.ny; ++r) ey[r] = std::polar(1.0, -g.ky0 * img.y(static_cast<double>(r)));
    parallel_for(g.ny, [&](std::size_t r) {
        cplx* p = img.pix.row(r);
        for (std::size_t c = 0; c < g.nx; ++c) p[c] *= ex[c] * ey[r];
    });
    return img;
}

struct PcsPfaResult {
    ComplexImage image;
    PcsPlan plan;
};

// RPCS then APCS then 2-D transform; the image stays in the ground frame for any theta_k.
inline PcsPfaResult pcs_pfa(const EchoMatrix& echo, const ApertureGeometry& geom, const RadarParams& prm,
                            const PfaOptions& opt = {}) {
    echo.require(Domain::dechirped, "pcs_pfa");
    PcsPfaResult r;
    r.plan = make_scene_plan(geom, prm, opt.dx, opt.dy, opt.scene_half);
    EchoMatrix rs = rpcs(echo, r.plan);
    EchoMatrix wr = apcs(rs, r.plan);
    rs = EchoMatrix{};
    r.image = image_from_grid(wr, r.plan.grid);
    return r;
}

// Baseline: polar-to-rectangular interpolation in the line-of-sight frame of the aperture center.
// The output is rotated by -theta_k relative to the ground frame.
inline ComplexImage pfa_lospi(const EchoMatrix& echo, const ApertureGeometry& geom, const RadarParams& prm,
                              const PfaOptions& opt = {}) {
    echo.require(Domain::dechirped, "pfa_lospi");
    const std::size_t na = echo.pulses(), nr = echo.samples();
    if (opt.kernel > nr || opt.kernel > na) throw ParameterError("pfa_lospi: kernel longer than sample support");
    const EchoMatrix in = echo.rvp_removed ? echo : rvp_compensate(echo, prm);

    // same grids as the ground-frame plan built at theta_k = 0
    ApertureGeometry los = geom;
    const double tk = geom.theta_k();
    for (auto& t : los.theta) t -= tk;
    const double cc = std::cos(los.phi_k());
    const double kx_scale = 4 * kPi / prm.c * cc;
    const double df = prm.Kr / prm.fs;
    KGrid g;
    g.nx = good_fft_size(static_cast<std::size_t>(std::ceil(2 * kPi / (opt.dx * kx_scale * df))));
    g.dkx = 2 * kPi / (static_cast<double>(g.nx) * opt.dx);
    g.kx0 = kx_scale * prm.fc;
    g.ky0 = 0.0;
    const double slope =
        g.kx0 * (std::tan(los.theta.back()) - std::tan(los.theta.front())) / static_cast<double>(na - 1);
    if (std::abs(slope) < 1e-12) throw DomainError("pfa_lospi: degenerate Doppler");
    g.ny = good_fft_size(static_cast<std::size_t>(std::ceil(2 * kPi / (opt.dy * std::abs(slope)))));
    g.dky = 2 * kPi / (static_cast<double>(g.ny) * opt.dy);
    const double dfp = g.dkx / kx_scale;

    const KaiserSinc ker(opt.kernel);
    // range interpolation onto f'
    CArray rs(na, g.nx);
    parallel_for(na, [&](std::size_t m) {
        const double xi = cc / (std::cos(los.phi[m]) * std::cos(los.theta[m]));
        const double beta = prm.fc * (xi - 1.0);
        const cplx* x = in.data.row(m);
        cplx* o = rs.row(m);
        for (std::size_t q = 0; q < g.nx; ++q) {
            const double fp = (static_cast<double>(q) - static_cast<double>(g.nx / 2)) * dfp;
            const double pos = (xi * fp + beta) / df + static_cast<double>(nr / 2);
            if (pos < -1.0 || pos > static_cast<double>(nr)) continue;
            o[q] = ker.at(x, nr, pos) * std::sqrt(xi * dfp / df);
        }
    });
    // azimuth interpolation onto K_Y
    std::vector<double> tn(na);
    for (std::size_t m = 0; m < na; ++m) tn[m] = std::tan(los.theta[m]);
    const bool inc = tn.back() > tn.front();
    EchoMatrix wr;
    wr.domain = Domain::wavenumber_rect;
    wr.data = CArray(g.ny, g.nx);
    parallel_for(g.nx, [&](std::size_t q) {
        const double KX = g.kx(static_cast<double>(q));
        for (std::size_t n = 0; n < g.ny; ++n) {
            const double t = g.ky(static_cast<double>(n)) / KX;
            if ((inc && (t < tn.front() || t > tn.back())) || (!inc && (t > tn.front() || t < tn.back()))) continue;
            std::size_t a = 0, b = na - 1;  // invariant: t between tn[a] and tn[b]
            while (b - a > 1) {
                const std::size_t mid = (a + b) / 2;
                if ((tn[mid] < t) == inc) a = mid; else b = mid;
            }
            const std::size_t lo = a;
            const double pos = static_cast<double>(lo) + (t - tn[lo]) / (tn[lo + 1] - tn[lo]);
            const double dmdn = g.dky / (KX * std::abs(tn[lo + 1] - tn[lo]));
            wr.data(n, q) = ker.at(rs.data() + q, na, g.nx, pos) * std::sqrt(dmdn);
        }
    });
    return image_from_grid(wr, g, CoordSys::LOS);
}

}  // namespace vsar
