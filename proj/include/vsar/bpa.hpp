#pragma once

// Time-domain backprojection onto an arbitrary ground raster. Slow by design; it is the reference
// the FFT-based formers are measured against.

#include <cmath>
#include <vector>

#include "beamseg.hpp"
#include "common.hpp"
#include "echo_sim.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "interp.hpp"
#include "parallel.hpp"
#include "pfa.hpp"

namespace vsar {

struct BpaOptions {
    std::size_t kernel = 16;     // interpolation taps
    std::size_t upsample = 8;    // range-profile oversampling
};

inline ComplexImage backproject(const EchoMatrix& echo, const Trajectory& tr, const RadarParams& prm,
                                const CanvasSpec& grid, const BpaOptions& opt = {}) {
    echo.require(Domain::dechirped, "backproject");
    if (tr.size() != echo.pulses()) throw ParameterError("backproject: trajectory does not match the echo");
    if (grid.nx == 0 || grid.ny == 0) throw ParameterError("backproject: empty grid");
    const EchoMatrix in = echo.rvp_removed ? echo : rvp_compensate(echo, prm);
    const std::size_t na = in.pulses(), nr = in.samples();
    const std::size_t L = nr * opt.upsample;
    const double du = in.fast.step;
    // profile bin spacing in differential range: f = -2 Kr dR / c, bin = f L du
    const double bin_per_m = -2 * prm.Kr / prm.c * static_cast<double>(L) * du;
    const double half_swath = 0.5 * static_cast<double>(nr) / std::abs(bin_per_m) * static_cast<double>(opt.upsample);

    const auto Ra = slant_range_to_point(tr, 0.0, 0.0);
    const auto rng = [&](std::size_t m, double x, double y) {
        const Vec3& p = tr.pos[m];
        return std::sqrt((p.x - x) * (p.x - x) + (p.y - y) * (p.y - y) + p.z * p.z);
    };
    for (std::size_t m : {std::size_t{0}, na / 2, na - 1})
        for (double x : {grid.x(0), grid.x(static_cast<double>(grid.nx - 1))})
            for (double y : {grid.y(0), grid.y(static_cast<double>(grid.ny - 1))})
                if (std::abs(rng(m, x, y) - Ra[m]) >= half_swath)
                    throw GeometryError("backproject: grid extends outside the unambiguous swath");

    // 8x upsampled range profiles: centered zero padding in time, then a centered transform
    CArray prof(na, L);
    parallel_for(na, [&](std::size_t m) {
        cplx* p = prof.row(m);
        const cplx* x = in.data.row(m);
        for (std::size_t k = 0; k < nr; ++k) p[L / 2 - nr / 2 + k] = x[k];
        cfft(p, L, Dir::Forward);
    });

    const KaiserSinc ker(opt.kernel);
    const double k0 = 4 * kPi * prm.fc / prm.c;
    ComplexImage img;
    img.pix = CArray(grid.ny, grid.nx);
    img.x0 = grid.x0;
    img.y0 = grid.y0;
    img.dx = grid.dx;
    img.dy = grid.dy;
    img.coords = CoordSys::GOCS;
    parallel_for(grid.ny, [&](std::size_t r) {
        const double y = grid.y(static_cast<double>(r));
        for (std::size_t c = 0; c < grid.nx; ++c) {
            const double x = grid.x(static_cast<double>(c));
            cplx acc{};
            for (std::size_t m = 0; m < na; ++m) {
                const double dR = rng(m, x, y) - Ra[m];
                const double pos = dR * bin_per_m + static_cast<double>(L / 2);
                acc += ker.at(prof.row(m), L, pos) * std::polar(1.0, k0 * dR);
            }
            img.pix(r, c) = acc;
        }
    });
    return img;
}

}  // namespace vsar
