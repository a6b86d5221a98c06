#pragma once

// Range and azimuth chirp-scaling transforms that carry a dechirped polar phase history onto a
// rectangular ground wavenumber grid, and their exact inverses.
//
// Range (per pulse): fast-time frequency f = K_r u is mapped to f' with
//     f = xi f' + beta,  xi = cos(phi_k)cos(theta_k) / (cos(phi)cos(theta)),  beta = f_c (xi - 1)
// so that K_X = (4 pi / c) cos(phi_k) cos(theta_k) (f_c + f') is the same for every pulse.
// Azimuth (per K_X column): pulses are mapped onto a uniform K_Y grid by the best affine fit
// (minimax) of K_Y = K_X tan(theta(t)) over the pulses that support the column.

#include <cmath>
#include <vector>

#include "chirp_scaling.hpp"
#include "common.hpp"
#include "echo_sim.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace vsar {

// Rectangular wavenumber grid; sample (n, q) sits at (kx(q), ky(n)).
struct KGrid {
    std::size_t nx = 0, ny = 0;
    double kx0 = 0, ky0 = 0;   // center wavenumbers (rad/m)
    double dkx = 0, dky = 0;

    double kx(double q) const { return kx0 + (q - static_cast<double>(nx / 2)) * dkx; }
    double ky(double n) const { return ky0 + (n - static_cast<double>(ny / 2)) * dky; }
    double dx() const { return 2 * kPi / (static_cast<double>(nx) * dkx); }
    double dy() const { return 2 * kPi / (static_cast<double>(ny) * dky); }
};

struct ScalingFactors {
    double xi = 1.0;
    double beta = 0.0;
    double eta = 0.0;
};

// Azimuth factors of one K_X column expressed on the column's pulse segment.
struct ColumnMap {
    long p_lo = -1, p_hi = -1;  // pulse support (inclusive); p_lo < 0 means an empty column
    bool flip = false;          // segment reversed so the scale is positive
    ScaleMap map;               // output n (centered) -> segment position (centered)
    double alpha = 0, gamma = 0;  // n ~ alpha * i + gamma, i the segment-local pulse index
    double ky_a = 0, ky_b = 0;    // fitted K_Y = ky_a * m + ky_b, m the plan pulse index

    bool empty() const { return p_lo < 0; }
    std::size_t len() const { return empty() ? 0 : static_cast<std::size_t>(p_hi - p_lo + 1); }
};

struct PcsPlan {
    KGrid grid;
    double kx_scale = 0;   // (4 pi / c) cos(phi_k) cos(theta_k)
    double fc = 0, Kr = 0, fs = 0, c = kC;
    double theta_k = 0, phi_k = 0;
    std::size_t nr = 0;    // fast-time samples per pulse
    double df = 0;         // fast-time frequency step K_r / f_s
    double dfp = 0;        // f' step
    std::vector<double> tan_theta;
    std::vector<ScalingFactors> range;
    std::vector<ScaleMap> range_map;
    std::vector<ColumnMap> cols;
    double band_r = 0.45, band_a = 0.45;   // band_a: widest column
    double content_a = 0.45;               // azimuth content per K_Y sample (cycles); column band = alpha * content_a
    double B = 0;          // transmitted bandwidth; bounds the data support in f
    bool embed_rvp = true;

    std::size_t pulses() const { return tan_theta.size(); }
};

// Content half-extents used to size the chirp-scaling bands.
struct ContentExtent {
    double slant = 50.0;   // max |R_t - R_ref| (m)
    double y = 50.0;       // max |y - y_ref| (m)
};

inline double band_from(double content, double lo = 0.1, double hi = 0.46) {
    return std::clamp(content + 0.04, lo, hi);
}

namespace detail {

// Pulse interval [lo, hi] whose mapped f' support covers column q (with margin).
inline void pulse_cover(const PcsPlan& p, std::size_t m, double margin, double& qlo, double& qhi) {
    const ScaleMap& sm = p.range_map[m];
    const double h = static_cast<double>(p.nr / 2);
    const double jl = (-h - sm.b) / sm.s, jh = (static_cast<double>(p.nr) - 1 - h - sm.b) / sm.s;
    qlo = jl + static_cast<double>(p.grid.nx / 2) - margin;
    qhi = jh + static_cast<double>(p.grid.nx / 2) + margin;
}

// Minimax affine fit of the K_Y index over the core pulses [c_lo, c_hi], expressed on the segment.
inline void fit_column(const PcsPlan& p, std::size_t q, ColumnMap& cm, long c_lo, long c_hi) {
    const double KX = p.grid.kx(static_cast<double>(q));
    auto n_at = [&](long m) {
        return (KX * p.tan_theta[static_cast<std::size_t>(m)] - p.grid.ky0) / p.grid.dky;
    };
    const double sgn = cm.flip ? -1.0 : 1.0;
    // slope in absolute pulse index
    const double a_abs = (n_at(c_hi) - n_at(c_lo)) / static_cast<double>(c_hi - c_lo);
    double dmax = -1e300, dmin = 1e300;
    for (long m = c_lo; m <= c_hi; ++m) {
        const double d = n_at(m) - (n_at(c_lo) + a_abs * static_cast<double>(m - c_lo));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    const double g_abs = n_at(c_lo) - a_abs * static_cast<double>(c_lo) + 0.5 * (dmax + dmin);
    // segment index i: m = p_lo + i, or m = p_hi - i when flipped
    const double m0 = static_cast<double>(cm.flip ? cm.p_hi : cm.p_lo);
    cm.alpha = sgn * a_abs;
    cm.gamma = g_abs + a_abs * m0;
    cm.ky_a = a_abs * p.grid.dky;
    cm.ky_b = p.grid.ky0 + g_abs * p.grid.dky;
    // i = (n - gamma) / alpha, centered segment position = i - len/2
    cm.map.s = 1.0 / cm.alpha;
    cm.map.b = -cm.gamma / cm.alpha - static_cast<double>(cm.len() / 2);
}

}  // namespace detail

// Builds range factors for every pulse of geom and azimuth column maps over grid.
inline PcsPlan make_pcs_plan(const ApertureGeometry& g, const RadarParams& prm, std::size_t nr, double df,
                             const KGrid& grid, double kx_scale, const ContentExtent& ext, bool embed_rvp,
                             double cover_margin = 32.0) {
    if (g.size() < 3) throw ParameterError("pcs: fewer than 3 pulses");
    if (!(prm.Kr > 0)) throw ParameterError("pcs: chirp rate must be positive");
    PcsPlan p;
    p.grid = grid;
    p.kx_scale = kx_scale;
    p.fc = prm.fc;
    p.Kr = prm.Kr;
    p.fs = prm.fs;
    p.c = prm.c;
    p.theta_k = g.theta_k();
    p.phi_k = g.phi_k();
    p.nr = nr;
    p.df = df;
    p.dfp = grid.dkx / kx_scale;
    p.embed_rvp = embed_rvp;
    p.B = prm.B;
    const std::size_t na = g.size();
    p.tan_theta.resize(na);
    p.range.resize(na);
    p.range_map.resize(na);
    const double kref = kx_scale * prm.c / (4 * kPi);  // cos(phi_k) cos(theta_k)
    for (std::size_t m = 0; m < na; ++m) {
        const double cth = std::cos(g.theta[m]);
        if (cth <= 1e-3) throw GeometryError("pcs: aperture azimuth reaches +-90 deg");
        const double xi = kref / (std::cos(g.phi[m]) * cth);
        if (!(std::abs(xi - 1.0) < 0.5)) throw GeometryError("pcs: range scale factor out of bounds");
        p.tan_theta[m] = std::tan(g.theta[m]);
        p.range[m] = {xi, prm.fc * (xi - 1.0), -kPi * prm.Kr};
        p.range_map[m] = {xi * p.dfp / df, prm.fc * (xi - 1.0) / df};
    }
    p.band_r = band_from(2 * ext.slant * df / prm.c);

    // azimuth: segment support (window plus margin) and core support (data band) per column
    const bool inc = p.tan_theta.back() > p.tan_theta.front();
    // the RVP filter disperses window edges by up to fs^2 / (2 Kr) samples
    if (embed_rvp) cover_margin += prm.fs * prm.fs / (2 * prm.Kr);
    std::vector<double> qlo(na), qhi(na), clo(na), chi(na);
    const double hq = static_cast<double>(grid.nx / 2);
    for (std::size_t m = 0; m < na; ++m) {
        detail::pulse_cover(p, m, cover_margin, qlo[m], qhi[m]);
        const auto& f = p.range[m];
        clo[m] = (-0.5 * p.B - f.beta) / f.xi / p.dfp + hq;
        chi[m] = (0.5 * p.B - f.beta) / f.xi / p.dfp + hq;
    }
    p.cols.assign(grid.nx, ColumnMap{});
    double worst_alpha = 0;
    for (std::size_t q = 0; q < grid.nx; ++q) {
        const double qd = static_cast<double>(q);
        long lo = -1, hi = -1, c_lo = -1, c_hi = -1;
        for (std::size_t m = 0; m < na; ++m) {
            const long ml = static_cast<long>(m);
            if (qd >= qlo[m] && qd <= qhi[m]) {
                if (lo < 0) lo = ml;
                hi = ml;
            }
            if (qd >= clo[m] && qd <= chi[m]) {
                if (c_lo < 0) c_lo = ml;
                c_hi = ml;
            }
        }
        if (lo < 0 || hi - lo + 1 < 8) continue;
        if (c_lo < 0 || c_hi - c_lo + 1 < 8) {
            c_lo = lo;
            c_hi = hi;
        }
        ColumnMap& cm = p.cols[q];
        cm.p_lo = std::min(lo, c_lo);
        cm.p_hi = std::max(hi, c_hi);
        cm.flip = !inc;
        detail::fit_column(p, q, cm, c_lo, c_hi);
        if (!(cm.alpha > 0)) throw DomainError("pcs: degenerate Doppler (azimuth wavenumber does not vary)");
        worst_alpha = std::max(worst_alpha, cm.alpha);
    }
    p.content_a = ext.y / (static_cast<double>(grid.ny) * grid.dy());
    p.band_a = band_from(worst_alpha * p.content_a);
    return p;
}

// Plan on a grid with pixel spacing (dx, dy) for nr fast samples spaced df in frequency.
inline PcsPlan make_grid_plan(const ApertureGeometry& g, const RadarParams& prm, std::size_t nr, double df,
                              double dx, double dy, const ContentExtent& ext, bool embed_rvp) {
    if (!(dx > 0) || !(dy > 0)) throw ParameterError("pcs: pixel spacing must be positive");
    if (g.size() < 3) throw ParameterError("pcs: fewer than 3 pulses");
    if (std::abs(std::sin(g.phi_k())) < 1e-9)
        throw DomainError("pcs: degenerate Doppler (zero grazing angle)");
    const double cc = std::cos(g.phi_k()) * std::cos(g.theta_k());
    if (cc <= 1e-3) throw GeometryError("pcs: aperture-center azimuth at +-90 deg");
    const double kx_scale = 4 * kPi / prm.c * cc;
    KGrid grid;
    grid.nx = good_fft_size(static_cast<std::size_t>(std::ceil(2 * kPi / (dx * kx_scale * df))));
    grid.dkx = 2 * kPi / (static_cast<double>(grid.nx) * dx);
    grid.kx0 = kx_scale * prm.fc;
    grid.ky0 = grid.kx0 * std::tan(g.theta_k());
    const std::size_t na = g.size();
    const double slope = grid.kx0 * (std::tan(g.theta.back()) - std::tan(g.theta.front())) / static_cast<double>(na - 1);
    if (std::abs(slope) < 1e-12) throw DomainError("pcs: degenerate Doppler (azimuth wavenumber does not vary)");
    grid.ny = good_fft_size(static_cast<std::size_t>(std::ceil(2 * kPi / (dy * std::abs(slope)))));
    grid.dky = 2 * kPi / (static_cast<double>(grid.ny) * dy);
    return make_pcs_plan(g, prm, nr, df, grid, kx_scale, ext, embed_rvp);
}

// Full-scene plan for a coarse image with pixel spacing (dx, dy).
inline PcsPlan make_scene_plan(const ApertureGeometry& g, const RadarParams& prm, double dx, double dy,
                               double scene_half) {
    ContentExtent ext;
    ext.slant = std::sqrt(2.0) * scene_half * std::cos(g.phi_k());
    ext.y = scene_half;
    return make_grid_plan(g, prm, prm.fast_samples(), prm.Kr / prm.fs, dx, dy, ext, true);
}

// Printed azimuth factors (f_tau relative to f_c cos(theta_k)); kept for comparison only.
inline ScalingFactors printed_azimuth_factors(double f_tau, double fc, double theta_k, double Ka = 0.0) {
    const double den = f_tau + fc * std::cos(theta_k);
    ScalingFactors s;
    s.xi = fc * std::cos(theta_k) * std::cos(theta_k) / den;
    s.beta = (f_tau * (theta_k - 0.5 * std::sin(2 * theta_k)) +
              theta_k * (std::cos(theta_k) + std::cos(theta_k) * std::cos(theta_k))) / den;
    s.eta = kPi * Ka;
    return s;
}

// Affine theta map theta_in = xi * theta_out + beta that carries the keystone azimuth
// wavenumber onto the rectangular ground grid, solved from the two linearized expressions.
inline ScalingFactors mapping_azimuth_factors(double f_tau, double fc, double theta_k) {
    const double den = f_tau + fc * std::cos(theta_k);
    ScalingFactors s;
    s.xi = fc / den;
    const double c2 = std::cos(theta_k) * std::cos(theta_k);
    s.beta = theta_k * (1.0 - s.xi) + (fc * std::sin(theta_k) / den - std::tan(theta_k)) * c2;
    return s;
}

inline ScaleMap range_map(const PcsPlan& p, std::size_t m) { return p.range_map.at(m); }

inline ChirpScaler range_scaler(const PcsPlan& p, std::size_t m) {
    ChirpScaler cs(p.nr, p.grid.nx, p.range_map[m], p.band_r);
    if (p.embed_rvp) {
        const double fs = p.fs, Kr = p.Kr;
        cs.set_prefilter([fs, Kr](double nu) {
            const double f = nu * fs;
            return std::polar(1.0, -kPi * f * f / Kr);
        });
    }
    return cs;
}

inline ChirpScaler azimuth_scaler(const PcsPlan& p, std::size_t q) {
    const ColumnMap& cm = p.cols[q];
    return ChirpScaler(cm.len(), p.grid.ny, cm.map, band_from(cm.alpha * p.content_a));
}

// Per pulse: dechirped fast time -> f' grid (RVP removal embedded in the first filter).
inline EchoMatrix rpcs(const EchoMatrix& echo, const PcsPlan& p) {
    echo.require(Domain::dechirped, "rpcs");
    if (echo.pulses() != p.pulses() || echo.samples() != p.nr)
        throw ParameterError("rpcs: echo dimensions do not match the plan");
    EchoMatrix out;
    out.domain = Domain::range_scaled;
    out.data = CArray(echo.pulses(), p.grid.nx);
    out.fast = centered_axis(p.grid.nx, p.dfp, "Hz");
    out.slow = echo.slow;
    out.seed = echo.seed;
    out.rvp_removed = p.embed_rvp || echo.rvp_removed;
    parallel_for(echo.pulses(), [&](std::size_t m) {
        ChirpScaler cs = range_scaler(p, m);
        cs.forward(echo.data.row(m), out.data.row(m));
    });
    return out;
}

inline EchoMatrix irpcs(const EchoMatrix& rs, const PcsPlan& p) {
    rs.require(Domain::range_scaled, "irpcs");
    EchoMatrix out;
    out.domain = Domain::dechirped;
    out.data = CArray(rs.pulses(), p.nr);
    out.fast = centered_axis(p.nr, 1.0 / p.fs, "s");
    out.slow = rs.slow;
    out.rvp_removed = !p.embed_rvp;
    parallel_for(rs.pulses(), [&](std::size_t m) {
        ChirpScaler cs = range_scaler(p, m);
        cs.adjoint(rs.data.row(m), out.data.row(m));
    });
    return out;
}

// Per K_X column: pulses -> uniform K_Y grid. Output rows are K_Y, columns K_X.
inline EchoMatrix apcs(const EchoMatrix& rs, const PcsPlan& p) {
    rs.require(Domain::range_scaled, "apcs");
    if (rs.pulses() != p.pulses() || rs.samples() != p.grid.nx)
        throw ParameterError("apcs: input dimensions do not match the plan");
    EchoMatrix out;
    out.domain = Domain::wavenumber_rect;
    out.data = CArray(p.grid.ny, p.grid.nx);
    out.fast = Axis{p.grid.kx(0), p.grid.dkx, p.grid.nx, "rad/m"};
    out.slow = Axis{p.grid.ky(0), p.grid.dky, p.grid.ny, "rad/m"};
    out.seed = rs.seed;
    out.rvp_removed = rs.rvp_removed;
    parallel_for(p.grid.nx, [&](std::size_t q) {
        const ColumnMap& cm = p.cols[q];
        if (cm.empty()) return;
        const std::size_t len = cm.len();
        std::vector<cplx> seg(len), o(p.grid.ny);
        for (std::size_t i = 0; i < len; ++i) {
            const long m = cm.flip ? cm.p_hi - static_cast<long>(i) : cm.p_lo + static_cast<long>(i);
            seg[i] = rs.data(static_cast<std::size_t>(m), q);
        }
        azimuth_scaler(p, q).forward(seg.data(), o.data());
        for (std::size_t n = 0; n < p.grid.ny; ++n) out.data(n, q) = o[n];
    });
    return out;
}

inline EchoMatrix iapcs(const EchoMatrix& wr, const PcsPlan& p) {
    if (wr.domain != Domain::wavenumber_rect && wr.domain != Domain::phase_history_sub)
        throw DomainError(std::string("iapcs: expected wavenumber_rect input, got ") + to_string(wr.domain));
    if (wr.pulses() != p.grid.ny || wr.samples() != p.grid.nx)
        throw ParameterError("iapcs: input dimensions do not match the plan");
    EchoMatrix out;
    out.domain = Domain::range_scaled;
    out.data = CArray(p.pulses(), p.grid.nx);
    out.fast = centered_axis(p.grid.nx, p.dfp, "Hz");
    out.slow = Axis{0.0, 1.0, p.pulses(), "pulse"};
    out.rvp_removed = wr.rvp_removed;
    parallel_for(p.grid.nx, [&](std::size_t q) {
        const ColumnMap& cm = p.cols[q];
        if (cm.empty()) return;
        const std::size_t len = cm.len();
        std::vector<cplx> seg(len), o(p.grid.ny);
        for (std::size_t n = 0; n < p.grid.ny; ++n) o[n] = wr.data(n, q);
        azimuth_scaler(p, q).adjoint(o.data(), seg.data());
        for (std::size_t i = 0; i < len; ++i) {
            const long m = cm.flip ? cm.p_hi - static_cast<long>(i) : cm.p_lo + static_cast<long>(i);
            out.data(static_cast<std::size_t>(m), q) = seg[i];
        }
    });
    return out;
}

// Full inverse: rectangular wavenumber grid -> dechirped phase history of the plan's pulses.
inline EchoMatrix inverse_pcs(const EchoMatrix& wr, const PcsPlan& p) {
    EchoMatrix rs = iapcs(wr, p);
    return irpcs(rs, p);
}

}  // namespace vsar
