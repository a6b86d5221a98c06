#pragma once

// Wavefront-curvature analysis for planar-wavefront (polar format) imaging: where a ground point
// lands in the image, how far it moves, and the regions where the movement or the residual
// quadratic phase stay below one resolution cell.

#include <cmath>
#include <utility>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

namespace vsar {

// Aperture-center view of the reference point.
struct FrameGeometry {
    double Ra = 500.0;       // slant range to the reference point
    double phi = kPi / 4;    // grazing angle
    double theta_k = 0.0;    // azimuth of the aperture center

    double Xc() const { return Ra * std::cos(phi) * std::cos(theta_k); }
    double Yc() const { return Ra * std::cos(phi) * std::sin(theta_k); }
    double Zc() const { return Ra * std::sin(phi); }
    double Rt(double x, double y) const {
        const double dx = Xc() - x, dy = Yc() - y, z = Zc();
        return std::sqrt(dx * dx + dy * dy + z * z);
    }

    static FrameGeometry from(const ApertureGeometry& g) { return {g.Ra_k(), g.phi_k(), g.theta_k()}; }
};

struct Point2 {
    double x = 0, y = 0;
};

// Image position of ground point (x, y): matches the range and range-rate of the planar model
// to the true ones at the aperture center.
//   x* Xc + y* Yc = Ra^2 - Ra Rtk
//   x* Yc - y* Xc = Ra (x Yc - y Xc) / Rtk
inline Point2 distortion_map(double x, double y, const FrameGeometry& f) {
    const double Xc = f.Xc(), Yc = f.Yc(), Rtk = f.Rt(x, y);
    if (!(Rtk > 0)) throw GeometryError("distortion_map: target coincides with the platform");
    const double p = f.Ra * f.Ra - f.Ra * Rtk;
    const double q = f.Ra * (x * Yc - y * Xc) / Rtk;
    const double r2 = Xc * Xc + Yc * Yc;
    return {(p * Xc + q * Yc) / r2, (p * Yc - q * Xc) / r2};
}

// The closed form exactly as printed; it agrees with distortion_map at theta_k = 0 only.
inline Point2 distortion_map_printed(double x, double y, const FrameGeometry& f) {
    const double Xc = f.Xc(), Yc = f.Yc(), Rtk = f.Rt(x, y);
    const double cp = std::cos(f.phi), ck = std::cos(f.theta_k), sk = std::sin(f.theta_k);
    return {(f.Ra - Rtk) * ck / cp - (x * Xc - y * Yc) * sk / (Rtk * cp),
            (f.Ra - Rtk) * sk / cp + (y * Xc - x * Yc) * ck / (Rtk * cp)};
}

// Line-of-sight frame positions: the ground-frame distortion rotated by theta_k.
inline Point2 lospi_position(const Point2& p, double theta_k) {
    const double c = std::cos(theta_k), s = std::sin(theta_k);
    return {p.x * c + p.y * s, -p.x * s + p.y * c};
}

// Same matching solved from the trajectory samples around the center pulse for reference
// point ref. Works for any reference (sub-block centers) and any trajectory shape.
class NumericDistortion {
public:
    NumericDistortion(const Trajectory& tr, Point2 ref) : ref_(ref) {
        const std::size_t n = tr.size();
        if (n < 3) throw ParameterError("distortion_map_numeric: need at least 3 pulses");
        const std::size_t m = tr.center();
        const std::size_t idx[3] = {m, m - 1, m + 1};
        double a[3], b[3];
        for (int i = 0; i < 3; ++i) {
            p_[i] = tr.pos[idx[i]];
            // planar model: dRp(t) = -(u X(t) + v Y(t)) / Ra(t) with X, Y relative to ref
            const double X = p_[i].x - ref.x, Y = p_[i].y - ref.y;
            R_[i] = std::sqrt(X * X + Y * Y + p_[i].z * p_[i].z);
            a[i] = -X / R_[i];
            b[i] = -Y / R_[i];
        }
        idt_ = 1.0 / (tr.t[m + 1] - tr.t[m - 1]);
        a0_ = a[0];
        b0_ = b[0];
        da_ = (a[2] - a[1]) * idt_;
        db_ = (b[2] - b[1]) * idt_;
        const double det = a0_ * db_ - b0_ * da_;
        if (std::abs(det) < 1e-300) throw GeometryError("distortion_map_numeric: singular geometry");
        idet_ = 1.0 / det;
    }

    Point2 operator()(Point2 t) const {
        double d[3];
        for (int i = 0; i < 3; ++i) {
            const double X = p_[i].x - t.x, Y = p_[i].y - t.y;
            d[i] = std::sqrt(X * X + Y * Y + p_[i].z * p_[i].z) - R_[i];
        }
        const double dd = (d[2] - d[1]) * idt_;
        return {(d[0] * db_ - b0_ * dd) * idet_, (a0_ * dd - d[0] * da_) * idet_};
    }

private:
    Point2 ref_;
    Vec3 p_[3];
    double R_[3] = {};
    double idt_ = 0, a0_ = 0, b0_ = 0, da_ = 0, db_ = 0, idet_ = 0;
};

inline Point2 distortion_map_numeric(const Trajectory& tr, Point2 ref, Point2 target) {
    return NumericDistortion(tr, ref)(target);
}

inline double offset_radius(double x, double y, const FrameGeometry& f) {
    const Point2 d = distortion_map(x, y, f);
    return std::hypot(x - d.x, y - d.y);
}

inline bool in_dir(double x, double y, const FrameGeometry& f, double rho_x) {
    return offset_radius(x, y, f) <= rho_x;
}

struct DirResult {
    double gamma = 0;        // DiR width across its narrowest direction (m)
    double r_min = 0;        // smallest boundary radius (m)
    double direction = 0;    // direction of the narrow width (rad)
    bool clipped = false;    // some direction had no root inside the search range
};

// Boundary radius along direction psi by bisection on r_d = rho_x.
inline double dir_boundary(const FrameGeometry& f, double rho_x, double psi, double r_max, bool& clipped) {
    const double c = std::cos(psi), s = std::sin(psi);
    if (offset_radius(r_max * c, r_max * s, f) <= rho_x) {
        clipped = true;
        return r_max;
    }
    double lo = 0.0, hi = r_max;
    while (hi - lo > rho_x / 100) {
        const double mid = 0.5 * (lo + hi);
        (offset_radius(mid * c, mid * s, f) <= rho_x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// gamma: narrowest chord of the DiR through the reference point.
inline DirResult dir_gamma(const FrameGeometry& f, double rho_x, double scene_half = 250.0,
                           std::size_t directions = 360) {
    if (!(rho_x > 0)) throw ParameterError("dir_gamma: resolution must be positive");
    DirResult res;
    res.gamma = 1e300;
    res.r_min = 1e300;
    for (std::size_t k = 0; k < directions; ++k) {
        const double psi = kPi * static_cast<double>(k) / static_cast<double>(directions);
        bool cl = false;
        const double r1 = dir_boundary(f, rho_x, psi, scene_half, cl);
        const double r2 = dir_boundary(f, rho_x, psi + kPi, scene_half, cl);
        res.clipped = res.clipped || cl;
        if (r1 + r2 < res.gamma) {
            res.gamma = r1 + r2;
            res.direction = psi;
        }
        res.r_min = std::min({res.r_min, r1, r2});
    }
    return res;
}

// Defocus-negligible radius r_max = rho_a sqrt(2 Ra / lambda).
inline double der_radius(const RadarParams& p, double rho_a, double Ra) {
    if (!(rho_a > 0) || !(Ra > 0)) throw ParameterError("der_radius: inputs must be positive");
    return rho_a * std::sqrt(2.0 * Ra / p.lambda());
}

struct SkipBounds {
    double X_eps = 0, Y_eps = 0;
    bool skip = false;
};

// Sub-blocks no wider than min(|X_eps|, |Y_eps|) can be imaged without wavenumber resampling.
inline SkipBounds resample_skip_check(double rho_r, double rho_a, double phi, double lambda, double W_r) {
    if (!(rho_r > 0) || !(rho_a > 0) || !(lambda > 0) || !(W_r > 0))
        throw ParameterError("resample_skip_check: inputs must be positive");
    SkipBounds b;
    b.X_eps = std::abs(2 * rho_r * rho_a * std::cos(phi) / lambda);
    b.Y_eps = std::abs(2 * rho_a * rho_a * std::cos(phi) / lambda);
    b.skip = W_r <= std::min(b.X_eps, b.Y_eps);
    return b;
}

// Offset field and DiR mask over a square grid centered at the reference point.
struct WceRaster {
    RArray offset;     // r_d (m)
    RArray dir_mask;   // 1 inside the DiR
    RArray der_mask;   // 1 inside the DeR
    double x0 = 0, y0 = 0, spacing = 1;
};

inline WceRaster wce_raster(const FrameGeometry& f, double rho_x, double r_max, double half, double spacing) {
    if (!(spacing > 0) || !(half > 0)) throw ParameterError("wce_raster: bad grid");
    const auto n = static_cast<std::size_t>(std::floor(2 * half / spacing)) + 1;
    WceRaster r;
    r.offset = RArray(n, n);
    r.dir_mask = RArray(n, n);
    r.der_mask = RArray(n, n);
    r.x0 = r.y0 = -half;
    r.spacing = spacing;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -half + static_cast<double>(j) * spacing, y = -half + static_cast<double>(i) * spacing;
            const double d = offset_radius(x, y, f);
            r.offset(i, j) = d;
            r.dir_mask(i, j) = d <= rho_x ? 1.0 : 0.0;
            r.der_mask(i, j) = std::hypot(x, y) <= r_max ? 1.0 : 0.0;
        }
    return r;
}

}  // namespace vsar
