#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "common.hpp"

namespace vsar {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

struct RadarParams {
    double fc = 220e9;      // carrier (Hz)
    double Kr = 1.2e14;     // chirp rate (Hz/s)
    double Tr = 10e-6;      // pulse width (s)
    double B = 1.2e9;       // bandwidth (Hz)
    double fs = 102.4e6;    // fast-time sampling (Hz)
    double prf = 1000.0;    // Hz
    double c = kC;

    double lambda() const { return c / fc; }
    // number of fast-time samples across the pulse
    std::size_t fast_samples() const { return static_cast<std::size_t>(std::llround(fs * Tr)); }

    void validate() const {
        if (!(fs > 0) || !(prf > 0) || !(Tr > 0) || !(c > 0)) throw ParameterError("radar: fs, prf, Tr, c must be positive");
        if (!(fc > B)) throw ParameterError("radar: carrier must exceed bandwidth");
        if (std::abs(std::abs(Kr) * Tr - B) > 1e-9 * B) throw ParameterError("radar: B must equal |Kr|*Tr");
    }

    static RadarParams from_bandwidth(double fc, double B, double Tr, double fs, double prf) {
        RadarParams p;
        p.fc = fc;
        p.B = B;
        p.Tr = Tr;
        p.Kr = B / Tr;
        p.fs = fs;
        p.prf = prf;
        return p;
    }
};

struct Trajectory {
    std::vector<Vec3> pos;
    std::vector<double> t;
    double Rs = 0, v = 0;
    double theta_k = 0;   // azimuth of the aperture center
    double theta_s = 0;   // angle swept by the aperture
    double overlap = 0;   // frame overlap ratio

    std::size_t size() const { return pos.size(); }
    std::size_t center() const { return pos.size() / 2; }
};

// Per-pulse view of the platform from a reference ground point.
struct ApertureGeometry {
    std::vector<double> Ra, theta, phi;
    Vec3 center;     // aperture-center position relative to the reference point
    Vec3 ref;        // reference point (ground, z = 0)

    std::size_t size() const { return Ra.size(); }
    std::size_t mid() const { return Ra.size() / 2; }
    double theta_k() const { return theta[mid()]; }
    double phi_k() const { return phi[mid()]; }
    double Ra_k() const { return Ra[mid()]; }
};

inline Trajectory make_circular_trajectory(const RadarParams& p, double Rs, double Za, double v,
                                           double theta_k, double aperture_angle) {
    if (!(Rs > 0)) throw ParameterError("trajectory: radius must be positive");
    if (!(v > 0)) throw ParameterError("trajectory: velocity must be positive");
    if (!(aperture_angle > 0)) throw ParameterError("trajectory: aperture angle must be positive");
    const double w = v / Rs;
    const double T = aperture_angle / w;
    auto n = static_cast<std::size_t>(std::floor(T * p.prf));
    if (n % 2 == 0) ++n;
    if (n < 3) throw ParameterError("trajectory: fewer than 3 pulses in the aperture");
    Trajectory tr;
    tr.Rs = Rs;
    tr.v = v;
    tr.theta_k = theta_k;
    tr.pos.resize(n);
    tr.t.resize(n);
    const long h = static_cast<long>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(static_cast<long>(i) - h) / p.prf;
        const double th = theta_k + w * t;
        tr.t[i] = t;
        tr.pos[i] = {Rs * std::cos(th), Rs * std::sin(th), Za};
    }
    tr.theta_s = w * (tr.t.back() - tr.t.front());
    return tr;
}

// Circular pass at slant range Ra and grazing angle phi.
inline Trajectory make_circular_trajectory_slant(const RadarParams& p, double Ra, double phi, double v,
                                                 double theta_k, double aperture_angle) {
    return make_circular_trajectory(p, Ra * std::cos(phi), Ra * std::sin(phi), v, theta_k, aperture_angle);
}

// Aperture angle giving a -3 dB azimuth width rho_a (unweighted sinc, factor 0.886).
inline double aperture_for_resolution(double lambda, double rho_a, double phi, double k = 0.886) {
    return k * lambda / (2.0 * rho_a * std::cos(phi));
}

inline std::vector<double> slant_range_to_point(const Trajectory& tr, double x, double y) {
    if (tr.pos.empty()) throw ParameterError("trajectory is empty");
    std::vector<double> r(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const Vec3& a = tr.pos[i];
        r[i] = std::sqrt((a.x - x) * (a.x - x) + (a.y - y) * (a.y - y) + a.z * a.z);
    }
    return r;
}

inline ApertureGeometry aperture_geometry(const Trajectory& tr, double ref_x = 0.0, double ref_y = 0.0) {
    if (tr.pos.empty()) throw ParameterError("trajectory is empty");
    ApertureGeometry g;
    g.ref = {ref_x, ref_y, 0.0};
    const std::size_t n = tr.size();
    g.Ra.resize(n);
    g.theta.resize(n);
    g.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double X = tr.pos[i].x - ref_x, Y = tr.pos[i].y - ref_y, Z = tr.pos[i].z;
        const double R = std::sqrt(X * X + Y * Y + Z * Z);
        g.Ra[i] = R;
        g.theta[i] = std::atan2(Y, X);
        g.phi[i] = std::asin(Z / R);
    }
    // unwrap so theta is continuous through the aperture
    for (std::size_t i = 1; i < n; ++i) {
        while (g.theta[i] - g.theta[i - 1] > kPi) g.theta[i] -= 2 * kPi;
        while (g.theta[i] - g.theta[i - 1] < -kPi) g.theta[i] += 2 * kPi;
    }
    const Vec3& c = tr.pos[n / 2];
    g.center = {c.x - ref_x, c.y - ref_y, c.z};
    return g;
}

inline double frame_rate(const RadarParams& p, double rho_a, double v, double overlap, double Ra) {
    if (!(overlap >= 0.0 && overlap < 1.0)) throw ParameterError("frame_rate: overlap must be in [0,1)");
    return 2.0 * rho_a * v * p.fc / ((1.0 - overlap) * Ra * p.c);
}

struct Wavenumbers {
    double KX, KY, KR;
};

// Native polar wavenumbers of one sample (dechirped convention).
inline Wavenumbers wavenumber_coordinates(const ApertureGeometry& g, const RadarParams& p, double f_tau,
                                          std::size_t pulse) {
    const double KR = 4 * kPi / p.c * (p.fc + f_tau);
    const double cp = std::cos(g.phi[pulse]);
    return {KR * cp * std::cos(g.theta[pulse]), KR * cp * std::sin(g.theta[pulse]), KR};
}

// Aperture-center wavenumbers.
inline Wavenumbers center_wavenumbers(double fc, double c, double phi, double theta_k) {
    const double K = 4 * kPi / c * fc;
    return {K * std::cos(phi) * std::cos(theta_k), K * std::cos(phi) * std::sin(theta_k), K};
}

// Line-of-sight polar interpolation targets.
inline std::pair<double, double> lospi_targets(double KR, double phi, double theta, double theta_k, double fc,
                                               double c) {
    const auto kc = center_wavenumbers(fc, c, phi, theta_k);
    const double kx = KR * std::cos(phi) * std::cos(theta_k) - kc.KX * std::tan(theta - theta_k);
    const double ky = KR * std::cos(phi) * std::sin(theta_k) + kc.KY * std::tan(theta - theta_k);
    return {kx, ky};
}

// Rotation about the aperture-center wavenumber by theta_k; transpose=true applies the inverse.
inline std::pair<double, double> rotate_about_center(double kx, double ky, double kxc, double kyc, double theta_k,
                                                     bool transpose = false) {
    const double c = std::cos(theta_k), s = transpose ? -std::sin(theta_k) : std::sin(theta_k);
    const double dx = kx - kxc, dy = ky - kyc;
    return {kxc + c * dx + s * dy, kyc - s * dx + c * dy};
}

// Ground-frame rectangular targets in the printed first-order form.
inline std::pair<double, double> gocs_targets(double f_tau, double phi, double theta, double theta_k, double fc,
                                              double c) {
    const double k = 4 * kPi / c * std::cos(phi);
    const double sec2 = 1.0 / (std::cos(theta_k) * std::cos(theta_k));
    return {k * (f_tau + fc * std::cos(theta_k)), k * fc * ((theta - theta_k) * sec2 + std::sin(theta_k))};
}

}  // namespace vsar
