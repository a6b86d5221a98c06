#pragma once

// Shared scenario builders for the tests: the 220 GHz / X-band circular pass at 500 m.

#include <cmath>
#include <vector>

#include "vsar/echo_sim.hpp"
#include "vsar/geometry.hpp"

namespace vsar::fx {

struct Setup {
    RadarParams prm;
    Trajectory tr;
};

// Aperture sized for a 0.125 m azimuth resolution at 45 deg grazing; the PRF places `pulses`
// samples across it.
inline Setup circular_pass(double fc = 220e9, double theta_k_deg = 0.0, std::size_t pulses = 1025) {
    Setup s;
    s.prm = RadarParams::from_bandwidth(fc, 1.2e9, 10e-6, 102.4e6, 1000.0);
    const double phi = kPi / 4, R = 500, v = 30;
    const double ap = aperture_for_resolution(s.prm.lambda(), 0.125, phi);
    const double T = ap / (v / (R * std::cos(phi)));
    s.prm.prf = (static_cast<double>(pulses) + 0.5) / T;
    s.tr = make_circular_trajectory_slant(s.prm, R, phi, v, deg2rad(theta_k_deg), ap);
    return s;
}

inline Scene grid_scene(int half_count = 5, double step = 10.0) {
    Scene sc;
    for (int j = -half_count; j <= half_count; ++j)
        for (int i = -half_count; i <= half_count; ++i) sc.targets.push_back({i * step, j * step, 1.0, 0.0});
    return sc;
}

inline double db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

}  // namespace vsar::fx
