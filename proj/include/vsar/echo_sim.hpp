#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace vsar {

enum class Domain { raw, dechirped, range_freq, range_scaled, wavenumber_polar, wavenumber_rect, phase_history_sub };

inline const char* to_string(Domain d) {
    switch (d) {
        case Domain::raw: return "raw";
        case Domain::dechirped: return "dechirped";
        case Domain::range_freq: return "range_freq";
        case Domain::range_scaled: return "range_scaled";
        case Domain::wavenumber_polar: return "wavenumber_polar";
        case Domain::wavenumber_rect: return "wavenumber_rect";
        case Domain::phase_history_sub: return "phase_history_sub";
    }
    return "?";
}

inline Domain domain_from_string(const std::string& s) {
    for (Domain d : {Domain::raw, Domain::dechirped, Domain::range_freq, Domain::range_scaled,
                     Domain::wavenumber_polar, Domain::wavenumber_rect, Domain::phase_history_sub})
        if (s == to_string(d)) return d;
    throw ParameterError("unknown domain tag: " + s);
}

// Rows are pulses (slow time), columns are fast-time samples.
struct EchoMatrix {
    CArray data;
    Domain domain = Domain::dechirped;
    Axis fast;   // fast time u = tau - 2 Ra / c (s)
    Axis slow;   // slow time t (s)
    bool rvp_removed = false;
    std::uint64_t seed = 0;

    std::size_t pulses() const { return data.rows(); }
    std::size_t samples() const { return data.cols(); }

    void require(Domain d, const char* op) const {
        if (domain != d)
            throw DomainError(std::string(op) + ": expected " + to_string(d) + " input, got " + to_string(domain));
    }
};

struct PointTarget {
    double x = 0, y = 0;
    double sigma = 1.0;
    double phase = 0.0;
};

struct ReflectivityMap {
    RArray values;       // rows along y, cols along x
    double x0 = 0, y0 = 0;  // ground position of element (0,0)
    double spacing = 1.0;
};

struct Scene {
    std::vector<PointTarget> targets;
    std::optional<ReflectivityMap> map;
    double size = 130.0;  // side of the square scene (m)

    void validate() const {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto& t = targets[i];
            if (!(t.sigma > 0)) throw ParameterError("scene: target " + std::to_string(i) + " has non-positive sigma");
            if (std::abs(t.x) > size / 2 + 1e-9 || std::abs(t.y) > size / 2 + 1e-9)
                throw ParameterError("scene: target " + std::to_string(i) + " lies outside the scene square");
        }
    }
};

// Line-of-sight platform vibration: sum_i A_i sin(2 pi f_i t + phi_i).
struct VibrationModel {
    struct Component {
        double A = 0, f = 0, phi = 0;
    };
    std::vector<Component> components;
    bool known = true;  // when true the dechirp reference follows the perturbed range (1st MoCo)

    double at(double t) const {
        double e = 0;
        for (const auto& c : components) e += c.A * std::sin(2 * kPi * c.f * t + c.phi);
        return e;
    }
    void validate() const {
        for (const auto& c : components)
            if (c.A < 0 || c.f < 0) throw ParameterError("vibration: amplitude and frequency must be non-negative");
    }
};

inline EchoMatrix empty_echo(const Trajectory& tr, const RadarParams& p) {
    EchoMatrix e;
    const std::size_t nr = p.fast_samples();
    e.data = CArray(tr.size(), nr);
    e.domain = Domain::dechirped;
    e.fast = centered_axis(nr, 1.0 / p.fs, "s");
    e.slow = centered_axis(tr.size(), 1.0 / p.prf, "s");
    return e;
}

// Dechirped phase history of one scatterer, accumulated into echo rows.
// Dechirp reference is the nominal scene-center range, plus the vibration when it is known.
inline void add_scatterer(EchoMatrix& e, const Trajectory& tr, const RadarParams& p, const PointTarget& pt,
                          const VibrationModel* vib) {
    const auto Rt = slant_range_to_point(tr, pt.x, pt.y);
    const auto Ra = slant_range_to_point(tr, 0.0, 0.0);
    const std::size_t nr = e.samples();
    const double du = e.fast.step, u0 = e.fast.start;
    const cplx amp = std::polar(pt.sigma, pt.phase);
    for (std::size_t m = 0; m < tr.size(); ++m) {
        const double ev = vib ? vib->at(tr.t[m]) : 0.0;
        const double ref = Ra[m] + ((vib && vib->known) ? ev : 0.0);
        const double dR = Rt[m] + ev - ref;
        const double ph0 = -4 * kPi / p.c * p.fc * dR + 4 * kPi * p.Kr / (p.c * p.c) * dR * dR;
        const double ph1 = -4 * kPi / p.c * p.Kr * dR;
        const double tc = 2 * dR / p.c;
        cplx* row = e.data.row(m);
        for (std::size_t n = 0; n < nr; ++n) {
            const double u = u0 + static_cast<double>(n) * du;
            if (std::abs(u - tc) > 0.5 * p.Tr) continue;
            row[n] += amp * std::polar(1.0, ph0 + ph1 * u);
        }
    }
}

inline void check_unambiguous(const Trajectory& tr, const RadarParams& p, const PointTarget& pt, std::size_t idx) {
    const auto Rt = slant_range_to_point(tr, pt.x, pt.y);
    const auto Ra = slant_range_to_point(tr, 0.0, 0.0);
    double worst = 0;
    for (std::size_t m = 0; m < tr.size(); ++m) worst = std::max(worst, std::abs(Rt[m] - Ra[m]));
    const double fb = 2 * std::abs(p.Kr) * worst / p.c;
    if (fb >= 0.5 * p.fs)
        throw ParameterError("echo: target " + std::to_string(idx) + " at (" + std::to_string(pt.x) + ", " +
                             std::to_string(pt.y) + ") lies outside the unambiguous range window");
}

inline EchoMatrix simulate_dechirped_echo(const Scene& scene, const Trajectory& tr, const RadarParams& p,
                                          const VibrationModel* vib = nullptr) {
    p.validate();
    if (vib) vib->validate();
    if (scene.targets.empty()) throw ParameterError("echo: scene is empty");
    for (std::size_t i = 0; i < scene.targets.size(); ++i) check_unambiguous(tr, p, scene.targets[i], i);
    EchoMatrix e = empty_echo(tr, p);
    // pulses are independent; split the target loop per pulse block
    const std::size_t nb = std::max<std::size_t>(1, std::min<std::size_t>(max_threads(), tr.size()));
    std::vector<EchoMatrix> parts;
    if (nb == 1) {
        for (const auto& t : scene.targets) add_scatterer(e, tr, p, t, vib);
        return e;
    }
    parallel_for(nb, [&](std::size_t b) {
        const std::size_t lo = tr.size() * b / nb, hi = tr.size() * (b + 1) / nb;
        Trajectory sub = tr;
        sub.pos.assign(tr.pos.begin() + lo, tr.pos.begin() + hi);
        sub.t.assign(tr.t.begin() + lo, tr.t.begin() + hi);
        EchoMatrix part = empty_echo(sub, p);
        for (const auto& t : scene.targets) add_scatterer(part, sub, p, t, vib);
        for (std::size_t m = 0; m < sub.size(); ++m)
            std::copy(part.data.row(m), part.data.row(m) + e.samples(), e.data.row(lo + m));
    });
    return e;
}

// Every non-zero pixel becomes a scatterer with a seeded uniform random phase.
inline std::vector<PointTarget> map_to_scatterers(const ReflectivityMap& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2 * kPi);
    std::vector<PointTarget> out;
    for (std::size_t r = 0; r < m.values.rows(); ++r)
        for (std::size_t c = 0; c < m.values.cols(); ++c) {
            const double ph = uni(rng);  // drawn for every pixel so phases do not depend on sparsity
            const double v = m.values(r, c);
            if (v > 0)
                out.push_back({m.x0 + static_cast<double>(c) * m.spacing, m.y0 + static_cast<double>(r) * m.spacing, v, ph});
        }
    return out;
}

inline EchoMatrix simulate_extended_echo(const ReflectivityMap& m, const Trajectory& tr, const RadarParams& p,
                                         std::uint64_t seed = 1, double resolution = 0.0) {
    if (resolution > 0 && m.spacing < resolution / 2)
        throw ParameterError("extended echo: map spacing finer than half the system resolution");
    Scene s;
    s.targets = map_to_scatterers(m, seed);
    if (s.targets.empty()) throw ParameterError("extended echo: reflectivity map is all zero");
    double ext = 0;
    for (const auto& t : s.targets) ext = std::max({ext, std::abs(t.x), std::abs(t.y)});
    s.size = 2 * ext + 1e-6;
    EchoMatrix e = simulate_dechirped_echo(s, tr, p);
    e.seed = seed;
    return e;
}

inline void add_noise(EchoMatrix& e, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma / std::sqrt(2.0));
    for (auto& v : e.data.vec()) v += cplx(g(rng), g(rng));
}

// Removes residual video phase and envelope skew: range FFT, S_c = exp(-j pi f^2 / Kr), IFFT.
inline EchoMatrix rvp_compensate(const EchoMatrix& in, const RadarParams& p) {
    in.require(Domain::dechirped, "rvp_compensate");
    EchoMatrix out = in;
    const std::size_t n = in.samples();
    std::vector<cplx> sc(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (static_cast<double>(k) - static_cast<double>(n / 2)) * p.fs / static_cast<double>(n);
        sc[k] = std::polar(1.0, -kPi * f * f / p.Kr);
    }
    parallel_for(in.pulses(), [&](std::size_t m) {
        cplx* r = out.data.row(m);
        cfft(r, n, Dir::Forward);
        for (std::size_t k = 0; k < n; ++k) r[k] *= sc[k];
        cfft(r, n, Dir::Inverse);
    });
    out.rvp_removed = true;
    return out;
}

}  // namespace vsar
