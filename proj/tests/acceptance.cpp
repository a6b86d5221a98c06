// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Criterion numbers on the command line restrict the run, e.g. `acceptance 1 2 3`.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "vsar/bpa.hpp"
#include "vsar/metrics.hpp"
#include "vsar/pipeline.hpp"

using namespace vsar;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

BsOptions table1_options(double scene = 130.0) {
    BsOptions o;
    o.coarse = {0.1, 0.1, scene / 2};
    o.scene_size = scene;
    o.rho_x = 0.2;
    o.overlap = 4.3;
    return o;
}

std::optional<PointReport> measure(const ComplexImage& img, double x, double y, double search = 0.375,
                                   std::size_t window = 64) {
    PointMetricsOptions o;
    o.search = search;
    o.window = window;
    try {
        return point_metrics(img, x, y, o);
    } catch (const NumericError&) {
        return std::nullopt;
    }
}

double worst_pslr(const PointReport& p) { return std::max(p.range.pslr, p.azimuth.pslr); }

// One simulated pass with its coarse PCS-PFA and BS-PCS-PFA images and their wall times.
struct Run {
    fx::Setup s;
    Scene scene;
    EchoMatrix echo;
    PcsPfaResult pcs;
    BsResult bs;
    double t_sim = 0, t_pcs = 0, t_bs = 0;
};

std::unique_ptr<Run> make_run(double fc, double theta_k_deg, std::size_t pulses, Scene scene, const BsOptions& opt,
                              const VibrationModel* vib = nullptr) {
    auto r = std::make_unique<Run>();
    r->s = fx::circular_pass(fc, theta_k_deg, pulses);
    r->scene = std::move(scene);
    auto t0 = Clock::now();
    r->echo = simulate_dechirped_echo(r->scene, r->s.tr, r->s.prm, vib);
    r->t_sim = since(t0);
    t0 = Clock::now();
    r->pcs = pcs_pfa(r->echo, aperture_geometry(r->s.tr), r->s.prm, opt.coarse);
    r->t_pcs = since(t0);
    t0 = Clock::now();
    r->bs = bs_pcs_pfa(r->echo, r->s.tr, r->s.prm, opt);
    r->t_bs = since(t0);
    std::printf("  [run] %.1f GHz, theta_k %.0f deg, %zu pulses, %zu targets: sim %.1f s, pcs-pfa %.2f s, bs-pcs-pfa %.2f s\n",
                fc / 1e9, theta_k_deg, pulses, r->scene.targets.size(), r->t_sim, r->t_pcs, r->t_bs);
    std::fflush(stdout);
    return r;
}

// Lazily built shared runs.
Run& thz0() {
    static auto r = make_run(220e9, 0.0, 1025, fx::grid_scene(), table1_options());
    return *r;
}
Run& thz75() {
    static auto r = make_run(220e9, 75.0, 4095, fx::grid_scene(), table1_options());
    return *r;
}
Run& xband() {
    static auto r = make_run(9.6e9, 0.0, 2049, fx::grid_scene(), table1_options());
    return *r;
}

struct BpaFull {
    ComplexImage image;
    double seconds = 0;
};

// Full-canvas backprojection of the 220 GHz broadside pass.
BpaFull& thz0_bpa() {
    static BpaFull b = [] {
        Run& r = thz0();
        BpaFull o;
        const auto t0 = Clock::now();
        o.image = backproject(r.echo, r.s.tr, r.s.prm, CanvasSpec::square(130, 0.1, 0.1));
        o.seconds = since(t0);
        std::printf("  [run] backprojection 1301 x 1301: %.1f s\n", o.seconds);
        std::fflush(stdout);
        return o;
    }();
    return b;
}

// ---------------------------------------------------------------------------------------------

Outcome c1_cost_model() {
    const auto t0 = Clock::now();
    const RatioReport r = ratio_report(CostModel{});
    const double us = since(t0) * 1e6;
    const double want[4] = {0.045, 0.322, 0.736, 1.257};
    const double got[4] = {r.p1, r.p2, r.p3, r.p4};
    bool ok = us < 1000.0;
    for (int i = 0; i < 4; ++i) ok = ok && std::abs(got[i] - want[i]) <= 0.002;
    return {ok, fmt("p1..p4 = %.4f %.4f %.4f %.4f (want 0.045 0.322 0.736 1.257 +-0.002), %.1f us", r.p1, r.p2, r.p3,
                    r.p4, us)};
}

Outcome c2_der() {
    const auto thz = RadarParams::from_bandwidth(220e9, 1.2e9, 10e-6, 102.4e6, 1000);
    const auto xb = RadarParams::from_bandwidth(9.6e9, 1.2e9, 10e-6, 102.4e6, 1000);
    const double a = der_radius(thz, 0.2, 500), b = der_radius(xb, 0.2, 500);
    return {std::abs(a - 171.32) <= 0.05 && std::abs(b - 35.78) <= 0.05,
            fmt("220 GHz %.3f m (want 171.32), 9.6 GHz %.3f m (want 35.78), tol 0.05", a, b)};
}

Outcome c3_dir() {
    const double a = dir_gamma(FrameGeometry{500, kPi / 4, 0}, 0.2).gamma;
    const double b = dir_gamma(FrameGeometry{2500, kPi / 4, 0}, 0.2, 500).gamma;
    return {std::abs(a - 23.8) <= 0.5 && std::abs(b - 27.0) <= 0.5,
            fmt("Ra 500 m: %.2f m (want 23.8), Ra 2500 m: %.2f m (want 27), tol 0.5", a, b)};
}

Outcome c4_distortion() {
    Run& r = thz0();
    const Point2 pred = distortion_map(50, 50, FrameGeometry::from(aperture_geometry(r.s.tr)));
    const auto m = measure(r.pcs.image, pred.x, pred.y);
    if (!m) return {false, "no peak near the predicted position"};
    const bool near = std::abs(m->x - pred.x) <= 0.2 && std::abs(m->y - pred.y) <= 0.2;
    const bool band = m->x >= 44.28 - 0.3 && m->x <= 44.47 + 0.3 && m->y >= 53.30 - 0.3 && m->y <= 53.36 + 0.3;
    return {near && band, fmt("peak (%.3f, %.3f), predicted (%.3f, %.3f), band x [43.98, 44.77] y [53.00, 53.66]", m->x,
                              m->y, pred.x, pred.y)};
}

struct PositionCheck {
    double worst = 0;
    std::size_t missing = 0;
};

PositionCheck positions(const ComplexImage& img, const Scene& sc) {
    PositionCheck pc;
    for (const auto& t : sc.targets) {
        const auto m = measure(img, t.x, t.y);
        if (!m) {
            ++pc.missing;
            continue;
        }
        pc.worst = std::max(pc.worst, std::hypot(m->x - t.x, m->y - t.y));
    }
    return pc;
}

// Backprojection onto a small patch around every target.
PositionCheck bpa_patch_positions(Run& r) {
    std::vector<PositionCheck> per(r.scene.targets.size());
    parallel_for(r.scene.targets.size(), [&](std::size_t i) {
        const auto& t = r.scene.targets[i];
        CanvasSpec g;
        g.dx = g.dy = 0.05;
        g.nx = g.ny = 48;
        g.x0 = t.x - 24 * g.dx;
        g.y0 = t.y - 24 * g.dy;
        const ComplexImage img = backproject(r.echo, r.s.tr, r.s.prm, g);
        const auto m = measure(img, t.x, t.y, 0.375, 32);
        if (m)
            per[i].worst = std::hypot(m->x - t.x, m->y - t.y);
        else
            per[i].missing = 1;
    });
    PositionCheck pc;
    for (const auto& p : per) {
        pc.worst = std::max(pc.worst, p.worst);
        pc.missing += p.missing;
    }
    return pc;
}

Outcome c5_gocs() {
    Run& a = thz0();
    const PositionCheck bs0 = positions(a.bs.image, a.scene);
    const PositionCheck bpa0 = positions(thz0_bpa().image, a.scene);
    Run& b = thz75();
    const PositionCheck bs75 = positions(b.bs.image, b.scene);
    const auto t0 = Clock::now();
    const PositionCheck bpa75 = bpa_patch_positions(b);
    std::printf("  [run] backprojection patches at 75 deg: %.1f s\n", since(t0));
    const double tol = 0.125;
    bool ok = true;
    for (const auto* p : {&bs0, &bpa0, &bs75, &bpa75}) ok = ok && p->missing == 0 && p->worst <= tol;
    return {ok, fmt("worst error over 121 targets: bs 0 deg %.4f m, bs 75 deg %.4f m, bpa 0 deg %.4f m, bpa 75 deg "
                    "%.4f m (tol 0.125); missing %zu/%zu/%zu/%zu",
                    bs0.worst, bs75.worst, bpa0.worst, bpa75.worst, bs0.missing, bs75.missing, bpa0.missing,
                    bpa75.missing)};
}

Outcome c6_focus() {
    const auto m = measure(thz0().bs.image, 50, 50);
    if (!m) return {false, "P(50,50) not found"};
    auto irw_ok = [](double v) { return v >= 0.120 && v <= 0.140; };
    auto pslr_ok = [](double v) { return v >= -14.5 && v <= -12.5; };
    const bool ok = irw_ok(m->range.irw) && irw_ok(m->azimuth.irw) && pslr_ok(m->range.pslr) && pslr_ok(m->azimuth.pslr);
    return {ok, fmt("P(50,50) IRW range %.4f / azimuth %.4f m (want [0.120, 0.140]), PSLR %.2f / %.2f dB "
                    "(want [-14.5, -12.5])",
                    m->range.irw, m->azimuth.irw, m->range.pslr, m->azimuth.pslr)};
}

Outcome c7_xband() {
    Run& r = xband();
    const ApertureGeometry g = aperture_geometry(r.s.tr);
    const double cphi = std::cos(g.phi_k());
    const double sweep = std::abs(g.theta.back() - g.theta.front());
    const double th_r = 0.886 * r.s.prm.c / (2 * r.s.prm.B * cphi);
    const double th_a = 0.886 * r.s.prm.lambda() / (2 * sweep * cphi);
    const double der = der_radius(r.s.prm, 0.2, g.Ra_k());
    const Point2 pred = distortion_map(50, 50, FrameGeometry::from(g));
    const auto p = measure(r.pcs.image, pred.x, pred.y, 1.0);
    const auto b = measure(r.bs.image, 50, 50);
    if (!p || !b) return {false, "P(50,50) not found"};
    const double rp = std::max(p->range.irw / th_r, p->azimuth.irw / th_a);
    const double rb = std::max(b->range.irw / th_r, b->azimuth.irw / th_a);
    return {std::hypot(50, 50) > der && rp > 1.5 && rb <= 1.15,
            fmt("P(50,50) at %.1f m (DeR %.2f m); theoretical IRW %.4f / %.4f m; pcs-pfa %.4f / %.4f m (x%.2f, want > "
                "1.5), bs-pcs-pfa %.4f / %.4f m (x%.2f, want <= 1.15)",
                std::hypot(50, 50), der, th_r, th_a, p->range.irw, p->azimuth.irw, rp, b->range.irw, b->azimuth.irw,
                rb)};
}

// |<sub-beam, ideal history of a unit scatterer at (x, y)>|^2 per sample over 90 % of the band.
double matched_energy(const SubBeam& sb, const RadarParams& p, double x, double y) {
    const auto Rt = slant_range_to_point(sb.traj, x, y), Ra = slant_range_to_point(sb.traj, 0, 0);
    cplx acc{};
    double n = 0;
    for (std::size_t m = 0; m < sb.data.pulses(); ++m)
        for (std::size_t k = 0; k < sb.data.samples(); ++k) {
            const double f = sb.data.fast.at(static_cast<double>(k));
            if (std::abs(f) > 0.45 * p.B) continue;
            acc += sb.data.data(m, k) * std::polar(1.0, 4 * kPi / p.c * (p.fc + f) * (Rt[m] - Ra[m]));
            n += 1;
        }
    return std::norm(acc) / n;
}

Outcome c8_filtering() {
    Run& r = thz0();
    const SegmentationPlan& plan = r.bs.plan;
    const FrameGeometry fg = FrameGeometry::from(aperture_geometry(r.s.tr));
    double worst = -1e9;
    int blocks = 0;
    for (const auto& [i, j] : std::vector<std::pair<int, int>>{{0, 0}, {3, 3}, {4, 4}, {5, 4}, {7, 7}, {2, 6}, {7, 0}}) {
        if (i >= plan.N || j >= plan.N) continue;
        const SubBlock& b = plan.blocks[plan.index(i, j)];
        const ComplexImage crop = extract_subimage(r.pcs.image, b);
        const SubBeam sb = beam_segment(crop, r.pcs.plan, r.s.tr, r.s.prm);
        const double cx0 = crop.x(0.0), cx1 = crop.x(static_cast<double>(b.wc - 1));
        const double cy0 = crop.y(0.0), cy1 = crop.y(static_cast<double>(b.wc - 1));
        double inside = 0;
        int n_in = 0;
        std::vector<const PointTarget*> outside;
        for (const auto& t : r.scene.targets) {
            // the crop is cut in the coarse image, so targets are classified by where they appear there
            const Point2 d = distortion_map(t.x, t.y, fg);
            const double out = std::max({cx0 - d.x, d.x - cx1, cy0 - d.y, d.y - cy1});
            if (std::max(std::abs(t.x - b.X), std::abs(t.y - b.Y)) <= b.half - 1.0) {
                inside += matched_energy(sb, r.s.prm, t.x, t.y);
                ++n_in;
            } else if (out > 2.0 && out <= 14.0) {
                outside.push_back(&t);
            }
        }
        if (n_in == 0) continue;
        inside /= n_in;
        for (const auto* t : outside) worst = std::max(worst, fx::db(matched_energy(sb, r.s.prm, t->x, t->y) / inside));
        ++blocks;
    }

    // single-block scene: forward PCS-PFA, invert the image transform, inverse PCS
    const auto s = fx::circular_pass(220e9, 0.0, 1025);
    Scene sc;
    sc.size = 10;
    sc.targets = {{0, 0, 1, 0}, {3, -2, 0.8, 0.5}, {-2.5, 3.5, 0.6, -1.0}};
    const EchoMatrix echo = simulate_dechirped_echo(sc, s.tr, s.prm);
    const int N = plan_segmentation(10, dir_gamma(FrameGeometry::from(aperture_geometry(s.tr)), 0.2).gamma, 0.2).N;
    const PcsPfaResult fwd = pcs_pfa(echo, aperture_geometry(s.tr), s.prm, {0.1, 0.1, 5});
    const KGrid& g = fwd.plan.grid;
    EchoMatrix wr = apcs(rpcs(echo, fwd.plan), fwd.plan);
    CArray back = fwd.image.pix;
    for (std::size_t y = 0; y < g.ny; ++y)
        for (std::size_t x = 0; x < g.nx; ++x)
            back(y, x) *= std::polar(1.0, g.kx0 * fwd.image.x(static_cast<double>(x)) + g.ky0 * fwd.image.y(static_cast<double>(y)));
    cfft2(back, Dir::Inverse);
    wr.data = back;
    const EchoMatrix ph = inverse_pcs(wr, fwd.plan);
    double e = 0;
    for (std::size_t i = 0; i < echo.data.size(); ++i) e += std::norm(ph.data.vec()[i] - echo.data.vec()[i]);
    const double rt = fx::db(e / energy(echo.data));
    return {blocks > 0 && worst <= -30.0 && rt <= -50.0 && N == 1,
            fmt("worst leakage from targets outside the crop %.1f dB over %d sub-beams (want <= -30); single-block (N = %d) round trip "
                "%.1f dB (want <= -50)",
                worst, blocks, N, rt)};
}

// Smooth random texture: white noise box-blurred twice.
RArray texture(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    RArray a(rows, cols);
    for (auto& v : a.vec()) v = u(rng);
    for (int pass = 0; pass < 2; ++pass) {
        RArray b(rows, cols);
        for (long r = 0; r < static_cast<long>(rows); ++r)
            for (long c = 0; c < static_cast<long>(cols); ++c) {
                double s = 0;
                int n = 0;
                for (long rr = std::max(0L, r - 1); rr <= std::min<long>(static_cast<long>(rows) - 1, r + 1); ++rr)
                    for (long cc = std::max(0L, c - 1); cc <= std::min<long>(static_cast<long>(cols) - 1, c + 1); ++cc) {
                        s += a(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                        ++n;
                    }
                b(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s / n;
            }
        a = b;
    }
    return a;
}

RArray window(const RArray& a, long r0, long c0, std::size_t h, std::size_t w) {
    RArray o(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            o(r, c) = a(static_cast<std::size_t>(r0 + static_cast<long>(r)), static_cast<std::size_t>(c0 + static_cast<long>(c)));
    return o;
}

// Largest excess of the normalized magnitude around b over that around a reference target, outside
// the main lobe, within +-1.5 m.
double ghost_db(const ComplexImage& img, const PointReport& b, const PointReport& ref) {
    const long h = static_cast<long>(std::lround(1.5 / img.dx)), core = static_cast<long>(std::lround(0.25 / img.dx));
    const long bc = std::lround(img.col_of(b.x)), br = std::lround(img.row_of(b.y));
    const long rc = std::lround(img.col_of(ref.x)), rr = std::lround(img.row_of(ref.y));
    const double pb = std::abs(img.pix(static_cast<std::size_t>(br), static_cast<std::size_t>(bc)));
    const double pr = std::abs(img.pix(static_cast<std::size_t>(rr), static_cast<std::size_t>(rc)));
    double worst = 1e-12;
    for (long dr = -h; dr <= h; ++dr)
        for (long dc = -h; dc <= h; ++dc) {
            if (std::abs(dr) <= core && std::abs(dc) <= core) continue;
            const double vb = std::abs(img.pix(static_cast<std::size_t>(br + dr), static_cast<std::size_t>(bc + dc))) / pb;
            const double vr = std::abs(img.pix(static_cast<std::size_t>(rr + dr), static_cast<std::size_t>(rc + dc))) / pr;
            worst = std::max(worst, vb - vr);
        }
    return 20 * std::log10(worst);
}

Outcome c9_mosaic() {
    const RArray big = texture(220, 220, 11);
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> d(-15, 15);
    int exact = 0;
    for (int k = 0; k < 100; ++k) {
        const int dx = d(rng), dy = d(rng);
        const RegistrationResult r =
            register_pair(window(big, 50, 50, 100, 120), window(big, 50 - dy, 50 - dx, 100, 120));
        exact += (r.dx == dx && r.dy == dy) ? 1 : 0;
    }

    // block boundaries of the 8 x 8 layout sit at -65 + 16.25 k
    Scene sc;
    sc.targets = {{32.5, 24.4, 1, 0}, {40.6, 24.4, 1, 0}, {-16.2, -32.5, 1, 0}, {-24.4, -40.6, 1, 0},
                  {48.8, 48.7, 1, 0}, {40.6, 40.6, 1, 0}};
    const auto r = make_run(220e9, 0.0, 1025, sc, table1_options());
    double irw_dev = 0, ghost = -1e9;
    bool found = true;
    for (std::size_t k = 0; k < sc.targets.size(); k += 2) {
        const auto& tb = sc.targets[k];
        const auto& ti = sc.targets[k + 1];
        const auto b = measure(r->bs.image, tb.x, tb.y), i = measure(r->bs.image, ti.x, ti.y);
        if (!b || !i) {
            found = false;
            continue;
        }
        irw_dev = std::max({irw_dev, std::abs(b->range.irw / i->range.irw - 1), std::abs(b->azimuth.irw / i->azimuth.irw - 1)});
        ghost = std::max(ghost, ghost_db(r->bs.image, *b, *i));
    }
    return {exact == 100 && found && irw_dev <= 0.15 && ghost <= -25.0,
            fmt("%d/100 shifts exact; boundary vs interior IRW deviation %.1f %% (want <= 15 %%), largest excess "
                "response %.1f dB (want <= -25)",
                exact, 100 * irw_dev, ghost)};
}

Outcome c10_moco() {
    Scene sc;
    sc.targets = {{20, 10, 1, 0}, {-30, 40, 1, 0}, {45, -35, 1, 0}};
    const double lambda = kC / 220e9;
    VibrationModel vib;
    vib.components = {{1.5 * lambda, 5.0, kPi / 3}};
    BsOptions plain = table1_options(), focus = table1_options();
    focus.autofocus = true;
    const auto clean = make_run(220e9, 0.0, 1025, sc, plain);
    vib.known = false;
    const auto blind = make_run(220e9, 0.0, 1025, sc, plain, &vib);
    vib.known = true;
    const auto comp = make_run(220e9, 0.0, 1025, sc, focus, &vib);
    double degr = 1e9, recov = 0, shift = 0;
    bool found = true;
    for (const auto& t : sc.targets) {
        const auto c = measure(clean->bs.image, t.x, t.y);
        const auto b = measure(blind->bs.image, t.x, t.y, 5.0);
        const auto m = measure(comp->bs.image, t.x, t.y);
        if (!c || !m) {
            found = false;
            continue;
        }
        degr = std::min(degr, b ? worst_pslr(*b) - worst_pslr(*c) : 1e9);
        recov = std::max(recov, std::abs(worst_pslr(*m) - worst_pslr(*c)));
        shift = std::max(shift, std::hypot(m->x - c->x, m->y - c->y));
    }
    return {found && degr > 5.0 && recov <= 2.0 && shift <= 0.125,
            fmt("A = 1.5 lambda, 5 Hz, 60 deg: withheld PSLR worse by >= %.1f dB (want > 5); with MoCo + map drift PSLR "
                "within %.2f dB (want <= 2), position within %.4f m (want <= 0.125)",
                degr, recov, shift)};
}

Outcome c11_runtime() {
    Run& r = thz0();
    const double bpa = thz0_bpa().seconds;
    return {bpa >= 20 * r.t_bs && r.t_pcs <= r.t_bs && r.t_bs <= 2 * r.t_pcs,
            fmt("%zu x %zu echo: bpa %.1f s, pcs-pfa %.2f s, bs-pcs-pfa %.2f s; bpa/bs %.1f (want >= 20), bs/pcs %.2f "
                "(want in [1, 2])",
                r.echo.pulses(), r.echo.samples(), bpa, r.t_pcs, r.t_bs, bpa / r.t_bs, r.t_bs / r.t_pcs)};
}

// Sparse clutter on a 3 m lattice with smooth reflectivity, strong scatterer clusters near the edges.
ReflectivityMap extended_map() {
    ReflectivityMap m;
    m.spacing = 1.0;
    m.values = RArray(117, 117);
    m.x0 = m.y0 = -58.0;
    const RArray tex = texture(117, 117, 3);
    for (std::size_t r = 0; r < 117; r += 3)
        for (std::size_t c = 0; c < 117; c += 3) m.values(r, c) = 0.05 + 0.4 * tex(r, c);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> s(1.5, 3.0);
    auto put = [&](long x, long y) { m.values(static_cast<std::size_t>(y + 58), static_cast<std::size_t>(x + 58)) = s(rng); };
    for (long k = 0; k < 12; ++k) {
        put(-50 + 2 * k, 52);        // a row of bright returns along the top edge
        put(54, -40 + 3 * k);        // and down the right edge
        put(-53 + k, -53 + k);       // a diagonal in the lower left corner
    }
    put(50, 50);
    put(-50, 48);
    return m;
}

Outcome c12_extended() {
    const auto s = fx::circular_pass(9.6e9, 0.0, 2049);
    const ReflectivityMap map = extended_map();
    auto t0 = Clock::now();
    const EchoMatrix echo = simulate_extended_echo(map, s.tr, s.prm, 5, 0.125);
    std::printf("  [run] extended scene, %zu scatterers: sim %.1f s\n", map_to_scatterers(map, 5).size(), since(t0));
    const BsOptions opt = table1_options(120);
    t0 = Clock::now();
    const BsResult bs = bs_pcs_pfa(echo, s.tr, s.prm, opt);
    const double t_bs = since(t0);
    const CanvasSpec cv = CanvasSpec::square(120, 0.1, 0.1);
    t0 = Clock::now();
    const ComplexImage ref = backproject(echo, s.tr, s.prm, cv);
    std::printf("  [run] extended scene: bs-pcs-pfa %.1f s, backprojection %.1f s\n", t_bs, since(t0));
    // coarse image cut to the canvas; both sit on the same 0.1 m lattice
    CArray coarse(cv.ny, cv.nx);
    const long oc = std::lround((cv.x0 - bs.coarse.x0) / bs.coarse.dx), orr = std::lround((cv.y0 - bs.coarse.y0) / bs.coarse.dy);
    for (std::size_t r = 0; r < cv.ny; ++r)
        for (std::size_t c = 0; c < cv.nx; ++c) coarse(r, c) = bs.coarse.pix(r + static_cast<std::size_t>(orr), c + static_cast<std::size_t>(oc));
    const ImageMetrics mb = image_metrics(bs.image.pix, ref.pix), mc = image_metrics(coarse, ref.pix);
    return {mb.entropy < mc.entropy && mb.ssim > mc.ssim,
            fmt("9.6 GHz, 120 m map: entropy bs %.3f vs pcs-pfa %.3f; SSIM to bpa bs %.4f vs pcs-pfa %.4f", mb.entropy,
                mc.entropy, mb.ssim, mc.ssim)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"cost-model golden ratios", c1_cost_model},
        {"defocus-negligible radii", c2_der},
        {"distortion-negligible widths", c3_dir},
        {"distortion reproduction (pcs-pfa)", c4_distortion},
        {"distortion removal, ground frame at 0 and 75 deg", c5_gocs},
        {"focus quality of P(50,50)", c6_focus},
        {"X-band wavefront curvature defocus and refocus", c7_xband},
        {"beam-segmenting filtering", c8_filtering},
        {"mosaicking", c9_mosaic},
        {"three-step motion compensation", c10_moco},
        {"runtime ordering", c11_runtime},
        {"extended-target ordering", c12_extended},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int passed = 0, run = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        ++run;
        passed += o.pass ? 1 : 0;
        std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first,
                    o.detail.c_str(), since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", passed, run);
    return passed == run ? 0 : 1;
}
