// vsar: simulate echoes, focus them, and measure the results from scenario files.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "vsar/bpa.hpp"
#include "vsar/config.hpp"
#include "vsar/io.hpp"
#include "vsar/metrics.hpp"
#include "vsar/parallel.hpp"
#include "vsar/pfa.hpp"
#include "vsar/pipeline.hpp"
#include "vsar/wce.hpp"

using json = nlohmann::ordered_json;
using namespace vsar;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

json provenance(const ScenarioConfig& c) {
    json j = json::object();
    for (const auto& [k, v] : c.resolved()) j[k] = v;
    return j;
}

void emit(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<PointTarget> truth_points(const ScenarioConfig& c) {
    ScenarioConfig pts = c;
    pts.scene.map.clear();
    return pts.make_scene().targets;
}

int cmd_simulate(const std::string& cfg_path, std::string out) {
    const ScenarioConfig cfg = load_scenario(cfg_path);
    if (out.empty()) out = cfg.resolve_path(cfg.output.echo);
    const RadarParams prm = cfg.radar_params();
    const Trajectory tr = cfg.make_trajectory();
    Scene scene = cfg.make_scene();
    if (scene.map) {
        const auto extra = map_to_scatterers(*scene.map, cfg.scene.seed);
        scene.targets.insert(scene.targets.end(), extra.begin(), extra.end());
    }
    if (scene.targets.empty()) throw ConfigError(cfg_path + ": scene: no scatterers to simulate");
    const VibrationModel vib = cfg.vibration();
    const auto t0 = std::chrono::steady_clock::now();
    EchoMatrix e = simulate_dechirped_echo(scene, tr, prm, vib.components.empty() ? nullptr : &vib);
    e.seed = cfg.scene.seed;
    if (cfg.radar.noise_sigma > 0) add_noise(e, cfg.radar.noise_sigma, cfg.scene.seed + 1);
    const double t_sim = seconds_since(t0);
    write_echo(out, e, trajectory_digest(tr));

    json j;
    j["command"] = "simulate";
    j["echo"] = out;
    j["pulses"] = e.pulses();
    j["samples"] = e.samples();
    j["scatterers"] = scene.targets.size();
    j["trajectory_digest"] = trajectory_digest(tr);
    j["seconds"] = t_sim;
    j["config"] = provenance(cfg);
    emit(j, "-");
    return kOk;
}

struct FocusArgs {
    std::string config, echo, algo = "bs-pcs-pfa", out, pgm, timing;
    bool magnitude = false;
    double db_range = -1;
};

int cmd_focus(const FocusArgs& a) {
    const ScenarioConfig cfg = load_scenario(a.config);
    const Algorithm algo = algorithm_from_string(a.algo);
    const RadarParams prm = cfg.radar_params();
    const Trajectory tr = cfg.make_trajectory();
    const EchoFile ef = read_echo(a.echo);
    if (ef.trajectory_digest != trajectory_digest(tr))
        throw ConfigError(a.echo + ": echo was simulated on a different trajectory than " + a.config + " describes");
    ef.echo.require(Domain::dechirped, "focus");

    json j;
    j["command"] = "focus";
    j["algo"] = a.algo;
    j["echo"] = a.echo;
    json stages = json::object();
    json warnings = json::array();
    ComplexImage img;
    const auto t0 = std::chrono::steady_clock::now();
    switch (algo) {
        case Algorithm::bpa: {
            BpaOptions o;
            o.kernel = cfg.image.kernel;
            img = backproject(ef.echo, tr, prm, CanvasSpec::square(cfg.scene.size, cfg.image.dx, cfg.image.dy), o);
            break;
        }
        case Algorithm::pfa_lospi:
            img = pfa_lospi(ef.echo, aperture_geometry(tr), prm, cfg.pfa_options());
            break;
        case Algorithm::pcs_pfa:
            img = pcs_pfa(ef.echo, aperture_geometry(tr), prm, cfg.pfa_options()).image;
            break;
        case Algorithm::bs_pcs_pfa: {
            BsResult r = bs_pcs_pfa(ef.echo, tr, prm, cfg.bs_options());
            stages["coarse"] = r.t_coarse;
            stages["blocks"] = r.t_blocks;
            stages["mosaic"] = r.t_mosaic;
            j["segmentation"] = {{"N", r.plan.N},
                                 {"W_r", r.plan.W_r},
                                 {"overlap", r.plan.overlap},
                                 {"gamma", r.dir.gamma},
                                 {"skip_resampling", r.skip.skip},
                                 {"X_eps", r.skip.X_eps},
                                 {"Y_eps", r.skip.Y_eps}};
            json qpe = json::array();
            for (const auto& f : r.focus) qpe.push_back(f.qpe);
            if (cfg.moco.autofocus) j["autofocus_qpe"] = qpe;
            j["mosaic"] = {{"pairs_used", r.mosaic.pairs_used}, {"loop_residual", r.mosaic.loop_residual}};
            for (const auto& w : r.warnings) warnings.push_back(w);
            img = std::move(r.image);
            break;
        }
        case Algorithm::ucsa:
            throw ConfigError("focus: ucsa is available in the cost model only");
    }
    const double total = seconds_since(t0);
    stages["total"] = total;

    const std::string out = a.out.empty() ? cfg.resolve_path(cfg.output.image) : a.out;
    const bool complex = a.magnitude ? false : cfg.output.complex;
    write_image(out, img, complex);
    const std::string pgm = a.pgm.empty() ? (cfg.output.pgm.empty() ? "" : cfg.resolve_path(cfg.output.pgm)) : a.pgm;
    const double db = a.db_range > 0 ? a.db_range : cfg.output.db_range;
    if (!pgm.empty()) write_pgm(pgm, img, db);

    j["image"] = {{"path", out},
                  {"nx", img.nx()},
                  {"ny", img.ny()},
                  {"x0", img.x0},
                  {"y0", img.y0},
                  {"dx", img.dx},
                  {"dy", img.dy},
                  {"frame", img.coords == CoordSys::GOCS ? "ground" : "line_of_sight"},
                  {"complex", complex}};
    if (!pgm.empty()) j["pgm"] = {{"path", pgm}, {"db_range", db}};
    j["seconds"] = stages;
    j["threads"] = max_threads();
    j["warnings"] = warnings;
    j["config"] = provenance(cfg);
    const std::string timing = a.timing.empty() ? cfg.resolve_path(cfg.output.timing) : a.timing;
    emit(j, timing);
    if (!timing.empty() && timing != "-") emit(j, "-");
    return kOk;
}

struct MetricsArgs {
    std::string config, image, reference, out;
    double search = 0.375;
};

json profile_json(const ProfileMetrics& p) { return {{"irw", p.irw}, {"pslr_db", p.pslr}, {"islr_db", p.islr}}; }

int cmd_metrics(const MetricsArgs& a) {
    const ScenarioConfig cfg = load_scenario(a.config);
    const ImageFile f = read_image(a.image);
    json j;
    j["command"] = "metrics";
    j["image"] = a.image;
    json pts = json::array();
    int missing = 0;
    PointMetricsOptions po;
    po.search = a.search;
    for (const PointTarget& t : truth_points(cfg)) {
        // line-of-sight images are rotated by -theta_k
        const Point2 p = f.image.coords == CoordSys::LOS ? lospi_position({t.x, t.y}, cfg.trajectory.theta_k)
                                                         : Point2{t.x, t.y};
        json e{{"truth_x", t.x}, {"truth_y", t.y}};
        try {
            const PointReport r = point_metrics(f.image, p.x, p.y, po);
            e["x"] = r.x;
            e["y"] = r.y;
            e["position_error"] = std::hypot(r.x - p.x, r.y - p.y);
            e["peak"] = r.peak;
            e["range"] = profile_json(r.range);
            e["azimuth"] = profile_json(r.azimuth);
        } catch (const std::exception& ex) {
            e["error"] = ex.what();
            ++missing;
        }
        pts.push_back(e);
    }
    j["points"] = pts;
    if (!a.reference.empty()) {
        const ImageFile ref = read_image(a.reference);
        if (ref.image.nx() != f.image.nx() || ref.image.ny() != f.image.ny())
            throw ParameterError("metrics: image and reference dimensions differ");
        const ImageMetrics m = image_metrics(f.image, ref.image);
        j["image_quality"] = {{"entropy", m.entropy}, {"rmse", m.rmse}, {"psnr_db", m.psnr},
                              {"exact", m.exact}, {"ssim", m.ssim}};
    } else {
        j["image_quality"] = {{"entropy", entropy(normalized_magnitude(f.image.pix))}};
    }
    j["config"] = provenance(cfg);
    emit(j, a.out);
    if (missing > 0) {
        std::cerr << "vsar: " << missing << " target(s) without a measurable peak\n";
        return kNumericError;
    }
    return kOk;
}

int cmd_costmodel(const CostModel& m, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const RatioReport r = ratio_report(m);
    json j;
    j["command"] = "costmodel";
    j["params"] = {{"Na", m.Na}, {"Nr", m.Nr}, {"Nx", m.Nx}, {"Ny", m.Ny}, {"M", m.M}, {"N", m.N}, {"as_printed", m.as_printed}};
    j["flops"] = {{"bpa", flops(m, Algorithm::bpa)},
                  {"pfa-lospi", flops(m, Algorithm::pfa_lospi)},
                  {"ucsa", flops(m, Algorithm::ucsa)},
                  {"pcs-pfa", flops(m, Algorithm::pcs_pfa)},
                  {"bs-pcs-pfa", flops(m, Algorithm::bs_pcs_pfa)}};
    j["ratios"] = {{"p1", r.p1}, {"p2", r.p2}, {"p3", r.p3}, {"p4", r.p4}};
    j["seconds"] = seconds_since(t0);
    emit(j, out);
    return kOk;
}

struct WceArgs {
    std::string config, out = "wce.pgm", json_out;
    double half = 250, spacing = 1;
};

int cmd_wce_map(const WceArgs& a) {
    const ScenarioConfig cfg = load_scenario(a.config);
    const RadarParams prm = cfg.radar_params();
    const ApertureGeometry g = aperture_geometry(cfg.make_trajectory());
    const FrameGeometry fg = FrameGeometry::from(g);
    const double rmax = der_radius(prm, cfg.trajectory.resolution, g.Ra_k());
    const WceRaster w = wce_raster(fg, cfg.segmentation.rho_x, rmax, a.half, a.spacing);
    const DirResult d = dir_gamma(fg, cfg.segmentation.rho_x, a.half);

    ComplexImage img;
    img.pix = CArray(w.offset.rows(), w.offset.cols());
    img.x0 = w.x0;
    img.y0 = w.y0;
    img.dx = img.dy = w.spacing;
    for (std::size_t i = 0; i < w.offset.size(); ++i) img.pix.vec()[i] = w.offset.vec()[i];
    const bool pgm = a.out.size() > 4 && a.out.substr(a.out.size() - 4) == ".pgm";
    if (pgm) {
        // mask picture: DiR bright, DeR grey
        ComplexImage m = img;
        for (std::size_t i = 0; i < w.offset.size(); ++i)
            m.pix.vec()[i] = w.dir_mask.vec()[i] > 0 ? 1.0 : (w.der_mask.vec()[i] > 0 ? 0.1 : 0.0);
        write_pgm(a.out, m, 40.0);
    } else {
        write_image(a.out, img, false);
    }
    json j;
    j["command"] = "wce-map";
    j["raster"] = a.out;
    j["gamma"] = d.gamma;
    j["r_min"] = d.r_min;
    j["der_radius"] = rmax;
    j["clipped"] = d.clipped;
    j["config"] = provenance(cfg);
    emit(j, a.json_out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vsar: circular-trajectory SAR echo simulation and image formation"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker cap (default: VSAR_THREADS or all cores)");

    std::string sim_cfg, sim_out;
    auto* sim = app.add_subcommand("simulate", "simulate a dechirped echo");
    sim->add_option("config", sim_cfg, "scenario file")->required();
    sim->add_option("-o,--out", sim_out, "echo file (.sechb)");

    FocusArgs fa;
    auto* foc = app.add_subcommand("focus", "form an image from an echo file");
    foc->add_option("config", fa.config, "scenario file")->required();
    foc->add_option("echo", fa.echo, "echo file (.sechb)")->required();
    foc->add_option("--algo", fa.algo, "bpa | pfa-lospi | pcs-pfa | bs-pcs-pfa")
        ->check(CLI::IsMember({"bpa", "pfa-lospi", "pcs-pfa", "bs-pcs-pfa"}));
    foc->add_option("-o,--out", fa.out, "image file (.sgrid)");
    foc->add_flag("--magnitude", fa.magnitude, "store magnitude instead of complex samples");
    foc->add_option("--pgm", fa.pgm, "also export an 8-bit PGM");
    foc->add_option("--db-range", fa.db_range, "PGM dynamic range (dB)");
    foc->add_option("--timing", fa.timing, "timing record (JSON)");

    MetricsArgs ma;
    auto* met = app.add_subcommand("metrics", "point-target and image quality report");
    met->add_option("config", ma.config, "scenario file holding the truth")->required();
    met->add_option("image", ma.image, "image file (.sgrid)")->required();
    met->add_option("--reference", ma.reference, "reference image for RMSE/PSNR/SSIM");
    met->add_option("--search", ma.search, "peak search radius (m)");
    met->add_option("-o,--out", ma.out, "report file (JSON)");

    CostModel cm;
    std::string cm_out;
    auto* cost = app.add_subcommand("costmodel", "floating-point operation counts and ratios");
    cost->add_option("--Na", cm.Na);
    cost->add_option("--Nr", cm.Nr);
    cost->add_option("--Nx", cm.Nx);
    cost->add_option("--Ny", cm.Ny);
    cost->add_option("--M", cm.M, "interpolation kernel length");
    cost->add_option("--N", cm.N, "segmentation level");
    cost->add_flag("--as-printed", cm.as_printed, "use the typeset forms of the BPA and PFA counts");
    cost->add_option("-o,--out", cm_out, "report file (JSON)");

    WceArgs wa;
    auto* wce = app.add_subcommand("wce-map", "rasterize the wavefront-curvature offset and regions");
    wce->add_option("config", wa.config, "scenario file")->required();
    wce->add_option("-o,--out", wa.out, "raster (.pgm mask or .sgrid offsets)");
    wce->add_option("--half", wa.half, "half side of the raster (m)");
    wce->add_option("--spacing", wa.spacing, "raster spacing (m)");
    wce->add_option("--json", wa.json_out, "summary file (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }
    if (threads > 0) set_max_threads(threads);

    try {
        if (*sim) return cmd_simulate(sim_cfg, sim_out);
        if (*foc) return cmd_focus(fa);
        if (*met) return cmd_metrics(ma);
        if (*cost) return cmd_costmodel(cm, cm_out);
        if (*wce) return cmd_wce_map(wa);
    } catch (const ConfigError& e) {
        std::cerr << "vsar: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParameterError& e) {
        std::cerr << "vsar: invalid parameter: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "vsar: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "vsar: numeric failure: " << e.what() << "\n";
        return kNumericError;
    }
    return kOk;
}
