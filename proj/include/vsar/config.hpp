#pragma once

// Scenario files: flat `key = value` lines under `[section]` headers, `#` comments.
// SI units throughout; any key may instead be given in degrees with a `_deg` suffix.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "beamseg.hpp"
#include "common.hpp"
#include "echo_sim.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "pipeline.hpp"

namespace vsar {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    struct Radar {
        double fc = 220e9, B = 1.2e9, Tr = 10e-6, fs = 102.4e6, c = kC;
        double prf = 0;           // 0: derived from trajectory.pulses
        double noise_sigma = 0;   // additive complex Gaussian, per sample
    } radar;
    struct Traj {
        std::string mode = "circular";
        double slant_range = 500, grazing = kPi / 4, v = 30, theta_k = 0;
        double resolution = 0.125;   // azimuth resolution used to size the aperture
        double aperture = 0;         // swept angle (rad); 0: from resolution
        std::size_t pulses = 1025;
    } trajectory;
    struct SceneCfg {
        double size = 130;
        std::vector<PointTarget> targets;
        std::size_t grid_n = 0;      // optional square target grid
        double grid_step = 10;
        std::string map;             // .sgrid (magnitude) or .pgm
        double map_spacing = 0.25;   // for .pgm maps
        std::uint64_t seed = 1;
    } scene;
    struct Image {
        double dx = 0.1, dy = 0.1, scene_half = 65;
        std::size_t kernel = 16;
    } image;
    struct Seg {
        std::string policy = "round";
        int N = 0;
        double overlap = -1;
        double rho_x = 0.2;
        std::string path = "auto";
        double crop_margin = 1.0;
    } segmentation;
    struct Moco {
        double amplitude = 0, frequency = 0, phase = 0;
        bool known = true;
        bool autofocus = false;
    } moco;
    struct Output {
        std::string echo = "echo.sechb", image = "image.sgrid", pgm, timing;
        bool complex = true;
        double db_range = 40;
    } output;

    std::string source;  // file the values were read from

    RadarParams radar_params() const {
        RadarParams p = RadarParams::from_bandwidth(radar.fc, radar.B, radar.Tr, radar.fs, radar.prf > 0 ? radar.prf : 1.0);
        p.c = radar.c;
        if (radar.prf <= 0) p.prf = derived_prf(p);
        return p;
    }
    double aperture_angle(const RadarParams& p) const {
        return trajectory.aperture > 0 ? trajectory.aperture
                                       : aperture_for_resolution(p.lambda(), trajectory.resolution, trajectory.grazing);
    }
    // PRF placing `pulses` samples across the aperture (floor(T prf) = pulses)
    double derived_prf(const RadarParams& p) const {
        const double w = trajectory.v / (trajectory.slant_range * std::cos(trajectory.grazing));
        const double T = aperture_angle(p) / w;
        return (static_cast<double>(trajectory.pulses) + 0.5) / T;
    }
    Trajectory make_trajectory() const {
        const RadarParams p = radar_params();
        return make_circular_trajectory_slant(p, trajectory.slant_range, trajectory.grazing, trajectory.v,
                                              trajectory.theta_k, aperture_angle(p));
    }
    Scene make_scene() const {
        Scene s;
        s.size = scene.size;
        s.targets = scene.targets;
        if (scene.grid_n > 0) {
            const double h = 0.5 * static_cast<double>(scene.grid_n - 1);
            for (std::size_t i = 0; i < scene.grid_n; ++i)
                for (std::size_t j = 0; j < scene.grid_n; ++j)
                    s.targets.push_back({(static_cast<double>(j) - h) * scene.grid_step,
                                         (static_cast<double>(i) - h) * scene.grid_step, 1.0, 0.0});
        }
        if (!scene.map.empty()) s.map = load_map();
        return s;
    }
    ReflectivityMap load_map() const {
        const bool pgm = scene.map.size() > 4 && scene.map.substr(scene.map.size() - 4) == ".pgm";
        if (pgm) return read_pgm_map(resolve_path(scene.map), scene.map_spacing);
        const ImageFile f = read_image(resolve_path(scene.map));
        if (std::abs(f.image.dx - f.image.dy) > 1e-9 * f.image.dx)
            throw ConfigError("scene.map: reflectivity grid must have square pixels");
        ReflectivityMap m;
        m.values = RArray(f.image.ny(), f.image.nx());
        for (std::size_t i = 0; i < m.values.size(); ++i) m.values.vec()[i] = std::abs(f.image.pix.vec()[i]);
        m.x0 = f.image.x0;
        m.y0 = f.image.y0;
        m.spacing = f.image.dx;
        return m;
    }
    VibrationModel vibration() const {
        VibrationModel v;
        if (moco.amplitude > 0) v.components.push_back({moco.amplitude, moco.frequency, moco.phase});
        v.known = moco.known;
        return v;
    }
    BsOptions bs_options() const {
        BsOptions o;
        o.coarse = pfa_options();
        o.scene_size = scene.size;
        o.rho_x = segmentation.rho_x;
        o.rounding = rounding_from_string(segmentation.policy);
        o.N = segmentation.N;
        o.overlap = segmentation.overlap;
        o.crop_margin = segmentation.crop_margin;
        o.autofocus = moco.autofocus;
        o.path = block_path_from_string(segmentation.path);
        return o;
    }
    PfaOptions pfa_options() const { return {image.dx, image.dy, image.scene_half, image.kernel}; }

    // Paths in the file are relative to the file's directory.
    std::string resolve_path(const std::string& p) const {
        if (p.empty() || p[0] == '/' || source.empty()) return p;
        const auto slash = source.find_last_of('/');
        return slash == std::string::npos ? p : source.substr(0, slash + 1) + p;
    }

    // Every value the numerics depend on, after defaults and derivations.
    std::vector<std::pair<std::string, std::string>> resolved() const {
        std::vector<std::pair<std::string, std::string>> kv;
        auto num = [&](const std::string& k, double v) {
            std::ostringstream s;
            s.precision(17);
            s << v;
            kv.emplace_back(k, s.str());
        };
        auto str = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
        const RadarParams p = radar_params();
        num("radar.fc", p.fc);
        num("radar.bandwidth", p.B);
        num("radar.pulse_width", p.Tr);
        num("radar.chirp_rate", p.Kr);
        num("radar.fs", p.fs);
        num("radar.prf", p.prf);
        num("radar.c", p.c);
        num("radar.noise_sigma", radar.noise_sigma);
        str("trajectory.mode", trajectory.mode);
        num("trajectory.slant_range", trajectory.slant_range);
        num("trajectory.grazing", trajectory.grazing);
        num("trajectory.velocity", trajectory.v);
        num("trajectory.theta_k", trajectory.theta_k);
        num("trajectory.resolution", trajectory.resolution);
        num("trajectory.aperture", aperture_angle(p));
        num("trajectory.pulses", static_cast<double>(make_trajectory().size()));
        num("scene.size", scene.size);
        num("scene.grid_n", static_cast<double>(scene.grid_n));
        num("scene.grid_step", scene.grid_step);
        std::ostringstream ts;
        ts.precision(17);
        for (std::size_t i = 0; i < scene.targets.size(); ++i)
            ts << (i ? "; " : "") << scene.targets[i].x << " " << scene.targets[i].y << " " << scene.targets[i].sigma
               << " " << scene.targets[i].phase * 180.0 / kPi;
        str("scene.targets", ts.str());
        str("scene.map", scene.map);
        num("scene.map_spacing", scene.map_spacing);
        num("scene.seed", static_cast<double>(scene.seed));
        num("image.dx", image.dx);
        num("image.dy", image.dy);
        num("image.scene_half", image.scene_half);
        num("image.kernel", static_cast<double>(image.kernel));
        str("segmentation.policy", segmentation.policy);
        num("segmentation.N", segmentation.N);
        num("segmentation.overlap", segmentation.overlap);
        num("segmentation.rho_x", segmentation.rho_x);
        str("segmentation.path", segmentation.path);
        num("segmentation.crop_margin", segmentation.crop_margin);
        num("moco.amplitude", moco.amplitude);
        num("moco.frequency", moco.frequency);
        num("moco.phase", moco.phase);
        str("moco.known", moco.known ? "true" : "false");
        str("moco.autofocus", moco.autofocus ? "true" : "false");
        str("output.echo", output.echo);
        str("output.image", output.image);
        str("output.pgm", output.pgm);
        str("output.timing", output.timing);
        str("output.complex", output.complex ? "true" : "false");
        num("output.db_range", output.db_range);
        return kv;
    }
};

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool degrees = false;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

class ConfigReader {
public:
    ConfigReader(std::map<std::string, ConfigEntry> e, std::string file) : e_(std::move(e)), file_(std::move(file)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const auto it = e_.find(key);
        std::string where = file_;
        if (it != e_.end()) where += ":" + std::to_string(it->second.line);
        throw ConfigError(where + ": " + key + ": " + msg);
    }
    bool has(const std::string& key) const { return e_.count(key) > 0; }

    void number(const std::string& key, double& out, bool angle = false) {
        const auto it = e_.find(key);
        if (it == e_.end()) return;
        used_.push_back(key);
        if (it->second.degrees && !angle) fail(key, "the _deg suffix only applies to angles");
        const std::string& v = it->second.value;
        std::size_t n = 0;
        double x = 0;
        try {
            x = std::stod(v, &n);
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + v + "'");
        }
        if (trim(v.substr(n)).size()) fail(key, "expected a number, got '" + v + "'");
        if (!std::isfinite(x)) fail(key, "value must be finite");
        out = it->second.degrees ? x * kPi / 180.0 : x;
    }
    template <class I>
    void integer(const std::string& key, I& out) {
        double x = static_cast<double>(out);
        number(key, x);
        if (has(key) && (x != std::floor(x) || (std::is_unsigned_v<I> && x < 0))) fail(key, "expected a non-negative integer");
        out = static_cast<I>(x);
    }
    void text(const std::string& key, std::string& out) {
        const auto it = e_.find(key);
        if (it == e_.end()) return;
        used_.push_back(key);
        out = it->second.value;
    }
    void boolean(const std::string& key, bool& out) {
        const auto it = e_.find(key);
        if (it == e_.end()) return;
        used_.push_back(key);
        const std::string& v = it->second.value;
        if (v == "true" || v == "yes" || v == "1" || v == "on") out = true;
        else if (v == "false" || v == "no" || v == "0" || v == "off") out = false;
        else fail(key, "expected true or false, got '" + v + "'");
    }
    void targets(const std::string& key, std::vector<PointTarget>& out) {
        const auto it = e_.find(key);
        if (it == e_.end()) return;
        used_.push_back(key);
        std::stringstream all(it->second.value);
        std::string item;
        while (std::getline(all, item, ';')) {
            item = trim(item);
            if (item.empty()) continue;
            for (char& ch : item)
                if (ch == ',') ch = ' ';
            std::istringstream is(item);
            std::vector<double> f;
            double x;
            while (is >> x) f.push_back(x);
            if (!is.eof() || f.size() < 2 || f.size() > 4)
                fail(key, "each target is 'x y [sigma [phase_deg]]', got '" + item + "'");
            out.push_back({f[0], f[1], f.size() > 2 ? f[2] : 1.0, f.size() > 3 ? f[3] * kPi / 180.0 : 0.0});
        }
    }
    void reject_unknown() const {
        for (const auto& [k, v] : e_)
            if (std::find(used_.begin(), used_.end(), k) == used_.end()) fail(k, "unknown key");
    }

private:
    std::map<std::string, ConfigEntry> e_;
    std::vector<std::string> used_;
    std::string file_;
};

}  // namespace detail

// Parses scenario text; `name` labels diagnostics.
inline ScenarioConfig parse_scenario(const std::string& text, const std::string& name = "<config>") {
    std::map<std::string, detail::ConfigEntry> entries;
    std::istringstream in(text);
    std::string raw, section;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const std::string s = detail::trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(name + ":" + std::to_string(ln) + ": malformed section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(name + ":" + std::to_string(ln) + ": empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(name + ":" + std::to_string(ln) + ": expected 'key = value'");
        if (section.empty()) throw ConfigError(name + ":" + std::to_string(ln) + ": key outside any [section]");
        std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(name + ":" + std::to_string(ln) + ": missing key");
        detail::ConfigEntry e{val, ln, false};
        if (key.size() > 4 && key.substr(key.size() - 4) == "_deg") {
            key.resize(key.size() - 4);
            e.degrees = true;
        }
        const std::string full = section + "." + key;
        if (entries.count(full))
            throw ConfigError(name + ":" + std::to_string(ln) + ": " + full + ": duplicate (first set on line " +
                              std::to_string(entries[full].line) + ")");
        entries[full] = e;
    }

    detail::ConfigReader r(std::move(entries), name);
    ScenarioConfig c;
    c.source = name;
    r.number("radar.fc", c.radar.fc);
    r.number("radar.bandwidth", c.radar.B);
    r.number("radar.pulse_width", c.radar.Tr);
    r.number("radar.fs", c.radar.fs);
    r.number("radar.prf", c.radar.prf);
    r.number("radar.c", c.radar.c);
    r.number("radar.noise_sigma", c.radar.noise_sigma);
    r.text("trajectory.mode", c.trajectory.mode);
    r.number("trajectory.slant_range", c.trajectory.slant_range);
    r.number("trajectory.grazing", c.trajectory.grazing, true);
    r.number("trajectory.velocity", c.trajectory.v);
    r.number("trajectory.theta_k", c.trajectory.theta_k, true);
    r.number("trajectory.resolution", c.trajectory.resolution);
    r.number("trajectory.aperture", c.trajectory.aperture, true);
    r.integer("trajectory.pulses", c.trajectory.pulses);
    r.number("scene.size", c.scene.size);
    r.targets("scene.targets", c.scene.targets);
    r.integer("scene.grid_n", c.scene.grid_n);
    r.number("scene.grid_step", c.scene.grid_step);
    r.text("scene.map", c.scene.map);
    r.number("scene.map_spacing", c.scene.map_spacing);
    r.integer("scene.seed", c.scene.seed);
    r.number("image.dx", c.image.dx);
    r.number("image.dy", c.image.dy);
    r.number("image.scene_half", c.image.scene_half);
    r.integer("image.kernel", c.image.kernel);
    r.text("segmentation.policy", c.segmentation.policy);
    r.integer("segmentation.N", c.segmentation.N);
    r.number("segmentation.overlap", c.segmentation.overlap);
    r.number("segmentation.rho_x", c.segmentation.rho_x);
    r.text("segmentation.path", c.segmentation.path);
    r.number("segmentation.crop_margin", c.segmentation.crop_margin);
    r.number("moco.amplitude", c.moco.amplitude);
    r.number("moco.frequency", c.moco.frequency);
    r.number("moco.phase", c.moco.phase, true);
    r.boolean("moco.known", c.moco.known);
    r.boolean("moco.autofocus", c.moco.autofocus);
    r.text("output.echo", c.output.echo);
    r.text("output.image", c.output.image);
    r.text("output.pgm", c.output.pgm);
    r.text("output.timing", c.output.timing);
    r.boolean("output.complex", c.output.complex);
    r.number("output.db_range", c.output.db_range);
    r.reject_unknown();

    // statically checkable preconditions
    auto pos = [&](const char* k, double v) {
        if (!(v > 0)) r.fail(k, "must be positive");
    };
    pos("radar.fc", c.radar.fc);
    pos("radar.bandwidth", c.radar.B);
    pos("radar.pulse_width", c.radar.Tr);
    pos("radar.fs", c.radar.fs);
    pos("radar.c", c.radar.c);
    if (c.radar.fc <= c.radar.B) r.fail("radar.fc", "carrier must exceed the bandwidth");
    if (c.radar.prf < 0) r.fail("radar.prf", "must be non-negative");
    if (c.radar.noise_sigma < 0) r.fail("radar.noise_sigma", "must be non-negative");
    if (c.trajectory.mode != "circular") r.fail("trajectory.mode", "only 'circular' is supported");
    pos("trajectory.slant_range", c.trajectory.slant_range);
    pos("trajectory.velocity", c.trajectory.v);
    if (!(c.trajectory.grazing > 0 && c.trajectory.grazing < kPi / 2)) r.fail("trajectory.grazing", "must lie in (0, 90) degrees");
    if (c.trajectory.aperture <= 0) pos("trajectory.resolution", c.trajectory.resolution);
    if (c.trajectory.aperture < 0 || c.trajectory.aperture >= kPi) r.fail("trajectory.aperture", "must lie in [0, 180) degrees");
    if (c.radar.prf <= 0 && c.trajectory.pulses < 3) r.fail("trajectory.pulses", "need at least 3 pulses");
    pos("scene.size", c.scene.size);
    if (c.scene.grid_n > 0 && c.scene.grid_step * static_cast<double>(c.scene.grid_n - 1) > c.scene.size + 1e-9)
        r.fail("scene.grid_n", "target grid does not fit inside scene.size");
    for (std::size_t i = 0; i < c.scene.targets.size(); ++i) {
        const auto& t = c.scene.targets[i];
        if (!(t.sigma > 0)) r.fail("scene.targets", "target " + std::to_string(i) + " has non-positive sigma");
        if (std::abs(t.x) > c.scene.size / 2 || std::abs(t.y) > c.scene.size / 2)
            r.fail("scene.targets", "target " + std::to_string(i) + " lies outside the scene square");
    }
    if (c.scene.targets.empty() && c.scene.grid_n == 0 && c.scene.map.empty())
        throw ConfigError(name + ": scene: no targets, grid or map given");
    pos("scene.map_spacing", c.scene.map_spacing);
    pos("image.dx", c.image.dx);
    pos("image.dy", c.image.dy);
    pos("image.scene_half", c.image.scene_half);
    if (c.image.kernel < 2 || c.image.kernel % 2) r.fail("image.kernel", "must be an even number of taps >= 2");
    try {
        (void)rounding_from_string(c.segmentation.policy);
    } catch (const std::exception&) {
        r.fail("segmentation.policy", "expected floor, round or ceil");
    }
    try {
        (void)block_path_from_string(c.segmentation.path);
    } catch (const std::exception&) {
        r.fail("segmentation.path", "expected auto, local or direct");
    }
    if (c.segmentation.N < 0) r.fail("segmentation.N", "must be non-negative");
    pos("segmentation.rho_x", c.segmentation.rho_x);
    if (c.segmentation.crop_margin < 0) r.fail("segmentation.crop_margin", "must be non-negative");
    if (c.moco.amplitude < 0) r.fail("moco.amplitude", "must be non-negative");
    if (c.moco.frequency < 0) r.fail("moco.frequency", "must be non-negative");
    pos("output.db_range", c.output.db_range);
    try {
        c.radar_params().validate();
    } catch (const std::exception& ex) {
        throw ConfigError(name + ": radar: " + ex.what());
    }
    return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), path);
}

}  // namespace vsar
