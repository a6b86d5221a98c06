#pragma once

// Full beam-segmenting pipeline: coarse ground-frame image, segmentation from the DiR width,
// per-block sub-beam refocusing, mosaic.

#include <chrono>
#include <string>
#include <vector>

#include "beamseg.hpp"
#include "mosaic.hpp"
#include "parallel.hpp"
#include "pfa.hpp"
#include "wce.hpp"

namespace vsar {

enum class BlockPath { automatic, local, direct };

inline BlockPath block_path_from_string(const std::string& s) {
    if (s == "auto") return BlockPath::automatic;
    if (s == "local") return BlockPath::local;
    if (s == "direct") return BlockPath::direct;
    throw ParameterError("unknown block path: " + s);
}

struct BsOptions {
    PfaOptions coarse;              // coarse pixel spacing and scatterer half extent
    double scene_size = 130.0;      // side of the output square (m)
    double rho_x = 0.2;             // resolution used for the DiR and the resampling check (m)
    Rounding rounding = Rounding::round;
    int N = 0;                      // 0: from the DiR width
    double overlap = -1.0;          // per side (m); < 0 selects the default
    double crop_margin = 1.0;       // m
    SubBeamOptions sub;
    bool autofocus = false;
    BlockPath path = BlockPath::automatic;
    MosaicOptions mosaic;
};

struct BsResult {
    ComplexImage image;
    ComplexImage coarse;
    SegmentationPlan plan;
    DirResult dir;
    SkipBounds skip;
    MosaicReport mosaic;
    std::vector<AutofocusResult> focus;
    std::vector<std::string> warnings;
    double t_coarse = 0, t_blocks = 0, t_mosaic = 0;
};

inline BsResult bs_pcs_pfa(const EchoMatrix& echo, const Trajectory& tr, const RadarParams& prm,
                           const BsOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    const auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
    if (tr.size() != echo.pulses()) throw ParameterError("bs_pcs_pfa: trajectory does not match the echo");
    BsResult res;
    auto t0 = clock::now();
    const ApertureGeometry g = aperture_geometry(tr);
    PcsPfaResult coarse = pcs_pfa(echo, g, prm, opt.coarse);
    res.t_coarse = secs(t0);

    t0 = clock::now();
    const FrameGeometry fg = FrameGeometry::from(g);
    res.dir = dir_gamma(fg, opt.rho_x, std::max(250.0, opt.scene_size));
    res.plan = plan_segmentation(opt.scene_size, res.dir.gamma, opt.rho_x, opt.rounding, opt.N, opt.overlap);
    attach_crops(res.plan, coarse.image, fg, opt.crop_margin);
    res.skip = resample_skip_check(opt.rho_x, opt.rho_x, g.phi_k(), prm.lambda(), res.plan.W_r);
    const bool direct = opt.path == BlockPath::direct || (opt.path == BlockPath::automatic && res.skip.skip);
    const CanvasSpec cv = CanvasSpec::square(opt.scene_size, opt.coarse.dx, opt.coarse.dy);

    const std::size_t nb = res.plan.blocks.size();
    std::vector<BlockImage> blocks(nb);
    res.focus.assign(nb, {});
    parallel_for(nb, [&](std::size_t k) {
        const SubBlock& b = res.plan.blocks[k];
        const ComplexImage crop = extract_subimage(coarse.image, b);
        SubBeam sb = beam_segment(crop, coarse.plan, tr, prm, opt.sub);
        EchoMatrix data = second_moco(sb.data, sb.traj, prm, b.X, b.Y);
        sb.data = EchoMatrix{};
        if (opt.autofocus) {
            try {
                res.focus[k] = mapdrift_autofocus(data);
            } catch (const std::exception& ex) {
                res.focus[k].warning = ex.what();
            }
        }
        if (direct) {
            blocks[k] = subblock_direct(data, sb.traj, prm, b, cv);
        } else {
            const ComplexImage loc =
                subblock_local_image(data, sb.traj, prm, b, crop.dx, crop.dy, 0.5 * static_cast<double>(b.wc) * crop.dx);
            blocks[k] = render_local(loc, sb.traj, b, cv);
        }
        blocks[k].focus = res.focus[k];
    });
    for (std::size_t k = 0; k < nb; ++k) {
        if (!res.focus[k].warning.empty()) res.warnings.push_back("block " + std::to_string(k) + ": " + res.focus[k].warning);
        if (res.plan.blocks[k].clipped)
            res.warnings.push_back("block " + std::to_string(k) + ": crop extends past the coarse image");
    }
    res.t_blocks = secs(t0);

    t0 = clock::now();
    res.image = assemble(blocks, res.plan, cv, opt.mosaic, &res.mosaic);
    for (const auto& w : res.mosaic.warnings) res.warnings.push_back(w);
    res.t_mosaic = secs(t0);
    res.coarse = std::move(coarse.image);
    return res;
}

}  // namespace vsar
