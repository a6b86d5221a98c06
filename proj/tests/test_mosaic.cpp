#include <gtest/gtest.h>

#include <random>

#include "vsar/mosaic.hpp"

using namespace vsar;

namespace {

// Smooth random texture: white noise box-blurred twice.
RArray texture(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    RArray a(rows, cols);
    for (auto& v : a.vec()) v = u(rng);
    for (int pass = 0; pass < 2; ++pass) {
        RArray b(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double s = 0;
                int n = 0;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const long rr = static_cast<long>(r) + dr, cc = static_cast<long>(c) + dc;
                        if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) continue;
                        s += a(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                        ++n;
                    }
                b(r, c) = s / n;
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

}  // namespace

TEST(Registration, RecoversRandomIntegerShifts) {
    const RArray big = texture(200, 200, 11);
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> d(-12, 12);
    for (int k = 0; k < 30; ++k) {
        const int dx = d(rng), dy = d(rng);
        // b(x) = a(x - d)
        const RArray a = window(big, 40, 40, 96, 120);
        const RArray b = window(big, 40 - dy, 40 - dx, 96, 120);
        const RegistrationResult r = register_pair(a, b);
        EXPECT_EQ(r.dx, dx);
        EXPECT_EQ(r.dy, dy);
        EXPECT_GT(r.confidence, 2.0);
    }
}

TEST(Registration, SubPixelRefinementIsNearTheIntegerPeak) {
    const RArray big = texture(160, 160, 12);
    const RegistrationResult r = register_pair(window(big, 30, 30, 64, 64), window(big, 28, 33, 64, 64));
    EXPECT_EQ(r.dx, -3);
    EXPECT_EQ(r.dy, 2);
    EXPECT_NEAR(r.sub_dx, -3.0, 0.5);
    EXPECT_NEAR(r.sub_dy, 2.0, 0.5);
}

TEST(Registration, Errors) {
    RArray flat(32, 32);
    for (auto& v : flat.vec()) v = 1.0;
    const RArray t = texture(32, 32, 1);
    EXPECT_THROW(register_pair(flat, t), NumericError);
    EXPECT_THROW(register_pair(t, RArray(16, 32)), ParameterError);
    EXPECT_THROW(register_pair(RArray{}, RArray{}), ParameterError);
}

TEST(Assemble, UndoesABlockShiftAndGain) {
    const CanvasSpec cv = CanvasSpec::square(40, 0.1, 0.1);
    SegmentationPlan plan = plan_segmentation(40, 28.3, 0.2, Rounding::round, 2, 2.0);
    // truth canvas: complex texture
    const RArray re = texture(cv.ny, cv.nx, 21), im = texture(cv.ny, cv.nx, 22);
    std::vector<BlockImage> blocks;
    for (const SubBlock& b : plan.blocks) {
        BlockImage bi = detail::empty_patch(cv, b);
        for (std::size_t r = 0; r < bi.patch.ny(); ++r)
            for (std::size_t c = 0; c < bi.patch.nx(); ++c) {
                const long rr = bi.r0 + static_cast<long>(r), cc = bi.c0 + static_cast<long>(c);
                if (rr < 0 || cc < 0 || rr >= static_cast<long>(cv.ny) || cc >= static_cast<long>(cv.nx)) continue;
                bi.patch.pix(r, c) = {re(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)),
                                      im(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc))};
            }
        blocks.push_back(bi);
    }
    // block 3 is displaced by (+3, -2) pixels and scaled by 2
    BlockImage& s = blocks[3];
    CArray moved(s.patch.ny(), s.patch.nx());
    for (long r = 0; r < static_cast<long>(moved.rows()); ++r)
        for (long c = 0; c < static_cast<long>(moved.cols()); ++c) {
            const long sr = r + 2, sc = c - 3;
            if (sr < 0 || sc < 0 || sr >= static_cast<long>(moved.rows()) || sc >= static_cast<long>(moved.cols())) continue;
            moved(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 2.0 * s.patch.pix(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc));
        }
    s.patch.pix = moved;

    MosaicReport rep;
    const ComplexImage out = assemble(blocks, plan, cv, {}, &rep);
    // block 3 is the anchor, so the other three move to meet it
    EXPECT_EQ(rep.off_x[3] - rep.off_x[0], -3);
    EXPECT_EQ(rep.off_y[3] - rep.off_y[0], 2);
    EXPECT_NEAR(rep.gain[3] / rep.gain[0], 0.5, 0.02);
    EXPECT_EQ(rep.pairs_used, 4u);
    EXPECT_LE(rep.loop_residual, 1e-9);
    double e = 0, n = 0;
    for (std::size_t r = 50; r < cv.ny - 50; ++r)
        for (std::size_t c = 50; c < cv.nx - 50; ++c) {
            const long sr = static_cast<long>(r) - rep.off_y[0], sc = static_cast<long>(c) - rep.off_x[0];
            const cplx want(re(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc)),
                            im(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc)));
            e += std::norm(out.pix(r, c) / rep.gain[0] - want);
            n += std::norm(want);
        }
    EXPECT_LT(10 * std::log10(e / n), -40.0);
}

TEST(Assemble, SingleBlockIsCopiedVerbatim) {
    const CanvasSpec cv = CanvasSpec::square(10, 0.1, 0.1);
    const SegmentationPlan plan = plan_segmentation(10, 28.3, 0.2);
    ASSERT_EQ(plan.N, 1);
    std::vector<BlockImage> blocks{detail::empty_patch(cv, plan.blocks[0])};
    for (std::size_t i = 0; i < blocks[0].patch.pix.size(); ++i) blocks[0].patch.pix.vec()[i] = static_cast<double>(i % 17);
    const ComplexImage out = assemble(blocks, plan, cv);
    for (std::size_t r = 0; r < cv.ny; ++r)
        for (std::size_t c = 0; c < cv.nx; ++c) {
            const long pr = static_cast<long>(r) - blocks[0].r0, pc = static_cast<long>(c) - blocks[0].c0;
            EXPECT_EQ(out.pix(r, c), blocks[0].patch.pix(static_cast<std::size_t>(pr), static_cast<std::size_t>(pc)));
        }
}
