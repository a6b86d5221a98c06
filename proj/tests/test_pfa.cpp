#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vsar/pfa.hpp"
#include "vsar/wce.hpp"

using namespace vsar;

namespace {

// Peak near (x, y) refined by a 3-point parabola per axis.
Point2 peak_near(const ComplexImage& img, double x, double y, double radius = 0.6) {
    long bc = -1, br = -1;
    double best = -1;
    const long c0 = std::lround(img.col_of(x)), r0 = std::lround(img.row_of(y));
    const long w = std::lround(radius / img.dx);
    for (long r = r0 - w; r <= r0 + w; ++r)
        for (long c = c0 - w; c <= c0 + w; ++c) {
            const double a = std::abs(img.pix(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
            if (a > best) {
                best = a;
                br = r;
                bc = c;
            }
        }
    auto at = [&](long r, long c) { return std::abs(img.pix(static_cast<std::size_t>(r), static_cast<std::size_t>(c))); };
    auto par = [](double a, double b, double c) { return 0.5 * (a - c) / (a - 2 * b + c); };
    return {img.x(static_cast<double>(bc) + par(at(br, bc - 1), best, at(br, bc + 1))),
            img.y(static_cast<double>(br) + par(at(br - 1, bc), best, at(br + 1, bc)))};
}

}  // namespace

TEST(Pfa, PcsPfaImagesTargetsAtTheirDistortedPositions) {
    const auto s = fx::circular_pass(220e9, 0.0, 1025);
    Scene sc;
    sc.targets = {{0, 0, 1, 0}, {10, -7, 1, 0}, {-5, 20, 1, 0}};
    const EchoMatrix e = simulate_dechirped_echo(sc, s.tr, s.prm);
    const ApertureGeometry g = aperture_geometry(s.tr);
    const auto r = pcs_pfa(e, g, s.prm, {0.1, 0.1, 50});
    EXPECT_EQ(r.image.coords, CoordSys::GOCS);
    EXPECT_NEAR(r.image.dx, 0.1, 1e-12);
    const FrameGeometry fg = FrameGeometry::from(g);
    for (const auto& t : sc.targets) {
        const Point2 want = distortion_map(t.x, t.y, fg);
        const Point2 got = peak_near(r.image, want.x, want.y);
        EXPECT_NEAR(got.x, want.x, 0.1) << t.x << "," << t.y;
        EXPECT_NEAR(got.y, want.y, 0.1) << t.x << "," << t.y;
    }
}

TEST(Pfa, GroundFrameIsIndependentOfApertureAzimuth) {
    // same ground target, aperture at 75 deg: the PCS image stays in the ground frame
    const auto s = fx::circular_pass(220e9, 75.0, 4095);
    Scene sc;
    sc.targets = {{4, 3, 1, 0}};
    const EchoMatrix e = simulate_dechirped_echo(sc, s.tr, s.prm);
    const ApertureGeometry g = aperture_geometry(s.tr);
    const auto r = pcs_pfa(e, g, s.prm, {0.1, 0.1, 20});
    const Point2 want = distortion_map(4, 3, FrameGeometry::from(g));
    const Point2 got = peak_near(r.image, want.x, want.y);
    EXPECT_NEAR(got.x, want.x, 0.1);
    EXPECT_NEAR(got.y, want.y, 0.1);
}

TEST(Pfa, LospiImageIsRotatedByTheApertureAzimuth) {
    const auto s = fx::circular_pass(220e9, 30.0, 1025);
    Scene sc;
    sc.targets = {{3, 2, 1, 0}};
    const EchoMatrix e = simulate_dechirped_echo(sc, s.tr, s.prm);
    const ComplexImage img = pfa_lospi(e, aperture_geometry(s.tr), s.prm, {0.1, 0.1, 20, 16});
    EXPECT_EQ(img.coords, CoordSys::LOS);
    const Point2 want = lospi_position({3, 2}, deg2rad(30.0));
    const Point2 got = peak_near(img, want.x, want.y);
    EXPECT_NEAR(got.x, want.x, 0.15);
    EXPECT_NEAR(got.y, want.y, 0.15);
}

TEST(Pfa, RejectsWrongDomain) {
    const auto s = fx::circular_pass(220e9, 0.0, 65);
    EchoMatrix e = empty_echo(s.tr, s.prm);
    e.domain = Domain::range_freq;
    EXPECT_THROW(pcs_pfa(e, aperture_geometry(s.tr), s.prm), DomainError);
    EXPECT_THROW(pfa_lospi(e, aperture_geometry(s.tr), s.prm), DomainError);
}
