#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vsar/pcs_engine.hpp"

using namespace vsar;

namespace {

double rel_err_db(const CArray& a, const CArray& ref) {
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += std::norm(a.vec()[i] - ref.vec()[i]);
    return fx::db(e / energy(ref));
}

struct Fixture {
    fx::Setup s = fx::circular_pass(220e9, 0.0, 1025);
    EchoMatrix echo;
    PcsPlan plan;
    Fixture() {
        Scene sc;
        sc.targets = {{0, 0, 1, 0}, {10, -7, 1, 0}, {-5, 20, 1, 0}};
        echo = simulate_dechirped_echo(sc, s.tr, s.prm);
        plan = make_scene_plan(aperture_geometry(s.tr), s.prm, 0.1, 0.1, 50);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST(PcsEngine, MappingFactorsAtTheCarrier) {
    const auto s0 = mapping_azimuth_factors(0.0, 220e9, 0.0);
    EXPECT_NEAR(s0.xi, 1.0, 1e-15);
    EXPECT_NEAR(s0.beta, 0.0, 1e-15);
    // squinted: the carrier row is stretched by 1 / cos(theta_k) and pinned at theta_k
    for (double tk : {0.4, deg2rad(75.0)}) {
        const auto s = mapping_azimuth_factors(0.0, 220e9, tk);
        EXPECT_NEAR(s.xi, 1.0 / std::cos(tk), 1e-12);
        EXPECT_NEAR(s.xi * tk + s.beta, tk, 1e-12);
    }
    const auto s = mapping_azimuth_factors(0.5e9, 220e9, 0.0);
    EXPECT_NEAR(s.xi, 220.0 / 220.5, 1e-12);
}

TEST(PcsEngine, PlanGridHasTheRequestedPixelSpacing) {
    const auto& f = fixture();
    EXPECT_NEAR(f.plan.grid.dx(), 0.1, 1e-12);
    EXPECT_NEAR(f.plan.grid.dy(), 0.1, 1e-12);
    EXPECT_EQ(f.plan.pulses(), f.echo.pulses());
    EXPECT_GE(static_cast<double>(f.plan.grid.nx) * 0.1, 100.0);
}

TEST(PcsEngine, RangeScalingRoundTrip) {
    const auto& f = fixture();
    const EchoMatrix rs = rpcs(f.echo, f.plan);
    EXPECT_EQ(rs.domain, Domain::range_scaled);
    EXPECT_NEAR(energy(rs.data), energy(f.echo.data), 1e-3 * energy(f.echo.data));
    EXPECT_LT(rel_err_db(irpcs(rs, f.plan).data, f.echo.data), -100.0);
}

TEST(PcsEngine, FullForwardInverseRoundTrip) {
    const auto& f = fixture();
    const EchoMatrix rs = rpcs(f.echo, f.plan);
    const EchoMatrix wr = apcs(rs, f.plan);
    EXPECT_EQ(wr.domain, Domain::wavenumber_rect);
    EXPECT_LT(rel_err_db(iapcs(wr, f.plan).data, rs.data), -50.0);
    EXPECT_LT(rel_err_db(inverse_pcs(wr, f.plan).data, f.echo.data), -50.0);
}

TEST(PcsEngine, DomainTagsAreEnforced) {
    const auto& f = fixture();
    EXPECT_THROW(apcs(f.echo, f.plan), DomainError);
    EchoMatrix wrong = f.echo;
    wrong.domain = Domain::wavenumber_rect;
    EXPECT_THROW(rpcs(wrong, f.plan), DomainError);
}
