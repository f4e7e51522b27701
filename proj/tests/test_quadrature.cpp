#include "quantdil/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace quantdil;

TEST(Quadrature, PolynomialIsExact) {
    auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; };
    EXPECT_NEAR(integrate(f, -1.0, 2.0).value, 9.0 - 3.0 + 3.0, 1e-13);
}

TEST(Quadrature, ReversedBoundsFlipSign) {
    auto f = [](double x) { return std::exp(x); };
    EXPECT_NEAR(integrate(f, 1.0, 0.0).value, -(std::exp(1.0) - 1.0), 1e-13);
}

TEST(Quadrature, KinkNeedsBreakpoint) {
    auto f = [](double x) { return std::abs(x - 0.3); };
    EXPECT_NEAR(integrate_pieces(f, 0.0, 1.0, {0.3}), 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Quadrature, GaussianOverHalfLine) {
    auto f = [](double x) { return std::exp(-0.5 * x * x); };
    EXPECT_NEAR(integrate_to_infinity(f, 0.0).value, std::sqrt(std::numbers::pi / 2.0), 1e-11);
}

TEST(Quadrature, NonFiniteBoundsFail) {
    auto f = [](double) { return 1.0; };
    try {
        integrate(f, 0.0, INFINITY);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QuadratureFailure);
    }
}

TEST(Minimize, GoldenSectionFindsParabolaVertex) {
    auto f = [](double x) { return (x - 0.7) * (x - 0.7) + 2.0; };
    const MinimizeResult m = golden_section(f, -3.0, 5.0);
    // A smooth minimum is only resolvable to ~sqrt(machine epsilon) in x.
    EXPECT_NEAR(m.x, 0.7, 1e-7);
    EXPECT_NEAR(m.value, 2.0, 1e-15);
}

TEST(Minimize, ScanFindsGlobalOfBimodal) {
    // Local minimum near -1, global near 2.
    auto f = [](double x) { return std::min((x + 1.0) * (x + 1.0) + 0.5, (x - 2.0) * (x - 2.0)); };
    EXPECT_NEAR(scan_then_golden(f, -4.0, 4.0).x, 2.0, 1e-8);
}

TEST(Minimize, ScanKeepsBoundaryMinimum) {
    auto f = [](double x) { return x; };
    EXPECT_DOUBLE_EQ(scan_then_golden(f, 1.0, 3.0).x, 1.0);
}

TEST(Solve, MonotoneRootWithBracketWidening) {
    auto g = [](double x) { return x * x * x; };
    EXPECT_NEAR(solve_monotone(g, 27.0, 0.0, 1.0), 3.0, 1e-11);
}
