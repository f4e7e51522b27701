#include "oracles.hpp"
#include "quantdil/dilation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>

using namespace quantdil;

namespace {

template <class F>
std::optional<ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace

TEST(Dilate, Examples) {
    const Grid g = Grid::line({0.0, 1.0});
    EXPECT_EQ(dilate(g, {2.0, {0.0}}).coords(), (std::vector<double>{0.0, 2.0}));
    EXPECT_EQ(dilate(g, {2.0, {1.0}}).coords(), (std::vector<double>{-1.0, 1.0}));
    const Grid odd = Grid::line({-0.3, 0.1 + 0.2, 7.123456789});
    EXPECT_EQ(dilate(odd, {1.0, {0.77}}).coords(), odd.coords());
}

TEST(Dilate, ProvenanceRecordsParent) {
    Provenance p;
    p.method = GridMethod::Newton;
    p.set("r", 2.0);
    const Grid d = dilate(Grid(1, {0.0, 1.0}, p), {1.5, {0.25}});
    EXPECT_EQ(d.provenance().method, GridMethod::Dilated);
    EXPECT_EQ(*d.provenance().param("theta"), 1.5);
    EXPECT_EQ(d.provenance().mu, std::vector<double>{0.25});
    ASSERT_TRUE(d.provenance().parent);
    EXPECT_EQ(d.provenance().parent->method, GridMethod::Newton);
    EXPECT_EQ(d.size(), 2u);
}

TEST(Dilate, Bijection) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5.0, 5.0), t(0.2, 3.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> c(14);
        for (double& v : c) v = u(rng);
        const Grid g(2, c);
        const DilationParams p(t(rng), {u(rng), u(rng)});
        const Grid back = dilate(dilate(g, p), {1.0 / p.theta, p.mu});
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back.coords()[i], g.coords()[i], 1e-14 * (1.0 + std::abs(c[i]) * 10));
    }
}

TEST(Dilate, Errors) {
    EXPECT_THROW(DilationParams(0.0, {0.0}), Error);
    EXPECT_EQ(code_of([] { dilate(Grid::line({1.0}), {2.0, {0.0, 0.0}}); }), ErrorCode::DimensionMismatch);
}

TEST(ThetaStar, Examples) {
    EXPECT_NEAR(theta_star(Distribution::normal(), 2.0, 3.0).theta, std::sqrt(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(theta_star(Distribution::hyper_exponential(1.0, 1.0), 2.0, 3.0).theta, 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(theta_star(Distribution::hyper_exponential(1.0, 2.0), 2.0, 3.0).theta, std::sqrt(4.0 / 3.0), 1e-15);
    for (const auto& law : {Distribution::normal(), Distribution::hyper_gamma(1.0, 2.0, 2.0)})
        EXPECT_EQ(theta_star(law, 2.5, 2.5).theta, 1.0);
    const auto hg = theta_star(Distribution::hyper_gamma(1.0, 2.0, 2.0), 2.0, 3.0);
    ASSERT_TRUE(hg.beta_star);
    EXPECT_NEAR(*hg.beta_star, 3.0 / 4.0, 1e-15);
    EXPECT_EQ(theta_star(Distribution::normal(2.0, 1.0), 2.0, 3.0).mu, std::vector<double>{2.0});
    EXPECT_EQ(code_of([] { theta_star(Distribution::hyper_cauchy(2.0), 2.0, 3.0); }), ErrorCode::NoKnownThetaStar);
    EXPECT_EQ(code_of([] { theta_star(Distribution::uniform01(), 2.0, 3.0); }), ErrorCode::NoKnownThetaStar);
}

TEST(ThetaStar, TwoDimensionalNormal) {
    EXPECT_NEAR(theta_star(Distribution::normal({0.0, 0.0}, {1.0, 1.0}), 2.0, 3.0).theta, std::sqrt(5.0 / 4.0), 1e-15);
}

TEST(Interval, Examples) {
    const auto a = admissible_interval(Distribution::normal(), 2.0, 2.5);
    EXPECT_NEAR(a.lower, std::sqrt(2.5 / 3.0), 1e-15);
    EXPECT_EQ(a.regime, Regime::Intermediate);
    const auto b = admissible_interval(Distribution::hyper_exponential(1.0, 1.0), 2.0, 1.0);
    EXPECT_NEAR(b.lower, 0.5, 1e-15);
    EXPECT_EQ(b.regime, Regime::SBelowR);
    EXPECT_EQ(code_of([] { admissible_interval(Distribution::hyper_cauchy(2.0), 2.0, 2.5); }), ErrorCode::MomentRestriction);
    EXPECT_EQ(code_of([] { admissible_interval(Distribution::normal(), 2.0, 3.5); }), ErrorCode::InvalidRegime);
    EXPECT_EQ(code_of([] { admissible_interval(Distribution::normal(), 2.0, 3.0); }), ErrorCode::InvalidRegime);
}

TEST(Interval, ClosedAtBoundaryForReporting) {
    const auto iv = admissible_interval(Distribution::normal(), 2.0, 3.0, true);
    EXPECT_NEAR(iv.lower, 1.0, 1e-15);
    EXPECT_TRUE(iv.contains(std::sqrt(4.0 / 3.0)));
    EXPECT_FALSE(iv.contains(1.0));
}

TEST(Interval, ThetaStarInside) {
    std::vector<Distribution> laws{Distribution::normal(), Distribution::normal({0.0, 0.0}, {1.0, 1.0})};
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        laws.push_back(Distribution::hyper_exponential(1.0, alpha));
        laws.push_back(Distribution::hyper_gamma(1.0, alpha, 2.0));
        laws.push_back(Distribution::hyper_exponential(1.0, alpha, 2));
    }
    int checked = 0;
    for (const auto& law : laws)
        for (double r : {1.0, 2.0, 3.0, 4.0})
            for (double s : {1.0, 2.0, 3.0, 4.0}) {
                if (!(s < law.dim() + r)) continue;
                EXPECT_TRUE(admissible_interval(law, r, s).contains(theta_star(law, r, s).theta))
                    << to_string(law.kind()) << " d=" << law.dim() << " r=" << r << " s=" << s;
                ++checked;
            }
    EXPECT_GT(checked, 100);
}

TEST(ConditionIntegral, NormalClosedForm) {
    const auto law = Distribution::normal();
    for (auto [r, s, theta] : {std::tuple{2.0, 2.5, 1.1}, std::tuple{2.0, 2.5, 2.0}, std::tuple{3.0, 1.5, 1.0}}) {
        const Regime g = s < r ? Regime::SBelowR : Regime::Intermediate;
        const double p = g == Regime::SBelowR ? -s / (r - s) : -s / (1.0 + r - s);
        const double q = 1.0 - p;
        const auto c = condition_integral(law, {theta, {0.0}}, r, s, g);
        ASSERT_FALSE(c.divergent);
        // Gaussian integral: (2 pi)^{-1/2} int exp(-k x^2 / 2) = k^{-1/2}
        EXPECT_NEAR(c.value, 1.0 / std::sqrt(p + q * theta * theta), 1e-9) << r << " " << s << " " << theta;
    }
}

TEST(ConditionIntegral, NormalShiftedCenterMatchesQuadratureOracle) {
    const auto law = Distribution::normal(0.5, 1.0);
    const double r = 2.0, s = 2.5, theta = 1.3, mu = -0.4;
    const double p = -s / (1.0 + r - s), q = 1.0 - p;
    auto f = [](double x) { return oracle::normal_pdf(x - 0.5); };
    const double ref = oracle::simpson([&](double x) { return std::pow(f(x), p) * std::pow(f(mu + theta * (x - mu)), q); },
                                       -12.0, 12.0, 200000);
    EXPECT_NEAR(condition_integral(law, {theta, {mu}}, r, s, Regime::Intermediate).value, ref, 1e-8);
}

TEST(ConditionIntegral, Divergent) {
    const double r = 2.0, s = 2.5;
    EXPECT_TRUE(condition_integral(Distribution::normal(), {std::sqrt(s / 3.0), {0.0}}, r, s, Regime::Intermediate).divergent);
    EXPECT_TRUE(condition_integral(Distribution::hyper_exponential(1.0, 1.0), {0.5 - 0.01, {0.0}}, 2.0, 1.0, Regime::SBelowR)
                    .divergent);
    EXPECT_FALSE(condition_integral(Distribution::hyper_exponential(1.0, 1.0), {0.5 + 0.01, {0.0}}, 2.0, 1.0, Regime::SBelowR)
                     .divergent);
}

TEST(ConditionIntegral, Errors) {
    EXPECT_EQ(code_of([] { condition_integral(Distribution::normal(), {1.0, {0.0}}, 2.0, 3.0, Regime::SBelowR); }),
              ErrorCode::InvalidRegime);
    EXPECT_EQ(code_of([] {
                  condition_integral(Distribution::normal({0.0, 0.0}, {1.0, 1.0}), {1.0, {0.0}}, 2.0, 1.0, Regime::SBelowR);
              }),
              ErrorCode::UnsupportedDimension);
}

TEST(DilatedWeights, Examples) {
    const auto law = Distribution::normal();
    const Grid g = Grid::line({-1.0, 1.0});
    const auto a = dilated_weights(g, law, {2.0, {0.0}});
    EXPECT_EQ(a.grid.coords(), (std::vector<double>{-2.0, 2.0}));
    EXPECT_NEAR(a.weights[0], 0.5, 1e-15);
    EXPECT_NEAR(a.weights[1], 0.5, 1e-15);
    const Grid e = Grid::line({0.5, 2.0});
    const auto b = dilated_weights(e, Distribution::exponential(1.0), {4.0 / 3.0, {0.0}});
    EXPECT_NEAR(b.weights[0], 1.0 - std::exp(-5.0 / 3.0), 1e-14);
    EXPECT_NEAR(b.weights[1], std::exp(-5.0 / 3.0), 1e-14);
    EXPECT_LT(b.max_discrepancy, 1e-9);
}

TEST(DilatedWeights, ThetaOneEqualsPlainWeights) {
    const auto law = Distribution::hyper_gamma(1.0, 2.0, 2.0);
    const Grid g = Grid::line({-1.7, -0.2, 0.4, 1.1, 2.9});
    const auto w = weights(g, law);
    const auto dw = dilated_weights(g, law, DilationParams::centered(1.0, law));
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(dw.weights[i], w[i]);
}

TEST(DilatedWeights, RoutesAgreeOnCatalog) {
    const Grid g = Grid::line({-2.0, -0.6, 0.2, 0.9, 1.8, 3.5});
    for (const auto& law : {Distribution::normal(0.3, 1.4), Distribution::hyper_exponential(1.0, 1.0),
                            Distribution::hyper_gamma(1.0, 2.0, 2.0), Distribution::hyper_cauchy(2.0),
                            Distribution::exponential(1.0)})
        for (double theta : {0.7, 1.25, 2.0}) {
            const auto dw = dilated_weights(g, law, DilationParams::centered(theta, law));
            EXPECT_LT(dw.max_discrepancy, 1e-9) << to_string(law.kind());
        }
}

TEST(Scaling, IdentityNormalAndExponential) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> th(0.6, 1.6), sd(0.5, 2.0), loc(-1.0, 1.0), sv(1.0, 4.0);
    for (int k = 0; k < 20; ++k) {
        const double theta = th(rng), s = sv(rng), m = loc(rng), sig = sd(rng), mu = loc(rng);
        std::vector<double> x(7);
        for (double& v : x) v = m + sig * loc(rng) * 2.5;
        const Grid g = Grid::line(x);
        {
            const auto law = Distribution::normal(m, sig);
            // X ~ N(m, sig^2) => mu + (X - mu)/theta ~ N(mu + (m - mu)/theta, (sig/theta)^2)
            const auto law_t = Distribution::normal(mu + (m - mu) / theta, sig / theta);
            const double lhs = std::pow(distortion(dilate(g, {theta, {mu}}), law, s).value, s);
            const double rhs = std::pow(theta, s) * std::pow(distortion(g, law_t, s).value, s);
            EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << k;
        }
        {
            const double rate = sd(rng);
            std::vector<double> y(x);
            for (double& v : y) v = std::abs(v);
            const Grid ge = Grid::line(y);
            const double lhs =
                std::pow(distortion(dilate(ge, {theta, {0.0}}), Distribution::exponential(rate), s).value, s);
            const double rhs =
                std::pow(theta, s) * std::pow(distortion(ge, Distribution::exponential(rate * theta), s).value, s);
            EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << k;
        }
    }
}

TEST(Scaling, ScaledLawMatchesHandBuilt) {
    const auto n = Distribution::normal(0.4, 1.5).scaled(1.3, std::vector<double>{0.1});
    ASSERT_TRUE(n);
    EXPECT_NEAR(n->mean_vector()[0], 0.1 + 0.3 / 1.3, 1e-15);
    EXPECT_NEAR(n->stddev_vector()[0], 1.5 / 1.3, 1e-15);
    EXPECT_FALSE(Distribution::exponential(1.0).scaled(1.3, std::vector<double>{0.5}));
}
