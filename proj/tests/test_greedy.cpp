#include "oracles.hpp"
#include "quantdil/greedy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace quantdil;

TEST(Greedy, NormalFirstPointsMatchBruteForce) {
    const auto seq = build_greedy(Distribution::normal(), 2.0, 3);
    EXPECT_NEAR(seq.points[0], 0.0, 1e-12);
    // Symmetric gains: the tie rule keeps the negative candidate.
    const double a2 = oracle::scan_argmin([](double x) { return oracle::normal_distortion2({x, 0.0}); }, -4.0, -0.01, 0.01);
    EXPECT_LT(seq.points[1], 0.0);
    EXPECT_NEAR(seq.points[1], a2, 1e-6);
    EXPECT_NEAR(seq.distortions[0], 1.0, 1e-9);
    EXPECT_NEAR(seq.distortions[1], std::sqrt(oracle::normal_distortion2({seq.points[1], 0.0})), 1e-9);
}

TEST(Greedy, ExponentialStartsAtMean) {
    const auto seq = build_greedy(Distribution::exponential(1.0), 2.0, 1);
    EXPECT_NEAR(seq.points[0], 1.0, 1e-6);
}

TEST(Greedy, RecordedDistortionsMatchEvaluation) {
    const auto law = Distribution::hyper_exponential(1.0, 1.0);
    const auto seq = build_greedy(law, 3.0, 12);
    for (std::size_t n : {1u, 3u, 7u, 12u})
        EXPECT_NEAR(seq.distortions[n - 1], distortion(greedy_level_grid(seq, n), law, 3.0).value, 1e-9) << n;
}

TEST(Greedy, LevelGridErrors) {
    const auto seq = build_greedy(Distribution::normal(), 2.0, 5);
    EXPECT_EQ(greedy_level_grid(seq, 5).size(), 5u);
    for (std::size_t n : {0u, 6u}) {
        try {
            greedy_level_grid(seq, n);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
        }
    }
    EXPECT_THROW(build_greedy(Distribution::normal(), 2.0, 0), Error);
    EXPECT_THROW(build_greedy(Distribution::hyper_cauchy(2.0), 3.5, 4), Error);
}

TEST(Greedy, LevelGridProvenance) {
    const auto seq = build_greedy(Distribution::normal(), 2.0, 4, 9);
    const Grid g = greedy_level_grid(seq, 3);
    EXPECT_EQ(g.provenance().method, GridMethod::Greedy);
    EXPECT_EQ(*g.provenance().param("level"), 3.0);
    EXPECT_EQ(*g.provenance().param("seed"), 9.0);
}

TEST(Greedy, DeterministicAndPrefixStable) {
    const auto law = Distribution::hyper_gamma(1.0, 2.0, 2.0);
    const auto a = build_greedy(law, 2.0, 40), b = build_greedy(law, 2.0, 40), c = build_greedy(law, 2.0, 25);
    EXPECT_EQ(a.points, b.points);
    EXPECT_TRUE(std::equal(c.points.begin(), c.points.end(), a.points.begin()));
}

TEST(Greedy, DistortionStrictlyDecreasing) {
    for (const auto& law : {Distribution::normal(), Distribution::exponential(1.0), Distribution::uniform01()}) {
        const auto seq = build_greedy(law, 2.0, 120);
        for (std::size_t i = 1; i < seq.distortions.size(); ++i)
            EXPECT_LT(seq.distortions[i], seq.distortions[i - 1]) << to_string(law.kind()) << " " << i;
    }
}

TEST(Greedy, ChallengerCertificate) {
    // No uniform challenger over the truncated support beats the chosen
    // insertion at any level.
    const auto law = Distribution::normal();
    const std::size_t top = 255;
    const auto seq = build_greedy(law, 2.0, top);
    const detail::LineMeasure m(law, 2.0, {}, 1e-16);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(m.lo(), m.hi());
    std::vector<double> sorted{seq.points[0]};
    for (std::size_t n = 1; n < top; ++n) {
        const double total = m.total(sorted);
        const double chosen = std::sqrt(total - insertion_gain(m, sorted, seq.points[n]));
        double best = INFINITY;
        for (int k = 0; k < 1000; ++k) best = std::min(best, std::sqrt(total - insertion_gain(m, sorted, u(rng))));
        ASSERT_LE(chosen, best + 1e-8) << "level " << n + 1;
        sorted.insert(std::lower_bound(sorted.begin(), sorted.end(), seq.points[n]), seq.points[n]);
    }
}

TEST(Greedy, RateBounded) {
    for (const auto& law : {Distribution::normal(), Distribution::exponential(1.0)}) {
        const auto seq = build_greedy(law, 2.0, 400);
        double lo = INFINITY, hi = 0.0;
        for (std::size_t n = 50; n <= 400; ++n) {
            const double v = static_cast<double>(n) * seq.distortions[n - 1];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_LT(hi / lo, 1.5) << to_string(law.kind());
    }
}

TEST(Greedy, UniformL1SplitsIntoHalves) {
    const auto seq = build_greedy(Distribution::uniform01(), 1.0, 3);
    EXPECT_NEAR(seq.points[0], 0.5, 1e-8);
    EXPECT_NEAR(std::min(seq.points[1], seq.points[2]), 1.0 / 6.0, 1e-6);
}

TEST(Greedy, TwoDimensionalHeuristicSmoke) {
    GreedyOptions opt;
    opt.mc_samples = 4000;
    opt.candidates = 64;
    const auto law = Distribution::normal({0.0, 0.0}, {1.0, 1.0});
    const auto seq = build_greedy(law, 2.0, 6, 3, opt);
    EXPECT_EQ(seq.size(), 6u);
    EXPECT_EQ(seq.dim, 2u);
    EXPECT_NEAR(seq.point(0)[0], 0.0, 0.1);
    EXPECT_NEAR(seq.point(0)[1], 0.0, 0.1);
    for (std::size_t i = 1; i < seq.distortions.size(); ++i) EXPECT_LE(seq.distortions[i], seq.distortions[i - 1]);
}
