#include "quantdil/dilation.hpp"
#include "quantdil/io.hpp"
#include "quantdil/optimal.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace quantdil;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "quantdil_test_io";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Json, DistributionRoundTrip) {
    const std::vector<Distribution> laws{
        Distribution::uniform01(2),          Distribution::normal({0.5, -1.0}, {2.0, 0.25}),
        Distribution::exponential(3.5),      Distribution::hyper_exponential(1.5, 0.75, 3),
        Distribution::hyper_gamma(2.0, 1.5, -0.5), Distribution::hyper_cauchy(3.25, 2)};
    for (const auto& law : laws) {
        const json j = to_json(law);
        const Distribution back = distribution_from_json(json::parse(j.dump()));
        EXPECT_EQ(to_json(back), j);
        EXPECT_EQ(back.kind(), law.kind());
        EXPECT_EQ(back.dim(), law.dim());
    }
}

TEST(Json, DistributionScalarNormalParams) {
    const auto law = parse_distribution(R"({"kind":"normal","d":2,"params":{"mean":1.0,"stddev":3.0}})");
    EXPECT_EQ(law.mean_vector(), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(law.stddev_vector(), (std::vector<double>{3.0, 3.0}));
}

TEST(Json, ParseDistributionSources) {
    EXPECT_EQ(parse_distribution("hypergamma").kind(), Kind::HyperGamma);
    const fs::path p = scratch("law.json");
    write_text(p.string(), R"({"kind":"exponential","params":{"rate":2.5}})");
    EXPECT_EQ(parse_distribution(p.string()).lambda(), 2.5);
    EXPECT_THROW(parse_distribution("gamma"), Error);
    EXPECT_THROW(parse_distribution("{\"kind\":"), Error);
    EXPECT_THROW(parse_distribution(R"({"kind":"normal","d":2,"params":{"mean":[1,2,3]}})"), Error);
    EXPECT_THROW(parse_distribution(R"({"kind":"exponential","params":{"rate":-1}})"), Error);
}

TEST(Json, GridRoundTripWithNestedProvenance) {
    Provenance p;
    p.method = GridMethod::Newton;
    p.distribution = "normal";
    p.set("r", 2.0).set("iterations", 7.0);
    const Grid base(1, {-1.25, 0.1 + 0.2, 3.0}, p);
    const Grid d = dilate(base, {std::sqrt(4.0 / 3.0), {0.0}});
    const Grid back = grid_from_json(json::parse(to_json(d).dump()));
    EXPECT_EQ(back.coords(), d.coords());
    EXPECT_EQ(to_json(back), to_json(d));
    ASSERT_TRUE(back.provenance().parent);
    EXPECT_EQ(back.provenance().parent->method, GridMethod::Newton);
    EXPECT_EQ(*back.provenance().parent->param("r"), 2.0);
    EXPECT_EQ(back.provenance().mu, std::vector<double>{0.0});
}

TEST(Json, GridAcceptsFlatPointList) {
    const Grid g = grid_from_json(json::parse(R"({"d":1,"points":[0.5, 0.25]})"));
    EXPECT_EQ(g.coords(), (std::vector<double>{0.25, 0.5}));
    EXPECT_THROW(grid_from_json(json::parse(R"({"d":2,"points":[[0.5]]})")), Error);
    EXPECT_THROW(grid_from_json(json::parse(R"({"points":[[0.5]]})")), Error);
}

TEST(Json, SaveLoadDistortionBitForBit) {
    const auto law = Distribution::normal();
    const Grid g = newton_lr(law, 33, 3.0);
    const fs::path p = scratch("grid.json");
    save_grid(g, p.string());
    const Grid back = load_grid(p.string());
    EXPECT_EQ(back.coords(), g.coords());
    EXPECT_EQ(distortion(back, law, 3.0).value, distortion(g, law, 3.0).value);
}

TEST(Json, GreedySequenceExport) {
    const auto seq = build_greedy(Distribution::normal(), 2.0, 3, 5);
    const json j = to_json(seq);
    EXPECT_EQ(j["points"].size(), 3u);
    EXPECT_EQ(j["provenance"]["seed"], 5);
    EXPECT_EQ(j["points"][0][0].get<double>(), seq.points[0]);
}

TEST(Csv, Formats) {
    EXPECT_EQ(fmt(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(fmt(1.0 / 3.0)), 1.0 / 3.0);
    std::ostringstream a;
    DistortionReport rep;
    rep.r = 2.0;
    rep.n = 4;
    rep.value = 0.5;
    rep.seed = 9;
    write_distortion_csv(a, rep);
    EXPECT_EQ(a.str(), "r,n,value,method,stderr,seed\n2,4,0.5,exact1d,0,9\n");
    std::ostringstream b;
    write_weights_csv(b, {0.25, 0.75}, {0.5, 0.5});
    EXPECT_EQ(b.str(), "i,x,weight\n0,0.25,0.5\n1,0.75,0.5\n");
    std::ostringstream c;
    write_regression_csv(c, {{255, 0.98, 0.01}}, 0);
    EXPECT_EQ(c.str(), "n,slope,intercept,seed\n255,0.97999999999999998,0.01,0\n");
}

TEST(Csv, LevelsAndRate) {
    const auto seq = build_greedy(Distribution::normal(), 2.0, 3);
    std::ostringstream a;
    write_levels_csv(a, seq);
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,e_r");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 2), "1,");
    EXPECT_EQ(std::stod(line.substr(2)), seq.distortions[0]);
    RateCurve c;
    c.r = 2.0;
    c.s = 3.0;
    c.theta = 1.5;
    c.points.push_back({8, 0.25, 2.0});
    std::ostringstream b;
    write_rate_csv(b, c, 4);
    EXPECT_EQ(b.str(), "n,e_s,normalized,r,s,theta,seed\n8,0.25,2,2,3,1.5,4\n");
}

TEST(Naming, ExperimentFiles) {
    EXPECT_EQ(experiment_file_name("regress", Distribution::normal(), 2.0, 3.0, 0), "regress_normal_2_3_0.csv");
    EXPECT_EQ(experiment_file_name("rate", Distribution::exponential(1.0), 2.5, 1.0, 17, "json"),
              "rate_exponential_2.5_1_17.json");
}
