#pragma once

// JSON for distributions, grids and provenance; CSV writers for reports.

#include "quantdil/analysis.hpp"
#include "quantdil/cubature.hpp"
#include "quantdil/distributions.hpp"
#include "quantdil/greedy.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quantizer.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace quantdil {

using json = nlohmann::json;

// ---- distributions -------------------------------------------------------

inline Kind kind_from_string(const std::string& s) {
    for (Kind k : {Kind::Uniform01, Kind::Normal, Kind::Exponential, Kind::HyperExponential, Kind::HyperGamma,
                   Kind::HyperCauchy})
        if (s == to_string(k)) return k;
    throw Error(ErrorCode::InvalidParameter, "unknown distribution kind '" + s + "'");
}

inline json to_json(const Distribution& law) {
    json p = json::object();
    switch (law.kind()) {
    case Kind::Uniform01: break;
    case Kind::Normal:
        p["mean"] = law.mean_vector();
        p["stddev"] = law.stddev_vector();
        break;
    case Kind::Exponential: p["rate"] = law.lambda(); break;
    case Kind::HyperExponential:
        p["lambda"] = law.lambda();
        p["alpha"] = law.alpha();
        break;
    case Kind::HyperGamma:
        p["lambda"] = law.lambda();
        p["alpha"] = law.alpha();
        p["beta"] = law.beta();
        break;
    case Kind::HyperCauchy: p["m"] = law.cauchy_m(); break;
    }
    return {{"kind", to_string(law.kind())}, {"d", law.dim()}, {"params", p}};
}

inline Distribution distribution_from_json(const json& j) {
    try {
        const Kind kind = kind_from_string(j.at("kind").get<std::string>());
        const std::size_t d = j.value("d", std::size_t{1});
        const json p = j.value("params", json::object());
        auto num = [&](const char* key, double fallback) { return p.value(key, fallback); };
        switch (kind) {
        case Kind::Uniform01: return Distribution::uniform01(d);
        case Kind::Normal: {
            std::vector<double> m(d, 0.0), s(d, 1.0);
            auto vec = [&](const char* key, std::vector<double>& out) {
                if (!p.contains(key)) return;
                if (p[key].is_array()) out = p[key].get<std::vector<double>>();
                else out.assign(d, p[key].get<double>());
            };
            vec("mean", m);
            vec("stddev", s);
            if (m.size() != d || s.size() != d)
                throw Error(ErrorCode::DimensionMismatch, "normal: mean/stddev length must equal d");
            return Distribution::normal(std::move(m), std::move(s));
        }
        case Kind::Exponential:
            if (d != 1) throw Error(ErrorCode::UnsupportedDimension, "exponential is one-dimensional");
            return Distribution::exponential(num("rate", 1.0));
        case Kind::HyperExponential: return Distribution::hyper_exponential(num("lambda", 1.0), num("alpha", 1.0), d);
        case Kind::HyperGamma:
            return Distribution::hyper_gamma(num("lambda", 1.0), num("alpha", 2.0), num("beta", 2.0), d);
        case Kind::HyperCauchy: return Distribution::hyper_cauchy(num("m", 2.0), d);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, std::string("distribution JSON: ") + e.what());
    }
    throw Error(ErrorCode::InvalidParameter, "distribution JSON: unreachable kind");
}

/// Named presets used by the CLI.
inline Distribution preset(const std::string& name) {
    if (name == "normal") return Distribution::normal();
    if (name == "uniform01") return Distribution::uniform01();
    if (name == "exponential") return Distribution::exponential(1.0);
    if (name == "hyperexponential") return Distribution::hyper_exponential(1.0, 1.0);
    if (name == "hypergamma") return Distribution::hyper_gamma(1.0, 2.0, 2.0);
    if (name == "hypercauchy") return Distribution::hyper_cauchy(2.0);
    throw Error(ErrorCode::InvalidParameter, "unknown distribution preset '" + name + "'");
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidParameter, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, "'" + path + "': " + e.what());
    }
}

/// Inline JSON object, a path to a JSON file, or a preset name.
inline Distribution parse_distribution(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return distribution_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidParameter, std::string("distribution JSON: ") + e.what());
        }
    }
    if (std::ifstream(text).good()) return distribution_from_json(read_json_file(text));
    return preset(text);
}

// ---- grids ---------------------------------------------------------------

inline GridMethod method_from_string(const std::string& s) {
    for (GridMethod m : {GridMethod::Greedy, GridMethod::Lloyd, GridMethod::Newton, GridMethod::Dilated,
                         GridMethod::Manual})
        if (s == to_string(m)) return m;
    throw Error(ErrorCode::InvalidParameter, "unknown grid method '" + s + "'");
}

inline json to_json(const Provenance& p) {
    json j = {{"method", to_string(p.method)}};
    if (!p.distribution.empty()) j["distribution"] = p.distribution;
    for (const auto& [k, v] : p.params) j[k] = v;
    if (!p.mu.empty()) j["mu"] = p.mu;
    if (p.parent) j["parent"] = to_json(*p.parent);
    return j;
}

inline Provenance provenance_from_json(const json& j) {
    Provenance p;
    for (const auto& [key, value] : j.items()) {
        if (key == "method") p.method = method_from_string(value.get<std::string>());
        else if (key == "distribution") p.distribution = value.get<std::string>();
        else if (key == "mu") p.mu = value.get<std::vector<double>>();
        else if (key == "parent") p.parent = std::make_shared<Provenance>(provenance_from_json(value));
        else if (value.is_number()) p.set(key, value.get<double>());
    }
    return p;
}

inline json to_json(const Grid& g) {
    json pts = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.point(i);
        pts.push_back(std::vector<double>(x.begin(), x.end()));
    }
    return {{"d", g.dim()}, {"points", pts}, {"provenance", to_json(g.provenance())}};
}

inline Grid grid_from_json(const json& j) {
    try {
        const std::size_t d = j.at("d").get<std::size_t>();
        std::vector<double> coords;
        for (const auto& row : j.at("points")) {
            if (row.is_number()) {
                coords.push_back(row.get<double>());
                continue;
            }
            if (row.size() != d) throw Error(ErrorCode::DimensionMismatch, "grid JSON: point of wrong dimension");
            for (const auto& v : row) coords.push_back(v.get<double>());
        }
        Provenance prov = j.contains("provenance") ? provenance_from_json(j["provenance"]) : Provenance{};
        return Grid(d, std::move(coords), std::move(prov));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParameter, std::string("grid JSON: ") + e.what());
    }
}

inline Grid load_grid(const std::string& path) { return grid_from_json(read_json_file(path)); }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write '" + path + "'");
    out << text;
}

inline void save_grid(const Grid& g, const std::string& path) { write_text(path, to_json(g).dump(2) + "\n"); }

inline json to_json(const GreedySequence& seq) {
    json pts = json::array();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        auto x = seq.point(i);
        pts.push_back(std::vector<double>(x.begin(), x.end()));
    }
    return {{"d", seq.dim},
            {"points", pts},
            {"provenance",
             {{"method", "greedy"}, {"distribution", to_string(seq.law.kind())}, {"r", seq.r}, {"seed", seq.seed}}}};
}

// ---- CSV -----------------------------------------------------------------

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_distortion_csv(std::ostream& os, const DistortionReport& rep, bool header = true) {
    if (header) os << "r,n,value,method,stderr,seed\n";
    os << fmt(rep.r) << ',' << rep.n << ',' << fmt(rep.value) << ',' << to_string(rep.method) << ','
       << fmt(rep.mc_std_error) << ',' << rep.seed << '\n';
}

inline void write_levels_csv(std::ostream& os, const GreedySequence& seq) {
    os << "n,e_r\n";
    for (std::size_t i = 0; i < seq.distortions.size(); ++i) os << i + 1 << ',' << fmt(seq.distortions[i]) << '\n';
}

inline void write_weights_csv(std::ostream& os, const std::vector<double>& points, const std::vector<double>& w) {
    os << "i,x,weight\n";
    for (std::size_t i = 0; i < w.size(); ++i) os << i << ',' << fmt(points[i]) << ',' << fmt(w[i]) << '\n';
}

inline void write_rate_csv(std::ostream& os, const RateCurve& c, std::uint64_t seed) {
    os << "n,e_s,normalized,r,s,theta,seed\n";
    for (const auto& p : c.points)
        os << p.n << ',' << fmt(p.e_s) << ',' << fmt(p.normalized) << ',' << fmt(c.r) << ',' << fmt(c.s) << ','
           << fmt(c.theta) << ',' << seed << '\n';
}

inline void write_empirical_csv(std::ostream& os, const EmpiricalMeasureReport& rep) {
    os << "bin,lo,hi,observed,target\n";
    for (std::size_t b = 0; b < rep.observed.size(); ++b)
        os << b << ',' << fmt(rep.edges[b]) << ',' << fmt(rep.edges[b + 1]) << ',' << fmt(rep.observed[b]) << ','
           << fmt(rep.target[b]) << '\n';
}

inline void write_regression_csv(std::ostream& os, const std::vector<RegressionRow>& rows, std::uint64_t seed) {
    os << "n,slope,intercept,seed\n";
    for (const auto& r : rows) os << r.n << ',' << fmt(r.slope) << ',' << fmt(r.intercept) << ',' << seed << '\n';
}

inline void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << "n,estimate_std,err_std,estimate_dil,err_dil,theta_star\n";
    for (const auto& r : rows)
        os << r.n << ',' << fmt(r.estimate_std) << ',' << fmt(r.err_std) << ',' << fmt(r.estimate_dil) << ','
           << fmt(r.err_dil) << ',' << fmt(r.theta_star) << '\n';
}

/// {experiment}_{dist}_{r}_{s}_{seed}.csv
inline std::string experiment_file_name(const std::string& experiment, const Distribution& law, double r, double s,
                                        std::uint64_t seed, const std::string& ext = "csv") {
    auto num = [](double v) {
        std::ostringstream o;
        o << v;
        return o.str();
    };
    return experiment + "_" + to_string(law.kind()) + "_" + num(r) + "_" + num(s) + "_" + std::to_string(seed) + "." +
           ext;
}

} // namespace quantdil
