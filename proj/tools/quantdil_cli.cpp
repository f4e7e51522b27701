// quantdil: build, dilate and evaluate quantization grids from the command line.

#include "quantdil/quantdil.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace quantdil;

namespace {

/// "255,511,1023", "2^4..2^10" (dyadic) or "8..64" (every integer); items may be mixed.
std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    auto to_n = [&](const std::string& t) -> std::size_t {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(t, &pos);
            if (pos != t.size() || v < 1) throw std::invalid_argument(t);
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, "levels: cannot read '" + t + "'");
        }
    };
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_n(item));
            continue;
        }
        const std::string a = item.substr(0, dots), b = item.substr(dots + 2);
        if (a.rfind("2^", 0) == 0 && b.rfind("2^", 0) == 0) {
            const std::size_t lo = to_n(a.substr(2)), hi = to_n(b.substr(2));
            if (hi > 40) throw Error(ErrorCode::InvalidParameter, "levels: exponent too large");
            for (std::size_t k = lo; k <= hi; ++k) out.push_back(std::size_t{1} << k);
        } else {
            const std::size_t lo = to_n(a), hi = to_n(b);
            for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
        }
    }
    if (out.empty()) throw Error(ErrorCode::InvalidParameter, "levels: empty list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text(path, text);
}

/// Writes the CSV (and a JSON summary) under out_dir, or the CSV to stdout.
void emit_experiment(const std::string& out_dir, const std::string& experiment, const Distribution& law, double r,
                     double s, std::uint64_t seed, const std::string& csv, json summary) {
    summary["experiment"] = experiment;
    summary["distribution"] = to_json(law);
    summary["r"] = r;
    summary["s"] = s;
    summary["seed"] = seed;
    if (out_dir.empty()) {
        std::cout << csv;
        std::cerr << summary.dump() << "\n";
        return;
    }
    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / experiment_file_name(experiment, law, r, s, seed);
    const fs::path json_path = fs::path(out_dir) / experiment_file_name(experiment, law, r, s, seed, "json");
    summary["csv"] = csv_path.string();
    write_text(csv_path.string(), csv);
    write_text(json_path.string(), summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
}

Distribution law_for_grid(const std::string& dist, const Grid& g) {
    if (!dist.empty()) return parse_distribution(dist);
    const Provenance* p = &g.provenance();
    while (p->distribution.empty() && p->parent) p = p->parent.get();
    if (p->distribution.empty())
        throw Error(ErrorCode::InvalidParameter, "--dist is required (grid provenance names no distribution)");
    return preset(p->distribution);
}

/// Construction order recorded in a grid's provenance chain.
std::optional<double> grid_r(const Grid& g) {
    for (const Provenance* p = &g.provenance(); p; p = p->parent.get())
        if (auto r = p->param("r")) return r;
    return std::nullopt;
}

std::vector<double> mu_or_center(const std::vector<double>& mu, const Distribution& law) {
    if (mu.empty()) return law.dilation_center();
    if (mu.size() != law.dim()) throw Error(ErrorCode::DimensionMismatch, "--mu must have d entries");
    return mu;
}

Grid build_grid(const std::string& method, const Distribution& law, double r, std::size_t n,
                std::optional<std::uint64_t> seed) {
    if (method == "greedy") return greedy_level_grid(build_greedy(law, r, n, seed.value_or(0)), n);
    OptimalOptions opt;
    opt.seed = seed;
    Grid g = [&] {
        if (method == "lloyd") {
            if (r != 2.0) throw Error(ErrorCode::InvalidParameter, "lloyd builds L^2 grids only (got --r " + fmt(r) + ")");
            return lloyd(law, n, opt);
        }
        if (method == "newton") {
            if (!(r > 1.0))
                throw Error(ErrorCode::InvalidParameter,
                            "newton needs r > 1: |x|^r is not differentiable enough for r <= 1");
            return newton_lr(law, n, r, opt);
        }
        throw Error(ErrorCode::InvalidParameter, "unknown method '" + method + "' (greedy|lloyd|newton)");
    }();
    if (seed) {
        Provenance p = g.provenance();
        p.set("seed", static_cast<double>(*seed));
        g.set_provenance(std::move(p));
    }
    return g;
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

int run_campaign(const std::string& exe, const std::string& config, bool dry_run) {
    const json j = read_json_file(config);
    if (!j.contains("jobs") || !j["jobs"].is_array())
        throw Error(ErrorCode::InvalidParameter, "campaign: expected {\"jobs\": [...]}");
    int worst = 0;
    for (const auto& job : j["jobs"]) {
        std::string cmd = quote(exe);
        if (job.is_array()) {
            for (const auto& a : job) cmd += " " + quote(a.is_string() ? a.get<std::string>() : a.dump());
        } else {
            cmd += " " + quote(job.at("command").get<std::string>());
            const json args = job.value("args", json::object());
            for (const auto& [k, v] : args.items()) {
                if (v.is_boolean() && !v.get<bool>()) continue;
                cmd += " " + (k.rfind('-', 0) == 0 ? k : "--" + k);
                if (!v.is_boolean()) cmd += " " + quote(v.is_string() ? v.get<std::string>() : v.dump());
            }
        }
        if (dry_run) {
            std::cout << cmd << "\n";
            continue;
        }
        std::cerr << cmd << "\n";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 3;
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantdil: greedy, optimal and dilated quantization grids"};
    app.require_subcommand(1);

    std::string dist, method = "greedy", out, grid_path, f_id = "x4_sin", levels_text, out_dir, levels_csv;
    double r = 2.0, s = 3.0, theta = 1.0, r_eval = 5.0;
    std::size_t n = 16, bins = 32, mc_samples = 100000;
    std::uint64_t seed = 0;
    std::vector<double> mu;
    bool star = false;

    auto* build = app.add_subcommand("build", "build a grid and write it as JSON");
    build->add_option("--method", method, "greedy|lloyd|newton")->capture_default_str();
    build->add_option("--dist", dist, "distribution: JSON, JSON file or preset")->required();
    build->add_option("--r", r, "quantization order")->capture_default_str();
    build->add_option("--n", n, "number of points")->required();
    auto* build_seed = build->add_option("--seed", seed, "seed");
    build->add_option("--out", out, "output grid JSON (default stdout)");
    build->add_option("--levels-csv", levels_csv, "greedy only: write n,e_r per level here");

    auto* dil = app.add_subcommand("dilate", "dilate a grid about mu");
    dil->add_option("--grid", grid_path, "input grid JSON")->required();
    auto* dil_theta = dil->add_option("--theta", theta, "dilation factor");
    auto* dil_star = dil->add_flag("--star", star, "use theta*(dist, r, s)");
    dil_theta->excludes(dil_star);
    dil->add_option("--s", s, "target order for --star");
    auto* dil_r = dil->add_option("--r", r, "construction order (default: from provenance)");
    dil->add_option("--dist", dist, "distribution (default: from provenance)");
    dil->add_option("--mu", mu, "center (default: the law's center)");
    dil->add_option("--out", out, "output grid JSON (default stdout)");

    auto* dst = app.add_subcommand("distortion", "e_s of a grid as a CSV row");
    dst->add_option("--grid", grid_path)->required();
    dst->add_option("--dist", dist);
    dst->add_option("--s", s)->required();
    dst->add_option("--mc-samples", mc_samples, "Monte Carlo samples (d > 1)")->capture_default_str();
    dst->add_option("--seed", seed)->capture_default_str();

    auto* wts = app.add_subcommand("weights", "Voronoi weights as CSV");
    wts->add_option("--grid", grid_path, "grid JSON (ignored with --dilated-from)");
    wts->add_option("--dist", dist);
    std::string parent_path;
    auto* wts_parent = wts->add_option("--dilated-from", parent_path, "parent grid JSON; weights of its dilation");
    wts->add_option("--theta", theta)->needs(wts_parent);
    wts->add_option("--mu", mu);
    wts->add_option("--mc-samples", mc_samples)->capture_default_str();
    wts->add_option("--seed", seed)->capture_default_str();

    auto* rate = app.add_subcommand("rate-curve", "n, e_s, n^(1/d) e_s per level");
    rate->add_option("--method", method, "greedy|lloyd|newton")->capture_default_str();
    rate->add_option("--dist", dist)->required();
    rate->add_option("--r", r)->capture_default_str();
    rate->add_option("--s", s)->capture_default_str();
    rate->add_option("--levels", levels_text, "e.g. 2^4..2^10 or 32..1023 or 255,511")->required();
    auto* rate_theta = rate->add_option("--theta", theta, "dilation factor (default 1)");
    rate->add_flag("--star", star, "dilate by theta*(dist, r, s)")->excludes(rate_theta);
    rate->add_option("--mu", mu);
    rate->add_option("--seed", seed)->capture_default_str();
    rate->add_option("--out-dir", out_dir, "write CSV + JSON summary here");

    auto* emp = app.add_subcommand("empirical", "histogram of grid points vs the f^(1/(1+s)) target");
    emp->add_option("--grid", grid_path)->required();
    emp->add_option("--dist", dist);
    emp->add_option("--s", s)->required();
    emp->add_option("--bins", bins)->capture_default_str();
    emp->add_option("--out-dir", out_dir);

    auto* reg = app.add_subcommand("regress", "OLS slopes of L^s greedy points on theta*-dilated L^r ones");
    reg->add_option("--dist", dist)->required();
    reg->add_option("--r", r)->capture_default_str();
    reg->add_option("--s", s)->capture_default_str();
    reg->add_option("--levels", levels_text)->required();
    reg->add_option("--seed", seed)->capture_default_str();
    reg->add_option("--out-dir", out_dir);

    auto* integ = app.add_subcommand("integrate", "quantization cubature of a registered test function");
    integ->add_option("--grid", grid_path)->required();
    integ->add_option("--dist", dist);
    integ->add_option("--f", f_id, "x4_sin|one|x|x2|cos")->capture_default_str();
    auto* integ_theta = integ->add_option("--theta", theta, "integrate on the dilated grid");
    integ->add_flag("--star", star, "dilate by theta*(dist, 2, --r-eval)")->excludes(integ_theta);
    integ->add_option("--r-eval", r_eval)->capture_default_str();
    integ->add_option("--mu", mu);
    double holder_r = 0.0;
    integ->add_option("--holder-r", holder_r, "also check the local-Lipschitz error bound at this r");

    auto* cmp = app.add_subcommand("compare-integration", "standard vs theta*-dilated cubature per level");
    cmp->add_option("--dist", dist)->required();
    cmp->add_option("--f", f_id)->capture_default_str();
    cmp->add_option("--r-eval", r_eval)->capture_default_str();
    cmp->add_option("--levels", levels_text)->required();
    std::string family = "optimal";
    cmp->add_option("--method", family, "greedy|optimal")->capture_default_str();
    auto* cmp_theta = cmp->add_option("--theta", theta, "force theta instead of theta*");
    cmp->add_option("--seed", seed)->capture_default_str();
    cmp->add_option("--out-dir", out_dir);

    auto* info = app.add_subcommand("info", "theta*, admissible interval and moment restrictions as JSON");
    info->add_option("--dist", dist)->required();
    info->add_option("--r", r)->capture_default_str();
    info->add_option("--s", s)->capture_default_str();

    auto* camp = app.add_subcommand("campaign", "run a JSON campaign of commands, one process each");
    std::string config;
    bool dry_run = false;
    camp->add_option("--config", config, "{\"jobs\": [[\"regress\", \"--dist\", \"normal\", ...], ...]}")->required();
    camp->add_flag("--dry-run", dry_run, "print the command list only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*build) {
            const Distribution law = parse_distribution(dist);
            std::optional<std::uint64_t> sd;
            if (build_seed->count() > 0 || method == "greedy") sd = seed;
            if (method == "greedy" && !levels_csv.empty()) {
                const GreedySequence seq = build_greedy(law, r, n, seed);
                std::ostringstream os;
                write_levels_csv(os, seq);
                write_text(levels_csv, os.str());
                emit(out, to_json(greedy_level_grid(seq, n)).dump(2) + "\n");
            } else {
                emit(out, to_json(build_grid(method, law, r, n, sd)).dump(2) + "\n");
            }
        } else if (*dil) {
            const Grid g = load_grid(grid_path);
            if (star) {
                const Distribution law = law_for_grid(dist, g);
                if (dil_r->count() == 0) {
                    auto gr = grid_r(g);
                    if (!gr) throw Error(ErrorCode::InvalidParameter, "--star needs --r (not in grid provenance)");
                    r = *gr;
                }
                const ThetaStar ts = theta_star(law, r, s);
                emit(out, to_json(dilate(g, DilationParams(ts.theta, mu_or_center(mu, law)))).dump(2) + "\n");
            } else {
                std::vector<double> m = mu;
                if (m.empty()) {
                    if (dist.empty() && g.provenance().distribution.empty()) m.assign(g.dim(), 0.0);
                    else m = law_for_grid(dist, g).dilation_center();
                }
                emit(out, to_json(dilate(g, DilationParams(theta, m))).dump(2) + "\n");
            }
        } else if (*dst) {
            const Grid g = load_grid(grid_path);
            const Distribution law = law_for_grid(dist, g);
            MonteCarloOptions mc{mc_samples, seed};
            write_distortion_csv(std::cout, distortion(g, law, s, mc));
        } else if (*wts) {
            if (!parent_path.empty()) {
                const Grid parent = load_grid(parent_path);
                const Distribution law = law_for_grid(dist, parent);
                const DilatedWeights dw = dilated_weights(parent, law, DilationParams(theta, mu_or_center(mu, law)));
                write_weights_csv(std::cout, dw.grid.coords(), dw.weights);
                std::cerr << json{{"theta", theta}, {"max_discrepancy", dw.max_discrepancy}}.dump() << "\n";
            } else {
                if (grid_path.empty()) throw Error(ErrorCode::InvalidParameter, "weights needs --grid or --dilated-from");
                const Grid g = load_grid(grid_path);
                const Distribution law = law_for_grid(dist, g);
                const auto w = weights(g, law, MonteCarloOptions{mc_samples, seed});
                if (g.dim() == 1) {
                    write_weights_csv(std::cout, g.coords(), w);
                } else {
                    std::cout << "i,weight,seed\n";
                    for (std::size_t i = 0; i < w.size(); ++i) std::cout << i << ',' << fmt(w[i]) << ',' << seed << '\n';
                }
            }
        } else if (*rate) {
            const Distribution law = parse_distribution(dist);
            const std::vector<std::size_t> levels = parse_levels(levels_text);
            if (star) theta = theta_star(law, r, s).theta;
            const DilationParams params(theta, mu_or_center(mu, law));
            RateCurve curve;
            if (method == "greedy" && law.dim() == 1) {
                const GreedySequence seq = build_greedy(law, r, levels.back(), seed);
                const RateCurve all = greedy_rate_curve(seq, s, params, levels.front(), levels.back());
                curve = all;
                curve.points.clear();
                for (const auto& p : all.points)
                    if (std::binary_search(levels.begin(), levels.end(), p.n)) curve.points.push_back(p);
            } else {
                std::vector<Grid> grids;
                std::optional<GreedySequence> seq;
                if (method == "greedy") seq = build_greedy(law, r, levels.back(), seed);
                for (std::size_t lv : levels) {
                    Grid g = seq ? greedy_level_grid(*seq, lv) : build_grid(method, law, r, lv, std::nullopt);
                    grids.push_back(dilate(g, params));
                }
                curve = rate_curve(grids, law, s, MonteCarloOptions{100000, seed});
                curve.r = r;
            }
            std::ostringstream os;
            write_rate_csv(os, curve, seed);
            double mx = 0.0;
            std::vector<double> vals;
            for (const auto& p : curve.points) {
                mx = std::max(mx, p.normalized);
                vals.push_back(p.normalized);
            }
            std::sort(vals.begin(), vals.end());
            const double med = vals.empty() ? 0.0 : vals[vals.size() / 2];
            emit_experiment(out_dir, "rate_curve", law, r, s, seed, os.str(),
                            {{"method", method}, {"theta", theta}, {"max_over_median", med > 0.0 ? mx / med : 0.0}});
        } else if (*emp) {
            const Grid g = load_grid(grid_path);
            const Distribution law = law_for_grid(dist, g);
            const EmpiricalMeasureReport rep = empirical_measure_test(g, law, s, bins);
            std::ostringstream os;
            write_empirical_csv(os, rep);
            const double gr = grid_r(g).value_or(0.0);
            const auto gs = [&]() -> std::uint64_t {
                for (const Provenance* p = &g.provenance(); p; p = p->parent.get())
                    if (auto v = p->param("seed")) return static_cast<std::uint64_t>(*v);
                return 0;
            }();
            emit_experiment(out_dir, "empirical", law, gr, s, gs, os.str(), {{"n", g.size()}, {"bins", bins}, {"tv", rep.tv}});
        } else if (*reg) {
            const Distribution law = parse_distribution(dist);
            const auto rows = regression_experiment(law, r, s, parse_levels(levels_text), seed);
            std::ostringstream os;
            write_regression_csv(os, rows, seed);
            json slopes = json::array();
            for (const auto& row : rows) slopes.push_back({{"n", row.n}, {"slope", row.slope}});
            emit_experiment(out_dir, "regress", law, r, s, seed, os.str(),
                            {{"theta_star", theta_star(law, r, s).theta}, {"slopes", slopes}});
        } else if (*integ) {
            const Grid g = load_grid(grid_path);
            const Distribution law = law_for_grid(dist, g);
            std::optional<DilationParams> params;
            if (star) theta = theta_star(law, 2.0, r_eval).theta;
            if (star || integ_theta->count() > 0) params = DilationParams(theta, mu_or_center(mu, law));
            const CubatureResult res = integrate(g, law, f_id, params);
            const ExactValue exact = exact_expectation(test_function(f_id), law);
            std::cout << "n,f,theta,estimate,exact,exact_source,abs_error";
            if (holder_r > 0.0) std::cout << ",holder_r,bound,valid";
            std::cout << '\n'
                      << res.n << ',' << f_id << ',' << fmt(params ? params->theta : 1.0) << ',' << fmt(res.estimate)
                      << ',' << fmt(exact.value) << ',' << exact.source << ',' << fmt(std::abs(res.estimate - exact.value));
            if (holder_r > 0.0) {
                const Grid used = params ? dilate(g, *params) : g;
                const HolderBound hb = holder_bound_check(used, law, f_id, holder_r);
                std::cout << ',' << fmt(holder_r) << ',' << fmt(hb.bound) << ',' << (hb.valid ? "true" : "false");
            }
            std::cout << '\n';
        } else if (*cmp) {
            const Distribution law = parse_distribution(dist);
            GridFamily fam;
            if (family == "greedy") fam = GridFamily::Greedy;
            else if (family == "optimal") fam = GridFamily::Optimal;
            else throw Error(ErrorCode::InvalidParameter, "--method must be greedy or optimal");
            std::optional<double> forced;
            if (cmp_theta->count() > 0) forced = theta;
            const auto rows = compare_standard_vs_dilated(law, f_id, r_eval, parse_levels(levels_text), fam, seed, forced);
            std::ostringstream os;
            write_compare_csv(os, rows);
            std::size_t wins = 0;
            for (const auto& row : rows) wins += row.err_dil < row.err_std;
            emit_experiment(out_dir, "compare_integration", law, 2.0, r_eval, seed, os.str(),
                            {{"f", f_id},
                             {"method", family},
                             {"dilated_wins", wins},
                             {"levels", rows.size()},
                             {"exact", exact_expectation(test_function(f_id), law).value}});
        } else if (*info) {
            const Distribution law = parse_distribution(dist);
            json j{{"distribution", to_json(law)}, {"r", r}, {"s", s}};
            try {
                const ThetaStar ts = theta_star(law, r, s);
                j["theta_star"] = ts.theta;
                j["mu"] = ts.mu;
                if (ts.beta_star) j["beta_star"] = *ts.beta_star;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoKnownThetaStar) throw;
                j["theta_star"] = nullptr;
                j["theta_star_note"] = e.what();
            }
            try {
                const AdmissibleInterval iv = admissible_interval(law, r, s, true);
                j["interval"] = {{"lower", iv.lower}, {"upper", "inf"}, {"open", true}};
                j["regime"] = to_string(iv.regime);
                if (s == static_cast<double>(law.dim()) + r) j["regime_note"] = "s = d + r: end point of r<=s<d+r";
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoKnownThetaStar && e.code() != ErrorCode::InvalidRegime) throw;
                j["interval"] = nullptr;
                j["regime"] = e.code() == ErrorCode::InvalidRegime ? "s>=d+r" : "unknown";
                j["interval_note"] = e.what();
            }
            json mr{{"r_moment_finite", law.has_moment(r)}, {"s_moment_finite", law.has_moment(s)}};
            if (law.kind() == Kind::HyperCauchy) {
                const double d = static_cast<double>(law.dim()), m = law.cauchy_m();
                mr["moment_order_below"] = 2.0 * m - d;
                mr["s_below"] = (1.0 - d / (2.0 * m)) * (d + r);
            }
            j["moment_restrictions"] = mr;
            std::cout << j.dump(2) << "\n";
        } else if (*camp) {
            return run_campaign(fs::absolute(argv[0]).string(), config, dry_run);
        }
    } catch (const NonConvergenceError& e) {
        std::cerr << json{{"error", e.what()}, {"code", to_string(e.code())}, {"residual", e.residual()},
                          {"iterations", e.iterations()}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << json{{"error", e.what()}, {"code", to_string(e.code())}}.dump() << "\n";
        return is_numerical(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"code", "InvalidParameter"}}.dump() << "\n";
        return 2;
    }
    return 0;
}
