#pragma once

// Rate curves, Zador constants, the Q^Inf lower bound, the empirical-measure
// test and the greedy regression experiment.

#include "quantdil/dilation.hpp"
#include "quantdil/distributions.hpp"
#include "quantdil/greedy.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace quantdil {

/// Sharp 1D Zador constant (1/2)(r+1)^(-1/r), the limit of n e_r for U[0, 1].
inline double zador_constant_1d(double r) {
    detail::require(r > 0.0, ErrorCode::InvalidParameter, "r must be positive");
    return 0.5 * std::pow(r + 1.0, -1.0 / r);
}

/// int f^a over the support (1D).
inline double density_power_integral(const Distribution& law, double a) {
    law.require_1d("density_power_integral");
    auto g = [&](double x) {
        const double lf = law.log_density(x);
        return std::isfinite(lf) ? std::exp(a * lf) : 0.0;
    };
    return detail::integrate_support(law, g, {});
}

/// Zador's limit Q_s(P) = J_{s,1} (int f^{1/(1+s)})^{(1+s)/s} of n e_s for
/// L^s-optimal quantizers (1D).
inline double zador_limit(const Distribution& law, double s) {
    law.require_moment(s);
    return zador_constant_1d(s) * std::pow(density_power_integral(law, 1.0 / (1.0 + s)), (1.0 + s) / s);
}

/// Lower bound of liminf n e_s(alpha_{theta,mu}, P) for L^r-optimal alpha (1D):
///   theta J_{s,1} (int f^{1/(1+r)}) (int f^{-s/(1+r)} dP_{theta,mu})^{1/s}
/// with dP_{theta,mu} = theta f(mu + theta(x - mu)) dx.
inline double q_inf(const Distribution& law, const DilationParams& params, double r, double s) {
    law.require_1d("q_inf");
    detail::require(r > 0.0 && s > 0.0, ErrorCode::InvalidParameter, "r and s must be positive");
    detail::require(params.theta > 0.0 && params.mu.size() == 1, ErrorCode::InvalidParameter,
                    "q_inf: need theta > 0 and a scalar mu");
    const double theta = params.theta, mu = params.mu[0];
    const double a = -s / (1.0 + r);
    // Tail check: the integrand behaves like f^a f_theta.
    double k = 1.0;
    switch (law.kind()) {
    case Kind::Normal: k = a + theta * theta; break;
    case Kind::Exponential: k = a + theta; break;
    case Kind::HyperExponential:
    case Kind::HyperGamma: k = a + std::pow(theta, law.alpha()); break;
    case Kind::HyperCauchy: k = 2.0 * law.cauchy_m() * (1.0 + a) - 1.0; break; // |x|^{-2m(1+a)}
    case Kind::Uniform01: k = 1.0; break;
    }
    if (!(k > 0.0))
        throw Error(ErrorCode::DivergentIntegral, "q_inf: int f^{-s/(1+r)} dP_theta diverges for theta = " +
                                                      std::to_string(theta));
    auto g = [&](double x) {
        const double lf = law.log_density(x);
        if (!std::isfinite(lf)) return 0.0;
        const double lft = law.log_density(mu + theta * (x - mu));
        return std::isfinite(lft) ? theta * std::exp(a * lf + lft) : 0.0;
    };
    const double weighted = detail::integrate_support(law, g, {mu, mu - mu / theta});
    return theta * zador_constant_1d(s) * density_power_integral(law, 1.0 / (1.0 + r)) * std::pow(weighted, 1.0 / s);
}

struct RatePoint {
    std::size_t n = 0;
    double e_s = 0.0;
    double normalized = 0.0; ///< n^{1/d} e_s
};

struct RateCurve {
    std::vector<RatePoint> points;
    std::string distribution;
    double r = 0.0; ///< construction order (0 when unknown)
    double s = 0.0; ///< evaluation order
    double theta = 1.0;
};

/// e_s and n^{1/d} e_s for each grid; grids must have strictly increasing sizes.
inline RateCurve rate_curve(const std::vector<Grid>& grids, const Distribution& law, double s,
                            const MonteCarloOptions& mc = {}) {
    RateCurve out;
    out.distribution = to_string(law.kind());
    out.s = s;
    if (!grids.empty()) {
        if (auto r = grids.front().provenance().param("r")) out.r = *r;
        if (auto t = grids.front().provenance().param("theta")) out.theta = *t;
        if (auto p = grids.front().provenance().parent)
            if (auto r = p->param("r")) out.r = *r;
    }
    std::size_t prev = 0;
    for (const Grid& g : grids) {
        detail::require(g.size() > prev, ErrorCode::InvalidParameter, "rate_curve: grid sizes must increase");
        prev = g.size();
        const double e = distortion(g, law, s, mc).value;
        out.points.push_back({g.size(), e, std::pow(static_cast<double>(g.size()), 1.0 / law.dim()) * e});
    }
    return out;
}

/// Rate curve of every prefix level of a greedy sequence, optionally dilated (1D).
/// Levels are evaluated with one sweep per level over cached interval costs.
inline RateCurve greedy_rate_curve(const GreedySequence& seq, double s, const DilationParams& params,
                                   std::size_t from = 1, std::size_t to = 0) {
    seq.law.require_1d("greedy_rate_curve");
    if (to == 0 || to > seq.size()) to = seq.size();
    detail::require(from >= 1 && from <= to, ErrorCode::OutOfRange, "greedy_rate_curve: bad level range");
    const detail::LineMeasure measure(seq.law, s);
    RateCurve out;
    out.distribution = to_string(seq.law.kind());
    out.r = seq.r;
    out.s = s;
    out.theta = params.theta;
    const double mu = params.mu.at(0);
    auto map = [&](double x) { return params.theta == 1.0 ? x : mu + params.theta * (x - mu); };
    std::vector<double> pts;
    for (std::size_t n = 1; n <= to; ++n) {
        const double x = map(seq.points[n - 1]);
        pts.insert(std::lower_bound(pts.begin(), pts.end(), x), x);
        if (n < from) continue;
        const double e = std::pow(measure.total(pts), 1.0 / s);
        out.points.push_back({n, e, static_cast<double>(n) * e});
    }
    return out;
}

struct EmpiricalMeasureReport {
    std::vector<double> edges;    ///< bins + 1 edges
    std::vector<double> observed; ///< share of grid points per bin
    std::vector<double> target;   ///< normalized f^{1/(1+s)} mass per bin
    double tv = 0.0;              ///< total-variation distance
};

/// Compares the grid's point histogram with the density f^{1/(1+s)} / C
/// (1D). Bins have equal target probability between the 1e-6 and 1 - 1e-6
/// target quantiles; points beyond those go to the outer bins.
inline EmpiricalMeasureReport empirical_measure_test(const Grid& grid, const Distribution& law, double s,
                                                     std::size_t bins = 32) {
    law.require_1d("empirical_measure_test");
    detail::require(grid.dim() == 1, ErrorCode::DimensionMismatch, "empirical_measure_test: grid must be 1D");
    detail::require(bins >= 1 && s > 0.0, ErrorCode::InvalidParameter, "empirical_measure_test: bins >= 1, s > 0");
    const double a = 1.0 / (1.0 + s);
    EmpiricalMeasureReport out;
    out.edges.resize(bins + 1);
    constexpr double clip = 1e-6;
    if (law.kind() == Kind::Normal) {
        // f^a is proportional to the Normal density with sd / sqrt(a).
        const Distribution t = Distribution::normal(law.mean_vector()[0], law.stddev_vector()[0] / std::sqrt(a));
        for (std::size_t k = 0; k <= bins; ++k)
            out.edges[k] = t.quantile(clip + (1.0 - 2.0 * clip) * static_cast<double>(k) / static_cast<double>(bins));
    } else {
        auto g = [&](double x) {
            const double lf = law.log_density(x);
            return std::isfinite(lf) ? std::exp(a * lf) : 0.0;
        };
        const double total = density_power_integral(law, a);
        // Target CDF accumulated from the left end of the support.
        const auto [lo, hi] = law.truncated_support();
        auto cdf = [&](double x) {
            double v = 0.0;
            if (law.kind() == Kind::Uniform01 || law.kind() == Kind::Exponential) {
                v = x <= lo ? 0.0 : integrate_pieces(g, lo, x, law.breakpoints(), {1e-13, 1e-11, 4000});
            } else {
                v = integrate_to_infinity([&](double t) { return g(2.0 * std::min(x, 0.0) - t); }, std::min(x, 0.0))
                        .value;
                if (x > 0.0) v += integrate(g, 0.0, x, {1e-13, 1e-11, 4000}).value;
            }
            return v / total;
        };
        const double span = std::max(1.0, hi - lo);
        for (std::size_t k = 0; k <= bins; ++k) {
            const double u = clip + (1.0 - 2.0 * clip) * static_cast<double>(k) / static_cast<double>(bins);
            out.edges[k] = solve_monotone(cdf, u, lo - span, hi + span, 1e-12);
        }
        if (law.kind() == Kind::Uniform01 || law.kind() == Kind::Exponential)
            out.edges[0] = std::max(out.edges[0], lo);
    }
    out.target.assign(bins, 1.0 / static_cast<double>(bins));
    out.observed.assign(bins, 0.0);
    const auto& c = grid.coords();
    for (double x : c) {
        auto it = std::upper_bound(out.edges.begin() + 1, out.edges.end() - 1, x);
        out.observed[static_cast<std::size_t>(it - (out.edges.begin() + 1))] += 1.0;
    }
    for (double& o : out.observed) o /= static_cast<double>(c.size());
    for (std::size_t k = 0; k < bins; ++k) out.tv += 0.5 * std::abs(out.observed[k] - out.target[k]);
    return out;
}

struct RegressionRow {
    std::size_t n = 0;
    double slope = 0.0;
    double intercept = 0.0;
};

/// OLS fit y = intercept + slope x (x, y of equal length >= 2).
inline RegressionRow ols(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidParameter,
                    "ols: need two equal-length samples of size >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    detail::require(sxx > 0.0, ErrorCode::InvalidParameter, "ols: x has zero variance");
    RegressionRow row;
    row.n = x.size();
    row.slope = sxy / sxx;
    row.intercept = my - row.slope * mx;
    return row;
}

/// Per level n: OLS of the sorted L^s greedy points (response) on the sorted
/// theta*-dilated L^r greedy points (regressor). A slope near 1 means the
/// dilated sequence spreads like the L^s one.
inline std::vector<RegressionRow> regression_experiment(const Distribution& law, double r, double s,
                                                        const std::vector<std::size_t>& levels,
                                                        std::uint64_t seed = 0) {
    law.require_1d("regression_experiment");
    detail::require(!levels.empty(), ErrorCode::InvalidParameter, "regression_experiment: no levels");
    const std::size_t top = *std::max_element(levels.begin(), levels.end());
    const ThetaStar ts = theta_star(law, r, s);
    const GreedySequence seq_r = build_greedy(law, r, top, seed);
    const GreedySequence seq_s = build_greedy(law, s, top, seed);
    const DilationParams params(ts.theta, ts.mu);
    std::vector<RegressionRow> rows;
    for (std::size_t n : levels) {
        const Grid x = dilate(greedy_level_grid(seq_r, n), params);
        const Grid y = greedy_level_grid(seq_s, n);
        RegressionRow row = ols(x.coords(), y.coords());
        row.n = n;
        rows.push_back(row);
    }
    return rows;
}

/// phi_r(u) = (3^{-r} - u^r) u^d on (0, 1/3).
inline double phi_r(double u, double r, std::size_t d = 1) {
    detail::require(u > 0.0 && u < 1.0 / 3.0, ErrorCode::DomainViolation, "phi_r: u must lie in (0, 1/3)");
    detail::require(r > 0.0 && d >= 1, ErrorCode::InvalidParameter, "phi_r: r > 0 and d >= 1");
    return (std::pow(3.0, -r) - std::pow(u, r)) * std::pow(u, static_cast<double>(d));
}

/// Closed-form maximizer (1/3)(d/(d+r))^{1/r}.
inline double phi_r_argmax(double r, std::size_t d = 1) {
    detail::require(r > 0.0 && d >= 1, ErrorCode::InvalidParameter, "phi_r_argmax: r > 0 and d >= 1");
    const double dd = static_cast<double>(d);
    return std::pow(dd / (dd + r), 1.0 / r) / 3.0;
}

/// Numerical maximizer of phi_r: the best point of the interior mesh
/// {k / (3 (points + 1))}, polished by golden section between its neighbours.
inline double phi_r_mesh_argmax(double r, std::size_t d = 1, std::size_t points = 100000) {
    const double h = 1.0 / (3.0 * static_cast<double>(points + 1));
    double best = 0.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k <= points; ++k) {
        const double v = phi_r(static_cast<double>(k) * h, r, d);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    const double a = static_cast<double>(best_k - 1) * h, b = static_cast<double>(best_k + 1) * h;
    auto neg = [&](double u) { return u > 0.0 && u < 1.0 / 3.0 ? -phi_r(u, r, d) : 0.0; };
    return golden_section(neg, a, b, 1e-12).x;
}

} // namespace quantdil
