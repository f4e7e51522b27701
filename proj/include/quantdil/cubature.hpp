#pragma once

// Quantization cubature E f(X) ~ sum_i p_i f(x_i) on standard and dilated
// grids, the Hoelder-type error bound and the standard-vs-dilated comparison.

#include "quantdil/dilation.hpp"
#include "quantdil/distributions.hpp"
#include "quantdil/greedy.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/optimal.hpp"
#include "quantdil/quantizer.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace quantdil {

struct ExactValue {
    double value = 0.0;
    std::string source; ///< "closed_form" or "quadrature"
};

/// Scalar test function with local-Lipschitz data
///   |f(x) - f(y)| <= C |x - y| (1 + |x|^{beta-1} + |y|^{beta-1}).
struct TestFunction {
    std::string id;
    std::function<double(double)> f;
    double C = 1.0;
    double beta = 3.0;
    /// Closed-form E f(X) where available.
    std::function<std::optional<double>(const Distribution&)> closed_form;
};

namespace detail {

inline std::optional<double> normal_moments(const Distribution& law, int which) {
    if (law.kind() != Kind::Normal || law.dim() != 1) return std::nullopt;
    const double m = law.mean_vector()[0], s = law.stddev_vector()[0], v = s * s;
    switch (which) {
    case 1: return m;
    case 2: return m * m + v;
    case 4: return m * m * m * m + 6.0 * m * m * v + 3.0 * v * v;
    default: return std::nullopt;
    }
}

} // namespace detail

inline const std::vector<TestFunction>& test_functions() {
    static const std::vector<TestFunction> registry = {
        {"x4_sin", [](double x) { return x * x * x * x + std::sin(x); }, 2.0, 5.0,
         [](const Distribution& law) -> std::optional<double> {
             auto m4 = detail::normal_moments(law, 4);
             if (!m4) return std::nullopt;
             const double m = law.mean_vector()[0], s = law.stddev_vector()[0];
             return *m4 + std::sin(m) * std::exp(-0.5 * s * s);
         }},
        {"one", [](double) { return 1.0; }, 0.0, 3.0,
         [](const Distribution&) -> std::optional<double> { return 1.0; }},
        {"x", [](double x) { return x; }, 1.0, 3.0,
         [](const Distribution& law) -> std::optional<double> {
             if (law.dim() != 1) return std::nullopt;
             return law.mean()[0];
         }},
        {"x2", [](double x) { return x * x; }, 1.0, 3.0,
         [](const Distribution& law) -> std::optional<double> { return detail::normal_moments(law, 2); }},
        {"cos", [](double x) { return std::cos(x); }, 1.0, 3.0,
         [](const Distribution& law) -> std::optional<double> {
             if (law.kind() != Kind::Normal || law.dim() != 1) return std::nullopt;
             const double m = law.mean_vector()[0], s = law.stddev_vector()[0];
             return std::cos(m) * std::exp(-0.5 * s * s);
         }},
    };
    return registry;
}

inline const TestFunction& test_function(const std::string& id) {
    for (const auto& t : test_functions())
        if (t.id == id) return t;
    throw Error(ErrorCode::InvalidParameter, "unknown test function '" + id + "'");
}

/// E f(X): closed form where registered, else adaptive quadrature (1D).
inline ExactValue exact_expectation(const TestFunction& tf, const Distribution& law) {
    if (auto v = tf.closed_form(law)) return {*v, "closed_form"};
    law.require_1d("exact_expectation");
    auto g = [&](double x) {
        const double fx = law.density(x);
        return fx == 0.0 ? 0.0 : tf.f(x) * fx;
    };
    return {detail::integrate_support(law, g, {}), "quadrature"};
}

struct CubatureResult {
    double estimate = 0.0;
    std::size_t n = 0;
    std::vector<double> points;
    std::vector<double> weights;
    Provenance provenance;
    std::optional<double> target;
    std::optional<double> abs_error;
};

/// sum_i p_i f(x_i) on the grid, or on its dilation when params are given
/// (weights from dilated_weights).
inline CubatureResult integrate(const Grid& grid, const Distribution& law, const std::string& f_id,
                                const std::optional<DilationParams>& params = std::nullopt) {
    const TestFunction& tf = test_function(f_id);
    law.require_1d("integrate");
    CubatureResult out;
    if (params) {
        DilatedWeights dw = dilated_weights(grid, law, *params);
        out.points = dw.grid.coords();
        out.weights = std::move(dw.weights);
        out.provenance = dw.grid.provenance();
    } else {
        out.points = grid.coords();
        out.weights = weights(grid, law);
        out.provenance = grid.provenance();
    }
    out.n = out.points.size();
    for (std::size_t i = 0; i < out.n; ++i) out.estimate += out.weights[i] * tf.f(out.points[i]);
    if (auto v = tf.closed_form(law)) {
        out.target = *v;
        out.abs_error = std::abs(out.estimate - *v);
    }
    return out;
}

struct HolderBound {
    double bound = 0.0;
    double actual_error = 0.0;
    bool valid = false;
};

/// |E f(X) - E f(X^)| <= C e_r (1 + ||X||^{beta-1}_{(beta-1)r'} + ||X^||^{beta-1}_{(beta-1)r'}),
/// r' = r/(r-1). Needs r >= beta.
inline HolderBound holder_bound_check(const Grid& grid, const Distribution& law, const std::string& f_id, double r) {
    const TestFunction& tf = test_function(f_id);
    law.require_1d("holder_bound_check");
    if (r < tf.beta)
        throw Error(ErrorCode::RegimeViolation, "holder bound for '" + tf.id + "' needs r >= beta = " +
                                                    std::to_string(tf.beta) + ", got r = " + std::to_string(r));
    const double rp = r / (r - 1.0);
    const double p = (tf.beta - 1.0) * rp;
    law.require_moment(p);
    auto moment = [&](double x) {
        const double fx = law.density(x);
        return fx == 0.0 ? 0.0 : std::pow(std::abs(x), p) * fx;
    };
    const double norm_x = std::pow(detail::integrate_support(law, moment, {}), (tf.beta - 1.0) / p);
    const std::vector<double> w = weights(grid, law);
    const auto& c = grid.coords();
    double mq = 0.0, est = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        mq += w[i] * std::pow(std::abs(c[i]), p);
        est += w[i] * tf.f(c[i]);
    }
    const double norm_q = std::pow(mq, (tf.beta - 1.0) / p);
    const double e_r = distortion(grid, law, r).value;
    HolderBound out;
    out.bound = tf.C * e_r * (1.0 + norm_x + norm_q);
    out.actual_error = std::abs(exact_expectation(tf, law).value - est);
    out.valid = out.actual_error <= out.bound;
    return out;
}

enum class GridFamily { Greedy, Optimal };

struct CompareRow {
    std::size_t n = 0;
    double estimate_std = 0.0, err_std = 0.0;
    double estimate_dil = 0.0, err_dil = 0.0;
    double theta_star = 1.0;
};

/// Builds L^2 grids per level and compares the plain cubature with the one on
/// the theta*-dilated grid (theta* = theta_star(law, 2, r_eval) unless forced).
/// Optimal grids come from newton_lr at r = 2.
inline std::vector<CompareRow> compare_standard_vs_dilated(const Distribution& law, const std::string& f_id,
                                                           double r_eval, const std::vector<std::size_t>& levels,
                                                           GridFamily family, std::uint64_t seed = 0,
                                                           std::optional<double> theta_override = std::nullopt) {
    law.require_1d("compare_standard_vs_dilated");
    detail::require(!levels.empty(), ErrorCode::InvalidParameter, "compare_standard_vs_dilated: no levels");
    const TestFunction& tf = test_function(f_id);
    const double exact = exact_expectation(tf, law).value;
    DilationParams params = DilationParams::centered(1.0, law);
    params.theta = theta_override ? *theta_override : theta_star(law, 2.0, r_eval).theta;
    std::optional<GreedySequence> seq;
    if (family == GridFamily::Greedy)
        seq = build_greedy(law, 2.0, *std::max_element(levels.begin(), levels.end()), seed);
    std::vector<CompareRow> rows;
    for (std::size_t n : levels) {
        const Grid g = family == GridFamily::Greedy ? greedy_level_grid(*seq, n) : newton_lr(law, n, 2.0);
        CompareRow row;
        row.n = n;
        row.theta_star = params.theta;
        row.estimate_std = integrate(g, law, f_id).estimate;
        row.estimate_dil = integrate(g, law, f_id, params).estimate;
        row.err_std = std::abs(row.estimate_std - exact);
        row.err_dil = std::abs(row.estimate_dil - exact);
        rows.push_back(row);
    }
    return rows;
}

} // namespace quantdil
