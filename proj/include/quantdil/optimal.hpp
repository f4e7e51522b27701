#pragma once

// Stationary (locally L^r-optimal) n-point quantizers in 1D: Lloyd's fixed
// point for r = 2 and a damped Newton solve of the first-order conditions
//   G_i(x) = int_{cell_i} sign(x_i - u) |x_i - u|^{r-1} f(u) du = 0.

#include "quantdil/distributions.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quadrature.hpp"
#include "quantdil/quantizer.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace quantdil {

struct OptimalOptions {
    std::optional<Grid> init;          ///< starting grid; overrides seed
    std::optional<std::uint64_t> seed; ///< jitter the quantile start inside each slot
    int max_iter = 10000;
    double tol = -1.0;                        ///< < 0 selects the solver default
    std::vector<double>* history = nullptr;   ///< receives e_r^r after every iteration
};

namespace detail {

/// Start grid F^{-1}((2i - 1 + e_i) / (2n)); e_i = 0 without a seed, otherwise
/// uniform in (-1/2, 1/2) so the order is preserved.
inline std::vector<double> quantile_start(const Distribution& law, std::size_t n, const OptimalOptions& opt) {
    if (opt.init) {
        if (opt.init->dim() != 1 || opt.init->size() != n)
            throw Error(ErrorCode::DimensionMismatch, "initial grid must be 1D with n points");
        return opt.init->coords();
    }
    std::vector<double> x(n);
    std::mt19937_64 rng(opt.seed ? block_seed(*opt.seed, 0) : 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = opt.seed ? open_uniform(rng) - 0.5 : 0.0;
        x[i] = law.quantile((2.0 * static_cast<double>(i) + 1.0 + e) / (2.0 * static_cast<double>(n)));
    }
    return x;
}

/// Cell boundaries: lo, midpoints, hi.
inline std::vector<double> cell_edges(const std::vector<double>& x, double lo, double hi) {
    std::vector<double> e(x.size() + 1);
    e.front() = lo;
    e.back() = hi;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) e[i + 1] = 0.5 * (x[i] + x[i + 1]);
    return e;
}

inline bool strictly_increasing(const std::vector<double>& x) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) return false;
    return true;
}

template <class F>
double integrate_law(const Distribution& law, F&& g, double a, double b, const std::vector<double>& extra = {}) {
    std::vector<double> breaks = law.breakpoints();
    breaks.insert(breaks.end(), extra.begin(), extra.end());
    std::sort(breaks.begin(), breaks.end());
    auto integrand = [&](double u) { return g(u) * law.density(u); };
    return integrate_pieces(integrand, a, b, breaks);
}

inline Grid finish(std::vector<double> x, const Distribution& law, GridMethod method, double r, int iterations,
                   double residual) {
    Provenance prov;
    prov.method = method;
    prov.distribution = to_string(law.kind());
    prov.set("r", r).set("iterations", iterations).set("residual", residual);
    return Grid::line(std::move(x), std::move(prov));
}

} // namespace detail

/// Lloyd's algorithm (r = 2). Cells are midpoint intervals on the truncated
/// support; centroids by adaptive quadrature.
inline Grid lloyd(const Distribution& law, std::size_t n, const OptimalOptions& opt = {}) {
    law.require_1d("lloyd");
    law.require_moment(2.0);
    detail::require(n >= 1, ErrorCode::InvalidParameter, "lloyd: n must be >= 1");
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-10;
    const auto [lo, hi] = law.truncated_support();
    std::vector<double> x = detail::quantile_start(law, n, opt);
    detail::LineMeasure measure(law, 2.0);
    if (opt.history) opt.history->assign(1, measure.total(x));
    double move = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const std::vector<double> e = detail::cell_edges(x, lo, hi);
        move = 0.0;
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double mass = detail::integrate_law(law, [](double) { return 1.0; }, e[i], e[i + 1]);
            const double first = detail::integrate_law(law, [](double u) { return u; }, e[i], e[i + 1]);
            next[i] = mass > 0.0 ? first / mass : x[i];
            move = std::max(move, std::abs(next[i] - x[i]));
        }
        x = std::move(next);
        if (opt.history) opt.history->push_back(measure.total(x));
        if (move < tol) return detail::finish(std::move(x), law, GridMethod::Lloyd, 2.0, it, move);
    }
    throw NonConvergenceError("lloyd: max point movement " + std::to_string(move) + " after " +
                                  std::to_string(opt.max_iter) + " iterations",
                              move, opt.max_iter);
}

/// Stationarity residual G(x) of an L^r quantizer, one entry per point. With
/// `scale`, each entry is also divided by int_cell |x_i - u|^{r-1} f, which
/// makes it dimensionless (|G_i| <= 1) whatever the cell width.
inline std::vector<double> stationarity_residual(const Distribution& law, const std::vector<double>& x, double r,
                                                 std::vector<double>* scale = nullptr) {
    const auto [lo, hi] = law.truncated_support();
    const std::vector<double> e = detail::cell_edges(x, lo, hi);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        auto below = [&](double u) { return detail::pow_r(xi - u, r - 1.0); };
        auto above = [&](double u) { return detail::pow_r(u - xi, r - 1.0); };
        const double a = std::max(e[i], lo), b = std::min(e[i + 1], hi);
        const double left = xi > a ? detail::integrate_law(law, below, a, std::min(xi, b)) : 0.0;
        const double right = xi < b ? detail::integrate_law(law, above, std::max(xi, a), b) : 0.0;
        g[i] = left - right;
        if (scale) (*scale)[i] = left + right;
    }
    return g;
}

/// sup_i |G_i| / int_cell |x_i - u|^{r-1} f.
inline double relative_stationarity(const Distribution& law, const std::vector<double>& x, double r) {
    std::vector<double> scale(x.size());
    const std::vector<double> g = stationarity_residual(law, x, r, &scale);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (scale[i] > 0.0) m = std::max(m, std::abs(g[i]) / scale[i]);
    return m;
}

/// Damped Newton on G(x) = 0 (r > 1). The Jacobian is tridiagonal:
///   dG_i/dx_i     = (r-1) int_cell |x_i-u|^{r-2} f - 1/2 (D_{i-1}/2)^{r-1} f(m_{i-1}) - 1/2 (D_i/2)^{r-1} f(m_i)
///   dG_i/dx_{i+1} = -1/2 (D_i/2)^{r-1} f(m_i)
/// with D_i = x_{i+1} - x_i and m_i the midpoint. Steps are halved until the
/// points stay ordered and the distortion does not rise; a generalized Lloyd
/// step stands in when no damping works. Convergence is declared on the
/// cell-normalized residual (see relative_stationarity).
inline Grid newton_lr(const Distribution& law, std::size_t n, double r, const OptimalOptions& opt = {}) {
    law.require_1d("newton_lr");
    detail::require(r > 1.0, ErrorCode::InvalidParameter, "newton_lr needs r > 1 (|.|^r is not smooth for r <= 1)");
    law.require_moment(r);
    detail::require(n >= 1, ErrorCode::InvalidParameter, "newton_lr: n must be >= 1");
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-9;
    const auto [lo, hi] = law.truncated_support();
    std::vector<double> x = detail::quantile_start(law, n, opt);
    detail::LineMeasure measure(law, r);
    if (opt.history) opt.history->assign(1, measure.total(x));

    std::vector<double> scale(n), scale_trial(n);
    auto sup = [&](const std::vector<double>& v, const std::vector<double>& w) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > 0.0) m = std::max(m, std::abs(v[i]) / w[i]);
        return m;
    };
    auto l2 = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double t : v) m += t * t;
        return std::sqrt(m);
    };
    std::vector<double> g = stationarity_residual(law, x, r, &scale);
    double res = sup(g, scale);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (res < tol) return detail::finish(std::move(x), law, GridMethod::Newton, r, it, res);
        const std::vector<double> e = detail::cell_edges(x, lo, hi);
        std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = x[i];
            auto kern = [&](double u) { return detail::pow_r(std::abs(xi - u), r - 2.0); };
            diag[i] = (r - 1.0) * detail::integrate_law(law, kern, e[i], e[i + 1], {xi});
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double half = 0.5 * (x[i + 1] - x[i]);
            const double c = 0.5 * detail::pow_r(half, r - 1.0) * law.density(e[i + 1]);
            off[i] = -c;
            diag[i] -= c;
            diag[i + 1] -= c;
        }
        // Thomas algorithm on the symmetric tridiagonal system J d = -g.
        std::vector<double> cp(n), dp(n);
        double piv = diag[0];
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) piv = diag[i] - off[i - 1] * cp[i - 1];
            if (!(std::abs(piv) > 1e-300) || !std::isfinite(piv))
                throw Error(ErrorCode::SingularJacobian,
                            "newton_lr: zero pivot at row " + std::to_string(i) + ", iteration " + std::to_string(it));
            cp[i] = (i + 1 < n) ? off[i] / piv : 0.0;
            dp[i] = (-g[i] - (i > 0 ? off[i - 1] * dp[i - 1] : 0.0)) / piv;
        }
        std::vector<double> step(n);
        for (std::size_t k = n; k-- > 0;) step[k] = dp[k] - (k + 1 < n ? cp[k] * step[k + 1] : 0.0);

        // A step must not raise the distortion; near the fixed point, where
        // distortion changes drown in rounding, the residual has to drop.
        const double d_cur = measure.total(x);
        std::vector<double> trial(n), g_trial;
        auto search = [&](const std::vector<double>& dir) {
            double lambda = 1.0;
            for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * dir[i];
                if (!detail::strictly_increasing(trial) || trial.front() <= lo || trial.back() >= hi) continue;
                const double d_trial = measure.total(trial);
                if (d_trial > d_cur * (1.0 + 1e-12)) continue;
                g_trial = stationarity_residual(law, trial, r, &scale_trial);
                if (d_trial < d_cur * (1.0 - 1e-12) || l2(g_trial) < l2(g) || sup(g_trial, scale_trial) < res)
                    return true;
            }
            return false;
        };
        bool accepted = search(step);
        if (!accepted) {
            // Generalized Lloyd move -G_i / P(cell_i), a descent direction.
            for (std::size_t i = 0; i < n; ++i) {
                const double mass = law.cdf(e[i + 1]) - law.cdf(e[i]);
                step[i] = mass > 0.0 ? -g[i] / mass : 0.0;
            }
            accepted = search(step);
        }
        if (!accepted)
            throw NonConvergenceError("newton_lr: line search failed, residual " + std::to_string(res), res, it);
        x = trial;
        g = std::move(g_trial);
        scale = scale_trial;
        res = sup(g, scale);
        if (opt.history) opt.history->push_back(measure.total(x));
    }
    if (res < tol) return detail::finish(std::move(x), law, GridMethod::Newton, r, opt.max_iter, res);
    throw NonConvergenceError("newton_lr: residual " + std::to_string(res) + " after " +
                                  std::to_string(opt.max_iter) + " iterations",
                              res, opt.max_iter);
}

} // namespace quantdil
