#pragma once

// Nearest-neighbour projection, L^r distortion, Voronoi weights and the
// one-point insertion gain. In 1D everything is exact (cell boundaries are
// midpoints, integrals by adaptive quadrature); for d > 1 Monte Carlo is used.

#include "quantdil/distributions.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace quantdil {

enum class DistortionMethod { Exact1D, MonteCarlo };

inline const char* to_string(DistortionMethod m) { return m == DistortionMethod::Exact1D ? "exact1d" : "monte_carlo"; }

struct DistortionReport {
    double r = 2.0;
    std::size_t n = 0;
    double value = 0.0; ///< e_r(grid, P)
    DistortionMethod method = DistortionMethod::Exact1D;
    double mc_std_error = 0.0;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
};

struct MonteCarloOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
};

struct Nearest {
    std::size_t index;
    double distance;
};

/// Closest grid point; ties go to the lowest index.
inline Nearest nearest(const Grid& grid, std::span<const double> x) {
    if (x.size() != grid.dim()) throw Error(ErrorCode::DimensionMismatch, "nearest: dimension mismatch");
    const std::size_t n = grid.size();
    if (grid.dim() == 1) {
        const auto& c = grid.coords();
        const double v = x[0];
        // First point >= v; the answer is it or its left neighbour.
        auto it = std::lower_bound(c.begin(), c.end(), v);
        if (it == c.begin()) return {0, c.front() - v};
        if (it == c.end()) return {n - 1, v - c.back()};
        const std::size_t j = static_cast<std::size_t>(it - c.begin());
        const double dl = v - c[j - 1], dr = c[j] - v;
        if (dl <= dr) return {j - 1, dl};
        return {j, dr};
    }
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        auto p = grid.point(i);
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - p[k]) * (x[k] - p[k]);
        if (s < best_sq) {
            best_sq = s;
            best = i;
        }
    }
    return {best, std::sqrt(best_sq)};
}

inline Nearest nearest(const Grid& grid, double x) { return nearest(grid, std::span<const double>(&x, 1)); }

namespace detail {

inline double pow_r(double d, double r) {
    if (r == 2.0) return d * d;
    if (r == 3.0) return d * d * d;
    if (r == 1.0) return d;
    return std::pow(d, r);
}

/// Integrals of |u - c|^r f(u) on the (truncated) real line. Every exact 1D
/// computation in the library goes through here, so the greedy builder and
/// the distortion routine decompose the same integrals the same way.
class LineMeasure {
public:
    LineMeasure(const Distribution& law, double r, QuadratureOptions opt = {}, double tail = kTailMass)
        : law_(law), r_(r), breaks_(law.breakpoints()), opt_(opt) {
        law.require_1d("exact 1D distortion");
        detail::require(r > 0.0, ErrorCode::InvalidParameter, "distortion order r must be positive");
        law.require_moment(r);
        std::tie(lo_, hi_) = law.truncated_support(tail);
    }

    double r() const { return r_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Distribution& law() const { return law_; }

    /// int_a^b |u - c|^r f(u) du, clipped to the truncated support.
    double mass(double c, double a, double b) const {
        a = std::max(a, lo_);
        b = std::min(b, hi_);
        if (!(a < b)) return 0.0;
        auto integrand = [&](double u) { return pow_r(std::abs(u - c), r_) * law_.density(u); };
        double sum = 0.0;
        double left = a;
        auto piece = [&](double right) {
            if (right > left) sum += integrate(integrand, left, right, opt_).value;
            left = right;
        };
        // The split at c comes first in sort order among the breakpoints.
        std::vector<double> cuts;
        cuts.reserve(breaks_.size() + 1);
        if (c > a && c < b) cuts.push_back(c);
        for (double z : breaks_)
            if (z > a && z < b && z != c) cuts.push_back(z);
        std::sort(cuts.begin(), cuts.end());
        for (double z : cuts) piece(z);
        piece(b);
        return sum;
    }

    /// Cost of the stretch between two consecutive grid points a < b.
    double gap(double a, double b) const {
        const double m = 0.5 * (a + b);
        return mass(a, a, m) + mass(b, m, b);
    }

    double left_tail(double x) const { return mass(x, lo_, x); }
    double right_tail(double x) const { return mass(x, x, hi_); }

    /// e_r^r of a sorted 1D point set.
    double total(const std::vector<double>& pts) const {
        double sum = left_tail(pts.front());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += gap(pts[i], pts[i + 1]);
        return sum + right_tail(pts.back());
    }

private:
    const Distribution& law_;
    double r_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> breaks_;
    QuadratureOptions opt_;
};

} // namespace detail

/// Exact e_r(grid, P)^r for d = 1.
inline double distortion_power_1d(const Grid& grid, const Distribution& law, double r) {
    if (grid.dim() != law.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and distribution dimensions differ");
    detail::LineMeasure measure(law, r);
    return measure.total(grid.coords());
}

/// Monte Carlo estimate of e_r; usable in any dimension.
inline DistortionReport distortion_monte_carlo(const Grid& grid, const Distribution& law, double r,
                                               const MonteCarloOptions& mc = {}) {
    if (grid.dim() != law.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and distribution dimensions differ");
    detail::require(r > 0.0, ErrorCode::InvalidParameter, "distortion order r must be positive");
    detail::require(mc.samples >= 2, ErrorCode::InvalidParameter, "Monte Carlo needs at least two samples");
    law.require_moment(r);
    const PointCloud xs = law.sample(mc.samples, mc.seed);
    // Blockwise partial sums reduced in block order.
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t begin = 0; begin < xs.size(); begin += detail::kBlockSize) {
        const std::size_t end = std::min(xs.size(), begin + detail::kBlockSize);
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = detail::pow_r(nearest(grid, xs.point(i)).distance, r);
            s += v;
            s2 += v * v;
        }
        sum += s;
        sum_sq += s2;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    const double se_power = std::sqrt(var / n);
    DistortionReport rep;
    rep.r = r;
    rep.n = grid.size();
    rep.value = std::pow(mean, 1.0 / r);
    rep.method = DistortionMethod::MonteCarlo;
    // Delta method: d(m^(1/r)) = (1/r) m^(1/r - 1) dm.
    rep.mc_std_error = mean > 0.0 ? se_power * std::pow(mean, 1.0 / r - 1.0) / r : 0.0;
    rep.sample_count = xs.size();
    rep.seed = mc.seed;
    return rep;
}

/// e_r(grid, P): exact quadrature in 1D, Monte Carlo otherwise.
inline DistortionReport distortion(const Grid& grid, const Distribution& law, double r,
                                   const MonteCarloOptions& mc = {}) {
    if (grid.dim() != law.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and distribution dimensions differ");
    if (grid.dim() != 1) return distortion_monte_carlo(grid, law, r, mc);
    DistortionReport rep;
    rep.r = r;
    rep.n = grid.size();
    rep.value = std::pow(distortion_power_1d(grid, law, r), 1.0 / r);
    rep.method = DistortionMethod::Exact1D;
    return rep;
}

/// Voronoi cell probabilities. 1D: CDF differences at the midpoints
/// (a point on a boundary belongs to the lower-index cell, as in nearest()).
/// d > 1: Monte Carlo frequencies, renormalized.
inline std::vector<double> weights(const Grid& grid, const Distribution& law, const MonteCarloOptions& mc = {}) {
    if (grid.dim() != law.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and distribution dimensions differ");
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    if (grid.dim() == 1) {
        const auto& c = grid.coords();
        const double median = law.quantile(0.5);
        double prev = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double m = 0.5 * (c[i] + c[i + 1]);
            // Upper half of the line uses the survival function for tail accuracy.
            const double cum = m <= median ? law.cdf(m) : 1.0 - law.survival(m);
            w[i] = std::max(0.0, cum - prev);
            prev = cum;
        }
        w[n - 1] = std::max(0.0, 1.0 - prev);
        return w;
    }
    const PointCloud xs = law.sample(mc.samples, mc.seed);
    for (std::size_t i = 0; i < xs.size(); ++i) w[nearest(grid, xs.point(i)).index] += 1.0;
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    return w;
}

/// e_r(grid)^r - e_r(grid + {y})^r for d = 1, computed locally: only the gap
/// (or tail) that receives y changes.
inline double insertion_gain(const detail::LineMeasure& measure, const std::vector<double>& sorted_pts, double y) {
    auto it = std::lower_bound(sorted_pts.begin(), sorted_pts.end(), y);
    if (it != sorted_pts.end() && *it == y) return 0.0;
    if (it == sorted_pts.begin()) {
        const double x = sorted_pts.front();
        return measure.left_tail(x) - measure.left_tail(y) - measure.gap(y, x);
    }
    if (it == sorted_pts.end()) {
        const double x = sorted_pts.back();
        return measure.right_tail(x) - measure.right_tail(y) - measure.gap(x, y);
    }
    const double b = *it, a = *(it - 1);
    return measure.gap(a, b) - measure.gap(a, y) - measure.gap(y, b);
}

inline double insertion_gain(const Grid& grid, const Distribution& law, double r, double y) {
    detail::LineMeasure measure(law, r);
    return insertion_gain(measure, grid.coords(), y);
}

struct MicroMacroResult {
    double lhs = 0.0;          ///< gain of inserting the given y
    double lhs_averaged = 0.0; ///< gain averaged over y ~ nu (= P)
    double rhs = 0.0;
    bool holds = false;          ///< lhs >= rhs - tolerance
    bool holds_averaged = false; ///< lhs_averaged >= rhs - tolerance
};

/// Micro-macro inequality with auxiliary law nu = P, d = 1. The right side is
///   ((1-c)^r - c^r) / (1+c)^r * int P(B(x, c/(1+c) d(x,G))) d(x,G)^r dP(x).
/// The bound is guaranteed for the nu-average of the gain (and therefore for
/// the best insertion point); `holds` reports the comparison for the given y.
inline MicroMacroResult micro_macro_check(const Grid& grid, const Distribution& law, double y, double r, double c,
                                          double tolerance = 1e-10) {
    detail::require(c > 0.0 && c < 0.5, ErrorCode::DomainViolation, "micro_macro_check: c must lie in (0, 1/2)");
    if (grid.dim() != 1 || law.dim() != 1)
        throw Error(ErrorCode::UnsupportedDimension, "micro_macro_check is implemented for d = 1");
    detail::LineMeasure measure(law, r);
    const auto& pts = grid.coords();
    MicroMacroResult res;
    res.lhs = insertion_gain(measure, pts, y);

    const double lo = measure.lo(), hi = measure.hi();
    // Pieces on which d(x, G) is smooth: split at grid points and midpoints.
    std::vector<double> cuts{lo};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) cuts.push_back(0.5 * (pts[i - 1] + pts[i]));
        cuts.push_back(pts[i]);
    }
    for (double z : law.breakpoints()) cuts.push_back(z);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double z) { return z < lo || z > hi; }), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double k = (std::pow(1.0 - c, r) - std::pow(c, r)) / std::pow(1.0 + c, r);
    const double shrink = c / (1.0 + c);
    auto rhs_integrand = [&](double x) {
        const double dist = nearest(grid, x).distance;
        const double rho = shrink * dist;
        const double ball = law.cdf(x + rho) - law.cdf(x - rho);
        return ball * detail::pow_r(dist, r) * law.density(x);
    };
    auto gain_integrand = [&](double x) { return insertion_gain(measure, pts, x) * law.density(x); };
    const QuadratureOptions loose{1e-12, 1e-10, 2000};
    double rhs = 0.0, avg = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        rhs += integrate(rhs_integrand, cuts[i], cuts[i + 1], loose).value;
        avg += integrate(gain_integrand, cuts[i], cuts[i + 1], loose).value;
    }
    res.rhs = k * rhs;
    res.lhs_averaged = avg;
    res.holds = res.lhs >= res.rhs - tolerance;
    res.holds_averaged = res.lhs_averaged >= res.rhs - tolerance;
    return res;
}

} // namespace quantdil
