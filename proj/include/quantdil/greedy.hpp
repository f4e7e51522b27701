#pragma once

// L^r-optimal greedy quantization sequences: a_{n+1} minimizes
// e_r(a^(n) + {xi}, P) over xi, one point at a time.

#include "quantdil/distributions.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quadrature.hpp"
#include "quantdil/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace quantdil {

struct GreedyOptions {
    int prescan = 33;      ///< mesh points scanned per interval before refinement
    double x_tol = 1e-10;  ///< golden-section tolerance on xi
    int max_iter = 200;
    double tie_rel = 1e-9; ///< gains this close count as ties; the smaller xi wins
    /// Tail mass cut from each end of the support. Far-tail insertions gain
    /// ~1e-12 at n ~ 1000, so a 1e-12 cut would pin the extreme points.
    double tail_mass = 1e-16;
    // d > 1 heuristic
    std::size_t candidates = 256;
    std::size_t mc_samples = 20000;
};

struct GreedySequence {
    Distribution law;
    double r = 2.0;
    std::uint64_t seed = 0;
    std::size_t dim = 1;
    std::vector<double> points;      ///< insertion order, row-major
    std::vector<double> distortions; ///< e_r(a^(n), P) for n = 1..N

    std::size_t size() const { return points.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {points.data() + i * dim, dim}; }
};

namespace detail {

struct GreedySlot {
    double cost = 0.0; ///< current e_r^r contribution of this interval
    double xi = 0.0;   ///< best insertion point inside it
    double gain = 0.0; ///< cost reduction achieved by inserting xi
};

class GreedyLine {
public:
    GreedyLine(const LineMeasure& m, const GreedyOptions& opt) : m_(m), opt_(opt) {}

    GreedySlot left_tail(double x0) const {
        GreedySlot s{m_.left_tail(x0), x0, 0.0};
        if (x0 <= m_.lo()) return s;
        auto f = [&](double xi) { return m_.left_tail(xi) + m_.gap(xi, x0); };
        return refine(s, f, m_.lo(), x0);
    }

    GreedySlot right_tail(double xn) const {
        GreedySlot s{m_.right_tail(xn), xn, 0.0};
        if (xn >= m_.hi()) return s;
        auto f = [&](double xi) { return m_.gap(xn, xi) + m_.right_tail(xi); };
        return refine(s, f, xn, m_.hi());
    }

    GreedySlot gap(double a, double b) const {
        GreedySlot s{m_.gap(a, b), a, 0.0};
        auto f = [&](double xi) { return m_.gap(a, xi) + m_.gap(xi, b); };
        return refine(s, f, a, b);
    }

private:
    template <class F>
    GreedySlot refine(GreedySlot s, F& f, double a, double b) const {
        const MinimizeResult best = scan_then_golden(f, a, b, opt_.prescan, opt_.x_tol, opt_.max_iter);
        s.xi = best.x;
        s.gain = s.cost - best.value;
        return s;
    }

    const LineMeasure& m_;
    const GreedyOptions& opt_;
};

inline GreedySequence build_greedy_1d(const Distribution& law, double r, std::size_t levels, std::uint64_t seed,
                                      const GreedyOptions& opt) {
    LineMeasure measure(law, r, {}, opt.tail_mass);
    const LineMeasure report(law, r); // recorded distortions use the standard support
    GreedyLine line(measure, opt);
    GreedySequence seq{law, r, seed, 1, {}, {}};
    seq.points.reserve(levels);
    seq.distortions.reserve(levels);

    // a_1: an L^r median. Symmetric laws with r >= 1 have it at the center.
    double a1;
    if (law.is_symmetric() && r >= 1.0) {
        a1 = law.center()[0];
    } else {
        auto f = [&](double xi) { return measure.left_tail(xi) + measure.right_tail(xi); };
        a1 = scan_then_golden(f, measure.lo(), measure.hi(), opt.prescan, opt.x_tol, opt.max_iter).x;
    }
    std::vector<double> sorted{a1};
    // slots[k]: k = 0 left tail, k = n right tail, otherwise the gap (sorted[k-1], sorted[k]).
    std::vector<GreedySlot> slots{line.left_tail(a1), line.right_tail(a1)};
    std::vector<double> costs{report.left_tail(a1), report.right_tail(a1)};
    auto record = [&] {
        double total = 0.0;
        for (double c : costs) total += c;
        seq.distortions.push_back(std::pow(total, 1.0 / r));
    };
    seq.points.push_back(a1);
    record();

    while (seq.points.size() < levels) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < slots.size(); ++k)
            if (slots[k].gain > slots[best].gain + opt.tie_rel * std::abs(slots[best].gain)) best = k;
        const GreedySlot chosen = slots[best];
        if (!(chosen.gain > 0.0))
            throw NonConvergenceError("greedy: no improving insertion at level " + std::to_string(sorted.size() + 1),
                                      chosen.gain, static_cast<int>(sorted.size()));
        const double xi = chosen.xi;
        const std::size_t n = sorted.size();
        sorted.insert(sorted.begin() + static_cast<std::ptrdiff_t>(best), xi);
        GreedySlot left = (best == 0) ? line.left_tail(xi) : line.gap(sorted[best - 1], xi);
        GreedySlot right = (best == n) ? line.right_tail(xi) : line.gap(xi, sorted[best + 1]);
        slots[best] = left;
        slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(best) + 1, right);
        costs[best] = (best == 0) ? report.left_tail(xi) : report.gap(sorted[best - 1], xi);
        costs.insert(costs.begin() + static_cast<std::ptrdiff_t>(best) + 1,
                     (best == n) ? report.right_tail(xi) : report.gap(xi, sorted[best + 1]));
        seq.points.push_back(xi);
        record();
    }
    return seq;
}

inline double halton(std::size_t index, unsigned base) {
    double f = 1.0, result = 0.0;
    while (index > 0) {
        f /= base;
        result += f * static_cast<double>(index % base);
        index /= base;
    }
    return result;
}

/// d > 1: heuristic search on a fixed Monte Carlo sample. Candidates come from
/// a Halton cloud over the sample's central box and are polished by coordinate
/// descent. Distortions recorded are Monte Carlo estimates on that sample.
inline GreedySequence build_greedy_nd(const Distribution& law, double r, std::size_t levels, std::uint64_t seed,
                                      const GreedyOptions& opt) {
    law.require_moment(r);
    const std::size_t d = law.dim();
    const PointCloud xs = law.sample(opt.mc_samples, seed);
    const std::size_t ns = xs.size();
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(ns);
        for (std::size_t i = 0; i < ns; ++i) col[i] = xs.coords[i * d + j];
        std::sort(col.begin(), col.end());
        lo[j] = col[ns / 1000];
        hi[j] = col[ns - 1 - ns / 1000];
    }
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    detail::require(d <= std::size(primes), ErrorCode::UnsupportedDimension, "greedy heuristic supports d <= 16");

    std::vector<double> cur(ns, std::numeric_limits<double>::infinity());
    auto dist_r = [&](std::size_t i, const double* xi) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double t = xs.coords[i * d + j] - xi[j];
            s += t * t;
        }
        return pow_r(std::sqrt(s), r);
    };
    // Mean e_r^r after adding xi (lower is better).
    auto objective = [&](const double* xi) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ns; ++i) acc += std::min(cur[i], dist_r(i, xi));
        return acc / static_cast<double>(ns);
    };

    GreedySequence seq{law, r, seed, d, {}, {}};
    std::vector<double> cand(d), best(d), trial(d);
    for (std::size_t level = 0; level < levels; ++level) {
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < opt.candidates; ++c) {
            for (std::size_t j = 0; j < d; ++j) cand[j] = lo[j] + (hi[j] - lo[j]) * halton(c + 1, primes[j]);
            const double v = objective(cand.data());
            if (v < best_val) {
                best_val = v;
                best = cand;
            }
        }
        double step = 0.0;
        for (std::size_t j = 0; j < d; ++j) step = std::max(step, hi[j] - lo[j]);
        step /= 4.0 * std::pow(static_cast<double>(level + 1), 1.0 / static_cast<double>(d));
        const double min_step = 1e-6 * step;
        while (step > min_step) {
            bool improved = false;
            for (std::size_t j = 0; j < d; ++j)
                for (double dir : {-1.0, 1.0}) {
                    trial = best;
                    trial[j] += dir * step;
                    const double v = objective(trial.data());
                    if (v < best_val) {
                        best_val = v;
                        best = trial;
                        improved = true;
                    }
                }
            if (!improved) step *= 0.5;
        }
        for (std::size_t i = 0; i < ns; ++i) cur[i] = std::min(cur[i], dist_r(i, best.data()));
        seq.points.insert(seq.points.end(), best.begin(), best.end());
        seq.distortions.push_back(std::pow(best_val, 1.0 / r));
    }
    return seq;
}

} // namespace detail

/// Greedy sequence of `levels` points. In 1D each step minimizes exactly
/// (per-interval scan + golden section, global best, smallest xi on ties).
inline GreedySequence build_greedy(const Distribution& law, double r, std::size_t levels, std::uint64_t seed = 0,
                                   const GreedyOptions& opt = {}) {
    detail::require(r > 0.0, ErrorCode::InvalidParameter, "greedy: r must be positive");
    detail::require(levels >= 1, ErrorCode::InvalidParameter, "greedy: target level must be >= 1");
    law.require_moment(r);
    if (law.dim() == 1) return detail::build_greedy_1d(law, r, levels, seed, opt);
    return detail::build_greedy_nd(law, r, levels, seed, opt);
}

/// Grid made of the first n insertions.
inline Grid greedy_level_grid(const GreedySequence& seq, std::size_t n) {
    if (n < 1 || n > seq.size())
        throw Error(ErrorCode::OutOfRange,
                    "greedy level " + std::to_string(n) + " outside [1, " + std::to_string(seq.size()) + "]");
    Provenance prov;
    prov.method = GridMethod::Greedy;
    prov.distribution = to_string(seq.law.kind());
    prov.set("r", seq.r).set("seed", static_cast<double>(seq.seed)).set("level", static_cast<double>(n));
    return Grid(seq.dim, std::vector<double>(seq.points.begin(), seq.points.begin() + n * seq.dim), std::move(prov));
}

} // namespace quantdil
