#pragma once

// Adaptive Gauss-Kronrod (7/15) integration with an absolute tolerance, plus
// the scalar minimizers used by the quantizer builders.

#include "quantdil/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace quantdil {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 80-digit values from QUADPACK (Fullerton, 1981).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double gauss = fc * kGaussWeights[3];
    double kronrod = fc * kKronrodWeights[7];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double result = kronrod * half;
    abs_sum *= std::abs(half);
    asc *= std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * abs_sum, err);
    return {a, b, result, err};
}

} // namespace detail

/// Globally adaptive G7K15 on a finite interval. Stops once the summed error
/// estimate is below max(abs_tol, rel_tol * |I|). Throws QuadratureFailure
/// when the interval budget is exhausted first.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return {};
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw Error(ErrorCode::QuadratureFailure, "integrate: non-finite bounds");
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::kronrod15(f, a, b));
    double total = heap.top().value;
    double total_err = heap.top().error;
    int count = 1;
    const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    // Segments too narrow to split are parked here and still counted.
    std::vector<detail::Segment> frozen;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (heap.empty()) break;
        if (count >= opt.max_intervals) {
            throw Error(ErrorCode::QuadratureFailure,
                        "integrate: tolerance not reached on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(total_err));
        }
        detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a <= min_width || mid <= worst.a || mid >= worst.b) {
            frozen.push_back(worst);
            continue;
        }
        detail::Segment left = detail::kronrod15(f, worst.a, mid);
        detail::Segment right = detail::kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to remove drift from the running updates.
    double value = 0.0, err = 0.0;
    for (const auto& s : frozen) {
        value += s.value;
        err += s.error;
    }
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sign * value, err, count};
}

/// Integral over [a, b] split at the given interior breakpoints.
template <class F>
double integrate_pieces(F&& f, double a, double b, const std::vector<double>& breaks,
                        const QuadratureOptions& opt = {}) {
    if (a >= b) return 0.0;
    double sum = 0.0;
    double left = a;
    for (double c : breaks) {
        if (c <= left || c >= b) continue;
        sum += integrate(f, left, c, opt).value;
        left = c;
    }
    sum += integrate(f, left, b, opt).value;
    return sum;
}

/// Integral over [a, +inf): [a, a + 1] directly, then x = a + e^y with
/// y = t / (1 - t), so power-law tails decay exponentially in y.
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a, const QuadratureOptions& opt = {}) {
    const QuadratureResult near = integrate(f, a, a + 1.0, opt);
    auto g = [&](double t) {
        const double u = 1.0 - t;
        const double y = t / u;
        const double ey = std::exp(y);
        const double x = a + ey;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * ey / (u * u);
    };
    const QuadratureResult far = integrate(g, 0.0, 1.0, opt);
    return {near.value + far.value, near.error + far.error};
}

struct MinimizeResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Golden-section search on [a, b]. Assumes the objective is unimodal there.
template <class F>
MinimizeResult golden_section(F&& f, double a, double b, double x_tol = 1e-10, int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    while (b - a > x_tol && it < max_iter) {
        // Ties move toward the left end so the smaller abscissa wins.
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++it;
    }
    if (fc <= fd) return {c, fc, it};
    return {d, fd, it};
}

/// Evaluates `samples` equispaced points on [a, b], then refines the best one
/// by golden section within its neighbouring mesh cells. Endpoints are
/// included in the scan so boundary minima are not missed.
template <class F>
MinimizeResult scan_then_golden(F&& f, double a, double b, int samples = 33, double x_tol = 1e-10,
                                int max_iter = 200) {
    const int m = std::max(samples, 3);
    const double h = (b - a) / (m - 1);
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        const double x = (i == m - 1) ? b : a + i * h;
        const double v = f(x);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = a + std::max(best - 1, 0) * h;
    const double hi = (best + 1 >= m - 1) ? b : a + (best + 1) * h;
    MinimizeResult refined = golden_section(f, lo, hi, x_tol, max_iter);
    if (refined.value <= best_value) return refined;
    return {(best == m - 1) ? b : a + best * h, best_value, refined.iterations};
}

/// Solves g(x) = target for nondecreasing g on [lo, hi] by bisection with
/// secant acceleration. The bracket is widened geometrically when needed.
template <class G>
double solve_monotone(G&& g, double target, double lo, double hi, double x_tol = 1e-13, int max_iter = 300) {
    double glo = g(lo), ghi = g(hi);
    for (int k = 0; glo > target && k < 200; ++k) {
        const double w = hi - lo;
        hi = lo;
        ghi = glo;
        lo -= 2.0 * w;
        glo = g(lo);
    }
    for (int k = 0; ghi < target && k < 200; ++k) {
        const double w = hi - lo;
        lo = hi;
        glo = ghi;
        hi += 2.0 * w;
        ghi = g(hi);
    }
    if (glo > target || ghi < target)
        throw Error(ErrorCode::NonConvergence, "solve_monotone: could not bracket the target");
    for (int it = 0; it < max_iter && hi - lo > x_tol * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        double x = 0.5 * (lo + hi);
        // Secant step on alternate iterations, bisection otherwise.
        if (it % 2 == 0 && ghi > glo) {
            const double s = lo + (target - glo) * (hi - lo) / (ghi - glo);
            if (s > lo && s < hi) x = s;
        }
        const double gx = g(x);
        if (gx < target) {
            lo = x;
            glo = gx;
        } else {
            hi = x;
            ghi = gx;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace quantdil
