#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's quadrature or solvers.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
    if (m % 2) ++m;
    const double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// int_0^b f via x = t^2, which removes |x|^p singularities at the origin.
inline double simpson_sqrt(const std::function<double(double)>& f, double b, int m = 200000) {
    return simpson([&](double t) { return 2.0 * t * f(t * t); }, 0.0, std::sqrt(b), m);
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// int_a^b (x - c)^2 phi(x) dx for the standard normal, in closed form.
inline double normal_second_moment(double c, double a, double b) {
    auto pa = std::isfinite(a) ? normal_pdf(a) : 0.0, pb = std::isfinite(b) ? normal_pdf(b) : 0.0;
    auto apa = std::isfinite(a) ? a * pa : 0.0, bpb = std::isfinite(b) ? b * pb : 0.0;
    const double mass = normal_cdf(b) - normal_cdf(a);
    return mass * (1.0 + c * c) + apa - bpb - 2.0 * c * (pa - pb);
}

/// e_2^2 of a sorted point set under N(0, 1), closed form per cell.
inline double normal_distortion2(const std::vector<double>& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = i == 0 ? -INFINITY : 0.5 * (x[i - 1] + x[i]);
        const double b = i + 1 == x.size() ? INFINITY : 0.5 * (x[i] + x[i + 1]);
        sum += normal_second_moment(x[i], a, b);
    }
    return sum;
}

/// e_r^r of a sorted point set by Simpson on each cell of [lo, hi].
inline double distortion_power(const std::vector<double>& x, const std::function<double(double)>& f, double r,
                               double lo, double hi, int panels = 4000) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = i == 0 ? lo : 0.5 * (x[i - 1] + x[i]);
        const double b = i + 1 == x.size() ? hi : 0.5 * (x[i] + x[i + 1]);
        const double c = x[i];
        auto g = [&](double u) { return std::pow(std::abs(u - c), r) * f(u); };
        if (a < c && c < b) sum += simpson(g, a, c, panels) + simpson(g, c, b, panels);
        else if (a < b) sum += simpson(g, a, b, panels);
    }
    return sum;
}

/// Grid scan at `step` followed by successively finer scans around the best point.
inline double scan_argmin(const std::function<double(double)>& f, double a, double b, double step, int rounds = 4) {
    double best = a, best_val = f(a);
    for (int k = 0; k < rounds; ++k) {
        for (double x = a; x <= b; x += step) {
            const double v = f(x);
            if (v < best_val) {
                best_val = v;
                best = x;
            }
        }
        a = best - step;
        b = best + step;
        step /= 100.0;
    }
    return best;
}

} // namespace oracle
