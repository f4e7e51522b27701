#pragma once

// Catalog of the laws used by the toolkit: uniform cube, diagonal Normal,
// exponential, and the radial hyper-exponential / hyper-Gamma / hyper-Cauchy
// families. Densities are always normalized; the constants are computed.

#include "quantdil/errors.hpp"
#include "quantdil/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace quantdil {

/// Probability mass left out of each tail when a 1D support is truncated.
inline constexpr double kTailMass = 1e-12;

enum class Kind { Uniform01, Normal, Exponential, HyperExponential, HyperGamma, HyperCauchy };

inline const char* to_string(Kind kind) {
    switch (kind) {
    case Kind::Uniform01: return "uniform01";
    case Kind::Normal: return "normal";
    case Kind::Exponential: return "exponential";
    case Kind::HyperExponential: return "hyperexponential";
    case Kind::HyperGamma: return "hypergamma";
    case Kind::HyperCauchy: return "hypercauchy";
    }
    return "unknown";
}

/// Row-major set of d-dimensional points.
struct PointCloud {
    std::size_t dim = 1;
    std::vector<double> coords;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

/// Volume of the Euclidean unit ball in R^d.
inline double unit_ball_volume(std::size_t d) {
    const double h = 0.5 * static_cast<double>(d);
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

/// Closed form of the half-line integral of x^n exp(-a x^b).
inline double radial_normalization(double n, double a, double b) {
    detail::require(n > -1.0 && a > 0.0 && b > 0.0 && std::isfinite(n) && std::isfinite(a) && std::isfinite(b),
                    ErrorCode::InvalidParameter, "radial_normalization needs n > -1, a > 0, b > 0");
    const double k = (n + 1.0) / b;
    return std::tgamma(k) / (b * std::pow(a, k));
}

/// Integral over R^d of |x|^n exp(-a |x|^b), via V_d * d * int_0^inf rho^(n+d-1) exp(-a rho^b).
inline double radial_integral(double n, double a, double b, std::size_t d) {
    const double dd = static_cast<double>(d);
    return unit_ball_volume(d) * dd * radial_normalization(n + dd - 1.0, a, b);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the k-th fixed-size block of a random stream. Blocks are what make
/// results independent of how a computation is split across workers.
inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    return splitmix64(splitmix64(seed) ^ (0xD1B54A32D192ED03ULL * (block + 1)));
}

inline constexpr std::size_t kBlockSize = 4096;

/// Uniform on the open interval (0, 1) with 53 random bits.
inline double open_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double std_normal_quantile(double u) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u); }

} // namespace detail

class Distribution {
public:
    static Distribution uniform01(std::size_t d = 1) {
        detail::require(d >= 1, ErrorCode::InvalidParameter, "dimension must be positive");
        Distribution p(Kind::Uniform01, d);
        return p;
    }

    static Distribution normal(double mean = 0.0, double stddev = 1.0) {
        return normal(std::vector<double>{mean}, std::vector<double>{stddev});
    }

    /// Diagonal covariance only.
    static Distribution normal(std::vector<double> mean, std::vector<double> stddev) {
        detail::require(!mean.empty() && mean.size() == stddev.size(), ErrorCode::InvalidParameter,
                        "normal: mean and stddev must be non-empty and of equal length");
        for (std::size_t i = 0; i < mean.size(); ++i)
            detail::require(std::isfinite(mean[i]) && stddev[i] > 0.0 && std::isfinite(stddev[i]),
                            ErrorCode::InvalidParameter, "normal: stddev must be positive and finite");
        Distribution p(Kind::Normal, mean.size());
        p.mean_ = std::move(mean);
        p.stddev_ = std::move(stddev);
        p.log_norm_ = 0.0;
        for (double s : p.stddev_) p.log_norm_ += std::log(s) + 0.5 * std::log(2.0 * std::numbers::pi);
        return p;
    }

    static Distribution exponential(double rate = 1.0) {
        detail::require(rate > 0.0 && std::isfinite(rate), ErrorCode::InvalidParameter,
                        "exponential: rate must be positive");
        Distribution p(Kind::Exponential, 1);
        p.lambda_ = rate;
        p.log_norm_ = -std::log(rate);
        return p;
    }

    /// Density proportional to exp(-lambda |x|^alpha).
    static Distribution hyper_exponential(double lambda, double alpha, std::size_t d = 1) {
        return hyper_gamma_impl(Kind::HyperExponential, lambda, alpha, 0.0, d);
    }

    /// Density proportional to |x|^beta exp(-lambda |x|^alpha), beta > -d.
    static Distribution hyper_gamma(double lambda, double alpha, double beta, std::size_t d = 1) {
        return hyper_gamma_impl(Kind::HyperGamma, lambda, alpha, beta, d);
    }

    /// Density C_m / (1 + |x|^2)^m with m > d/2.
    static Distribution hyper_cauchy(double m, std::size_t d = 1) {
        detail::require(d >= 1, ErrorCode::InvalidParameter, "dimension must be positive");
        detail::require(std::isfinite(m) && m > 0.5 * static_cast<double>(d), ErrorCode::InvalidParameter,
                        "hypercauchy: m must exceed d/2 for integrability");
        Distribution p(Kind::HyperCauchy, d);
        p.m_ = m;
        const double dd = static_cast<double>(d);
        auto radial = [&](double rho) { return std::pow(rho, dd - 1.0) * std::pow(1.0 + rho * rho, -m); };
        const double tail = integrate_to_infinity(radial, 0.0, {0.0, 1e-13, 4000}).value;
        p.log_norm_ = std::log(unit_ball_volume(d) * dd * tail);
        return p;
    }

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    const std::vector<double>& mean_vector() const { return mean_; }
    const std::vector<double>& stddev_vector() const { return stddev_; }
    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double cauchy_m() const { return m_; }

    /// log of the normalization constant Z (density = unnormalized / Z).
    double log_normalization() const { return log_norm_; }

    bool is_radial() const {
        return kind_ == Kind::HyperExponential || kind_ == Kind::HyperGamma || kind_ == Kind::HyperCauchy;
    }

    bool is_symmetric() const { return kind_ != Kind::Exponential; }

    /// Point of central symmetry (for Exponential: the support origin).
    std::vector<double> center() const {
        switch (kind_) {
        case Kind::Normal: return mean_;
        case Kind::Uniform01: return std::vector<double>(dim_, 0.5);
        default: return std::vector<double>(dim_, 0.0);
        }
    }

    /// Center used for dilations by default: the mean for Normal, the origin otherwise.
    std::vector<double> dilation_center() const {
        if (kind_ == Kind::Uniform01) return std::vector<double>(dim_, 0.5);
        return kind_ == Kind::Normal ? mean_ : std::vector<double>(dim_, 0.0);
    }

    double log_density(std::span<const double> x) const {
        check_dim(x.size());
        switch (kind_) {
        case Kind::Uniform01:
            for (double v : x)
                if (v < 0.0 || v > 1.0) return -std::numeric_limits<double>::infinity();
            return 0.0;
        case Kind::Normal: {
            double q = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double z = (x[i] - mean_[i]) / stddev_[i];
                q += z * z;
            }
            return -0.5 * q - log_norm_;
        }
        case Kind::Exponential:
            return x[0] < 0.0 ? -std::numeric_limits<double>::infinity() : -lambda_ * x[0] - log_norm_;
        default:
            return log_radial(norm(x));
        }
    }

    double density(std::span<const double> x) const { return std::exp(log_density(x)); }

    double log_density(double x) const { return log_density(std::span<const double>(&x, 1)); }
    double density(double x) const { return std::exp(log_density(x)); }

    /// Points in 1D where the density is not smooth; quadratures split there.
    std::vector<double> breakpoints() const {
        if (dim_ != 1) return {};
        if (is_radial()) return {0.0};
        return {};
    }

    double cdf(double x) const {
        require_1d("cdf");
        switch (kind_) {
        case Kind::Uniform01: return std::clamp(x, 0.0, 1.0);
        case Kind::Normal: return 0.5 * boost::math::erfc(-(x - mean_[0]) / (stddev_[0] * std::numbers::sqrt2));
        case Kind::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-lambda_ * x);
        default:
            if (x >= 0.0) return 0.5 + 0.5 * radius_cdf(x);
            return 0.5 * radius_survival(-x);
        }
    }

    /// P(X > x), accurate in the right tail.
    double survival(double x) const {
        require_1d("survival");
        switch (kind_) {
        case Kind::Uniform01: return 1.0 - std::clamp(x, 0.0, 1.0);
        case Kind::Normal: return 0.5 * boost::math::erfc((x - mean_[0]) / (stddev_[0] * std::numbers::sqrt2));
        case Kind::Exponential: return x <= 0.0 ? 1.0 : std::exp(-lambda_ * x);
        default:
            if (x <= 0.0) return 0.5 + 0.5 * radius_cdf(-x);
            return 0.5 * radius_survival(x);
        }
    }

    double quantile(double u) const {
        require_1d("quantile");
        detail::require(u >= 0.0 && u <= 1.0, ErrorCode::DomainViolation, "quantile: u must lie in [0, 1]");
        switch (kind_) {
        case Kind::Uniform01: return u;
        case Kind::Normal:
            if (u == 0.0) return -std::numeric_limits<double>::infinity();
            if (u == 1.0) return std::numeric_limits<double>::infinity();
            return mean_[0] + stddev_[0] * detail::std_normal_quantile(u);
        case Kind::Exponential:
            if (u == 1.0) return std::numeric_limits<double>::infinity();
            return -std::log1p(-u) / lambda_;
        default:
            if (u == 0.5) return 0.0;
            if (u < 0.5) return -radius_survival_quantile(2.0 * u);
            return radius_survival_quantile(2.0 * (1.0 - u));
        }
    }

    /// Quantile of the upper tail: x with P(X > x) = p.
    double upper_quantile(double p) const {
        require_1d("upper_quantile");
        if (kind_ == Kind::Exponential) return -std::log(p) / lambda_;
        if (kind_ == Kind::Normal) return mean_[0] - stddev_[0] * detail::std_normal_quantile(p);
        if (kind_ == Kind::Uniform01) return 1.0 - p;
        if (p >= 0.5) return quantile(1.0 - p);
        return radius_survival_quantile(2.0 * p);
    }

    /// Support truncated at the `tail` quantiles (exact where the support is bounded).
    std::pair<double, double> truncated_support(double tail = kTailMass) const {
        require_1d("truncated_support");
        detail::require(tail > 0.0 && tail < 0.5, ErrorCode::InvalidParameter, "tail mass must lie in (0, 1/2)");
        switch (kind_) {
        case Kind::Uniform01: return {0.0, 1.0};
        case Kind::Exponential: return {0.0, upper_quantile(tail)};
        default: return {quantile(tail), upper_quantile(tail)};
        }
    }

    /// P(|X - center| <= rho) for the radial families.
    double radius_cdf(double rho) const {
        if (rho <= 0.0) return 0.0;
        if (kind_ == Kind::HyperCauchy) {
            const double t = rho * rho / (1.0 + rho * rho);
            return boost::math::ibeta(0.5 * dim_, m_ - 0.5 * dim_, t);
        }
        require_gamma_family();
        return boost::math::gamma_p(gamma_shape(), lambda_ * std::pow(rho, alpha_));
    }

    double radius_survival(double rho) const {
        if (rho <= 0.0) return 1.0;
        if (kind_ == Kind::HyperCauchy) {
            const double t = rho * rho / (1.0 + rho * rho);
            return boost::math::ibetac(0.5 * dim_, m_ - 0.5 * dim_, t);
        }
        require_gamma_family();
        return boost::math::gamma_q(gamma_shape(), lambda_ * std::pow(rho, alpha_));
    }

    /// rho with P(|X| > rho) = p.
    double radius_survival_quantile(double p) const {
        if (p >= 1.0) return 0.0;
        if (p <= 0.0) return std::numeric_limits<double>::infinity();
        if (kind_ == Kind::HyperCauchy) {
            const double t = boost::math::ibetac_inv(0.5 * dim_, m_ - 0.5 * dim_, p);
            return std::sqrt(t / (1.0 - t));
        }
        require_gamma_family();
        return std::pow(boost::math::gamma_q_inv(gamma_shape(), p) / lambda_, 1.0 / alpha_);
    }

    double radius_quantile(double u) const { return radius_survival_quantile(1.0 - u); }

    /// Whether E|X|^r is finite.
    bool has_moment(double r) const {
        if (kind_ == Kind::HyperCauchy) return r < 2.0 * m_ - static_cast<double>(dim_);
        return true;
    }

    void require_moment(double r) const {
        if (!has_moment(r))
            throw Error(ErrorCode::MomentDivergence,
                        "moment of order " + std::to_string(r) + " is infinite (needs r < 2m - d = " +
                            std::to_string(2.0 * m_ - static_cast<double>(dim_)) + ")");
    }

    /// E|X - center()|^p in closed form where one exists (radial families,
    /// 1D Normal/Uniform, isotropic Normal). Empty otherwise.
    std::optional<double> central_abs_moment(double p) const {
        require_moment(p);
        const double dd = static_cast<double>(dim_);
        switch (kind_) {
        case Kind::HyperExponential:
        case Kind::HyperGamma: {
            const double k = gamma_shape();
            return std::exp(std::lgamma(k + p / alpha_) - std::lgamma(k)) * std::pow(lambda_, -p / alpha_);
        }
        case Kind::HyperCauchy:
            return boost::math::beta(0.5 * (dd + p), m_ - 0.5 * (dd + p)) / boost::math::beta(0.5 * dd, m_ - 0.5 * dd);
        case Kind::Normal: {
            for (double s : stddev_)
                if (s != stddev_[0]) return std::nullopt;
            // |Z| is chi-distributed with d degrees of freedom.
            return std::pow(stddev_[0], p) * std::pow(2.0, 0.5 * p) *
                   std::exp(std::lgamma(0.5 * (dd + p)) - std::lgamma(0.5 * dd));
        }
        case Kind::Uniform01:
            if (dim_ == 1) return std::pow(0.5, p) / (p + 1.0);
            return std::nullopt;
        case Kind::Exponential:
            return std::nullopt;
        }
        return std::nullopt;
    }

    /// Coordinate-wise mean.
    std::vector<double> mean() const {
        switch (kind_) {
        case Kind::Normal: return mean_;
        case Kind::Uniform01: return std::vector<double>(dim_, 0.5);
        case Kind::Exponential: return {1.0 / lambda_};
        default: return std::vector<double>(dim_, 0.0);
        }
    }

    /// 1D variance (requires a finite second moment).
    double variance() const {
        require_1d("variance");
        require_moment(2.0);
        switch (kind_) {
        case Kind::Normal: return stddev_[0] * stddev_[0];
        case Kind::Uniform01: return 1.0 / 12.0;
        case Kind::Exponential: return 1.0 / (lambda_ * lambda_);
        default: return *central_abs_moment(2.0);
        }
    }

    /// E|X - a|^r on the truncated 1D support.
    double abs_moment_about(double a, double r) const {
        require_1d("abs_moment_about");
        require_moment(r);
        const auto [lo, hi] = truncated_support();
        auto integrand = [&](double x) { return std::pow(std::abs(x - a), r) * density(x); };
        std::vector<double> breaks = breakpoints();
        breaks.push_back(a);
        std::sort(breaks.begin(), breaks.end());
        return integrate_pieces(integrand, lo, hi, breaks);
    }

    /// inf_a ||X - a||_r. Symmetric laws with r >= 1 use the center (convexity);
    /// otherwise a 1D search over a.
    double sigma_r(double r) const {
        detail::require(r > 0.0, ErrorCode::InvalidParameter, "sigma_r: r must be positive");
        require_moment(r);
        if (is_symmetric() && r >= 1.0) {
            if (auto m = central_abs_moment(r)) return std::pow(*m, 1.0 / r);
            if (dim_ == 1) return std::pow(abs_moment_about(center()[0], r), 1.0 / r);
            return std::pow(monte_carlo_central_moment(r), 1.0 / r);
        }
        if (dim_ != 1) return std::pow(monte_carlo_central_moment(r), 1.0 / r);
        const double lo = quantile(1e-3), hi = quantile(1.0 - 1e-3);
        auto objective = [&](double a) { return abs_moment_about(a, r); };
        const MinimizeResult best = scan_then_golden(objective, lo, hi, 33, 1e-10);
        return std::pow(best.value, 1.0 / r);
    }

    /// Deterministic given the seed. Draws are produced in fixed-size blocks
    /// with per-block seeds, so any split of the index range reproduces them.
    PointCloud sample(std::size_t count, std::uint64_t seed) const {
        detail::require(count >= 1, ErrorCode::InvalidParameter, "sample: count must be >= 1");
        PointCloud out;
        out.dim = dim_;
        out.coords.resize(count * dim_);
        const std::size_t blocks = (count + detail::kBlockSize - 1) / detail::kBlockSize;
        for (std::size_t b = 0; b < blocks; ++b) sample_block(out, b, seed);
        return out;
    }

    /// Law of (X - mu) / theta + mu when it stays in the catalog.
    std::optional<Distribution> scaled(double theta, std::span<const double> mu) const {
        detail::require(theta > 0.0, ErrorCode::InvalidParameter, "theta must be positive");
        check_dim(mu.size());
        const bool at_origin = std::all_of(mu.begin(), mu.end(), [](double v) { return v == 0.0; });
        switch (kind_) {
        case Kind::Normal: {
            std::vector<double> m(dim_), s(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                m[i] = mu[i] + (mean_[i] - mu[i]) / theta;
                s[i] = stddev_[i] / theta;
            }
            return normal(std::move(m), std::move(s));
        }
        case Kind::Exponential:
            if (!at_origin) return std::nullopt;
            return exponential(lambda_ * theta);
        case Kind::HyperExponential:
            if (!at_origin) return std::nullopt;
            return hyper_exponential(lambda_ * std::pow(theta, alpha_), alpha_, dim_);
        case Kind::HyperGamma:
            if (!at_origin) return std::nullopt;
            return hyper_gamma(lambda_ * std::pow(theta, alpha_), alpha_, beta_, dim_);
        default:
            if (theta == 1.0) return *this;
            return std::nullopt;
        }
    }

    void check_dim(std::size_t d) const {
        if (d != dim_)
            throw Error(ErrorCode::DimensionMismatch,
                        "point has dimension " + std::to_string(d) + ", distribution has " + std::to_string(dim_));
    }

    void require_1d(const char* what) const {
        if (dim_ != 1)
            throw Error(ErrorCode::UnsupportedDimension, std::string(what) + " is only available for d = 1");
    }

private:
    Distribution(Kind kind, std::size_t d) : kind_(kind), dim_(d) {}

    static Distribution hyper_gamma_impl(Kind kind, double lambda, double alpha, double beta, std::size_t d) {
        detail::require(d >= 1, ErrorCode::InvalidParameter, "dimension must be positive");
        detail::require(lambda > 0.0 && alpha > 0.0 && std::isfinite(lambda) && std::isfinite(alpha),
                        ErrorCode::InvalidParameter, "lambda and alpha must be positive");
        detail::require(std::isfinite(beta) && beta > -static_cast<double>(d), ErrorCode::InvalidParameter,
                        "beta must exceed -d");
        Distribution p(kind, d);
        p.lambda_ = lambda;
        p.alpha_ = alpha;
        p.beta_ = beta;
        p.log_norm_ = std::log(radial_integral(beta, lambda, alpha, d));
        return p;
    }

    double gamma_shape() const { return (static_cast<double>(dim_) + beta_) / alpha_; }

    void require_gamma_family() const {
        if (kind_ != Kind::HyperExponential && kind_ != Kind::HyperGamma)
            throw Error(ErrorCode::InvalidParameter, "radial law queried on a non-radial distribution");
    }

    static double norm(std::span<const double> x) {
        if (x.size() == 1) return std::abs(x[0]);
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }

    double log_radial(double rho) const {
        if (kind_ == Kind::HyperCauchy) return -m_ * std::log1p(rho * rho) - log_norm_;
        double v = -lambda_ * std::pow(rho, alpha_) - log_norm_;
        if (beta_ != 0.0) v += beta_ * std::log(rho);
        return v;
    }

    void sample_block(PointCloud& out, std::size_t block, std::uint64_t seed) const {
        std::mt19937_64 rng(detail::block_seed(seed, block));
        const std::size_t begin = block * detail::kBlockSize;
        const std::size_t end = std::min(out.size(), begin + detail::kBlockSize);
        std::vector<double> dir(dim_);
        for (std::size_t i = begin; i < end; ++i) {
            double* x = out.coords.data() + i * dim_;
            switch (kind_) {
            case Kind::Uniform01:
                for (std::size_t j = 0; j < dim_; ++j) x[j] = detail::open_uniform(rng);
                break;
            case Kind::Normal:
                for (std::size_t j = 0; j < dim_; ++j)
                    x[j] = mean_[j] + stddev_[j] * detail::std_normal_quantile(detail::open_uniform(rng));
                break;
            default:
                if (dim_ == 1) {
                    x[0] = quantile(detail::open_uniform(rng));
                } else {
                    const double rho = radius_survival_quantile(detail::open_uniform(rng));
                    double s = 0.0;
                    for (std::size_t j = 0; j < dim_; ++j) {
                        dir[j] = detail::std_normal_quantile(detail::open_uniform(rng));
                        s += dir[j] * dir[j];
                    }
                    s = std::sqrt(s);
                    for (std::size_t j = 0; j < dim_; ++j) x[j] = rho * dir[j] / s;
                }
                break;
            }
        }
    }

    double monte_carlo_central_moment(double r) const {
        const PointCloud pts = sample(100000, 0x5eed);
        const std::vector<double> c = center();
        double acc = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto x = pts.point(i);
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += (x[j] - c[j]) * (x[j] - c[j]);
            acc += std::pow(std::sqrt(s), r);
        }
        return acc / static_cast<double>(pts.size());
    }

    Kind kind_;
    std::size_t dim_;
    std::vector<double> mean_, stddev_;
    double lambda_ = 1.0, alpha_ = 1.0, beta_ = 0.0, m_ = 1.0;
    double log_norm_ = 0.0;
};

} // namespace quantdil
