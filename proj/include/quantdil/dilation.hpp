#pragma once

// Dilation / contraction of a grid about mu, the theta* catalog, the
// admissible intervals I_P(theta) and dilated Voronoi weights.

#include "quantdil/distributions.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quadrature.hpp"
#include "quantdil/quantizer.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace quantdil {

struct DilationParams {
    double theta = 1.0;
    std::vector<double> mu;

    DilationParams() = default;
    DilationParams(double t, std::vector<double> m) : theta(t), mu(std::move(m)) {
        detail::require(theta > 0.0 && std::isfinite(theta), ErrorCode::InvalidParameter, "theta must be positive");
    }

    /// theta about the law's default center.
    static DilationParams centered(double theta, const Distribution& law) { return {theta, law.dilation_center()}; }
};

/// x -> mu + theta (x - mu). theta = 1 copies the points untouched.
inline Grid dilate(const Grid& grid, const DilationParams& p) {
    detail::require(p.theta > 0.0, ErrorCode::InvalidParameter, "theta must be positive");
    if (p.mu.size() != grid.dim()) throw Error(ErrorCode::DimensionMismatch, "dilate: mu has the wrong dimension");
    std::vector<double> c = grid.coords();
    if (p.theta != 1.0) {
        const std::size_t d = grid.dim();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.mu[i % d] + p.theta * (c[i] - p.mu[i % d]);
    }
    Provenance prov;
    prov.method = GridMethod::Dilated;
    prov.distribution = grid.provenance().distribution;
    prov.set("theta", p.theta);
    prov.mu = p.mu;
    prov.parent = std::make_shared<Provenance>(grid.provenance());
    return Grid(grid.dim(), std::move(c), std::move(prov));
}

struct ThetaStar {
    double theta = 1.0;
    std::optional<double> beta_star; ///< hyper-Gamma companion exponent
    std::vector<double> mu;
};

/// theta* making the dilated L^r grid follow the L^s empirical measure.
///   Normal: sqrt((d+s)/(d+r)); hyper families: ((d+s)/(d+r))^(1/alpha).
/// The one-sided exponential uses the alpha = 1 form about 0.
inline ThetaStar theta_star(const Distribution& law, double r, double s) {
    detail::require(r > 0.0 && s > 0.0, ErrorCode::InvalidParameter, "r and s must be positive");
    const double d = static_cast<double>(law.dim());
    const double ratio = (d + s) / (d + r);
    ThetaStar out;
    out.mu = law.dilation_center();
    switch (law.kind()) {
    case Kind::Normal: out.theta = std::sqrt(ratio); break;
    case Kind::Exponential: out.theta = ratio; break;
    case Kind::HyperExponential: out.theta = std::pow(ratio, 1.0 / law.alpha()); break;
    case Kind::HyperGamma:
        out.theta = std::pow(ratio, 1.0 / law.alpha());
        out.beta_star = (d + r) / (d * (d + s));
        break;
    default:
        throw Error(ErrorCode::NoKnownThetaStar,
                    std::string("no closed-form theta* for ") + to_string(law.kind()));
    }
    return out;
}

enum class Regime { SBelowR, Intermediate };

inline const char* to_string(Regime g) { return g == Regime::SBelowR ? "s<r" : "r<=s<d+r"; }

/// Open interval (lower, +inf) of rate-optimal dilation parameters.
struct AdmissibleInterval {
    double lower = 0.0;
    Regime regime = Regime::SBelowR;

    bool contains(double theta) const { return theta > lower; }
};

inline void check_cauchy_restriction(const Distribution& law, double r, double s) {
    if (law.kind() != Kind::HyperCauchy) return;
    const double d = static_cast<double>(law.dim());
    const double bound = (1.0 - d / (2.0 * law.cauchy_m())) * (d + r);
    if (!(s < bound))
        throw Error(ErrorCode::MomentRestriction,
                    "hypercauchy needs s < (1 - d/(2m))(d + r) = " + std::to_string(bound));
}

/// `closed_at_boundary` also accepts s = d + r, extending the intermediate
/// formula to its end point (used for reporting only).
inline AdmissibleInterval admissible_interval(const Distribution& law, double r, double s,
                                              bool closed_at_boundary = false) {
    detail::require(r > 0.0 && s > 0.0, ErrorCode::InvalidParameter, "r and s must be positive");
    check_cauchy_restriction(law, r, s);
    const double d = static_cast<double>(law.dim());
    if (s > d + r || (s == d + r && !closed_at_boundary))
        throw Error(ErrorCode::InvalidRegime, "s >= d + r: no rate-optimal dilation (s = " + std::to_string(s) +
                                                  ", d + r = " + std::to_string(d + r) + ")");
    AdmissibleInterval iv;
    iv.regime = s < r ? Regime::SBelowR : Regime::Intermediate;
    const double ratio = s < r ? s / r : s / (d + r);
    switch (law.kind()) {
    case Kind::Normal: iv.lower = std::sqrt(ratio); break;
    case Kind::Exponential: iv.lower = ratio; break;
    case Kind::HyperExponential:
    case Kind::HyperGamma: iv.lower = std::pow(ratio, 1.0 / law.alpha()); break;
    default:
        throw Error(ErrorCode::NoKnownThetaStar,
                    std::string("no derived admissible interval for ") + to_string(law.kind()));
    }
    return iv;
}

/// Finite value of the rate-optimality condition integral, or a divergence flag.
struct ConditionIntegral {
    bool divergent = false;
    double value = std::numeric_limits<double>::infinity();
    double tail_coefficient = 0.0; ///< integrand ~ exp(-k * (tail term)); k <= 0 diverges
};

namespace detail {

/// int g over the support of a 1D law (whole line, half line or [0, 1]),
/// splitting at the given cuts. Infinite ends go through integrate_to_infinity.
template <class G>
double integrate_support(const Distribution& law, G&& g, std::vector<double> cuts,
                         const QuadratureOptions& opt = {1e-13, 1e-11, 4000}) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    if (law.kind() == Kind::Uniform01) {
        lo = 0.0;
        hi = 1.0;
    } else if (law.kind() == Kind::Exponential) {
        lo = 0.0;
    }
    for (double z : law.breakpoints()) cuts.push_back(z);
    if (law.kind() == Kind::Normal) cuts.push_back(law.mean_vector()[0]);
    cuts.push_back(std::isfinite(lo) ? lo : 0.0);
    if (std::isfinite(hi)) cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double value = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) value += integrate(g, cuts[i], cuts[i + 1], opt).value;
    if (!std::isfinite(hi)) value += integrate_to_infinity(g, cuts.back(), opt).value;
    if (!std::isfinite(lo)) {
        const double first = cuts.front();
        value += integrate_to_infinity([&](double t) { return g(2.0 * first - t); }, first, opt).value;
    }
    return value;
}

/// Exponents (p, q) of f^p f_{theta,mu}^q in the condition integral.
inline std::pair<double, double> condition_exponents(double d, double r, double s, Regime regime) {
    if (regime == Regime::SBelowR) return {-s / (r - s), r / (r - s)};
    return {-s / (d + r - s), (d + r) / (d + r - s)};
}

} // namespace detail

/// 1D condition integral
///   s < r:        int f^{-s/(r-s)} f_{theta,mu}^{r/(r-s)}
///   r <= s < 1+r: int f^{-s/(1+r-s)} f_{theta,mu}^{(1+r)/(1+r-s)}
/// over {f > 0}. Divergence is decided from the tail exponent of each family;
/// finite cases are integrated over the whole line.
inline ConditionIntegral condition_integral(const Distribution& law, const DilationParams& params, double r, double s,
                                            Regime regime) {
    law.require_1d("condition_integral");
    detail::require(r > 0.0 && s > 0.0, ErrorCode::InvalidParameter, "r and s must be positive");
    detail::require(params.theta > 0.0 && params.mu.size() == 1, ErrorCode::InvalidParameter,
                    "condition_integral: need theta > 0 and a scalar mu");
    check_cauchy_restriction(law, r, s);
    if (regime == Regime::SBelowR && !(s < r))
        throw Error(ErrorCode::InvalidRegime, "regime s<r requested with s >= r");
    if (regime == Regime::Intermediate && !(s >= r && s < 1.0 + r))
        throw Error(ErrorCode::InvalidRegime, "regime r<=s<d+r requested outside that range");
    const auto [p, q] = detail::condition_exponents(1.0, r, s, regime);
    const double theta = params.theta, mu = params.mu[0];

    ConditionIntegral out;
    // Tail coefficient k: the log-integrand behaves like -k * lambda |x|^alpha
    // (or -k x^2 / 2 sigma^2). Sums p + q = 1 in both regimes.
    switch (law.kind()) {
    case Kind::Normal:
        out.tail_coefficient = p + q * theta * theta;
        break;
    case Kind::Exponential:
    case Kind::HyperExponential:
    case Kind::HyperGamma: {
        const double alpha = law.kind() == Kind::Exponential ? 1.0 : law.alpha();
        out.tail_coefficient = p + q * std::pow(theta, alpha);
        break;
    }
    case Kind::HyperCauchy:
        // Ratio f_theta / f stays bounded: the integrand decays like f itself.
        out.tail_coefficient = 1.0;
        break;
    case Kind::Uniform01:
        out.tail_coefficient = 1.0; // bounded support
        break;
    }
    // A shift mu only adds lower-order terms, so k decides for any center.
    if (!(out.tail_coefficient > 0.0)) {
        out.divergent = true;
        return out;
    }

    auto integrand = [&](double x) {
        const double lf = law.log_density(x);
        if (!std::isfinite(lf)) return 0.0;
        const double lft = law.log_density(mu + theta * (x - mu));
        if (!std::isfinite(lft)) return q > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::exp(p * lf + q * lft);
    };
    const double value = detail::integrate_support(law, integrand, {mu, mu - mu / theta, mu + (1.0 - mu) / theta});
    if (!std::isfinite(value)) {
        out.divergent = true;
        return out;
    }
    out.value = value;
    return out;
}

struct DilatedWeights {
    Grid grid;                     ///< the dilated grid
    std::vector<double> weights;   ///< route (i): CDF on the dilated cells
    std::vector<double> via_parent; ///< route (ii): theta^d int_{parent cell} f_{theta,mu}
    double max_discrepancy = 0.0;
};

/// Voronoi weights of the dilated grid, computed twice (1D). Routes disagreeing
/// by more than `tolerance` raise ConsistencyError.
inline DilatedWeights dilated_weights(const Grid& parent, const Distribution& law, const DilationParams& params,
                                      double tolerance = 1e-9) {
    law.require_1d("dilated_weights");
    if (parent.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "dilated_weights: grid must be 1D");
    Grid g = dilate(parent, params);
    DilatedWeights out{g, weights(g, law), {}, 0.0};
    const double theta = params.theta, mu = params.mu[0];
    const auto [lo, hi] = law.truncated_support();
    // Preimage of the truncated support under x -> mu + theta (x - mu).
    const double plo = mu + (lo - mu) / theta, phi = mu + (hi - mu) / theta;
    std::vector<double> breaks;
    for (double z : law.breakpoints()) breaks.push_back(mu + (z - mu) / theta);
    auto ft = [&](double x) { return law.density(mu + theta * (x - mu)); };
    const QuadratureOptions opt{1e-14, 1e-12, 2000};
    const auto& c = parent.coords();
    const std::size_t n = c.size();
    out.via_parent.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i == 0 ? plo : std::max(plo, 0.5 * (c[i - 1] + c[i]));
        const double b = i + 1 == n ? phi : std::min(phi, 0.5 * (c[i] + c[i + 1]));
        out.via_parent[i] = a < b ? theta * integrate_pieces(ft, a, b, breaks, opt) : 0.0;
        out.max_discrepancy = std::max(out.max_discrepancy, std::abs(out.via_parent[i] - out.weights[i]));
    }
    if (out.max_discrepancy > tolerance)
        throw Error(ErrorCode::ConsistencyError,
                    "dilated weights: CDF and change-of-variables routes differ by " +
                        std::to_string(out.max_discrepancy));
    return out;
}

} // namespace quantdil
