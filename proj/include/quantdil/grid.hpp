#pragma once

#include "quantdil/distributions.hpp"
#include "quantdil/errors.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quantdil {

enum class GridMethod { Greedy, Lloyd, Newton, Dilated, Manual };

inline const char* to_string(GridMethod m) {
    switch (m) {
    case GridMethod::Greedy: return "greedy";
    case GridMethod::Lloyd: return "lloyd";
    case GridMethod::Newton: return "newton";
    case GridMethod::Dilated: return "dilated";
    case GridMethod::Manual: return "manual";
    }
    return "manual";
}

/// How a grid was produced. Dilated grids keep their parent's provenance.
struct Provenance {
    GridMethod method = GridMethod::Manual;
    std::vector<std::pair<std::string, double>> params;
    std::vector<double> mu;
    std::string distribution;
    std::shared_ptr<const Provenance> parent;

    std::optional<double> param(const std::string& name) const {
        for (const auto& [k, v] : params)
            if (k == name) return v;
        return std::nullopt;
    }

    Provenance& set(const std::string& name, double value) {
        for (auto& [k, v] : params)
            if (k == name) {
                v = value;
                return *this;
            }
        params.emplace_back(name, value);
        return *this;
    }
};

/// Finite quantization grid. Points are pairwise distinct; in 1D they are
/// kept in strictly increasing order.
class Grid {
public:
    Grid(std::size_t dim, std::vector<double> coords, Provenance provenance = {})
        : dim_(dim), coords_(std::move(coords)), provenance_(std::move(provenance)) {
        detail::require(dim_ >= 1, ErrorCode::InvalidParameter, "grid dimension must be positive");
        detail::require(!coords_.empty() && coords_.size() % dim_ == 0, ErrorCode::InvalidParameter,
                        "grid needs at least one point and a coordinate count divisible by d");
        for (double v : coords_)
            detail::require(std::isfinite(v), ErrorCode::InvalidParameter, "grid coordinates must be finite");
        if (dim_ == 1) {
            std::sort(coords_.begin(), coords_.end());
            for (std::size_t i = 1; i < coords_.size(); ++i)
                detail::require(coords_[i] > coords_[i - 1], ErrorCode::InvalidParameter,
                                "grid points must be pairwise distinct");
        } else {
            const std::size_t n = size();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    detail::require(!std::equal(coords_.begin() + i * dim_, coords_.begin() + (i + 1) * dim_,
                                                coords_.begin() + j * dim_),
                                    ErrorCode::InvalidParameter, "grid points must be pairwise distinct");
        }
    }

    static Grid line(std::vector<double> points, Provenance provenance = {}) {
        return Grid(1, std::move(points), std::move(provenance));
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    const std::vector<double>& coords() const { return coords_; }
    const Provenance& provenance() const { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

private:
    std::size_t dim_;
    std::vector<double> coords_;
    Provenance provenance_;
};

} // namespace quantdil
