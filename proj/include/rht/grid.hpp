#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rht/errors.hpp"

namespace rht {

/// Square n x n grid of reals, row-major. The tag keeps images and
/// coefficient grids from being mixed up.
template <class Tag>
class SquareGrid {
public:
    SquareGrid() = default;
    explicit SquareGrid(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}

    /// Throws if `values` is not n*n long or holds non-finite numbers.
    SquareGrid(std::size_t n, std::vector<double> values) : n_(n), v_(std::move(values)) {
        if (v_.size() != n * n) throw DimensionError("grid element count", n * n, v_.size());
        for (double x : v_)
            if (!std::isfinite(x)) throw std::invalid_argument("grid values must be finite");
    }

    std::size_t order() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
    std::span<const double> values() const noexcept { return v_; }
    std::span<double> values() noexcept { return v_; }

    SquareGrid transposed() const {
        SquareGrid t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const SquareGrid&, const SquareGrid&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> v_;
};

struct ImageTag {};
struct CoefficientTag {};

using GrayImage = SquareGrid<ImageTag>;
using CoefficientGrid = SquareGrid<CoefficientTag>;

template <class Tag>
double max_abs_difference(const SquareGrid<Tag>& a, const SquareGrid<Tag>& b) {
    if (a.order() != b.order()) throw DimensionError("grid order", a.order(), b.order());
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace rht
