#pragma once

// Two-dimensional rounded Hartley transform of square images, built from the
// separable product T = H A H and the flip combination
//   B = 1/2 (T + T^(c) + T^(r) - T^(cr)),
// its weak-inverse (same construction with H / n on each side), and PSNR.

#include <cmath>
#include <cstddef>
#include <limits>

#include "rht/core.hpp"
#include "rht/grid.hpp"

namespace rht {

namespace detail {

/// out = H * in using signed row additions; each output element is
/// accumulated in index order.
template <class Tag>
SquareGrid<Tag> left_ternary(const TernaryMatrix& h, const SquareGrid<Tag>& in) {
    const std::size_t n = h.order();
    SquareGrid<Tag> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = h.row(i);
        for (std::size_t l = 0; l < n; ++l) {
            if (row[l] == 0) continue;
            if (row[l] > 0)
                for (std::size_t j = 0; j < n; ++j) out(i, j) += in(l, j);
            else
                for (std::size_t j = 0; j < n; ++j) out(i, j) -= in(l, j);
        }
    }
    return out;
}

template <class Tag>
SquareGrid<Tag> left_real(const RealMatrix& m, const SquareGrid<Tag>& in) {
    const std::size_t n = m.order();
    SquareGrid<Tag> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l) {
            const double c = m(i, l);
            if (c == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += c * in(l, j);
        }
    return out;
}

template <class OutTag, class InTag>
SquareGrid<OutTag> retag(const SquareGrid<InTag>& g) {
    return SquareGrid<OutTag>(g.order(), std::vector<double>(g.values().begin(), g.values().end()));
}

} // namespace detail

/// T = H * A * H with the unscaled ternary matrix: rows, then columns.
template <class Tag>
CoefficientGrid temp_matrix(const SquareGrid<Tag>& a, const TernaryMatrix& h) {
    if (h.order() != a.order()) throw DimensionError("image order", h.order(), a.order());
    // H symmetric: X H = (H X^T)^T.
    const auto x = detail::left_ternary(h, detail::retag<CoefficientTag>(a));
    return detail::left_ternary(h, x.transposed()).transposed();
}

template <class Tag>
CoefficientGrid temp_matrix(const SquareGrid<Tag>& a) {
    return temp_matrix(a, build_rht_matrix(a.order()));
}

/// t(i, n - j mod n): left-right flip keeping column 0.
template <class Tag>
SquareGrid<Tag> flip_cols(const SquareGrid<Tag>& t) {
    const std::size_t n = t.order();
    SquareGrid<Tag> f(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = t(i, (n - j) % n);
    return f;
}

/// t(n - i mod n, j): up-down flip keeping row 0.
template <class Tag>
SquareGrid<Tag> flip_rows(const SquareGrid<Tag>& t) {
    const std::size_t n = t.order();
    SquareGrid<Tag> f(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = t((n - i) % n, j);
    return f;
}

template <class Tag>
SquareGrid<Tag> flip_both(const SquareGrid<Tag>& t) {
    return flip_rows(flip_cols(t));
}

/// 1/2 (T + T^(c) + T^(r) - T^(cr)), summed left to right.
template <class Tag>
SquareGrid<Tag> combine_flips(const SquareGrid<Tag>& t) {
    const SquareGrid<Tag> c = flip_cols(t);
    const SquareGrid<Tag> r = flip_rows(t);
    const SquareGrid<Tag> cr = flip_rows(c);
    SquareGrid<Tag> out(t.order());
    for (std::size_t i = 0; i < t.values().size(); ++i)
        out.values()[i] = 0.5 * (t.values()[i] + c.values()[i] + r.values()[i] - cr.values()[i]);
    return out;
}

inline CoefficientGrid forward_2d(const GrayImage& a, const TernaryMatrix& h) {
    return combine_flips(temp_matrix(a, h));
}

inline CoefficientGrid forward_2d(const GrayImage& a) { return forward_2d(a, build_rht_matrix(a.order())); }

/// AA = combine_flips((1/n^2) H B H).
inline GrayImage weak_inverse_2d(const CoefficientGrid& b, const TernaryMatrix& h) {
    const std::size_t n = b.order();
    CoefficientGrid t = temp_matrix(b, h);
    const double s = (1.0 / static_cast<double>(n)) * (1.0 / static_cast<double>(n));
    for (double& x : t.values()) x *= s;
    return detail::retag<ImageTag>(combine_flips(t));
}

inline GrayImage weak_inverse_2d(const CoefficientGrid& b) { return weak_inverse_2d(b, build_rht_matrix(b.order())); }

/// combine_flips(H^-1 B H^-1) given the exact inverse (as reals). Recovers
/// the image up to floating error, since the flip combination is an
/// involution and commutes with H.
inline GrayImage exact_inverse_2d(const CoefficientGrid& b, const RealMatrix& inverse) {
    if (inverse.order() != b.order()) throw DimensionError("inverse order", b.order(), inverse.order());
    const auto x = detail::left_real(inverse, b);
    // inverse is symmetric because H is.
    const auto t = detail::left_real(inverse, x.transposed()).transposed();
    return detail::retag<ImageTag>(combine_flips(t));
}

/// 20 log10(255 / RMSE); +infinity when the images are identical.
inline double psnr(const GrayImage& original, const GrayImage& recovered) {
    const std::size_t n = original.order();
    if (recovered.order() != n) throw DimensionError("image order", n, recovered.order());
    double sum = 0.0;
    for (std::size_t i = 0; i < original.values().size(); ++i) {
        const double d = recovered.values()[i] - original.values()[i];
        sum += d * d;
    }
    const double mse = sum / (static_cast<double>(n) * static_cast<double>(n));
    const double rmse = std::sqrt(mse);
    if (rmse == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(255.0 / rmse);
}

struct RoundTrip {
    CoefficientGrid coefficients;
    GrayImage recovered;
    double psnr_db = 0.0;

    bool exact() const { return std::isinf(psnr_db); }
};

inline RoundTrip roundtrip_report(const GrayImage& a) {
    const TernaryMatrix h = build_rht_matrix(a.order());
    RoundTrip r;
    r.coefficients = forward_2d(a, h);
    r.recovered = weak_inverse_2d(r.coefficients, h);
    r.psnr_db = psnr(a, r.recovered);
    return r;
}

} // namespace rht
