#pragma once

// Hartley and rounded-Hartley matrices, and the one-dimensional transforms
// built on them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rht/errors.hpp"

namespace rht {

enum class Normalization { Unscaled, Symmetric };

inline const char* to_string(Normalization n) {
    return n == Normalization::Unscaled ? "unscaled" : "symmetric";
}

/// cas(x) = cos(x) + sin(x), the Hartley kernel.
inline double cas(double x) { return std::cos(x) + std::sin(x); }

/// cas(2*pi*i*k/n) with i*k reduced mod n before the angle is formed, so that
/// equal residues give bit-identical values.
inline double cas_kernel(std::size_t i, std::size_t k, std::size_t n) {
    const auto m = static_cast<std::uint64_t>(i) * k % n;
    return cas(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
}

/// Nearest integer, ties away from zero.
inline int round_nearest(double x) { return static_cast<int>(std::round(x)); }

inline double symmetric_scale(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

class SignalVector {
public:
    SignalVector() = default;

    explicit SignalVector(std::vector<double> samples) : samples_(std::move(samples)) {
        if (samples_.empty()) throw std::invalid_argument("signal length must be >= 1");
        for (double s : samples_)
            if (!std::isfinite(s)) throw std::invalid_argument("signal samples must be finite");
    }

    std::size_t size() const noexcept { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    std::span<const double> samples() const noexcept { return samples_; }

    friend bool operator==(const SignalVector&, const SignalVector&) = default;

private:
    std::vector<double> samples_;
};

class Spectrum {
public:
    Spectrum(std::vector<double> coefficients, Normalization normalization)
        : coefficients_(std::move(coefficients)), normalization_(normalization) {}

    std::size_t size() const noexcept { return coefficients_.size(); }
    double operator[](std::size_t k) const { return coefficients_[k]; }
    std::span<const double> coefficients() const noexcept { return coefficients_; }
    Normalization normalization() const noexcept { return normalization_; }

private:
    std::vector<double> coefficients_;
    Normalization normalization_;
};

/// Dense real square matrix, row-major.
class RealMatrix {
public:
    RealMatrix() = default;
    explicit RealMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    static RealMatrix identity(std::size_t n) {
        RealMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t order() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<const double> data() const noexcept { return a_; }

    RealMatrix& operator+=(const RealMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    RealMatrix& operator-=(const RealMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    RealMatrix& operator*=(double c) {
        for (double& x : a_) x *= c;
        return *this;
    }

    friend RealMatrix operator+(RealMatrix a, const RealMatrix& b) { return a += b; }
    friend RealMatrix operator-(RealMatrix a, const RealMatrix& b) { return a -= b; }
    friend RealMatrix operator*(double c, RealMatrix a) { return a *= c; }

    friend RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
        a.check_same(b);
        const std::size_t n = a.n_;
        RealMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

private:
    void check_same(const RealMatrix& o) const {
        if (o.n_ != n_) throw DimensionError("matrix order", n_, o.n_);
    }

    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Square integer matrix, row-major; holds products of ternary matrices.
struct IntegerMatrix {
    std::size_t n = 0;
    std::vector<std::int64_t> a;

    std::int64_t operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    std::int64_t& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

/// The rounded Hartley matrix: entries round(cas(2*pi*i*k/n)) in {-1, 0, 1}.
class TernaryMatrix {
public:
    TernaryMatrix() = default;

    std::size_t order() const noexcept { return n_; }
    int operator()(std::size_t i, std::size_t k) const { return a_[i * n_ + k]; }
    std::span<const std::int8_t> row(std::size_t i) const {
        return std::span<const std::int8_t>(a_).subspan(i * n_, n_);
    }

    std::size_t nonzeros() const {
        return static_cast<std::size_t>(std::count_if(a_.begin(), a_.end(), [](auto x) { return x != 0; }));
    }

    RealMatrix to_real(Normalization norm = Normalization::Unscaled) const {
        RealMatrix m(n_);
        const double s = norm == Normalization::Symmetric ? symmetric_scale(n_) : 1.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) m(i, k) = (*this)(i, k) * s;
        return m;
    }

    friend bool operator==(const TernaryMatrix&, const TernaryMatrix&) = default;

    friend TernaryMatrix build_rht_matrix(std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<std::int8_t> a_;
};

inline RealMatrix build_dht_matrix(std::size_t n, Normalization norm = Normalization::Unscaled) {
    if (n == 0) throw std::invalid_argument("order must be >= 1");
    RealMatrix m(n);
    const double s = norm == Normalization::Symmetric ? symmetric_scale(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) m(i, k) = cas_kernel(i, k, n) * s;
    return m;
}

/// Throws std::logic_error if some |cas| value falls within 1e-9 of 1/2; such
/// a value would make the rounding ambiguous, and none can exist.
inline TernaryMatrix build_rht_matrix(std::size_t n) {
    if (n == 0) throw std::invalid_argument("order must be >= 1");
    TernaryMatrix t;
    t.n_ = n;
    t.a_.resize(n * n);
    // Entries depend only on i*k mod n.
    std::vector<std::int8_t> by_residue(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double c = cas_kernel(m, 1, n);
        if (std::abs(std::abs(c) - 0.5) < 1e-9)
            throw std::logic_error("rounding tie in cas kernel at n=" + std::to_string(n));
        by_residue[m] = static_cast<std::int8_t>(round_nearest(c));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            t.a_[i * n + k] = by_residue[static_cast<std::uint64_t>(i) * k % n];
    return t;
}

/// Exact integer square of a ternary matrix. The matrix is symmetric, so
/// entry (i, j) is the dot product of rows i and j.
inline IntegerMatrix square(const TernaryMatrix& h) {
    const std::size_t n = h.order();
    std::vector<std::int16_t> rows(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) rows[i * n + k] = static_cast<std::int16_t>(h(i, k));

    IntegerMatrix sq{n, std::vector<std::int64_t>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t* ri = rows.data() + i * n;
        for (std::size_t j = i; j < n; ++j) {
            const std::int16_t* rj = rows.data() + j * n;
            std::int32_t acc = 0;
            for (std::size_t k = 0; k < n; ++k) acc += std::int32_t{ri[k]} * std::int32_t{rj[k]};
            sq(i, j) = acc;
            sq(j, i) = acc;
        }
    }
    return sq;
}

/// A ternary matrix with its normalization tag. Symmetric transforms scale
/// every output by n^(-1/2) exactly once.
struct ScaledTransform {
    TernaryMatrix matrix;
    Normalization normalization = Normalization::Unscaled;

    std::size_t order() const noexcept { return matrix.order(); }
};

inline ScaledTransform make_transform(std::size_t n, Normalization norm) {
    return ScaledTransform{build_rht_matrix(n), norm};
}

/// out[k] = sum_i h(k, i) * v[i] using only additions and subtractions, in
/// index order. Exact for integer types.
template <class T>
void apply_ternary(const TernaryMatrix& h, std::span<const T> v, std::span<T> out) {
    const std::size_t n = h.order();
    if (v.size() != n) throw DimensionError("input length", n, v.size());
    if (out.size() != n) throw DimensionError("output length", n, out.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = h.row(k);
        T acc{};
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] > 0)
                acc += v[i];
            else if (row[i] < 0)
                acc -= v[i];
        }
        out[k] = acc;
    }
}

template <class T>
std::vector<T> apply_ternary(const TernaryMatrix& h, std::span<const T> v) {
    std::vector<T> out(h.order());
    apply_ternary<T>(h, v, std::span<T>(out));
    return out;
}

inline Spectrum apply_direct(const ScaledTransform& t, const SignalVector& v) {
    std::vector<double> out = apply_ternary<double>(t.matrix, v.samples());
    if (t.normalization == Normalization::Symmetric) {
        const double s = symmetric_scale(t.order());
        for (double& x : out) x *= s;
    }
    return Spectrum(std::move(out), t.normalization);
}

/// Dense product with a real (DHT) matrix. `norm` states how `m` was built.
inline Spectrum apply_dht(const RealMatrix& m, const SignalVector& v,
                          Normalization norm = Normalization::Unscaled) {
    const std::size_t n = m.order();
    if (v.size() != n) throw DimensionError("input length", n, v.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += m(k, i) * v[i];
        out[k] = acc;
    }
    return Spectrum(std::move(out), norm);
}

namespace detail {
inline void require_symmetric(const ScaledTransform& t) {
    if (t.normalization != Normalization::Symmetric)
        throw NormalizationError("weak inversion needs the 1/sqrt(n)-scaled transform");
}
} // namespace detail

/// Applies the scaled transform again: the transform is its own weak-inverse.
inline SignalVector weak_inverse_apply(const ScaledTransform& t, const Spectrum& s) {
    detail::require_symmetric(t);
    if (s.normalization() != Normalization::Symmetric)
        throw NormalizationError("spectrum is not 1/sqrt(n)-scaled");
    if (s.size() != t.order()) throw DimensionError("spectrum length", t.order(), s.size());
    std::vector<double> out = apply_ternary<double>(t.matrix, s.coefficients());
    const double sc = symmetric_scale(t.order());
    for (double& x : out) x *= sc;
    return SignalVector(std::move(out));
}

/// (H_s^2 - I) v, evaluated through the exact integer matrix H^2 - n I.
inline SignalVector reconstruction_error(const ScaledTransform& t, const SignalVector& v) {
    detail::require_symmetric(t);
    const std::size_t n = t.order();
    if (v.size() != n) throw DimensionError("input length", n, v.size());
    IntegerMatrix e = square(t.matrix);
    for (std::size_t i = 0; i < n; ++i) e(i, i) -= static_cast<std::int64_t>(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (e(i, k) != 0) acc += static_cast<double>(e(i, k)) * v[k];
        out[i] = acc / static_cast<double>(n);
    }
    return SignalVector(std::move(out));
}

/// Fourier spectrum from a Hartley spectrum: F_k = E_k - j O_k with
/// E_k = (V_k + V_{-k}) / 2 and O_k = (V_k - V_{-k}) / 2, indices mod n.
/// Exact for a DHT spectrum; a rough estimate when fed an RHT spectrum. The
/// output carries the input's scaling.
inline std::vector<std::complex<double>> fourier_estimate(const Spectrum& s) {
    const std::size_t n = s.size();
    std::vector<std::complex<double>> f(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = s[k];
        const double b = s[(n - k) % n];
        f[k] = {(a + b) / 2.0, -(a - b) / 2.0};
    }
    return f;
}

} // namespace rht
