#pragma once

// Add-only fast rounded Hartley transform for power-of-two lengths.
//
// For n = 2h the rounded matrix satisfies, exactly,
//   h_n(2r, k)         =  h_h(r, k mod h)
//   h_n(2r+1, k + h)   = -h_n(2r+1, k)
// so with s = v_low + v_high and d = v_low - v_high:
//   even outputs = RHT_h(s),   odd outputs = G * d,
// where G(r, c) = h_n(2r+1, c), c < h, is applied as a sparse ternary
// product. Recursing on the even half yields the embedded shorter
// transforms.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rht/core.hpp"
#include "rht/errors.hpp"

namespace rht {

struct OpCount {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;

    OpCount& operator+=(const OpCount& o) {
        additions += o.additions;
        multiplications += o.multiplications;
        return *this;
    }
    friend bool operator==(const OpCount&, const OpCount&) = default;
};

/// Arithmetic wrapper that tallies every +, -, * and / performed on it into a
/// per-thread counter. Used to measure kernels independently of their own
/// bookkeeping.
template <class T>
class Counted {
public:
    Counted() = default;
    Counted(T v) : v_(v) {} // NOLINT(google-explicit-constructor)

    T value() const noexcept { return v_; }

    static OpCount& tally() {
        thread_local OpCount t;
        return t;
    }
    static void reset() { tally() = OpCount{}; }

    Counted& operator+=(Counted o) {
        ++tally().additions;
        v_ += o.v_;
        return *this;
    }
    Counted& operator-=(Counted o) {
        ++tally().additions;
        v_ -= o.v_;
        return *this;
    }
    Counted& operator*=(Counted o) {
        ++tally().multiplications;
        v_ *= o.v_;
        return *this;
    }
    Counted& operator/=(Counted o) {
        ++tally().multiplications;
        v_ /= o.v_;
        return *this;
    }
    friend Counted operator+(Counted a, Counted b) { return a += b; }
    friend Counted operator-(Counted a, Counted b) { return a -= b; }
    friend Counted operator*(Counted a, Counted b) { return a *= b; }
    friend Counted operator/(Counted a, Counted b) { return a /= b; }
    friend Counted operator-(Counted a) {
        ++tally().additions;
        return Counted(-a.v_);
    }
    friend bool operator==(Counted a, Counted b) { return a.v_ == b.v_; }

private:
    T v_{};
};

constexpr bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

/// Immutable precomputed plan. Level 0 has size n, level l has size n >> l,
/// down to size 1.
class FastPlan {
public:
    struct Level {
        std::size_t size = 0;
        // Odd block, CSR: row r has entries [row_ptr[r], row_ptr[r+1]).
        std::vector<std::uint32_t> row_ptr;
        std::vector<std::uint32_t> cols;
        std::vector<std::uint8_t> negative;
    };

    std::size_t order() const noexcept { return levels_.empty() ? 0 : levels_.front().size; }
    std::span<const Level> levels() const noexcept { return levels_; }
    std::size_t scratch_size() const noexcept { return 3 * order(); }

    /// Sizes of the shorter transforms embedded in this one, largest first.
    std::vector<std::size_t> embedded_orders() const {
        std::vector<std::size_t> out;
        for (std::size_t l = 1; l < levels_.size(); ++l)
            if (levels_[l].size >= 2) out.push_back(levels_[l].size);
        return out;
    }

    /// Additions an execution performs; no execution needed.
    OpCount predicted_ops() const {
        OpCount c;
        for (const Level& lv : levels_) {
            if (lv.size < 2) continue;
            c.additions += lv.size;
            const std::size_t h = lv.size / 2;
            for (std::size_t r = 0; r < h; ++r) {
                const std::size_t nnz = lv.row_ptr[r + 1] - lv.row_ptr[r];
                if (nnz > 0) c.additions += nnz - 1;
            }
        }
        return c;
    }

    friend FastPlan make_plan(std::size_t n);

private:
    std::vector<Level> levels_;
};

/// Throws UnsupportedLength unless n is a power of two.
inline FastPlan make_plan(std::size_t n) {
    if (!is_power_of_two(n)) throw UnsupportedLength(n);
    FastPlan p;
    TernaryMatrix h = build_rht_matrix(n);
    for (std::size_t m = n; m >= 1; m /= 2) {
        FastPlan::Level lv;
        lv.size = m;
        if (m >= 2) {
            const std::size_t half = m / 2;
            TernaryMatrix sub = build_rht_matrix(half);
            for (std::size_t r = 0; r < half; ++r)
                for (std::size_t k = 0; k < m; ++k) {
                    if (h(2 * r, k) != sub(r, k % half))
                        throw std::logic_error("even-row identity violated at n=" + std::to_string(m));
                    if (k < half && h(2 * r + 1, k + half) != -h(2 * r + 1, k))
                        throw std::logic_error("odd-row identity violated at n=" + std::to_string(m));
                }
            lv.row_ptr.push_back(0);
            for (std::size_t r = 0; r < half; ++r) {
                // Column 0 is cas(0) = +1, so every row starts with a positive term.
                if (h(2 * r + 1, 0) != 1) throw std::logic_error("odd-block row does not start with +1");
                for (std::size_t c = 0; c < half; ++c) {
                    const int e = h(2 * r + 1, c);
                    if (e == 0) continue;
                    lv.cols.push_back(static_cast<std::uint32_t>(c));
                    lv.negative.push_back(e < 0 ? 1 : 0);
                }
                lv.row_ptr.push_back(static_cast<std::uint32_t>(lv.cols.size()));
            }
            h = std::move(sub);
        }
        p.levels_.push_back(std::move(lv));
        if (m == 1) break;
    }
    return p;
}

namespace detail {

template <bool CountOps, class T>
void run_level(std::span<const FastPlan::Level> levels, std::span<const T> in, std::span<T> out,
               std::span<T> scratch, OpCount& ops) {
    const FastPlan::Level& lv = levels.front();
    const std::size_t m = lv.size;
    if (m == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t h = m / 2;
    std::span<T> s = scratch.subspan(0, h);
    std::span<T> d = scratch.subspan(h, h);
    std::span<T> sub_out = scratch.subspan(2 * h, h);
    std::span<T> rest = scratch.subspan(3 * h);

    for (std::size_t i = 0; i < h; ++i) {
        s[i] = in[i] + in[i + h];
        d[i] = in[i] - in[i + h];
    }
    if constexpr (CountOps) ops.additions += m;

    for (std::size_t r = 0; r < h; ++r) {
        const std::uint32_t b = lv.row_ptr[r];
        const std::uint32_t e = lv.row_ptr[r + 1];
        T acc = d[lv.cols[b]];
        for (std::uint32_t q = b + 1; q < e; ++q) {
            if (lv.negative[q])
                acc -= d[lv.cols[q]];
            else
                acc += d[lv.cols[q]];
        }
        out[2 * r + 1] = acc;
        if constexpr (CountOps) ops.additions += e - b - 1;
    }

    run_level<CountOps>(levels.subspan(1), std::span<const T>(s), sub_out, rest, ops);
    for (std::size_t r = 0; r < h; ++r) out[2 * r] = sub_out[r];
}

} // namespace detail

/// Unscaled RHT of `in` into `out`, using caller-provided scratch of at least
/// plan.scratch_size() elements. Returns the executed operation count.
template <class T>
OpCount fast_rht(const FastPlan& plan, std::span<const T> in, std::span<T> out, std::span<T> scratch) {
    const std::size_t n = plan.order();
    if (in.size() != n) throw DimensionError("input length", n, in.size());
    if (out.size() != n) throw DimensionError("output length", n, out.size());
    if (scratch.size() < plan.scratch_size())
        throw DimensionError("scratch length", plan.scratch_size(), scratch.size());
    OpCount ops;
    detail::run_level<true, T>(plan.levels(), in, out, scratch, ops);
    return ops;
}

/// Same as above without bookkeeping.
template <class T>
void fast_rht_uncounted(const FastPlan& plan, std::span<const T> in, std::span<T> out, std::span<T> scratch) {
    const std::size_t n = plan.order();
    if (in.size() != n) throw DimensionError("input length", n, in.size());
    if (out.size() != n) throw DimensionError("output length", n, out.size());
    if (scratch.size() < plan.scratch_size())
        throw DimensionError("scratch length", plan.scratch_size(), scratch.size());
    OpCount unused;
    detail::run_level<false, T>(plan.levels(), in, out, scratch, unused);
}

template <class T>
std::vector<T> fast_rht(const FastPlan& plan, std::span<const T> in, OpCount* ops = nullptr) {
    std::vector<T> out(plan.order());
    std::vector<T> scratch(plan.scratch_size());
    const OpCount c = fast_rht<T>(plan, in, std::span<T>(out), std::span<T>(scratch));
    if (ops) *ops = c;
    return out;
}

inline std::pair<Spectrum, OpCount> fast_rht(const FastPlan& plan, const SignalVector& v) {
    OpCount ops;
    std::vector<double> out = fast_rht<double>(plan, v.samples(), &ops);
    return {Spectrum(std::move(out), Normalization::Unscaled), ops};
}

/// Predicted operation count of the n-point plan. Throws UnsupportedLength.
inline OpCount count_model(std::size_t n) { return make_plan(n).predicted_ops(); }

} // namespace rht
