#pragma once

// Measurements on the rounded Hartley family: n-norm, matrix period,
// quasi-equivalence and quasi-period, power-law fitting of the weak-inverse
// error, the Walsh-Hadamard column matching, and intensity diagrams.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rht/core.hpp"
#include "rht/errors.hpp"
#include "rht/fast.hpp"
#include "rht/grid.hpp"

namespace rht {

/// Frobenius norm divided by the order.
inline double n_norm(const RealMatrix& m) {
    const std::size_t n = m.order();
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (double x : m.data()) sq += x * x;
    return std::sqrt(sq) / static_cast<double>(n);
}

/// Smallest k <= max_k with A^(k+1) == A entrywise within `tol`, or nullopt.
inline std::optional<std::size_t> matrix_period(const RealMatrix& a, std::size_t max_k, double tol = 1e-9) {
    RealMatrix p = a;
    for (std::size_t k = 1; k <= max_k; ++k) {
        p = p * a;
        bool equal = true;
        for (std::size_t i = 0; i < a.data().size() && equal; ++i) {
            const double x = p.data()[i];
            if (!std::isfinite(x) || std::abs(x - a.data()[i]) > tol) equal = false;
        }
        if (equal) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Norm curve of H_s^2 - I

/// One point of the curve. When `sum_sq` is present the value is exact:
/// mu^2 = sum_sq / n^4 with sum_sq = ||H^2 - n I||_F^2 for the unscaled H.
struct NormPoint {
    std::size_t n = 0;
    double mu = 0.0;
    std::optional<std::int64_t> sum_sq;
};

class NormCurve {
public:
    NormCurve() = default;

    /// Throws std::invalid_argument unless orders strictly increase and mu is finite.
    void push_back(NormPoint p) {
        if (!points_.empty() && p.n <= points_.back().n)
            throw std::invalid_argument("norm curve orders must be strictly increasing");
        if (!std::isfinite(p.mu) || p.mu < 0.0) throw std::invalid_argument("mu must be finite and >= 0");
        points_.push_back(p);
    }

    std::span<const NormPoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const NormPoint& operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<NormPoint> points_;
};

/// mu(H_s,n^2 - I_n) by exact integer squaring.
inline NormPoint norm_point(std::size_t n) {
    const IntegerMatrix sq = square(build_rht_matrix(n));
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t e = sq(i, j) - (i == j ? static_cast<std::int64_t>(n) : 0);
            s += e * e;
        }
    const double nn = static_cast<double>(n);
    return NormPoint{n, std::sqrt(static_cast<double>(s)) / (nn * nn), s};
}

using ProgressFn = std::function<void(std::size_t)>;

/// Curve over the listed orders (sorted and deduplicated first).
inline NormCurve norm_curve(std::vector<std::size_t> orders, const ProgressFn& progress = {}) {
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    NormCurve c;
    for (std::size_t n : orders) {
        if (n == 0) throw std::invalid_argument("order must be >= 1");
        if (progress) progress(n);
        c.push_back(norm_point(n));
    }
    return c;
}

inline NormCurve norm_curve(std::size_t n_lo, std::size_t n_hi, std::size_t stride = 1,
                            const ProgressFn& progress = {}) {
    if (n_lo < 2 || n_hi < n_lo) throw std::invalid_argument("need 2 <= n_lo <= n_hi");
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    std::vector<std::size_t> orders;
    for (std::size_t n = n_lo; n <= n_hi; n += stride) orders.push_back(n);
    return norm_curve(std::move(orders), progress);
}

/// Exact mu <= bound for a point carrying sum_sq.
inline bool mu_at_most(const NormPoint& p, const mpq_class& bound) {
    if (!p.sum_sq) throw std::invalid_argument("point has no exact value");
    if (sgn(bound) < 0) return false;
    const mpz_class n4 = mpz_class(static_cast<unsigned long>(p.n)) * p.n * p.n * p.n;
    // sum_sq / n^4 <= (num/den)^2
    const mpz_class lhs = mpz_class(static_cast<long>(*p.sum_sq)) * bound.get_den() * bound.get_den();
    const mpz_class rhs = bound.get_num() * bound.get_num() * n4;
    return lhs <= rhs;
}

/// Exact mu == value (value >= 0).
inline bool mu_equals(const NormPoint& p, const mpq_class& value) {
    if (!p.sum_sq) throw std::invalid_argument("point has no exact value");
    const mpz_class n4 = mpz_class(static_cast<unsigned long>(p.n)) * p.n * p.n * p.n;
    return mpz_class(static_cast<long>(*p.sum_sq)) * value.get_den() * value.get_den() ==
           value.get_num() * value.get_num() * n4;
}

// ---------------------------------------------------------------------------
// Power-law fit

/// mu ~= a * n^b, least squares on log mu = log a + b log n.
struct FreundlichFit {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;             ///< RMS of log-domain residuals
    std::size_t points_used = 0;
    std::vector<std::size_t> excluded; ///< orders with mu == 0
};

/// Throws InsufficientData with fewer than two nonzero points.
inline FreundlichFit freundlich_fit(const NormCurve& c) {
    FreundlichFit f;
    std::vector<double> xs, ys;
    for (const NormPoint& p : c.points()) {
        if (p.mu == 0.0) {
            f.excluded.push_back(p.n);
            continue;
        }
        xs.push_back(std::log(static_cast<double>(p.n)));
        ys.push_back(std::log(p.mu));
    }
    const std::size_t m = xs.size();
    if (m < 2) throw InsufficientData("freundlich fit needs at least 2 points with mu > 0");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("freundlich fit needs at least 2 distinct orders");
    f.b = sxy / sxx;
    const double log_a = my - f.b * mx;
    f.a = std::exp(log_a);
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (log_a + f.b * xs[i]);
        rss += r * r;
    }
    f.residual = std::sqrt(rss / static_cast<double>(m));
    f.points_used = m;
    return f;
}

// ---------------------------------------------------------------------------
// Quasi-equivalence and quasi-period

struct QuasiEntry {
    std::size_t n = 0;
    double mu = 0.0;
    bool pass = false;
};

struct QuasiReport {
    std::vector<QuasiEntry> entries;
    double max_mu = 0.0;
    bool all_pass = true;

    void add(QuasiEntry e) {
        max_mu = std::max(max_mu, e.mu);
        all_pass = all_pass && e.pass;
        entries.push_back(e);
    }
};

using MatrixFamily = std::function<RealMatrix(std::size_t)>;

/// mu(A_n - B_n) <= eps for each order, in floating point.
inline QuasiReport quasi_equivalence(const MatrixFamily& a, const MatrixFamily& b,
                                     std::span<const std::size_t> orders, double eps) {
    QuasiReport r;
    for (std::size_t n : orders) {
        const double mu = n_norm(a(n) - b(n));
        r.add({n, mu, mu <= eps});
    }
    return r;
}

inline MatrixFamily identity_family() {
    return [](std::size_t n) { return RealMatrix::identity(n); };
}

namespace detail {

/// H^k for the unscaled ternary matrix, exact in int64. Throws
/// std::out_of_range when entries could overflow.
inline IntegerMatrix ternary_power(const TernaryMatrix& h, std::size_t k) {
    const std::size_t n = h.order();
    if (k == 0) {
        IntegerMatrix id{n, std::vector<std::int64_t>(n * n, 0)};
        for (std::size_t i = 0; i < n; ++i) id(i, i) = 1;
        return id;
    }
    if (k == 2) return square(h);
    const double bits = static_cast<double>(k - 1) * std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
    if (bits > 60.0) throw std::out_of_range("matrix power too large for exact evaluation");
    IntegerMatrix p{n, std::vector<std::int64_t>(n * n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = h(i, j);
    for (std::size_t step = 1; step < k; ++step) {
        IntegerMatrix next{n, std::vector<std::int64_t>(n * n, 0)};
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = h.row(i);
            for (std::size_t l = 0; l < n; ++l) {
                if (row[l] == 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (row[l] > 0)
                        next(i, j) += p(l, j);
                    else
                        next(i, j) -= p(l, j);
                }
            }
        }
        p = std::move(next);
    }
    return p;
}

/// Exact test of L <= R * sqrt(n) for rational L, integer R.
inline bool le_times_sqrt(const mpq_class& lhs, const mpz_class& r, std::size_t n) {
    const int sl = sgn(lhs);
    const int sr = sgn(r);
    if (sl <= 0 && sr >= 0) return true;
    if (sl > 0 && sr <= 0) return false;
    const mpq_class l2 = lhs * lhs;
    const mpq_class r2n = mpq_class(r * r * static_cast<unsigned long>(n));
    return sl > 0 ? l2 <= r2n : l2 >= r2n;
}

} // namespace detail

/// Evaluates mu(H_s,n^k - I_n) <= eps for each order, with an exact
/// comparison. For H^k the unscaled power with entries x and c = n^(k/2):
/// mu^2 = (sum x^2 - 2 c tr + n c^2) / (c^2 n^2).
inline QuasiReport quasi_period_check(std::span<const std::size_t> orders, std::size_t k, const mpq_class& eps) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (sgn(eps) <= 0) throw std::invalid_argument("epsilon must be > 0");
    QuasiReport r;
    for (std::size_t n : orders) {
        if (n == 0) throw std::invalid_argument("order must be >= 1");
        const IntegerMatrix p = detail::ternary_power(build_rht_matrix(n), k);
        mpz_class total = 0;
        mpz_class trace = 0;
        for (std::size_t i = 0; i < n; ++i) {
            trace += mpz_class(static_cast<long>(p(i, i)));
            for (std::size_t j = 0; j < n; ++j) {
                const mpz_class x(static_cast<long>(p(i, j)));
                total += x * x;
            }
        }
        const mpz_class nz(static_cast<unsigned long>(n));
        const mpq_class eps2 = eps * eps;
        bool pass = false;
        double mu2 = 0.0;
        if (k % 2 == 0) {
            mpz_class c;
            mpz_pow_ui(c.get_mpz_t(), nz.get_mpz_t(), k / 2);
            const mpz_class num = total - 2 * c * trace + nz * c * c;
            const mpz_class den = c * c * nz * nz;
            pass = mpq_class(num, den) <= eps2;
            mu2 = mpq_class(num, den).get_d();
        } else {
            // c = m sqrt(n); the test is T + m^2 n^2 - eps^2 m^2 n^3 <= 2 m tr sqrt(n).
            mpz_class m;
            mpz_pow_ui(m.get_mpz_t(), nz.get_mpz_t(), (k - 1) / 2);
            const mpz_class m2 = m * m;
            const mpq_class lhs = mpq_class(total + m2 * nz * nz) - eps2 * mpq_class(m2 * nz * nz * nz);
            pass = detail::le_times_sqrt(lhs, 2 * m * trace, n);
            const double c = m.get_d() * std::sqrt(static_cast<double>(n));
            const double nd = static_cast<double>(n);
            mu2 = (total.get_d() - 2.0 * c * trace.get_d() + nd * c * c) / (c * c * nd * nd);
        }
        r.add({n, std::sqrt(std::max(0.0, mu2)), pass});
    }
    return r;
}

/// Parses "p/q", an integer, or a decimal literal ("0.25", "1e-12") into an
/// exact rational. Throws std::invalid_argument.
inline mpq_class parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    mpq_class q;
    if (s.find('/') != std::string::npos) {
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
        q.canonicalize();
        return q;
    }
    std::string mant = s;
    long exp10 = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        try {
            std::size_t used = 0;
            exp10 = std::stol(s.substr(e + 1), &used);
            if (used != s.size() - e - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("bad exponent: " + s);
        }
    }
    bool negative = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        negative = mant[0] == '-';
        mant = mant.substr(1);
    }
    std::string digits;
    bool seen_dot = false;
    for (char ch : mant) {
        if (ch == '.' && !seen_dot) {
            seen_dot = true;
            continue;
        }
        if (ch < '0' || ch > '9') throw std::invalid_argument("bad number: " + s);
        digits += ch;
        if (seen_dot) --exp10;
    }
    if (digits.empty()) throw std::invalid_argument("bad number: " + s);
    mpz_class num(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    q = exp10 < 0 ? mpq_class(num, scale) : mpq_class(num * scale);
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
}

// ---------------------------------------------------------------------------
// Walsh-Hadamard matching

enum class HadamardOrdering { Paley, Sylvester, Sequency };

inline const char* to_string(HadamardOrdering o) {
    switch (o) {
    case HadamardOrdering::Paley: return "paley";
    case HadamardOrdering::Sylvester: return "sylvester";
    case HadamardOrdering::Sequency: return "sequency";
    }
    return "?";
}

/// Walsh-Hadamard matrix of order n (a power of two) in the given row order.
/// Sylvester: (-1)^popcount(i & k). Paley: Sylvester rows in bit-reversed
/// order. Sequency: rows sorted by number of sign changes.
inline IntegerMatrix hadamard_matrix(std::size_t n, HadamardOrdering ordering) {
    if (!is_power_of_two(n)) throw UnsupportedLength(n);
    auto sylvester = [](std::size_t i, std::size_t k) {
        return (std::popcount(static_cast<unsigned long long>(i & k)) % 2) ? -1 : 1;
    };
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    std::vector<std::size_t> row_of(n);
    for (std::size_t i = 0; i < n; ++i) row_of[i] = i;
    if (ordering == HadamardOrdering::Paley) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            row_of[i] = r;
        }
    } else if (ordering == HadamardOrdering::Sequency) {
        std::vector<std::size_t> changes(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k + 1 < n; ++k)
                if (sylvester(i, k) != sylvester(i, k + 1)) ++changes[i];
        std::stable_sort(row_of.begin(), row_of.end(),
                         [&](std::size_t x, std::size_t y) { return changes[x] < changes[y]; });
    }
    IntegerMatrix w{n, std::vector<std::int64_t>(n * n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) w(i, k) = sylvester(row_of[i], k);
    return w;
}

/// Bijection on {0..n-1}; mapping[k] is the rounded-Hartley column matched to
/// Walsh column k.
class ColumnPermutation {
public:
    /// Throws std::invalid_argument unless `mapping` is a bijection.
    explicit ColumnPermutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
        std::vector<bool> seen(mapping_.size(), false);
        for (std::size_t v : mapping_) {
            if (v >= mapping_.size() || seen[v]) throw std::invalid_argument("not a permutation");
            seen[v] = true;
        }
    }

    std::size_t size() const noexcept { return mapping_.size(); }
    std::size_t operator()(std::size_t k) const { return mapping_[k]; }
    std::span<const std::size_t> mapping() const noexcept { return mapping_; }

    std::size_t moved() const {
        std::size_t c = 0;
        for (std::size_t k = 0; k < mapping_.size(); ++k) c += mapping_[k] != k;
        return c;
    }

    /// Cycle notation with 1-based labels, fixed points omitted; "()" for identity.
    std::string cycles_one_indexed() const {
        std::string out;
        std::vector<bool> done(mapping_.size(), false);
        for (std::size_t s = 0; s < mapping_.size(); ++s) {
            if (done[s] || mapping_[s] == s) continue;
            out += '(';
            std::size_t k = s;
            bool first = true;
            while (!done[k]) {
                done[k] = true;
                if (!first) out += ' ';
                out += std::to_string(k + 1);
                first = false;
                k = mapping_[k];
            }
            out += ')';
        }
        return out.empty() ? "()" : out;
    }

    friend bool operator==(const ColumnPermutation&, const ColumnPermutation&) = default;

private:
    std::vector<std::size_t> mapping_;
};

/// Finds sigma with h(i, sigma(k)) == w(i, k) wherever h(i, sigma(k)) != 0,
/// by maximum bipartite matching between Walsh columns and compatible RHT
/// columns. nullopt when no perfect matching exists.
inline std::optional<ColumnPermutation> hadamard_permutation(std::size_t n, HadamardOrdering ordering) {
    if (!is_power_of_two(n)) throw UnsupportedLength(n);
    if (n > 64) throw std::invalid_argument("hadamard matching is limited to n <= 64");
    const TernaryMatrix h = build_rht_matrix(n);
    const IntegerMatrix w = hadamard_matrix(n, ordering);

    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t c = 0; c < n; ++c) {
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                if (h(i, c) != 0 && h(i, c) != w(i, k)) ok = false;
            if (ok) adj[k].push_back(c);
        }

    // Kuhn's augmenting paths.
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(n, none); // rht column -> walsh column
    std::vector<bool> visited;
    std::function<bool(std::size_t)> augment = [&](std::size_t k) {
        for (std::size_t c : adj[k]) {
            if (visited[c]) continue;
            visited[c] = true;
            if (owner[c] == none || augment(owner[c])) {
                owner[c] = k;
                return true;
            }
        }
        return false;
    };
    for (std::size_t k = 0; k < n; ++k) {
        visited.assign(n, false);
        if (!augment(k)) return std::nullopt;
    }
    std::vector<std::size_t> mapping(n);
    for (std::size_t c = 0; c < n; ++c) mapping[owner[c]] = c;
    return ColumnPermutation(std::move(mapping));
}

struct HadamardMatch {
    HadamardOrdering ordering;
    ColumnPermutation permutation;
};

/// Tries every ordering and keeps the match that moves the fewest columns
/// (ties go to Paley, then Sylvester, then Sequency).
inline std::optional<HadamardMatch> find_hadamard_permutation(std::size_t n) {
    std::optional<HadamardMatch> best;
    for (HadamardOrdering o : {HadamardOrdering::Paley, HadamardOrdering::Sylvester, HadamardOrdering::Sequency}) {
        auto p = hadamard_permutation(n, o);
        if (p && (!best || p->moved() < best->permutation.moved())) best = HadamardMatch{o, *p};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Intensity diagrams

enum class DiagramMode {
    Value,     ///< signed: -max -> 0 (black), 0 -> 128, +max -> 255 (white)
    Magnitude, ///< |x|: 0 -> 255 (white), max -> 0 (black)
};

inline GrayImage intensity_diagram(const RealMatrix& m, DiagramMode mode, bool omit_diagonal = false) {
    const std::size_t n = m.order();
    GrayImage img(n, 255.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(omit_diagonal && i == j)) peak = std::max(peak, std::abs(m(i, j)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (omit_diagonal && i == j) continue;
            const double x = peak > 0.0 ? m(i, j) / peak : 0.0;
            img(i, j) = mode == DiagramMode::Value ? std::round(127.5 * (1.0 + x))
                                                   : std::round(255.0 * (1.0 - std::abs(x)));
        }
    return img;
}

} // namespace rht
