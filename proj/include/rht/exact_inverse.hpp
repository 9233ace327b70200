#pragma once

// Exact inverse of small-integer matrices (the unscaled rounded Hartley
// matrix in particular).
//
// The adjugate and determinant are computed modulo a set of ~62-bit primes
// (Gauss-Jordan in Montgomery form), lifted to integers by CRT, and then
// checked exactly with big integers: A * adj == det * I. Enough primes are
// used to exceed twice the Hadamard bound, which bounds |det| and every
// cofactor, so the lift is unique. A matrix singular modulo more primes than
// the bound allows is singular over the rationals.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rht/core.hpp"

namespace rht {

class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(std::size_t n) : n_(n), a_(n * n) {}

    std::size_t order() const noexcept { return n_; }
    mpq_class& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const mpq_class& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    RealMatrix to_real() const {
        RealMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).get_d();
        return m;
    }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.n_ == b.n_ && a.a_ == b.a_;
    }

private:
    std::size_t n_ = 0;
    std::vector<mpq_class> a_;
};

/// inverse = adjugate / determinant, both exact.
struct AdjugateForm {
    std::size_t n = 0;
    mpz_class determinant;
    std::vector<mpz_class> adjugate; // row-major

    const mpz_class& adj(std::size_t i, std::size_t j) const { return adjugate[i * n + j]; }
};

namespace modular {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }

inline u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Every prime here lies in (2^61, 2^62).
inline constexpr int kPrimeBits = 61;

/// i-th prime below 2^62, descending.
inline u64 prime(std::size_t i) {
    static const std::vector<u64> primes = [] {
        std::vector<u64> ps;
        for (u64 c = (u64{1} << 62) - 1; ps.size() < 512; c -= 2)
            if (is_prime(c)) ps.push_back(c);
        return ps;
    }();
    return primes.at(i);
}

/// Montgomery arithmetic modulo an odd p < 2^62, R = 2^64.
class Montgomery {
public:
    explicit Montgomery(u64 p) : p_(p) {
        u64 inv = p;
        for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
        neg_inv_ = ~inv + 1;
        const u64 r = (~p + 1) % p;
        r2_ = static_cast<u64>(static_cast<u128>(r) * r % p);
    }

    u64 modulus() const noexcept { return p_; }

    u64 reduce(u128 t) const noexcept {
        const u64 m = static_cast<u64>(t) * neg_inv_;
        const u64 u = static_cast<u64>((t + static_cast<u128>(m) * p_) >> 64);
        return u >= p_ ? u - p_ : u;
    }
    u64 mul(u64 a, u64 b) const noexcept { return reduce(static_cast<u128>(a) * b); }
    u64 to(u64 a) const noexcept { return mul(a % p_, r2_); }
    u64 from(u64 a) const noexcept { return reduce(a); }
    u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    u64 neg(u64 a) const noexcept { return a == 0 ? 0 : p_ - a; }

    u64 pow(u64 a, u64 e) const noexcept {
        u64 r = to(1);
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    u64 inverse(u64 a) const noexcept { return pow(a, p_ - 2); }

private:
    u64 p_;
    u64 neg_inv_;
    u64 r2_;
};

/// det(a) mod p and adj(a) mod p (plain residues), or nullopt if a is
/// singular mod p.
inline std::optional<std::pair<u64, std::vector<u64>>> adjugate_mod(const IntegerMatrix& a, u64 p) {
    const Montgomery mg(p);
    const std::size_t n = a.n;
    const std::size_t w = 2 * n;
    std::vector<u64> x(n * w, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t v = a(i, j);
            const u64 r = v >= 0 ? static_cast<u64>(v) % p : mg.neg(static_cast<u64>(-v) % p);
            x[i * w + j] = mg.to(r);
        }
        x[i * w + n + i] = mg.to(1);
    }

    u64 det = mg.to(1);
    bool negate = false;
    std::vector<std::size_t> cols;
    cols.reserve(w);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && x[piv * w + k] == 0) ++piv;
        if (piv == n) return std::nullopt;
        if (piv != k) {
            std::swap_ranges(x.begin() + static_cast<std::ptrdiff_t>(piv * w),
                             x.begin() + static_cast<std::ptrdiff_t>((piv + 1) * w),
                             x.begin() + static_cast<std::ptrdiff_t>(k * w));
            negate = !negate;
        }
        u64* rk = x.data() + k * w;
        det = mg.mul(det, rk[k]);
        const u64 inv = mg.inverse(rk[k]);
        cols.clear();
        for (std::size_t j = k + 1; j < w; ++j) {
            if (rk[j] != 0) {
                rk[j] = mg.mul(rk[j], inv);
                cols.push_back(j);
            }
        }
        rk[k] = mg.to(1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            u64* ri = x.data() + i * w;
            const u64 f = ri[k];
            if (f == 0) continue;
            for (std::size_t j : cols) ri[j] = mg.sub(ri[j], mg.mul(f, rk[j]));
            ri[k] = 0;
        }
    }
    if (negate) det = mg.neg(det);

    std::vector<u64> adj(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) adj[i * n + j] = mg.from(mg.mul(x[i * w + n + j], det));
    return std::make_pair(mg.from(det), std::move(adj));
}

/// det(a) mod p by forward elimination (plain residue).
inline u64 determinant_mod(const IntegerMatrix& a, u64 p) {
    const Montgomery mg(p);
    const std::size_t n = a.n;
    std::vector<u64> x(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        const std::int64_t v = a.a[i];
        x[i] = mg.to(v >= 0 ? static_cast<u64>(v) % p : mg.neg(static_cast<u64>(-v) % p));
    }
    u64 det = mg.to(1);
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && x[piv * n + k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            std::swap_ranges(x.begin() + static_cast<std::ptrdiff_t>(piv * n),
                             x.begin() + static_cast<std::ptrdiff_t>((piv + 1) * n),
                             x.begin() + static_cast<std::ptrdiff_t>(k * n));
            negate = !negate;
        }
        const u64* rk = x.data() + k * n;
        det = mg.mul(det, rk[k]);
        const u64 inv = mg.inverse(rk[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            u64* ri = x.data() + i * n;
            if (ri[k] == 0) continue;
            const u64 f = mg.mul(ri[k], inv);
            for (std::size_t j = k + 1; j < n; ++j) ri[j] = mg.sub(ri[j], mg.mul(f, rk[j]));
        }
    }
    if (negate) det = mg.neg(det);
    return mg.from(det);
}

/// i-th prime below 2^26, descending.
inline u64 small_prime(std::size_t i) {
    static const std::vector<u64> primes = [] {
        std::vector<u64> ps;
        for (u64 c = (u64{1} << 26) - 1; ps.size() < 16; c -= 2)
            if (is_prime(c)) ps.push_back(c);
        return ps;
    }();
    return primes.at(i);
}

/// det(a) mod p for a prime p < 2^26, in doubles: every product of two
/// residues is below 2^52 and so exact. Vectorizes well.
inline u64 determinant_mod_small(const IntegerMatrix& a, u64 p) {
    if (p >= (u64{1} << 26)) throw std::invalid_argument("modulus must be below 2^26");
    const std::size_t n = a.n;
    const double pd = static_cast<double>(p);
    const double pinv = 1.0 / pd;
    constexpr double magic = 0x1.8p52; // x + magic - magic rounds to nearest
    std::vector<double> x(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        const std::int64_t v = a.a[i] % static_cast<std::int64_t>(p);
        x[i] = static_cast<double>(v < 0 ? v + static_cast<std::int64_t>(p) : v);
    }
    u64 det = 1;
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && x[piv * n + k] == 0.0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            std::swap_ranges(x.begin() + static_cast<std::ptrdiff_t>(piv * n),
                             x.begin() + static_cast<std::ptrdiff_t>((piv + 1) * n),
                             x.begin() + static_cast<std::ptrdiff_t>(k * n));
            negate = !negate;
        }
        const double* rk = x.data() + k * n;
        const u64 pk = static_cast<u64>(rk[k]);
        det = det * pk % p;
        const double inv = static_cast<double>(powmod(pk, p - 2, p));
        for (std::size_t i = k + 1; i < n; ++i) {
            double* ri = x.data() + i * n;
            if (ri[k] == 0.0) continue;
            double f = ri[k] * inv;
            f -= ((f * pinv + magic) - magic) * pd;
            if (f < 0.0) f += pd;
            for (std::size_t j = k + 1; j < n; ++j) {
                double y = ri[j] - f * rk[j];
                y -= ((y * pinv + magic) - magic) * pd;
                y += y < 0.0 ? pd : 0.0;
                ri[j] = y;
            }
        }
    }
    return negate ? (p - det) % p : det;
}

} // namespace modular

/// log2 of the Hadamard bound prod_i ||row_i||_2; bounds |det| and all cofactors.
inline double hadamard_bound_log2(const IntegerMatrix& a) {
    double bits = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < a.n; ++j) sq += static_cast<double>(a(i, j)) * static_cast<double>(a(i, j));
        if (sq > 1.0) bits += 0.5 * std::log2(sq);
    }
    return bits;
}

/// Whether det(a) != 0. A nonzero residue modulo any prime proves it; zero
/// residues modulo primes whose product exceeds the Hadamard bound prove
/// the opposite.
inline bool is_nonsingular(const IntegerMatrix& a) {
    for (std::size_t i = 0; i < 4; ++i)
        if (modular::determinant_mod_small(a, modular::small_prime(i)) != 0) return true;
    const double bound_bits = hadamard_bound_log2(a);
    for (std::size_t i = 0; static_cast<double>(i * modular::kPrimeBits) <= bound_bits + 1.0; ++i)
        if (modular::determinant_mod(a, modular::prime(i)) != 0) return true;
    return false;
}

/// Checks a * adj == det * I exactly.
inline bool verify_adjugate(const IntegerMatrix& a, const AdjugateForm& f) {
    const std::size_t n = a.n;
    std::vector<mpz_class> acc(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : acc) v = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t c = a(i, k);
            if (c == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const mpz_class& y = f.adj(k, j);
                if (c == 1)
                    mpz_add(acc[j].get_mpz_t(), acc[j].get_mpz_t(), y.get_mpz_t());
                else if (c == -1)
                    mpz_sub(acc[j].get_mpz_t(), acc[j].get_mpz_t(), y.get_mpz_t());
                else
                    acc[j] += mpz_class(static_cast<long>(c)) * y;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (acc[j] != (i == j ? f.determinant : mpz_class(0))) return false;
        }
    }
    return true;
}

/// Exact determinant and adjugate of an integer matrix with entries of
/// magnitude < 2^61, or nullopt when the matrix is singular. Throws
/// std::logic_error if the big-integer verification fails.
inline std::optional<AdjugateForm> adjugate_form(const IntegerMatrix& a) {
    const std::size_t n = a.n;
    if (n == 0) throw std::invalid_argument("order must be >= 1");
    const double bound_bits = hadamard_bound_log2(a);

    AdjugateForm out;
    out.n = n;
    out.adjugate.assign(n * n, mpz_class(0));
    mpz_class modulus = 1;
    double modulus_bits = 0.0;
    std::size_t singular_primes = 0;

    for (std::size_t pi = 0; modulus_bits <= bound_bits + 1.0; ++pi) {
        const modular::u64 p = modular::prime(pi);
        auto res = modular::adjugate_mod(a, p);
        if (!res) {
            ++singular_primes;
            // Distinct primes > 2^61 dividing a nonzero det can multiply to at most the bound.
            if (static_cast<double>(singular_primes * modular::kPrimeBits) > bound_bits) return std::nullopt;
            continue;
        }
        const auto& [det_p, adj_p] = *res;
        // Incremental CRT: x += M * ((r - x) * M^-1 mod p).
        const modular::u64 m_mod_p = mpz_fdiv_ui(modulus.get_mpz_t(), p);
        const modular::u64 m_inv = modular::powmod(m_mod_p, p - 2, p);
        auto lift = [&](mpz_class& x, modular::u64 r) {
            const modular::u64 xr = mpz_fdiv_ui(x.get_mpz_t(), p);
            const modular::u64 t = modular::mulmod(r >= xr ? r - xr : r + p - xr, m_inv, p);
            mpz_addmul_ui(x.get_mpz_t(), modulus.get_mpz_t(), t);
        };
        lift(out.determinant, det_p);
        for (std::size_t i = 0; i < n * n; ++i) lift(out.adjugate[i], adj_p[i]);
        modulus *= mpz_class(static_cast<unsigned long>(p));
        modulus_bits += modular::kPrimeBits;
    }

    const mpz_class half = modulus / 2;
    auto centre = [&](mpz_class& x) {
        if (x > half) x -= modulus;
    };
    centre(out.determinant);
    for (auto& x : out.adjugate) centre(x);

    if (out.determinant == 0 || !verify_adjugate(a, out))
        throw std::logic_error("exact inverse verification failed");
    return out;
}

inline IntegerMatrix to_integer(const TernaryMatrix& h) {
    IntegerMatrix m{h.order(), std::vector<std::int64_t>(h.order() * h.order())};
    for (std::size_t i = 0; i < h.order(); ++i)
        for (std::size_t j = 0; j < h.order(); ++j) m(i, j) = h(i, j);
    return m;
}

inline RationalMatrix to_rational(const AdjugateForm& f) {
    RationalMatrix r(f.n);
    for (std::size_t i = 0; i < f.n; ++i)
        for (std::size_t j = 0; j < f.n; ++j) {
            r(i, j) = mpq_class(f.adj(i, j), f.determinant);
            r(i, j).canonicalize();
        }
    return r;
}

/// Exact inverse of an integer matrix, or nullopt if singular.
inline std::optional<RationalMatrix> exact_inverse(const IntegerMatrix& a) {
    auto f = adjugate_form(a);
    if (!f) return std::nullopt;
    return to_rational(*f);
}

/// Exact inverse of the unscaled n-point rounded Hartley matrix, or nullopt
/// if it is singular. The 1/sqrt(n)-scaled inverse is this times sqrt(n).
inline std::optional<RationalMatrix> exact_inverse(std::size_t n) {
    return exact_inverse(to_integer(build_rht_matrix(n)));
}

/// (H^2 - n I) v / n in exact rationals: the weak-inverse round-trip error of
/// the scaled transform on an integer vector.
inline std::vector<mpq_class> reconstruction_error_exact(std::size_t n, std::span<const long> v) {
    if (v.size() != n) throw DimensionError("input length", n, v.size());
    const IntegerMatrix sq = square(build_rht_matrix(n));
    std::vector<mpq_class> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t c = sq(i, k) - (i == k ? static_cast<std::int64_t>(n) : 0);
            if (c != 0) acc += mpz_class(static_cast<long>(c)) * v[k];
        }
        e[i] = mpq_class(acc, static_cast<unsigned long>(n));
        e[i].canonicalize();
    }
    return e;
}

} // namespace rht
