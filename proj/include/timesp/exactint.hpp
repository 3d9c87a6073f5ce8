#pragma once

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

#include "timesp/errors.hpp"

namespace timesp::exactint {

using Int = mpz_class;

/// Prime decomposition of a positive integer: value = prod prime^exponent,
/// primes strictly increasing, empty list for value = 1.
struct Factorization {
    Int value;
    std::vector<std::pair<Int, unsigned>> factors;

    bool is_one() const { return factors.empty(); }
};

/// n = h * r with gcd(r, p) = 1 for every p in prime_support and every
/// prime of h contained in prime_support. Sign travels with h; r >= 1.
struct CoprimeSplit {
    Int value;
    Int h;
    Int r;
    std::vector<Int> prime_support;
};

/// Square integer matrix, dim <= 8 (larger sizes are out of scope).
class IntMatrix {
public:
    IntMatrix(int dim, Int fill = 0);
    static IntMatrix identity(int dim);
    static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows);

    int dim() const { return dim_; }
    Int& at(int i, int j) { return entries_[static_cast<size_t>(i) * dim_ + j]; }
    const Int& at(int i, int j) const { return entries_[static_cast<size_t>(i) * dim_ + j]; }

    bool operator==(const IntMatrix& o) const = default;

    IntMatrix mul(const IntMatrix& o) const;
    IntMatrix mul_mod(const IntMatrix& o, const Int& m) const;
    IntMatrix reduced_mod(const Int& m) const;
    IntMatrix sub(const IntMatrix& o) const;
    std::vector<Int> apply(const std::vector<Int>& v) const;

private:
    int dim_;
    std::vector<Int> entries_;
};

inline constexpr const char* kFactorDigitBound = "1e40";
// Largest input for which the fixed Miller-Rabin witness set is a proof.
extern const Int kDeterministicPrimalityBound; // 3317044064679887385961981

/// Deterministic primality for n < kDeterministicPrimalityBound.
/// Throws resource_error above the bound.
bool is_prime(const Int& n);

/// Deterministic factorization: trial division to 10^6, then Brent's rho.
/// Accepts 1 <= n <= 10^40; any cofactor whose primality cannot be proved
/// deterministically raises resource_error.
Factorization factorize(const Int& n);

/// a^e mod m, result in [0, m). Requires m >= 2, e >= 0.
Int mod_pow(const Int& a, const Int& e, const Int& m);

/// Smallest n >= 1 with a^n = 1 mod m. Requires gcd(a, m) = 1.
/// Factors the Carmichael exponent and strips prime factors.
Int multiplicative_order(const Int& a, const Int& m);

/// Carmichael function from a factorization of m.
Int carmichael(const Factorization& fm);

/// Splits n != 0 by a set of primes P: n = h * r.
CoprimeSplit split_by_primes(const Int& n, const std::vector<Int>& primes);

Int mat_det(const IntMatrix& a);
IntMatrix mat_adjugate(const IntMatrix& a);

/// A^e entrywise mod m. Requires m >= 2, e >= 0.
IntMatrix mat_pow_mod(const IntMatrix& a, const Int& e, const Int& m);

inline constexpr unsigned long kMatOrderCap = 10'000'000;

/// Smallest n >= 1 with A^n = I mod m, by iteration with a cycle cap of
/// 10^7. Requires A invertible mod m; resource_error past the cap.
Int mat_order_mod(const IntMatrix& a, const Int& m);

// --- helpers shared by the certificate generators ---

/// p-adic valuation v_p(n), n != 0.
unsigned valuation(const Int& n, const Int& p);

struct PartialFactorization {
    std::vector<std::pair<Int, unsigned>> factors; // classified (probable) primes
    std::vector<Int> hard;                         // composite cofactors left unsplit
    bool complete() const { return hard.empty(); }
};

/// Best-effort factorization without size bounds: trial division, Brent rho
/// under an iteration budget, strong probable-prime classification for the
/// leaves. Deterministic for fixed inputs. Callers must treat the result as
/// a proposal and verify whatever they derive from it.
PartialFactorization probable_factorize(const Int& n);

/// Some exponent r >= 1 with b^r = 1 mod s (r = 1 when s = 1). Minimal and
/// deterministic when s is below the primality bound; otherwise derived from
/// a probable factorization and certified by one exact mod_pow check.
Int order_exponent(const Int& b, const Int& s);

} // namespace timesp::exactint
