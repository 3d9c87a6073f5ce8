#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "timesp/exactint.hpp"

namespace timesp::sequences {

using exactint::Int;

// Symbolic sequence families. Coefficient vectors are ascending-degree.
struct Geometric {
    Int q; // c_n = q^n, q >= 2
};
struct PolyExpTerm {
    std::vector<Int> poly; // f_l
    Int base;              // q_l >= 2
};
struct PolyExp {
    std::vector<PolyExpTerm> terms; // c_n = sum_l f_l(n) q_l^n
};
struct LinearRecurrence {
    std::vector<Int> coeffs;  // a_1..a_L, a_L != 0
    std::vector<Int> initial; // c_0..c_{L-1}
};
struct Polynomial {
    std::vector<Int> poly; // c_n = f(n)
};

using SequenceSpec = std::variant<Geometric, PolyExp, LinearRecurrence, Polynomial>;

/// { min + k*modulus : k >= 0 }, modulus > 0, residue = min mod modulus.
struct ArithProgression {
    Int modulus;
    Int residue;
    Int min;

    Int nth(const Int& k) const { return min + k * modulus; }
    static ArithProgression make(const Int& modulus, const Int& min);
};

struct PerNWitness {
    Int N;
    Int modulus; // p^N - 1
    size_t t_index = 0;
    size_t h_index = 0;
    ArithProgression n_progression{1, 0, 0};
    std::optional<Int> a;   // exponent offset (geometric / poly-exp)
    std::optional<Int> r_N; // exponent step factor
    std::optional<Int> n_N; // recurrence period mod r_N
    std::optional<Int> h_N; // multiplier for this N
};

/// Checkable witness data: for every stored N, h * c_n = t mod (p^N - 1)
/// along the whole n-progression. Generators prove the full claim before
/// emitting; verify_certificate rechecks prefixes independently.
struct HCertificate {
    Int p;
    SequenceSpec spec;
    std::vector<Int> t_values;
    std::vector<Int> h_values;
    ArithProgression index_set;
    std::vector<PerNWitness> witnesses;
};

/// c_n mod M for arbitrary-precision n. Geometric via modular powering,
/// polynomials via reduced-argument Horner, recurrences via companion-matrix
/// powers applied to the initial column.
Int eval_mod(const SequenceSpec& spec, const Int& n, const Int& M);

/// c_n as an exact integer; n capped at 10^6 steps for recurrences.
Int eval_exact(const SequenceSpec& spec, const Int& n);

exactint::IntMatrix companion_matrix(const LinearRecurrence& spec);

struct ExcludedPeriod {
    Int prime;
    std::optional<Int> period; // nullopt when no power of p is 1 mod q^gamma
};

/// For N outside the union of period multiples, p^N != 1 mod q_i^gamma.
/// Precondition (checked): q_i^gamma never divides p^v - 1 for v <= u.
std::vector<ExcludedPeriod> excluded_periods(const Int& p, const std::vector<Int>& primes,
                                                    unsigned u, unsigned gamma);

HCertificate certify_geometric(const Int& p, const Int& q, unsigned n_witnesses);
HCertificate certify_polyexp(const Int& p, const PolyExp& spec, unsigned n_witnesses);
HCertificate certify_linrec(const Int& p, const LinearRecurrence& spec, unsigned n_witnesses);

/// Dispatch on the spec family. Polynomial specs are rejected: they carry no
/// congruence certificate and belong to the Cesaro averaging tooling
/// (asymptotics module).
HCertificate certify(const Int& p, const SequenceSpec& spec, unsigned n_witnesses);

struct WitnessCheck {
    Int N;
    unsigned long checked = 0;
    bool ok = true;
    std::optional<Int> counterexample_k;
    std::string detail;
};

struct VerifyReport {
    bool verified = false;
    bool no_witnesses = false;
    std::vector<WitnessCheck> per_witness;
    std::string first_failure;
};

/// Recomputes every claimed congruence for the first k_max progression
/// indices of each witness, using only eval_mod / mod_pow. Trusts no
/// generator-derived field beyond what it rechecks.
VerifyReport verify_certificate(const HCertificate& cert, unsigned long k_max);

} // namespace timesp::sequences
