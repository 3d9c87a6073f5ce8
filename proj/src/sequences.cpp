#include "timesp/sequences.hpp"

#include <algorithm>
#include <sstream>

namespace timesp::sequences {

using exactint::IntMatrix;
using exactint::mod_pow;

namespace {

Int pow_int(const Int& b, const Int& e) {
    if (e < 0 || !e.fits_ulong_p()) throw resource_error("pow_int: exponent out of range");
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e.get_ui());
    return r;
}

Int canon_mod(const Int& x, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int poly_eval_mod(const std::vector<Int>& coeffs, const Int& n, const Int& M) {
    Int x = canon_mod(n, M);
    Int acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = canon_mod(acc * x + *it, M);
    return acc;
}

Int poly_eval_exact(const std::vector<Int>& coeffs, const Int& n) {
    Int acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * n + *it;
    return acc;
}

void validate(const Geometric& g) {
    if (g.q < 2) throw std::domain_error("geometric sequence requires q >= 2");
}
void validate(const PolyExp& s) {
    if (s.terms.empty()) throw std::domain_error("poly-exp sequence requires at least one term");
    for (const auto& t : s.terms)
        if (t.base < 2) throw std::domain_error("poly-exp bases must be >= 2");
}
void validate(const LinearRecurrence& s) {
    if (s.coeffs.empty() || s.coeffs.back() == 0)
        throw std::domain_error("linear recurrence requires a_L != 0");
    if (s.initial.size() != s.coeffs.size())
        throw std::domain_error("linear recurrence needs exactly L initial values");
}

// Index set N0*N + 1 starting past 1.
ArithProgression index_set_from(const Int& n0) {
    return ArithProgression::make(n0, n0 + 1);
}

// Proves, via one modular power per prime of the base, that
// q^(a + k*r_N) = q^a mod M for every k >= 0, and returns r_N.
Int certify_base(const Int& q, const exactint::Factorization& fq, const Int& a, const Int& M) {
    Int r_N = 1;
    struct Split {
        Int prime;
        Int s;
    };
    std::vector<Split> splits;
    for (const auto& [prime, b] : fq.factors) {
        unsigned val = exactint::valuation(M, prime);
        if (a * b <= val) {
            throw internal_error("certify_base: offset too small for prime " + prime.get_str());
        }
        Int s = M / pow_int(prime, val);
        r_N *= exactint::order_exponent(prime, s);
        splits.push_back({prime, s});
    }
    for (const auto& sp : splits) {
        if (sp.s > 1 && mod_pow(sp.prime, r_N, sp.s) != 1) {
            throw internal_error("certify_base: exponent failed certification for prime " +
                                 sp.prime.get_str());
        }
    }
    if (mod_pow(q, a + r_N, M) != mod_pow(q, a, M)) {
        throw internal_error("certify_base: end-to-end congruence check failed");
    }
    return r_N;
}

// gamma and N0 for one base, per the excluded-period construction.
struct BasePlan {
    exactint::Factorization fq;
    Int gamma;
    Int n0;
};

BasePlan plan_base(const Int& p, const Int& q) {
    BasePlan plan;
    plan.fq = exactint::factorize(q);
    unsigned max_b = 0;
    for (const auto& [prime, b] : plan.fq.factors) max_b = std::max(max_b, b);
    Int a0 = 1;
    for (;; ++a0) {
        bool ok = true;
        for (const auto& [prime, b] : plan.fq.factors) {
            if (pow_int(prime, a0 * b) <= p) {
                ok = false;
                break;
            }
        }
        if (ok) break;
    }
    plan.gamma = a0 * max_b;
    std::vector<Int> primes;
    for (const auto& [prime, b] : plan.fq.factors) primes.push_back(prime);
    auto excluded =
        excluded_periods(p, primes, 1, static_cast<unsigned>(plan.gamma.get_ui()));
    plan.n0 = 1;
    for (const auto& ep : excluded)
        if (ep.period) plan.n0 *= *ep.period;
    return plan;
}

std::vector<Int> first_members(const ArithProgression& prog, unsigned count) {
    std::vector<Int> out;
    for (unsigned k = 0; k < count; ++k) out.push_back(prog.nth(Int(k)));
    return out;
}

size_t intern(std::vector<Int>& values, const Int& v) {
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] == v) return i;
    values.push_back(v);
    return values.size() - 1;
}

} // namespace

ArithProgression ArithProgression::make(const Int& modulus, const Int& min) {
    if (modulus < 1) throw std::domain_error("arithmetic progression requires modulus >= 1");
    ArithProgression p;
    p.modulus = modulus;
    p.min = min;
    mpz_mod(p.residue.get_mpz_t(), min.get_mpz_t(), modulus.get_mpz_t());
    return p;
}

Int eval_mod(const SequenceSpec& spec, const Int& n, const Int& M) {
    if (M < 2) throw std::domain_error("eval_mod: modulus must be >= 2");
    if (n < 0) throw std::domain_error("eval_mod: index must be >= 0");
    return std::visit(
        [&](const auto& s) -> Int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                validate(s);
                return mod_pow(s.q, n, M);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return poly_eval_mod(s.poly, n, M);
            } else if constexpr (std::is_same_v<T, PolyExp>) {
                validate(s);
                Int acc = 0;
                for (const auto& t : s.terms) {
                    acc = canon_mod(acc + poly_eval_mod(t.poly, n, M) * mod_pow(t.base, n, M), M);
                }
                return acc;
            } else {
                validate(s);
                size_t L = s.coeffs.size();
                if (n < Int(static_cast<unsigned long>(L)))
                    return canon_mod(s.initial[n.get_ui()], M);
                IntMatrix power =
                    exactint::mat_pow_mod(companion_matrix(s), n - Int(static_cast<unsigned long>(L - 1)), M);
                std::vector<Int> col(L);
                for (size_t i = 0; i < L; ++i) col[i] = canon_mod(s.initial[L - 1 - i], M);
                return canon_mod(power.apply(col)[0], M);
            }
        },
        spec);
}

Int eval_exact(const SequenceSpec& spec, const Int& n) {
    if (n < 0) throw std::domain_error("eval_exact: index must be >= 0");
    return std::visit(
        [&](const auto& s) -> Int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                validate(s);
                return pow_int(s.q, n);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return poly_eval_exact(s.poly, n);
            } else if constexpr (std::is_same_v<T, PolyExp>) {
                validate(s);
                Int acc = 0;
                for (const auto& t : s.terms)
                    acc += poly_eval_exact(t.poly, n) * pow_int(t.base, n);
                return acc;
            } else {
                validate(s);
                size_t L = s.coeffs.size();
                if (n < Int(static_cast<unsigned long>(L))) return s.initial[n.get_ui()];
                if (n > 1'000'000) throw resource_error("eval_exact: recurrence index above 10^6");
                std::vector<Int> window = s.initial;
                for (Int i = static_cast<unsigned long>(L); i <= n; ++i) {
                    Int next = 0;
                    for (size_t j = 0; j < L; ++j) next += s.coeffs[j] * window[L - 1 - j];
                    window.erase(window.begin());
                    window.push_back(next);
                }
                return window.back();
            }
        },
        spec);
}

IntMatrix companion_matrix(const LinearRecurrence& spec) {
    validate(spec);
    int L = static_cast<int>(spec.coeffs.size());
    IntMatrix a(L);
    for (int j = 0; j < L; ++j) a.at(0, j) = spec.coeffs[j];
    for (int i = 1; i < L; ++i) a.at(i, i - 1) = 1;
    return a;
}

std::vector<ExcludedPeriod> excluded_periods(const Int& p, const std::vector<Int>& primes,
                                                    unsigned u, unsigned gamma) {
    if (p < 2) throw std::domain_error("excluded_periods: p must be >= 2");
    if (u < 1 || gamma < 1) throw std::domain_error("excluded_periods: u, gamma >= 1");
    for (size_t i = 0; i < primes.size(); ++i) {
        Int qg = pow_int(primes[i], gamma);
        for (unsigned v = 1; v <= u; ++v) {
            if ((pow_int(p, v) - 1) % qg == 0) {
                std::ostringstream msg;
                msg << "excluded_periods: q_" << i << "^gamma divides p^" << v
                    << " - 1 (q_i = " << primes[i].get_str() << ", gamma = " << gamma << ")";
                throw precondition_error(msg.str());
            }
        }
    }
    std::vector<ExcludedPeriod> out;
    for (const Int& q : primes) {
        ExcludedPeriod ep;
        ep.prime = q;
        if (gcd(p, q) == 1) {
            ep.period = exactint::multiplicative_order(p, pow_int(q, gamma));
        }
        out.push_back(ep);
    }
    return out;
}

HCertificate certify_geometric(const Int& p, const Int& q, unsigned n_witnesses) {
    if (p < 2 || q < 2) throw std::domain_error("certify_geometric: p, q must be >= 2");
    if (n_witnesses < 1) throw std::domain_error("certify_geometric: need at least one witness");
    BasePlan plan = plan_base(p, q);
    const Int a = plan.gamma;

    HCertificate cert;
    cert.p = p;
    cert.spec = Geometric{q};
    cert.index_set = index_set_from(plan.n0);
    cert.h_values = {Int(1)};
    cert.t_values = {pow_int(q, a)};

    for (const Int& N : first_members(cert.index_set, n_witnesses)) {
        Int M = pow_int(p, N) - 1;
        Int r_N = certify_base(q, plan.fq, a, M);
        PerNWitness w;
        w.N = N;
        w.modulus = M;
        w.a = a;
        w.r_N = r_N;
        w.n_progression = ArithProgression::make(r_N, a);
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

HCertificate certify_polyexp(const Int& p, const PolyExp& spec, unsigned n_witnesses) {
    if (p < 2) throw std::domain_error("certify_polyexp: p must be >= 2");
    validate(spec);
    if (n_witnesses < 1) throw std::domain_error("certify_polyexp: need at least one witness");

    std::vector<BasePlan> plans;
    Int a = 1, n0 = 1;
    for (const auto& term : spec.terms) {
        BasePlan plan = plan_base(p, term.base);
        a = std::max(a, plan.gamma);
        n0 = lcm(n0, plan.n0);
        plans.push_back(std::move(plan));
    }

    HCertificate cert;
    cert.p = p;
    cert.spec = spec;
    cert.index_set = index_set_from(n0);
    cert.h_values = {Int(1)};
    cert.t_values = {eval_exact(cert.spec, a)};

    for (const Int& N : first_members(cert.index_set, n_witnesses)) {
        Int M = pow_int(p, N) - 1;
        Int r_N = 1;
        for (size_t l = 0; l < spec.terms.size(); ++l) {
            r_N *= certify_base(spec.terms[l].base, plans[l].fq, a, M);
        }
        Int step = M * r_N;
        if (eval_mod(cert.spec, a + step, M) != canon_mod(cert.t_values[0], M)) {
            throw internal_error("certify_polyexp: spot check failed at N = " + N.get_str());
        }
        PerNWitness w;
        w.N = N;
        w.modulus = M;
        w.a = a;
        w.r_N = r_N;
        w.n_progression = ArithProgression::make(step, a);
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

HCertificate certify_linrec(const Int& p, const LinearRecurrence& spec, unsigned n_witnesses) {
    if (p < 2) throw std::domain_error("certify_linrec: p must be >= 2");
    validate(spec);
    if (n_witnesses < 1) throw std::domain_error("certify_linrec: need at least one witness");
    const Int aL = spec.coeffs.back();
    if (gcd(aL, p) != 1) {
        throw precondition_error(
            "certify_linrec: requires gcd(a_L, p) = 1 (last coefficient coprime to p)");
    }

    exactint::Factorization faL = exactint::factorize(abs(aL));
    std::vector<Int> primes;
    for (const auto& [prime, e] : faL.factors) {
        (void)e;
        primes.push_back(prime);
    }
    unsigned gamma = 1;
    for (const Int& prime : primes) {
        gamma = std::max(gamma, exactint::valuation(p - 1, prime) + 1);
    }
    Int n0 = 1;
    if (!primes.empty()) {
        for (const auto& ep : excluded_periods(p, primes, 1, gamma))
            if (ep.period) n0 *= *ep.period;
    }

    HCertificate cert;
    cert.p = p;
    cert.spec = spec;
    cert.index_set = index_set_from(n0);
    const IntMatrix comp = companion_matrix(spec);
    const Int c0 = spec.initial[0];

    for (const Int& N : first_members(cert.index_set, n_witnesses)) {
        Int M = pow_int(p, N) - 1;
        Int h_N = 1, r_N = M;
        if (!primes.empty()) {
            auto split = exactint::split_by_primes(M, primes);
            h_N = split.h;
            r_N = split.r;
            for (const Int& prime : primes) {
                if (h_N % prime == 0 && exactint::valuation(h_N, prime) >= gamma) {
                    throw internal_error("certify_linrec: valuation bound violated at N = " +
                                         N.get_str());
                }
            }
        }
        Int n_N = 1;
        if (r_N > 1) {
            n_N = exactint::mat_order_mod(comp, r_N);
        }
        // independent recomputation of a prefix of the claim
        for (unsigned long j = 1; j <= 5; ++j) {
            Int lhs = canon_mod(h_N * eval_mod(cert.spec, Int(j) * n_N, M), M);
            if (lhs != canon_mod(h_N * c0, M)) {
                throw internal_error("certify_linrec: congruence self-check failed at N = " +
                                     N.get_str());
            }
        }
        PerNWitness w;
        w.N = N;
        w.modulus = M;
        w.t_index = intern(cert.t_values, h_N * c0);
        w.h_index = intern(cert.h_values, h_N);
        w.h_N = h_N;
        w.r_N = r_N;
        w.n_N = n_N;
        w.n_progression = ArithProgression::make(n_N, 0);
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

HCertificate certify(const Int& p, const SequenceSpec& spec, unsigned n_witnesses) {
    return std::visit(
        [&](const auto& s) -> HCertificate {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return certify_geometric(p, s.q, n_witnesses);
            } else if constexpr (std::is_same_v<T, PolyExp>) {
                return certify_polyexp(p, s, n_witnesses);
            } else if constexpr (std::is_same_v<T, LinearRecurrence>) {
                return certify_linrec(p, s, n_witnesses);
            } else {
                throw std::domain_error(
                    "certify: polynomial sequences carry no congruence certificate; their "
                    "Fourier averages vanish by equidistribution -- use the asymptotics "
                    "module (cesaro) instead");
            }
        },
        spec);
}

VerifyReport verify_certificate(const HCertificate& cert, unsigned long k_max) {
    if (k_max < 1) throw std::domain_error("verify_certificate: k_max must be >= 1");
    VerifyReport report;
    if (cert.witnesses.empty()) {
        report.verified = true;
        report.no_witnesses = true;
        report.first_failure = "no witnesses";
        return report;
    }
    bool all_ok = true;
    for (const auto& w : cert.witnesses) {
        WitnessCheck check;
        check.N = w.N;
        auto fail = [&](const std::string& why, std::optional<Int> k = std::nullopt) {
            check.ok = false;
            check.detail = why;
            check.counterexample_k = std::move(k);
            if (report.first_failure.empty()) {
                report.first_failure = "N = " + w.N.get_str() + ": " + why;
            }
        };
        // structural consistency of the stored auxiliary data with the
        // claimed progression, per sequence family
        auto aux_consistent = [&]() -> const char* {
            if (cert.index_set.modulus < 1) return "index set not a progression";
            Int res;
            mpz_mod(res.get_mpz_t(), w.N.get_mpz_t(), cert.index_set.modulus.get_mpz_t());
            if (res != cert.index_set.residue || w.N < cert.index_set.min) {
                return "witness N outside the certified index set";
            }
            if (std::holds_alternative<Geometric>(cert.spec)) {
                if (!w.a || !w.r_N) return "geometric witness missing a / r_N";
                if (w.n_progression.min != *w.a) return "progression offset differs from a";
                if (w.n_progression.modulus != *w.r_N) {
                    return "progression step differs from r_N";
                }
            } else if (std::holds_alternative<PolyExp>(cert.spec)) {
                if (!w.a || !w.r_N) return "poly-exp witness missing a / r_N";
                if (w.n_progression.min != *w.a) return "progression offset differs from a";
                if (w.n_progression.modulus != w.modulus * *w.r_N) {
                    return "progression step differs from (p^N - 1) r_N";
                }
            } else if (std::holds_alternative<LinearRecurrence>(cert.spec)) {
                if (!w.n_N || !w.h_N || !w.r_N) return "recurrence witness missing n_N/h_N/r_N";
                if (w.n_progression.min != 0) return "recurrence progression must start at 0";
                if (w.n_progression.modulus != *w.n_N) {
                    return "progression step differs from n_N";
                }
                if (*w.h_N * *w.r_N != w.modulus) return "h_N r_N differs from p^N - 1";
                if (*w.h_N != cert.h_values[w.h_index]) return "h_N differs from indexed h";
            }
            return nullptr;
        };
        if (w.N < 1 || !w.N.fits_ulong_p()) {
            fail("witness N out of range");
        } else {
            Int M = pow_int(cert.p, w.N) - 1;
            if (M < 2) {
                fail("modulus p^N - 1 below 2");
            } else if (w.modulus != M) {
                fail("stored modulus differs from p^N - 1");
            } else if (w.t_index >= cert.t_values.size() || w.h_index >= cert.h_values.size()) {
                fail("witness indexes outside t/h tables");
            } else if (cert.h_values[w.h_index] == 0) {
                fail("h value is zero");
            } else if (w.n_progression.modulus < 1 || w.n_progression.min < 0) {
                fail("malformed n-progression");
            } else if (const char* why = aux_consistent()) {
                fail(why);
            } else {
                const Int h = cert.h_values[w.h_index];
                const Int target = canon_mod(cert.t_values[w.t_index], M);
                for (unsigned long k = 0; k < k_max; ++k) {
                    Int n = w.n_progression.nth(Int(k));
                    Int lhs = canon_mod(h * eval_mod(cert.spec, n, M), M);
                    if (lhs != target) {
                        std::ostringstream why;
                        why << "congruence fails at k = " << k << " (n = " << n.get_str() << ")";
                        fail(why.str(), Int(k));
                        break;
                    }
                    ++check.checked;
                }
            }
        }
        all_ok = all_ok && check.ok;
        report.per_witness.push_back(std::move(check));
    }
    report.verified = all_ok;
    return report;
}

} // namespace timesp::sequences
