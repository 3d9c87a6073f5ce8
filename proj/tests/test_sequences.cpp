#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "timesp/sequences.hpp"

using namespace timesp;
using namespace timesp::sequences;
using exactint::Int;
using exactint::mod_pow;

namespace {

// brute-force c_n, fully independent of the library's evaluation paths
Int brute_eval(const SequenceSpec& spec, unsigned long n) {
    if (const auto* g = std::get_if<Geometric>(&spec)) {
        Int r = 1;
        for (unsigned long i = 0; i < n; ++i) r *= g->q;
        return r;
    }
    if (const auto* poly = std::get_if<Polynomial>(&spec)) {
        Int acc = 0, x = 1;
        for (const Int& c : poly->poly) {
            acc += c * x;
            x *= Int(n);
        }
        return acc;
    }
    if (const auto* pe = std::get_if<PolyExp>(&spec)) {
        Int acc = 0;
        for (const auto& t : pe->terms) {
            Int f = 0, x = 1;
            for (const Int& c : t.poly) {
                f += c * x;
                x *= Int(n);
            }
            Int power = 1;
            for (unsigned long i = 0; i < n; ++i) power *= t.base;
            acc += f * power;
        }
        return acc;
    }
    const auto& lr = std::get<LinearRecurrence>(spec);
    std::vector<Int> c = lr.initial;
    for (unsigned long i = c.size(); i <= n; ++i) {
        Int next = 0;
        for (size_t j = 0; j < lr.coeffs.size(); ++j) next += lr.coeffs[j] * c[i - 1 - j];
        c.push_back(next);
    }
    return c[n];
}

SequenceSpec fibonacci() { return LinearRecurrence{{1, 1}, {0, 1}}; }

Int pow_i(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

} // namespace

TEST_CASE("eval_mod examples") {
    CHECK(eval_mod(Geometric{2}, 14, 26) == 4);
    CHECK(eval_mod(Polynomial{{0, 0, 1}}, 1'000'000'000, 7) == 1);
    CHECK(eval_mod(fibonacci(), 10, 100) == 55);
    CHECK_THROWS_AS(eval_mod(Geometric{2}, 3, 1), std::domain_error);
}

TEST_CASE("eval_mod agrees with exact evaluation mod M for n <= 2^10") {
    std::vector<SequenceSpec> specs = {
        Geometric{3},
        Polynomial{{1, -2, 0, 1}},
        PolyExp{{{{0, 1}, 2}, {{3}, 5}}}, // n*2^n + 3*5^n
        LinearRecurrence{{1, 1}, {0, 1}},
        LinearRecurrence{{2, 0, -3}, {1, -1, 2}},
    };
    std::mt19937_64 rng(7);
    for (const auto& spec : specs) {
        for (int t = 0; t < 40; ++t) {
            unsigned long n = rng() % 1024;
            Int M = Int(static_cast<unsigned long>(rng() % 998 + 2));
            Int expect;
            mpz_mod(expect.get_mpz_t(), brute_eval(spec, n).get_mpz_t(), M.get_mpz_t());
            CHECK(eval_mod(spec, Int(n), M) == expect);
            CHECK(eval_exact(spec, Int(n)) == brute_eval(spec, n));
        }
    }
}

TEST_CASE("excluded_periods examples") {
    auto r = excluded_periods(3, {Int(2)}, 1, 2);
    REQUIRE(r.size() == 1);
    CHECK(r[0].period == Int(2)); // ord(3 mod 4)

    r = excluded_periods(2, {Int(2)}, 1, 1);
    CHECK_FALSE(r[0].period.has_value()); // 2^N never 1 mod 2

    r = excluded_periods(2, {Int(3)}, 1, 1);
    CHECK(r[0].period == Int(2)); // ord(2 mod 3)

    // gamma too small: 2^1 divides 3^1 - 1
    CHECK_THROWS_AS(excluded_periods(3, {Int(2)}, 1, 1), precondition_error);
    try {
        excluded_periods(3, {Int(2)}, 1, 1);
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("q_0") != std::string::npos);
        CHECK(std::string(e.what()).find("p^1") != std::string::npos);
    }
}

TEST_CASE("certify_geometric p=3 q=2 reproduces the canonical data") {
    auto cert = certify_geometric(3, 2, 2);
    CHECK(cert.index_set.modulus == 2);
    CHECK(cert.index_set.min == 3);
    REQUIRE(cert.t_values.size() == 1);
    CHECK(cert.t_values[0] == 4); // q^a with a = gamma = 2
    REQUIRE(cert.witnesses.size() == 2);

    const auto& w3 = cert.witnesses[0];
    CHECK(w3.N == 3);
    CHECK(w3.modulus == 26);
    CHECK(*w3.a == 2);
    CHECK(*w3.r_N == 12);
    CHECK(mod_pow(2, 14, 26) == 4); // hand trace of the first step

    const auto& w5 = cert.witnesses[1];
    CHECK(w5.N == 5);
    CHECK(w5.modulus == 242);
    CHECK(*w5.r_N == 110); // ord(2 mod 121)
    for (unsigned long k = 0; k <= 50; ++k) {
        CHECK(mod_pow(2, Int(2) + Int(110) * Int(k), 242) == mod_pow(2, 2, 242));
    }
}

TEST_CASE("certify_geometric handles q a power of an overlapping prime") {
    auto cert = certify_geometric(2, 4, 3);
    CHECK(cert.index_set.modulus == 1); // no excluded periods: 2^N never 1 mod 4
    for (const auto& w : cert.witnesses) {
        for (unsigned long k = 0; k <= 50; ++k) {
            Int n = w.n_progression.nth(Int(k));
            CHECK(eval_mod(cert.spec, n, w.modulus) ==
                  eval_mod(cert.spec, *w.a, w.modulus));
        }
    }
    CHECK(verify_certificate(cert, 51).verified);
}

TEST_CASE("certify_polyexp: n*2^n at p=3") {
    PolyExp spec{{{{0, 1}, 2}}};
    auto cert = certify_polyexp(3, spec, 1);
    REQUIRE(cert.witnesses.size() == 1);
    const auto& w = cert.witnesses[0];
    CHECK(w.N == 3);
    CHECK(w.modulus == 26);
    CHECK(*w.a == 2);
    CHECK(w.n_progression.modulus == 312); // (p^N - 1) * r_N = 26 * 12
    CHECK(cert.t_values[0] == 8);          // c_2 = 2 * 4
    CHECK(eval_mod(cert.spec, 2 + 312, 26) == 8);
    CHECK(verify_certificate(cert, 30).verified);
}

TEST_CASE("degenerate poly-exp matches the geometric certificate") {
    auto geo = certify_geometric(3, 2, 2);
    auto pe = certify_polyexp(3, PolyExp{{{{1}, 2}}}, 2);
    REQUIRE(geo.witnesses.size() == pe.witnesses.size());
    CHECK(geo.t_values[0] == pe.t_values[0]);
    for (size_t i = 0; i < geo.witnesses.size(); ++i) {
        CHECK(geo.witnesses[i].N == pe.witnesses[i].N);
        CHECK(*geo.witnesses[i].a == *pe.witnesses[i].a);
        CHECK(*geo.witnesses[i].r_N == *pe.witnesses[i].r_N);
        // the poly-exp progression is the geometric one thinned by p^N - 1
        CHECK(pe.witnesses[i].n_progression.modulus ==
              geo.witnesses[i].n_progression.modulus * geo.witnesses[i].modulus);
    }
}

TEST_CASE("certify_polyexp: n^2*2^n + 3^n at p=5 verifies") {
    PolyExp spec{{{{0, 0, 1}, 2}, {{1}, 3}}};
    auto cert = certify_polyexp(5, spec, 1);
    auto report = verify_certificate(cert, 21);
    CHECK(report.verified);
    CHECK(report.per_witness[0].checked == 21);
}

TEST_CASE("certify_linrec: Fibonacci at p=2") {
    auto cert = certify_linrec(2, std::get<LinearRecurrence>(fibonacci()), 5);
    CHECK(cert.index_set.modulus == 1);
    CHECK(cert.index_set.min == 2);
    REQUIRE(cert.witnesses.size() == 5);

    const auto& w4 = cert.witnesses[2];
    CHECK(w4.N == 4);
    CHECK(w4.modulus == 15);
    CHECK(*w4.h_N == 1);
    CHECK(*w4.r_N == 15);
    CHECK(*w4.n_N == 40); // Pisano period of 15

    const auto& w6 = cert.witnesses[4];
    CHECK(w6.N == 6);
    CHECK(w6.modulus == 63);
    CHECK(*w6.n_N == 48); // lcm(pi(7) = 16, pi(9) = 24)

    // independent iteration oracle: F_{j * n_N} = 0 mod p^N - 1
    for (const auto* w : {&w4, &w6}) {
        unsigned long period = w->n_N->get_ui();
        std::vector<Int> fib = {0, 1};
        for (unsigned long i = 2; i <= 20 * period; ++i) {
            fib.push_back((fib[i - 1] + fib[i - 2]) % w->modulus);
        }
        for (unsigned long j = 0; j <= 20; ++j) {
            CHECK(fib[j * period] % w->modulus == 0);
        }
    }
    CHECK(verify_certificate(cert, 21).verified);
}

TEST_CASE("certify_linrec: one-term recurrence matches geometric shift") {
    LinearRecurrence spec{{2}, {1}}; // c_n = 2 c_{n-1}, c_0 = 1
    auto cert = certify_linrec(3, spec, 1);
    REQUIRE(cert.witnesses.size() == 1);
    const auto& w = cert.witnesses[0];
    CHECK(w.N == 3);
    CHECK(w.modulus == 26);
    CHECK(*w.h_N == 2);
    CHECK(*w.r_N == 13);
    CHECK(*w.n_N == 12); // ord(2 mod 13), the geometric step
    CHECK(cert.t_values[w.t_index] == 2);
    CHECK(verify_certificate(cert, 30).verified);
}

TEST_CASE("certify_linrec rejects a_L sharing a factor with p") {
    LinearRecurrence spec{{1, 2}, {0, 1}};
    CHECK_THROWS_AS(certify_linrec(2, spec, 1), precondition_error);
    try {
        certify_linrec(2, spec, 1);
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("gcd(a_L, p) = 1") != std::string::npos);
    }
}

TEST_CASE("certify_linrec: finite multiplier family for composite a_L") {
    LinearRecurrence spec{{12}, {1}}; // c_n = 12 c_{n-1}, a_L = 12 = 2^2 * 3
    auto cert = certify_linrec(7, spec, 1);
    // gamma = 1 + max(v_2(6), v_3(6)) = 2; two support primes
    Int bound = pow_i(3, 2 * 2);
    REQUIRE(cert.witnesses.size() == 1);
    const auto& w = cert.witnesses[0];
    CHECK(w.N == 7); // I = 6N + 1
    Int h = *w.h_N;
    CHECK(h == 6); // v_2(7^7 - 1) = v_3(7^7 - 1) = 1
    CHECK(abs(h) < bound);
    CHECK(abs(h) == gcd(abs(h), pow_i(12, 8))); // h divides a power of a_L
    CHECK(verify_certificate(cert, 15).verified);
}

TEST_CASE("mat_order_mod cap surfaces as a resource error in certify_linrec") {
    // p = 5, a_L = 12 puts the first admissible N at 37; the recurrence
    // period mod r_37 is far past the 10^7 iteration cap
    LinearRecurrence spec{{1, 12}, {1, 1}};
    CHECK_THROWS_AS(certify_linrec(5, spec, 1), resource_error);
}

TEST_CASE("verify_certificate refutes tampered certificates") {
    auto cert = certify_geometric(3, 2, 2);
    REQUIRE(verify_certificate(cert, 100).verified);

    auto tampered = cert;
    // r_N decremented consistently in both fields: structure is coherent,
    // the congruence itself must catch it
    tampered.witnesses[0].n_progression.modulus -= 1;
    tampered.witnesses[0].r_N = *tampered.witnesses[0].r_N - 1;
    auto report = verify_certificate(tampered, 100);
    CHECK_FALSE(report.verified);
    CHECK(report.per_witness[0].counterexample_k.has_value());
    CHECK_FALSE(report.first_failure.empty());

    // a lone auxiliary mutation is caught structurally
    auto aux_only = cert;
    aux_only.witnesses[0].r_N = *aux_only.witnesses[0].r_N - 1;
    CHECK_FALSE(verify_certificate(aux_only, 100).verified);

    auto tampered2 = cert;
    tampered2.t_values[0] += 1;
    CHECK_FALSE(verify_certificate(tampered2, 100).verified);

    auto empty = cert;
    empty.witnesses.clear();
    auto vac = verify_certificate(empty, 100);
    CHECK(vac.verified);
    CHECK(vac.no_witnesses);
}

TEST_CASE("generator/verifier independence across the (p, q) grid") {
    for (int p = 2; p <= 7; ++p) {
        for (int q = 2; q <= 7; ++q) {
            auto cert = certify_geometric(p, q, 2);
            CHECK(cert.index_set.modulus >= 1);
            for (const Int& h : cert.h_values) CHECK(h != 0);
            auto report = verify_certificate(cert, 100);
            CHECK(report.verified);
        }
    }
}

TEST_CASE("certify dispatch rejects polynomial specs") {
    CHECK_THROWS_WITH_AS(certify(3, Polynomial{{0, 1}}, 1),
                         doctest::Contains("asymptotics"), std::domain_error);
    CHECK(verify_certificate(certify(3, Geometric{2}, 1), 10).verified);
}
