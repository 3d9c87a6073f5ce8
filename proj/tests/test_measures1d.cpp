#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "timesp/measures1d.hpp"

using namespace timesp;
using namespace timesp::measures1d;
using exactint::Int;

namespace {

// direct complex summation over the orbit, independent of the library path
std::complex<double> co_fourier_oracle(long p, unsigned long N, long m, long a) {
    long M = 1;
    for (unsigned long i = 0; i < N; ++i) M *= p;
    M -= 1;
    std::complex<double> sum{0.0, 0.0};
    long e = ((a % M) * (m % M) % M + M) % M;
    for (unsigned long j = 0; j < N; ++j) {
        double t = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(M);
        sum += std::complex<double>{std::cos(t), std::sin(t)};
        e = e * p % M;
    }
    return sum / static_cast<double>(N);
}

double circle_dist(double x, double y) {
    double d = std::fmod(std::fabs(x - y), 1.0);
    return std::min(d, 1.0 - d);
}

MeasureExprPtr random_atomic_expr(std::mt19937_64& rng, int depth = 0) {
    int pick = static_cast<int>(rng() % (depth >= 2 ? 2 : 4));
    switch (pick) {
        case 0: {
            long p = 2 + static_cast<long>(rng() % 3);
            unsigned long N = 1 + rng() % 4;
            long M = 1;
            for (unsigned long i = 0; i < N; ++i) M *= p;
            return co(p, N, Int(static_cast<long>(rng() % static_cast<unsigned long>(M - 1))));
        }
        case 1: {
            unsigned long den = 2 + rng() % 30;
            return dirac(Rat(static_cast<unsigned long>(rng() % den), den));
        }
        case 2: {
            auto a = random_atomic_expr(rng, depth + 1);
            auto b = random_atomic_expr(rng, depth + 1);
            unsigned long u = 1 + rng() % 9;
            Rat w1(u, 10), w2(10 - u, 10);
            w1.canonicalize();
            w2.canonicalize();
            return mixture({w1, w2}, {a, b});
        }
        default: {
            return convolution({random_atomic_expr(rng, depth + 1),
                                random_atomic_expr(rng, depth + 1)});
        }
    }
}

} // namespace

TEST_CASE("fourier of the canonical CO measure") {
    auto mu = co(3, 3, 1);
    FourierValue f = fourier(mu, 4);
    REQUIRE(f.exact.has_value());
    // residues {4, 12, 10} mod 26
    auto angle = [](unsigned long num, unsigned long den) {
        Rat r(num, den);
        r.canonicalize();
        return r;
    };
    ExactAngles expect;
    expect[angle(4, 26)] = Rat(1, 3);
    expect[angle(12, 26)] = Rat(1, 3);
    expect[angle(10, 26)] = Rat(1, 3);
    CHECK(*f.exact == expect);
    CHECK(std::abs(f.approx) == doctest::Approx(0.6914).epsilon(1e-3));
    CHECK(std::abs(f.approx - co_fourier_oracle(3, 3, 1, 4)) < 1e-13);
}

TEST_CASE("total mass: fourier at 0 is exactly 1") {
    std::vector<MeasureExprPtr> exprs = {
        co(3, 3, 1),
        bernoulli(2, {Rat(7, 10), Rat(3, 10)}),
        dirac(Rat(1, 3)),
        mixture({Rat(1, 4), Rat(3, 4)}, {dirac(Rat(0)), co(2, 4, 3)}),
        convolution({co(2, 2, 1), dirac(Rat(1, 2))}),
    };
    for (const auto& e : exprs) {
        FourierValue f = fourier(e, 0);
        CHECK(f.approx.real() == 1.0);
        CHECK(f.approx.imag() == 0.0);
    }
}

TEST_CASE("uniform Bernoulli weights give Lebesgue: exact zero off 0") {
    auto leb = bernoulli(3, {Rat(1, 3), Rat(1, 3), Rat(1, 3)});
    for (long a : {1L, -5L, 9L, 1000L}) {
        FourierValue f = fourier(leb, Int(a));
        CHECK(f.approx == std::complex<double>{0.0, 0.0});
        CHECK(f.error_bound == 0.0);
    }
}

TEST_CASE("Hermitian symmetry and modulus bound") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 60; ++t) {
        auto e = random_atomic_expr(rng);
        Int a(static_cast<long>(rng() % 200) - 100);
        FourierValue fa = fourier(e, a);
        FourierValue fn = fourier(e, -a);
        CHECK(std::abs(fn.approx - std::conj(fa.approx)) <=
              2.0 * (fa.error_bound + fn.error_bound) + 1e-12);
        CHECK(std::abs(fa.approx) <= 1.0 + fa.error_bound + 1e-12);
    }
    auto b = bernoulli(3, {Rat(1, 2), Rat(3, 10), Rat(1, 5)});
    for (long a : {3L, 17L, 255L}) {
        FourierValue fa = fourier(b, Int(a));
        FourierValue fn = fourier(b, Int(-a));
        CHECK(std::abs(fn.approx - std::conj(fa.approx)) < 1e-12);
    }
}

TEST_CASE("convolution multiplicativity") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        auto e1 = random_atomic_expr(rng, 1);
        auto e2 = random_atomic_expr(rng, 1);
        Int a(static_cast<long>(rng() % 60) - 30);
        FourierValue f1 = fourier(e1, a);
        FourierValue f2 = fourier(e2, a);
        FourierValue fc = fourier(convolution({e1, e2}), a);
        double tol = f1.error_bound + f2.error_bound + fc.error_bound + 1e-12;
        CHECK(std::abs(fc.approx - f1.approx * f2.approx) <= tol);
    }
}

TEST_CASE("times-p Fourier criterion: CO angle maps shift-invariant") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        long p = 2 + static_cast<long>(rng() % 3);
        unsigned long N = 1 + rng() % 5;
        long M = 1;
        for (unsigned long i = 0; i < N; ++i) M *= p;
        auto mu = co(p, N, Int(static_cast<long>(rng() % static_cast<unsigned long>(M - 1))));
        for (long a = -100; a <= 100; ++a) {
            FourierValue fa = fourier(mu, Int(a));
            FourierValue fpa = fourier(mu, Int(a * p));
            REQUIRE(fa.exact.has_value());
            CHECK(*fa.exact == *fpa.exact);
        }
    }
}

TEST_CASE("check_invariance examples") {
    auto rep = check_invariance(*co(3, 3, 1), 50);
    CHECK(rep.invariant);
    CHECK(rep.all_exact);

    rep = check_invariance(*bernoulli(2, {Rat(7, 10), Rat(3, 10)}), 50);
    CHECK(rep.invariant);
    CHECK(rep.max_deviation < 1e-10);

    rep = check_invariance(*dirac(Rat(1, 3)), Int(2), 10);
    CHECK_FALSE(rep.invariant);
    CHECK(rep.witness_a.has_value());

    CHECK_THROWS_AS(check_invariance(*dirac(Rat(1, 3)), 10), std::domain_error);
}

TEST_CASE("CO atom masses: uniform over the orbit with multiplicity") {
    // m = 5, p = 2, N = 4: 5/15 = 1/3 has doubling period 2, each atom mass 2/4
    auto masses = co_atom_masses(COMeasure{2, 4, 5});
    REQUIRE(masses.size() == 2);
    CHECK(masses[Rat(1, 3)] == Rat(1, 2));
    CHECK(masses[Rat(2, 3)] == Rat(1, 2));

    // free orbit, prime length: masses exactly 1/N
    masses = co_atom_masses(COMeasure{2, 5, 1});
    CHECK(masses.size() == 5);
    for (const auto& [pt, mass] : masses) {
        (void)pt;
        CHECK(mass == Rat(1, 5));
    }

    std::mt19937_64 rng(14);
    for (int t = 0; t < 30; ++t) {
        long p = 2 + static_cast<long>(rng() % 4);
        unsigned long N = 1 + rng() % 6;
        long M = 1;
        for (unsigned long i = 0; i < N; ++i) M *= p;
        COMeasure mu{p, N, Int(static_cast<long>(rng() % static_cast<unsigned long>(M - 1)))};
        auto am = co_atom_masses(mu);
        Rat total = 0;
        Rat max_mass = 0;
        for (const auto& [pt, mass] : am) {
            (void)pt;
            total += mass;
            if (mass > max_mass) max_mass = mass;
        }
        CHECK(total == 1);
        CHECK(max_mass * Rat(static_cast<unsigned long>(N)) * Rat(1, static_cast<unsigned long>(am.size())) <= 1);
    }
}

TEST_CASE("exact zero test: vanishing and non-vanishing root sums") {
    // CO(3, 2, 2) at frequency 1: residues {2, 6} mod 8, i + (-i) = 0
    FourierValue f = fourier(co(3, 2, 2), 1);
    REQUIRE(f.exact.has_value());
    CHECK(std::abs(f.approx) < 1e-15);
    CHECK(exact_zero_test(*f.exact) == ZeroTest::exact_zero);

    FourierValue g = fourier(co(3, 3, 1), 4);
    CHECK(exact_zero_test(*g.exact) == ZeroTest::undecided);

    // perturbation restores mass 1/4 exactly
    auto rho_mix = mixture({Rat(1, 4), Rat(3, 4)}, {dirac(Rat(0)), co(3, 2, 2)});
    FourierValue h = fourier(rho_mix, 1);
    CHECK(h.approx.real() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(h.approx.imag()) < 1e-15);
}

TEST_CASE("build_witness on the canonical certificate") {
    auto cert = sequences::certify_geometric(3, 2, 2);
    auto report = build_witness(3, cert, 0, Rat(1, 2), 1000);
    CHECK_FALSE(report.perturbed);
    CHECK(report.t == 4);
    CHECK(report.checked_ks == 1000);
    CHECK(report.lower_bound == doctest::Approx(0.6914).epsilon(1e-3));

    auto report2 = build_witness(3, cert, 1, Rat(1, 2), 100);
    CHECK(report2.checked_ks == 100);
}

TEST_CASE("build_witness survives a vanishing target via perturbation") {
    // p = 2, q = 3 run, then the generic machinery on other witnesses
    auto cert = sequences::certify_geometric(2, 3, 2);
    auto report = build_witness(2, cert, 0, Rat(1, 2), 100);
    CHECK(report.lower_bound > 0.0);
    CHECK(report.checked_ks == 100);
}

TEST_CASE("approximate_longer_period: exact reproduction when N divides N_k") {
    COMeasure mu{2, 4, 1}; // the point 1/15, digits 0001 repeating
    auto rep = approximate_longer_period(mu, 8, 2);
    CHECK(rep.approx.m == 17); // 0b00010001
    // same measure: identical reduced angles, distance exactly zero
    CHECK(weakstar_distance(*co(2, 8, 17), *co(2, 4, 1), 30) == 0.0);
}

TEST_CASE("approximate_longer_period: digit prefix and per-j bound") {
    COMeasure mu{2, 4, 1};
    auto rep = approximate_longer_period(mu, 10, 4);
    CHECK(rep.approx.m == 68); // 0b0001000100
    CHECK(rep.per_j_range == 6);
    CHECK(rep.per_j_bound == doctest::Approx(0.125));
    double x = 1.0 / 15.0;
    double xp = 68.0 / 1023.0;
    for (unsigned long j = 0; j <= rep.per_j_range; ++j) {
        double tx = std::fmod(x * std::pow(2.0, static_cast<double>(j)), 1.0);
        double txp = std::fmod(xp * std::pow(2.0, static_cast<double>(j)), 1.0);
        CHECK(circle_dist(tx, txp) <= rep.per_j_bound + 1e-12);
    }
    CHECK_THROWS_AS(approximate_longer_period(mu, 8, 4), precondition_error);
}

TEST_CASE("approximate_longer_period: integral gap within the reported bound") {
    COMeasure mu{2, 4, 1};
    double prev_gap = 1e9;
    for (unsigned long nk : {40ul, 80ul, 160ul}) {
        auto rep = approximate_longer_period(mu, nk, 8);
        // f(x) = e^(2 pi i x): Lipschitz 2 pi in circle distance, sup norm 1
        double bound = rep.integral_bound(2.0 * std::numbers::pi, 1.0);
        double gap = std::abs(fourier(co(2, nk, rep.approx.m), 1).approx -
                              fourier(co(2, 4, 1), 1).approx);
        CHECK(gap <= bound);
        CHECK(gap <= prev_gap + 1e-15);
        prev_gap = gap;
    }
}

TEST_CASE("weakstar_distance: identity, Lebesgue vs Dirac, triangle inequality") {
    auto mu = co(3, 3, 1);
    CHECK(weakstar_distance(*mu, *mu, 25) == 0.0);

    double d = weakstar_distance(*dirac(Rat(0)), *bernoulli(2, {Rat(1, 2), Rat(1, 2)}), 20);
    CHECK(d == doctest::Approx(2.0 * (1.0 - std::ldexp(1.0, -20))).epsilon(1e-12));
    CHECK(weakstar_tail_bound(20) == doctest::Approx(4.0 * std::ldexp(1.0, -20)));

    std::mt19937_64 rng(15);
    for (int t = 0; t < 25; ++t) {
        auto a = random_atomic_expr(rng, 1);
        auto b = random_atomic_expr(rng, 1);
        auto c = random_atomic_expr(rng, 1);
        double ab = weakstar_distance(*a, *b, 16);
        double bc = weakstar_distance(*b, *c, 16);
        double ac = weakstar_distance(*a, *c, 16);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(ab == weakstar_distance(*b, *a, 16)); // symmetry
    }
}

TEST_CASE("Bernoulli truncation: halving eps moves the value at most the old bound") {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 30; ++t) {
        long p = 2 + static_cast<long>(rng() % 3);
        std::vector<Rat> theta;
        unsigned long rest = 100;
        auto hundredth = [](unsigned long u) {
            Rat r(u, 100);
            r.canonicalize();
            return r;
        };
        for (long j = 0; j < p - 1; ++j) {
            unsigned long u = 1 + rng() % (rest - static_cast<unsigned long>(p - 1 - j));
            theta.push_back(hundredth(u));
            rest -= u;
        }
        theta.push_back(hundredth(rest));
        auto b = bernoulli(p, theta);
        Int a(static_cast<long>(rng() % 5000) + 1);
        for (double eps : {1e-6, 1e-9}) {
            FourierValue coarse = fourier(*b, a, eps);
            FourierValue fine = fourier(*b, a, eps / 2);
            CHECK(std::abs(coarse.approx - fine.approx) <= coarse.error_bound);
        }
    }
}
