#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "timesp/asymptotics.hpp"

using namespace timesp;
using namespace timesp::asymptotics;
using exactint::Int;

namespace {

Rat rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

bool is_square(unsigned long n) {
    unsigned long r = static_cast<unsigned long>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

// independent run-length rescan
DigitStats stats_oracle(unsigned long m, unsigned long p) {
    DigitStats st;
    std::vector<unsigned> digits;
    while (m > 0) {
        digits.insert(digits.begin(), static_cast<unsigned>(m % p));
        m /= p;
    }
    size_t i = 0;
    while (i < digits.size()) {
        size_t j = i;
        while (j < digits.size() && digits[j] == digits[i]) ++j;
        st.R++;
        if (digits[i] == 0) st.R0++;
        else if (digits[i] == p - 1) st.Rp1++;
        else st.Nmid += j - i;
        i = j;
    }
    st.psi = st.R0 + st.Rp1 + st.Nmid;
    return st;
}

} // namespace

TEST_CASE("digit_stats examples") {
    auto st = digit_stats(5, 2); // 101
    CHECK(st.R0 == 1);
    CHECK(st.Rp1 == 2);
    CHECK(st.Nmid == 0);
    CHECK(st.psi == 3);
    CHECK(st.R == 3);

    st = digit_stats(0, 2);
    CHECK(st.psi == 0);
    CHECK(st.R == 0);

    st = digit_stats(5, 3); // 12
    CHECK(st.R0 == 0);
    CHECK(st.Rp1 == 1);
    CHECK(st.Nmid == 1);
    CHECK(st.psi == 2);

    // powers of the base: digit 1 then a zero block
    for (int k = 1; k <= 10; ++k) {
        auto pk = digit_stats(Int(1) << k, 2);
        CHECK(pk.psi == 2);
    }
}

TEST_CASE("digit_stats invariants against the rescan oracle") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 500; ++t) {
        unsigned long p = 2 + rng() % 5;
        unsigned long m = rng() % 1'000'000 + 1;
        auto st = digit_stats(Int(m), Int(p));
        auto oracle = stats_oracle(m, p);
        CHECK(st.R0 == oracle.R0);
        CHECK(st.Rp1 == oracle.Rp1);
        CHECK(st.Nmid == oracle.Nmid);
        CHECK(st.psi == oracle.psi);
        CHECK(st.R == oracle.R);
        CHECK(st.psi >= 1);
        if (p == 2) CHECK(st.psi == st.R);

        // appending a 0 merges into an existing trailing 0-block
        if (m % p == 0) {
            CHECK(digit_stats(Int(m) * Int(p), Int(p)).psi == st.psi);
        } else {
            CHECK(digit_stats(Int(m) * Int(p), Int(p)).R0 == st.R0 + 1);
        }
    }
}

TEST_CASE("decay_scan: bracket positivity and determinism") {
    auto scan = decay_scan(2, {rat(7, 10), rat(3, 10)}, 1, 1 << 10);
    CHECK(scan.min_ratio > 0.0);
    CHECK(scan.max_ratio < 1e9);
    CHECK(scan.c1 <= scan.min_ratio);
    CHECK(scan.c2 >= scan.max_ratio);
    CHECK(scan.rows.size() == (1 << 10));

    auto rerun = decay_scan(2, {rat(7, 10), rat(3, 10)}, 1, 1 << 10);
    CHECK(rerun.min_ratio == scan.min_ratio); // bit-for-bit
    CHECK(rerun.max_ratio == scan.max_ratio);

    // doubling the range keeps ratios positive
    auto wide = decay_scan(2, {rat(7, 10), rat(3, 10)}, 1, 1 << 11);
    CHECK(wide.min_ratio > 0.0);
}

TEST_CASE("decay_scan hypothesis checks") {
    CHECK_THROWS_AS(decay_scan(2, {rat(1, 2), rat(1, 2)}, 1, 16), precondition_error);
    // Q(z) = 2/5 + z/5 + 2z^2/5 vanishes on the circle at cos t = -1/4
    CHECK_THROWS_AS(decay_scan(3, {rat(2, 5), rat(1, 5), rat(2, 5)}, 1, 16),
                    precondition_error);
    // theta_0 barely above 1/2 passes without the grid
    auto scan = decay_scan(3, {rat(51, 100), rat(29, 100), rat(1, 5)}, 1, 64);
    CHECK(scan.min_ratio > 0.0);
}

TEST_CASE("rank correlation of psi against -log|mu_hat|: pinned regression value") {
    auto scan = decay_scan(2, {rat(7, 10), rat(3, 10)}, 1, 1 << 12);
    std::vector<double> psi, neglog;
    for (const auto& row : scan.rows) {
        psi.push_back(static_cast<double>(row.stats.psi));
        neglog.push_back(-std::log(row.abs_fourier));
    }
    // measured once and pinned; the heavy psi ties keep Spearman well under 1
    double corr = rank_correlation(psi, neglog);
    CHECK(corr == doctest::Approx(0.762892).epsilon(1e-4));
    CHECK(corr > 0.7);

    std::vector<double> xs = {1, 2, 3, 4, 5}, ys = {2, 4, 6, 8, 10};
    CHECK(rank_correlation(xs, ys) == doctest::Approx(1.0));
    std::vector<double> yr = {10, 8, 6, 4, 2};
    CHECK(rank_correlation(xs, yr) == doctest::Approx(-1.0));
}

TEST_CASE("extract_density1: exact convergence takes every index") {
    CoefficientProvider data;
    data.length = 10'000;
    data.a_cap = 8;
    data.coeff = [](unsigned long, long a) {
        return a == 0 ? std::complex<double>{1.0, 0.0} : std::complex<double>{0.0, 0.0};
    };
    auto target = [](long a) {
        return a == 0 ? std::complex<double>{1.0, 0.0} : std::complex<double>{0.0, 0.0};
    };
    auto result = extract_density1(data, target, 5);
    CHECK(result.achieved_k == 5);
    for (const auto& s : result.scales) CHECK(s.fraction == 1.0);
    // greedy-minimal: N_k exactly at the growth lower bound
    CHECK(result.scales[0].N_k == 1);
    CHECK(result.scales[1].N_k == 2);
    CHECK(result.scales[2].N_k == 8);
    CHECK(result.scales[3].N_k == 64);
    CHECK(result.scales[4].N_k == 1024);
    for (unsigned long n = 1; n <= 1024; ++n) CHECK(result.in_D[n]);
}

TEST_CASE("extract_density1: squares as the bad set") {
    CoefficientProvider data;
    data.length = 5'000;
    data.a_cap = 8;
    data.coeff = [](unsigned long n, long a) {
        double bump = (a == 1 && is_square(n)) ? 1.0 : 0.0;
        return std::complex<double>{bump, 0.0};
    };
    auto target = [](long) { return std::complex<double>{0.0, 0.0}; };
    auto result = extract_density1(data, target, 4);
    REQUIRE(result.achieved_k == 4);

    // recount independently at every scale
    unsigned long prev = 0;
    for (const auto& s : result.scales) {
        unsigned long count = 0;
        for (unsigned long n = 1; n <= s.N_k; ++n)
            if (!is_square(n)) ++count;
        CHECK(count == s.qualifying);
        CHECK((count << s.k) >= s.N_k * ((1ul << s.k) - 1)); // the displayed inequality
        if (prev > 0) CHECK(s.N_k >= prev * (1ul << (s.k - 1)));
        prev = s.N_k;
    }
    // D avoids the squares
    for (unsigned long n = 1; n <= result.scales.back().N_k; ++n) {
        if (result.in_D[n]) CHECK_FALSE(is_square(n));
    }
}

TEST_CASE("extract_density1: adversarial alternating blocks stall at scale 1") {
    CoefficientProvider data;
    data.length = 1 << 12;
    data.a_cap = 4;
    data.coeff = [](unsigned long n, long a) {
        int block = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
        double bad = (a == 1 && block % 2 == 1) ? 1.0 : 0.0;
        return std::complex<double>{bad, 0.0};
    };
    auto target = [](long) { return std::complex<double>{0.0, 0.0}; };
    auto result = extract_density1(data, target, 8);
    CHECK(result.achieved_k < 8); // partial result, no error
}

TEST_CASE("cesaro_fourier examples") {
    auto d0 = measures1d::dirac(Rat(0));
    for (unsigned long N : {1ul, 7ul, 50ul}) {
        auto avg = cesaro_fourier(*d0, sequences::Polynomial{{0, 1}}, 1, N);
        CHECK(avg.value.real() == doctest::Approx(1.0).epsilon(1e-14));
    }

    // c_n = n against a Dirac at 1/7: geometric sum closed form
    auto d7 = measures1d::dirac(rat(1, 7));
    for (unsigned long N : {5ul, 20ul, 70ul}) {
        auto avg = cesaro_fourier(*d7, sequences::Polynomial{{0, 1}}, 1, N);
        std::complex<double> omega = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);
        std::complex<double> expect =
            (1.0 - std::pow(omega, static_cast<double>(N))) /
            (1.0 - omega) / static_cast<double>(N);
        CHECK(std::abs(avg.value - expect) < 1e-12);
        // |1 - omega^N| <= 2
        CHECK(std::abs(avg.value) <= 2.0 / (static_cast<double>(N) * std::abs(1.0 - omega)) + 1e-12);
    }

    // Bernoulli decay along 2^n beats the n = 0 term
    auto b = measures1d::bernoulli(3, {rat(1, 2), rat(3, 10), rat(1, 5)});
    auto avg = cesaro_fourier(*b, sequences::Geometric{2}, 1, 64);
    double single = std::abs(measures1d::fourier(b, 1).approx);
    CHECK(std::abs(avg.value) < single);

    auto data_avg = cesaro_fourier(std::vector<std::complex<double>>{{1, 0}, {0, 1}});
    CHECK(data_avg.value == std::complex<double>{0.5, 0.5});
}

TEST_CASE("word_density examples") {
    auto w = word_density(2, 3, 1, {0}, 50);
    CHECK(w.total == 50);
    CHECK(w.hits == 48); // 3^0 = 1 and 3^1 = 11 have no zero digit
    CHECK(w.fraction == doctest::Approx(0.96));

    // digits of 2^n are 1 followed by zeros: '11' never occurs
    w = word_density(2, 2, 1, {1, 1}, 40);
    CHECK(w.hits == 0);

    // word longer than the digits of a * q^0 only misses the n = 0 term
    w = word_density(2, 3, 1, {1, 0, 0}, 30);
    CHECK(w.hits <= 29);

    CHECK_THROWS_AS(word_density(2, 3, 1, {2}, 10), std::domain_error);
    CHECK_THROWS_AS(word_density(2, 3, 0, {1}, 10), std::domain_error);
}
