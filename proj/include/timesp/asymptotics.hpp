#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "timesp/exactint.hpp"
#include "timesp/measures1d.hpp"
#include "timesp/sequences.hpp"

namespace timesp::asymptotics {

using exactint::Int;
using Rat = mpq_class;

/// Run statistics of the base-p expansion (no leading zeros; m = 0 has the
/// empty expansion). psi = R0 + Rp1 + Nmid governs Bernoulli Fourier decay.
struct DigitStats {
    Int m;
    Int p;
    unsigned long R0 = 0;   // maximal blocks of 0
    unsigned long Rp1 = 0;  // maximal blocks of p-1
    unsigned long Nmid = 0; // digits other than 0 and p-1
    unsigned long psi = 0;
    unsigned long R = 0; // all maximal blocks
};

DigitStats digit_stats(const Int& m, const Int& p);

struct DecayRow {
    unsigned long m = 0;
    DigitStats stats;
    double abs_fourier = 0.0;
    double neg_log_ratio = 0.0; // -log|mu_hat(m)| / psi(m)
    double error_bound = 0.0;
};

struct DecayScan {
    Int p;
    std::vector<Rat> theta;
    unsigned long m_min = 1, m_max = 1;
    double min_ratio = 0.0, max_ratio = 0.0;
    double c1 = 0.0, c2 = 0.0; // outward-rounded bracket constants
    std::vector<DecayRow> rows;
};

/// Requires theta_0 > 1/2 or a certified grid check that Q_theta does not
/// vanish on the circle; scans -log|mu_hat(m)| / psi(m) over [m_min, m_max].
DecayScan decay_scan(const Int& p, const std::vector<Rat>& theta, unsigned long m_min,
                     unsigned long m_max);

/// Spearman rank correlation with average ranks on ties.
double rank_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// Lazily indexed family of coefficient rows, n = 1..length.
struct CoefficientProvider {
    unsigned long length = 0;
    long a_cap = 0;
    std::function<std::complex<double>(unsigned long n, long a)> coeff;
};

struct ExtractionScale {
    unsigned k = 0;
    unsigned long N_k = 0;
    unsigned long qualifying = 0; // #{1 <= n <= N_k qualifying at scale k}
    double fraction = 0.0;
};

struct ExtractionResult {
    std::vector<ExtractionScale> scales;
    unsigned achieved_k = 0;
    std::vector<bool> in_D; // indexed 1..scanned
    unsigned long scanned = 0;
};

/// Greedily finds the smallest N_1 < N_2 < ... with N_{k+1} >= 2^k N_k and
/// (1/N_k) #{n <= N_k : |coeff(n,a) - target(a)| < 2^-k for |a| <= k}
/// >= 1 - 2^-k; D collects the qualifying indices per scale band. Running
/// out of data yields a partial result, not an error.
ExtractionResult extract_density1(const CoefficientProvider& data,
                                  const std::function<std::complex<double>(long a)>& target,
                                  unsigned k_max);

struct CesaroValue {
    std::complex<double> value{0.0, 0.0};
    double error_bound = 0.0;
};

/// (1/N) sum_{n < N} fourier(expr, h * c_n).
CesaroValue cesaro_fourier(const measures1d::MeasureExpr& expr,
                           const sequences::SequenceSpec& spec, const Int& h, unsigned long N,
                           double eps = measures1d::kDefaultBernoulliEps);

/// Plain average of supplied coefficient data.
CesaroValue cesaro_fourier(const std::vector<std::complex<double>>& data);

struct WordDensity {
    unsigned long hits = 0;
    unsigned long total = 0;
    double fraction = 0.0;
};

/// Fraction of n < N for which `word` occurs as a digit substring of
/// |a| * q^n written in base p.
WordDensity word_density(const Int& p, const Int& q, const Int& a,
                         const std::vector<unsigned>& word, unsigned long N);

/// Base-p digits of |m|, most significant first; empty for m = 0.
std::vector<unsigned> digits_base_p(const Int& m, const Int& p);

} // namespace timesp::asymptotics
