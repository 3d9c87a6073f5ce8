#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "timesp/exactint.hpp"
#include "timesp/measures1d.hpp"
#include "timesp/sequences.hpp"

namespace timesp::toral {

using exactint::Int;
using exactint::IntMatrix;
using Rat = mpq_class;

/// Point of the d-torus with rational coordinates reduced into [0,1).
struct RationalTorusPoint {
    std::vector<Rat> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    bool operator==(const RationalTorusPoint& o) const = default;
};

RationalTorusPoint reduce_mod_1(std::vector<Rat> coords);

/// Uniform measure on the T_A orbit of a rational N-periodic point:
/// (1/N) sum of deltas at A^j x, j < N. Construction checks A^N x = x mod 1.
struct ToralCOMeasure {
    IntMatrix A;
    unsigned long N;
    RationalTorusPoint x;
};

ToralCOMeasure make_toral_co(const IntMatrix& A, unsigned long N, RationalTorusPoint x);

/// Orbit points A^j x mod 1 for j = 0..N-1, exact.
std::vector<RationalTorusPoint> toral_orbit(const ToralCOMeasure& mu);

enum class Verdict { pass, fail, indeterminate };

struct HyperbolicityReport {
    std::vector<Int> charpoly; // monic, ascending degree, exact
    bool squarefree = false;
    std::vector<double> eigen_moduli;
    Verdict verdict = Verdict::indeterminate;
};

/// Exact characteristic polynomial + squarefree test (squarefree implies
/// diagonalizable), numeric eigenvalue moduli. pass needs squarefree and
/// every modulus farther than tol from 1; moduli numerically on the unit
/// circle fail; the band in between is indeterminate.
HyperbolicityReport hyperbolicity_check(const IntMatrix& A, double tol = 1e-9);

struct PeriodSetReport {
    unsigned gamma = 1;
    sequences::ArithProgression index_set{1, 0, 0};
    std::vector<Int> first_members; // det(A^N - I) checked exactly for these
};

/// gamma with p_i^gamma never dividing det(A^N - I) on the index set
/// n_0*N + 1; the first `count` members are verified by exact determinants.
PeriodSetReport bounded_valuation_periods(const IntMatrix& A, const std::vector<Int>& primes,
                                unsigned count);

enum class SplitHypothesis { coprime_dets, triangular, unimodular_b, none };

struct SplitWitness {
    unsigned long N = 1;
    Int q_N; // det(A^N - I)
    Int h_N;
    Int r_N;
    Int m_N; // B^(m_N) = I mod r_N
    Int h0;  // multiplier used in Fourier claims (per-N value)
    SplitHypothesis hypothesis = SplitHypothesis::none;
};

/// Splits q_N = det(A^N - I) as h_N * r_N against the primes of det B and
/// certifies h_N * B^(m_N) = h_N * I mod q_N. Requires assumption (a) to
/// pass; records which hypothesis route (if any) applies.
SplitWitness determinant_split(const IntMatrix& A, const IntMatrix& B, unsigned long N);

enum class SelectionMode { direct_scan, even_index };

struct AdmissibleReport {
    unsigned gamma = 1;
    std::vector<unsigned long> accepted;
};

/// N for which every prime of det B divides det(A^N - I) with valuation
/// below gamma, so the h_N stay inside a finite family. direct_scan checks
/// valuations outright; even_index follows the even-index construction for
/// triangular A. even_index accepts a subset of direct_scan.
AdmissibleReport admissible_periods(const IntMatrix& A, const IntMatrix& B, unsigned count,
                                    SelectionMode mode, unsigned long n_cap = 10'000);

/// x = adj(A^N - I) l / det(A^N - I) reduced mod 1; checked to satisfy
/// (A^N - I) x = 0 mod 1 before returning.
RationalTorusPoint periodic_point(const IntMatrix& A, unsigned long N,
                                  const std::vector<Int>& l);

/// mu_hat(n) = (1/N) sum_j e^(2 pi i <n, A^j x>), exact angle map.
measures1d::FourierValue toral_fourier(const ToralCOMeasure& mu, const std::vector<Int>& n);

/// Convex combinations evaluate affinely.
measures1d::FourierValue toral_mixture_fourier(
    const std::vector<std::pair<Rat, ToralCOMeasure>>& mix, const std::vector<Int>& n);

struct ToralCertificate {
    IntMatrix A{1};
    IntMatrix B{1};
    unsigned long N = 1;
    std::vector<Int> l;
    Int q_N, h_N, r_N, m_N;
    unsigned long checked_l_max = 0;
    unsigned long checked_j = 0;
    std::complex<double> fourier_at_h0{0.0, 0.0};
    bool perturbed = false;
    Rat rho; // 0 unless perturbed: reported measure is (1-rho) mu + rho delta_0
    bool certified = false;
    std::optional<std::pair<unsigned long, unsigned long>> refutation; // (j, l)
};

/// Builds the orbit measure of the periodic point for (A, N, l) and verifies,
/// in exact rational arithmetic, h_N B^(l m_N) A^j x = h_N A^j x mod 1 for
/// all j < N, 1 <= l <= l_max; reports the Fourier value at (h_N,...,h_N),
/// falling back to the delta_0 mixture when it vanishes.
ToralCertificate certify_orbit_witness(const IntMatrix& A, const IntMatrix& B, unsigned long N,
                                 const std::vector<Int>& l, unsigned long l_max);

struct ToralVerifyReport {
    bool verified = false;
    std::string failure;
};

/// Recomputes every claim of a certificate from (A, B, N, l) alone.
ToralVerifyReport verify_toral_certificate(const ToralCertificate& cert);

// exact helpers, also used by tests
IntMatrix mat_pow(const IntMatrix& a, unsigned long e);
std::vector<Int> charpoly(const IntMatrix& a); // monic, ascending
std::vector<std::complex<double>> poly_roots(const std::vector<Int>& monic_ascending);

} // namespace timesp::toral
