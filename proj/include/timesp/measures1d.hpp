#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "timesp/exactint.hpp"
#include "timesp/sequences.hpp"

namespace timesp::measures1d {

using exactint::Int;
using Rat = mpq_class;

struct RatLess {
    bool operator()(const Rat& a, const Rat& b) const { return cmp(a, b) < 0; }
};

/// Angle (in [0,1), reduced) -> positive rational weight; weights sum to 1.
/// The represented Fourier value is sum_w weight * e^(2*pi*i*angle).
using ExactAngles = std::map<Rat, Rat, RatLess>;

/// Uniform measure on the x*p orbit of the (p^N - 1)-th root of unity with
/// exponent m: weight 1/N on each of the N listed iterates, even when the
/// orbit's minimal period divides N strictly.
struct COMeasure {
    Int p;
    unsigned long N = 1;
    Int m;
};

/// Digit measure with weights theta_0..theta_{p-1} pushed to the circle via
/// base-p expansion. Rational weights, positive, summing to 1.
struct BernoulliMeasure {
    Int p;
    std::vector<Rat> theta;

    bool uniform() const;
};

struct Dirac {
    Rat point; // rational in [0,1)
};

struct MeasureExpr;
using MeasureExprPtr = std::shared_ptr<const MeasureExpr>;

struct Mixture {
    std::vector<Rat> weights; // positive, sum 1
    std::vector<MeasureExprPtr> children;
};

struct Convolution {
    std::vector<MeasureExprPtr> children;
};

struct MeasureExpr {
    std::variant<COMeasure, BernoulliMeasure, Dirac, Mixture, Convolution> node;
};

MeasureExprPtr co(const Int& p, unsigned long N, const Int& m);
MeasureExprPtr bernoulli(const Int& p, std::vector<Rat> theta);
MeasureExprPtr dirac(const Rat& point);
MeasureExprPtr mixture(std::vector<Rat> weights, std::vector<MeasureExprPtr> children);
MeasureExprPtr convolution(std::vector<MeasureExprPtr> children);

struct FourierValue {
    std::optional<ExactAngles> exact; // present for purely atomic expressions
    std::complex<double> approx{0.0, 0.0};
    double error_bound = 0.0;
};

inline constexpr double kDefaultBernoulliEps = 1e-12;

/// Numeric value (with rounding estimate) of an exact weighted angle map.
FourierValue from_angles(ExactAngles angles);

/// nu_hat(a) = integral of z^a. Atomic parts evaluate to exact weighted
/// root-of-unity sums; Bernoulli parts use the truncated infinite product
/// with a certified tail bound.
FourierValue fourier(const MeasureExpr& expr, const Int& a,
                     double eps = kDefaultBernoulliEps);
FourierValue fourier(const MeasureExprPtr& expr, const Int& a,
                     double eps = kDefaultBernoulliEps);

enum class ZeroTest { exact_zero, undecided };

/// Tri-state vanishing test for a weighted root-of-unity sum: peels full
/// prime cosets; "undecided" is an honest give-up, never a claim.
ZeroTest exact_zero_test(const ExactAngles& angles);

struct InvarianceReport {
    bool invariant = true;
    bool all_exact = true;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    std::optional<Int> witness_a;
};

/// Checks fourier(expr, p*a) = fourier(expr, a) for |a| <= a_max: exact
/// angle-map equality for atomic expressions, numeric within tolerance
/// otherwise.
InvarianceReport check_invariance(const MeasureExpr& expr, const Int& p, long a_max,
                                  double tolerance = 1e-10);

/// Derives p from the CO / Bernoulli leaves; throws if absent or ambiguous.
InvarianceReport check_invariance(const MeasureExpr& expr, long a_max,
                                  double tolerance = 1e-10);

struct WitnessReport {
    MeasureExprPtr expr;
    Int t;
    double lower_bound = 0.0; // |mu_hat_expr(t)|
    Rat gamma;
    unsigned long checked_ks = 0;
    bool perturbed = false;
    Rat rho; // 0 when unperturbed
};

/// Realizes one certificate witness as a measure with a certified
/// non-vanishing Fourier coefficient along the h*c_n progression:
/// mu = CO(p, N, 1), or rho*delta_0 + (1-rho)*mu when mu_hat(t) vanishes.
/// The report certifies exact angle-map equality fourier(expr, h*c_n(k)) ==
/// fourier(expr, t) for k < checked_ks.
WitnessReport build_witness(const Int& p, const sequences::HCertificate& cert,
                            size_t witness_index, const Rat& gamma,
                            unsigned long checked_ks = 100);

struct ApproxReport {
    COMeasure approx;
    double per_j_bound = 0.0;      // circle distance bound p^(1-buffer)
    unsigned long per_j_range = 0; // valid for 0 <= j <= per_j_range
    unsigned long source_N = 0;
    unsigned long target_N = 0;
    unsigned long buffer = 0;
    Int p;

    /// |integral f d(approx) - integral f d(mu)| for C-Lipschitz f (circle
    /// metric) with sup-norm F.
    double integral_bound(double lipschitz, double sup_norm) const;
};

/// Re-periodizes the base-p digit stream of mu's orbit point to period N_k.
/// Requires N_k >= mu.N + buffer + 1.
ApproxReport approximate_longer_period(const COMeasure& mu, unsigned long N_k,
                                       unsigned long buffer);

/// sum over 0 < |a| <= a_max of 2^-|a| |e1_hat(a) - e2_hat(a)|.
double weakstar_distance(const MeasureExpr& e1, const MeasureExpr& e2, long a_max);
double weakstar_tail_bound(long a_max);

/// Atom locations and masses of a CO measure (orbit multiplicity / N).
std::map<Rat, Rat, RatLess> co_atom_masses(const COMeasure& mu);

} // namespace timesp::measures1d
