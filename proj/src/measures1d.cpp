#include "timesp/measures1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace timesp::measures1d {

using exactint::mod_pow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr size_t kExactSupportCap = 1 << 18;

Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

Int canon_mod(const Int& x, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

// reduce a rational into [0, 1)
Rat frac(const Rat& x) {
    Int num = canon_mod(x.get_num(), x.get_den());
    Rat r(num, x.get_den());
    r.canonicalize();
    return r;
}

Rat make_angle(const Int& num, const Int& den) {
    Rat r(canon_mod(num, den), den);
    r.canonicalize();
    return r;
}

std::complex<double> unit(const Rat& angle) {
    double t = kTwoPi * angle.get_d();
    return {std::cos(t), std::sin(t)};
}

FourierValue from_exact(ExactAngles angles) { return from_angles(std::move(angles)); }

void add_weight(ExactAngles& m, const Rat& angle, const Rat& w) {
    auto [it, inserted] = m.emplace(angle, w);
    if (!inserted) {
        it->second += w;
        if (it->second == 0) m.erase(it);
    }
}

void validate(const COMeasure& mu) {
    if (mu.p < 2) throw std::domain_error("CO measure requires p >= 2");
    if (mu.N < 1 || mu.N > 1'000'000) throw std::domain_error("CO measure N out of range");
    Int M = pow_int(mu.p, mu.N) - 1;
    if (mu.m < 0 || (M > 1 && mu.m >= M) || (M == 1 && mu.m != 0)) {
        throw std::domain_error("CO measure exponent m must lie in [0, p^N - 1)");
    }
}

void validate(const BernoulliMeasure& mu) {
    if (mu.p < 2 || !mu.p.fits_ulong_p()) throw std::domain_error("Bernoulli p out of range");
    if (mu.theta.size() != mu.p.get_ui()) {
        throw std::domain_error("Bernoulli needs exactly p weights");
    }
    Rat sum = 0;
    for (const Rat& t : mu.theta) {
        if (t <= 0 || t >= 1) throw std::domain_error("Bernoulli weights must lie in (0,1)");
        sum += t;
    }
    if (sum != 1) throw std::domain_error("Bernoulli weights must sum to 1");
}

FourierValue fourier_co(const COMeasure& mu, const Int& a) {
    Int M = pow_int(mu.p, mu.N) - 1;
    ExactAngles angles;
    const Rat w(1, static_cast<unsigned long>(mu.N));
    if (M == 1) {
        add_weight(angles, Rat(0), Rat(1));
        return from_exact(std::move(angles));
    }
    Int e = canon_mod(a * mu.m, M);
    for (unsigned long j = 0; j < mu.N; ++j) {
        add_weight(angles, make_angle(e, M), w);
        e = canon_mod(e * mu.p, M);
    }
    return from_exact(std::move(angles));
}

FourierValue fourier_dirac(const Dirac& d, const Int& a) {
    ExactAngles angles;
    Rat point = frac(d.point);
    add_weight(angles, make_angle(a * point.get_num(), point.get_den()), Rat(1));
    return from_exact(std::move(angles));
}

FourierValue fourier_bernoulli(const BernoulliMeasure& mu, const Int& a, double eps) {
    validate(mu);
    FourierValue v;
    if (a == 0) {
        v.approx = 1.0;
        v.error_bound = 0.0;
        return v;
    }
    if (mu.uniform()) {
        // uniform digit weights give Lebesgue measure: a zero factor occurs
        // at level v_p(a) + 1
        v.approx = 0.0;
        v.error_bound = 0.0;
        return v;
    }
    if (eps <= 0) throw std::domain_error("fourier: eps must be positive");
    // log|a| via the bit size so arbitrarily large frequencies stay finite
    Int abs_a = abs(a);
    const double log_a = static_cast<double>(mpz_sizeinbase(abs_a.get_mpz_t(), 2)) * std::numbers::ln2;
    const double log_p = std::log(mu.p.get_d());
    unsigned long n_max = static_cast<unsigned long>(
        std::max(1.0, std::ceil((std::log(kTwoPi / eps) + log_a) / log_p)));
    std::vector<double> theta_d(mu.theta.size());
    for (size_t j = 0; j < mu.theta.size(); ++j) theta_d[j] = mu.theta[j].get_d();
    std::complex<double> prod{1.0, 0.0};
    Int pn = 1;
    for (unsigned long n = 1; n <= n_max; ++n) {
        pn *= mu.p;
        Int am = canon_mod(abs_a, pn);
        const double pn_d = pn.get_d();
        std::complex<double> factor{theta_d[0], 0.0};
        for (size_t j = 1; j < theta_d.size(); ++j) {
            Int r = canon_mod(am * Int(static_cast<unsigned long>(j)), pn);
            double t = kTwoPi * (r.get_d() / pn_d);
            factor += theta_d[j] * std::complex<double>{std::cos(t), std::sin(t)};
        }
        prod *= factor;
    }
    if (a < 0) prod = std::conj(prod);
    v.approx = prod;
    // tail: sum_{n > n_max} |factor - 1| <= 2*pi*|a| p^-n_max, at most eps;
    // plus per-level float noise
    v.error_bound =
        eps + static_cast<double>(n_max) * (4e-15 + 2e-15 * static_cast<double>(theta_d.size()));
    return v;
}

struct Evaluator {
    const Int& a;
    double eps;

    FourierValue operator()(const COMeasure& mu) const {
        validate(mu);
        return fourier_co(mu, a);
    }
    FourierValue operator()(const BernoulliMeasure& mu) const {
        return fourier_bernoulli(mu, a, eps);
    }
    FourierValue operator()(const Dirac& d) const { return fourier_dirac(d, a); }
    FourierValue operator()(const Mixture& mix) const {
        if (mix.children.empty() || mix.children.size() != mix.weights.size()) {
            throw std::domain_error("mixture: weights and children must match and be non-empty");
        }
        Rat sum = 0;
        for (const Rat& w : mix.weights) {
            if (w <= 0) throw std::domain_error("mixture weights must be positive");
            sum += w;
        }
        if (sum != 1) throw std::domain_error("mixture weights must sum to 1");
        std::vector<FourierValue> parts;
        parts.reserve(mix.children.size());
        for (const auto& c : mix.children) parts.push_back(fourier(*c, a, eps));
        bool exact = std::all_of(parts.begin(), parts.end(),
                                 [](const FourierValue& f) { return f.exact.has_value(); });
        if (exact) {
            ExactAngles merged;
            size_t total = 0;
            for (size_t i = 0; i < parts.size(); ++i) {
                total += parts[i].exact->size();
                for (const auto& [angle, w] : *parts[i].exact) {
                    add_weight(merged, angle, mix.weights[i] * w);
                }
            }
            if (total <= kExactSupportCap) return from_exact(std::move(merged));
        }
        FourierValue v;
        for (size_t i = 0; i < parts.size(); ++i) {
            double w = mix.weights[i].get_d();
            v.approx += w * parts[i].approx;
            v.error_bound += w * parts[i].error_bound;
        }
        v.error_bound += 1e-15 * static_cast<double>(parts.size());
        return v;
    }
    FourierValue operator()(const Convolution& conv) const {
        if (conv.children.empty()) {
            throw std::domain_error("convolution needs at least one child");
        }
        std::vector<FourierValue> parts;
        parts.reserve(conv.children.size());
        for (const auto& c : conv.children) parts.push_back(fourier(*c, a, eps));
        bool exact = std::all_of(parts.begin(), parts.end(),
                                 [](const FourierValue& f) { return f.exact.has_value(); });
        if (exact) {
            size_t total = 1;
            for (const auto& part : parts) {
                if (total > kExactSupportCap / std::max<size_t>(part.exact->size(), 1)) {
                    exact = false;
                    break;
                }
                total *= part.exact->size();
            }
            if (exact) {
                ExactAngles acc;
                add_weight(acc, Rat(0), Rat(1));
                for (const auto& part : parts) {
                    ExactAngles next;
                    for (const auto& [a1, w1] : acc)
                        for (const auto& [a2, w2] : *part.exact) {
                            next.emplace(frac(a1 + a2), Rat(0)).first->second += w1 * w2;
                        }
                    acc = std::move(next);
                }
                return from_exact(std::move(acc));
            }
        }
        FourierValue v;
        v.approx = 1.0;
        double bound_with = 1.0, bound_without = 1.0;
        for (const auto& part : parts) {
            v.approx *= part.approx;
            bound_with *= std::abs(part.approx) + part.error_bound;
            bound_without *= std::abs(part.approx);
        }
        v.error_bound = bound_with - bound_without + 1e-15 * static_cast<double>(parts.size());
        return v;
    }
};

void collect_p(const MeasureExpr& expr, std::set<unsigned long>& ps) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, COMeasure> || std::is_same_v<T, BernoulliMeasure>) {
                ps.insert(node.p.get_ui());
            } else if constexpr (std::is_same_v<T, Mixture> || std::is_same_v<T, Convolution>) {
                for (const auto& c : node.children) collect_p(*c, ps);
            }
        },
        expr.node);
}

} // namespace

bool BernoulliMeasure::uniform() const {
    return std::all_of(theta.begin(), theta.end(),
                       [&](const Rat& t) { return t == theta.front(); });
}

MeasureExprPtr co(const Int& p, unsigned long N, const Int& m) {
    COMeasure mu{p, N, m};
    validate(mu);
    return std::make_shared<MeasureExpr>(MeasureExpr{mu});
}

MeasureExprPtr bernoulli(const Int& p, std::vector<Rat> theta) {
    BernoulliMeasure mu{p, std::move(theta)};
    validate(mu);
    return std::make_shared<MeasureExpr>(MeasureExpr{mu});
}

MeasureExprPtr dirac(const Rat& point) {
    if (point < 0 || point >= 1) throw std::domain_error("dirac: point must lie in [0,1)");
    return std::make_shared<MeasureExpr>(MeasureExpr{Dirac{point}});
}

MeasureExprPtr mixture(std::vector<Rat> weights, std::vector<MeasureExprPtr> children) {
    return std::make_shared<MeasureExpr>(MeasureExpr{Mixture{std::move(weights), std::move(children)}});
}

MeasureExprPtr convolution(std::vector<MeasureExprPtr> children) {
    return std::make_shared<MeasureExpr>(MeasureExpr{Convolution{std::move(children)}});
}

FourierValue from_angles(ExactAngles angles) {
    FourierValue v;
    std::complex<double> sum{0.0, 0.0};
    for (const auto& [angle, weight] : angles) sum += weight.get_d() * unit(angle);
    v.approx = sum;
    v.error_bound =
        std::numeric_limits<double>::epsilon() * (8.0 + 2.0 * static_cast<double>(angles.size()));
    v.exact = std::move(angles);
    return v;
}

FourierValue fourier(const MeasureExpr& expr, const Int& a, double eps) {
    return std::visit(Evaluator{a, eps}, expr.node);
}

FourierValue fourier(const MeasureExprPtr& expr, const Int& a, double eps) {
    if (!expr) throw std::domain_error("fourier: null expression");
    return fourier(*expr, a, eps);
}

ZeroTest exact_zero_test(const ExactAngles& angles) {
    if (angles.empty()) return ZeroTest::exact_zero;
    Int L = 1;
    for (const auto& [angle, w] : angles) {
        (void)w;
        L = lcm(L, Int(angle.get_den()));
    }
    if (L == 1) return ZeroTest::undecided; // single atom at 0, sum is its weight
    std::map<Int, Rat> residues;
    for (const auto& [angle, w] : angles) {
        residues[Int(angle.get_num()) * (L / angle.get_den())] += w;
    }
    std::vector<Int> primes;
    try {
        for (const auto& [prime, e] : exactint::factorize(L).factors) {
            (void)e;
            primes.push_back(prime);
        }
    } catch (const resource_error&) {
        return ZeroTest::undecided;
    }
    while (!residues.empty()) {
        const Int r0 = residues.begin()->first;
        bool peeled = false;
        for (const Int& q : primes) {
            Int step = L / q;
            Rat w_min = residues.begin()->second;
            bool full = true;
            for (Int t = 0; t < q; ++t) {
                auto it = residues.find(canon_mod(r0 + t * step, L));
                if (it == residues.end() || it->second <= 0) {
                    full = false;
                    break;
                }
                w_min = std::min(w_min, it->second, [](const Rat& x, const Rat& y) { return cmp(x, y) < 0; });
            }
            if (!full) continue;
            for (Int t = 0; t < q; ++t) {
                auto it = residues.find(canon_mod(r0 + t * step, L));
                it->second -= w_min;
                if (it->second == 0) residues.erase(it);
            }
            peeled = true;
            break;
        }
        if (!peeled) return ZeroTest::undecided;
    }
    return ZeroTest::exact_zero;
}

InvarianceReport check_invariance(const MeasureExpr& expr, const Int& p, long a_max,
                                  double tolerance) {
    if (p < 2) throw std::domain_error("check_invariance: p must be >= 2");
    if (a_max < 1) throw std::domain_error("check_invariance: a_max must be >= 1");
    InvarianceReport report;
    report.tolerance = tolerance;
    for (long a = -a_max; a <= a_max; ++a) {
        if (a == 0) continue;
        FourierValue fa = fourier(expr, Int(a));
        FourierValue fpa = fourier(expr, Int(a) * p);
        if (fa.exact && fpa.exact) {
            if (*fa.exact != *fpa.exact) {
                report.invariant = false;
                if (!report.witness_a) report.witness_a = Int(a);
            }
        } else {
            report.all_exact = false;
            double dev = std::abs(fa.approx - fpa.approx);
            report.max_deviation = std::max(report.max_deviation, dev);
            double allowed = std::max(tolerance, 2.0 * (fa.error_bound + fpa.error_bound));
            if (dev > allowed) {
                report.invariant = false;
                if (!report.witness_a) report.witness_a = Int(a);
            }
        }
    }
    return report;
}

InvarianceReport check_invariance(const MeasureExpr& expr, long a_max, double tolerance) {
    std::set<unsigned long> ps;
    collect_p(expr, ps);
    if (ps.size() != 1) {
        throw std::domain_error(
            "check_invariance: ambient p not determined by the expression; pass it explicitly");
    }
    return check_invariance(expr, Int(*ps.begin()), a_max, tolerance);
}

WitnessReport build_witness(const Int& p, const sequences::HCertificate& cert,
                            size_t witness_index, const Rat& gamma, unsigned long checked_ks) {
    if (gamma <= 0 || gamma >= 1) throw std::domain_error("build_witness: gamma must be in (0,1)");
    if (witness_index >= cert.witnesses.size()) {
        throw std::domain_error("build_witness: witness index out of range");
    }
    if (cert.p != p) throw std::domain_error("build_witness: certificate p mismatch");
    auto pre = sequences::verify_certificate(cert, 50);
    if (!pre.verified) {
        throw precondition_error("build_witness: certificate failed verification: " +
                                 pre.first_failure);
    }
    const auto& w = cert.witnesses[witness_index];
    if (!w.N.fits_ulong_p()) throw resource_error("build_witness: witness N too large");
    const Int M = w.modulus;
    const Int t = cert.t_values[w.t_index];
    const Int h = cert.h_values[w.h_index];

    WitnessReport report;
    report.t = t;
    report.gamma = gamma;

    MeasureExprPtr mu = co(p, w.N.get_ui(), 1);
    FourierValue ft = fourier(mu, t);
    bool maybe_zero = std::abs(ft.approx) < 1e-9;
    if (maybe_zero) {
        // perturb whenever exactness is confirmed or cannot be decided
        report.perturbed = true;
        for (const Rat& rho : {Rat(1, 4), Rat(1, 2)}) {
            MeasureExprPtr candidate = mixture({rho, Rat(1) - rho}, {dirac(Rat(0)), mu});
            FourierValue fc = fourier(candidate, t);
            if (std::abs(fc.approx) >= rho.get_d() / 2.0) {
                report.expr = candidate;
                report.rho = rho;
                break;
            }
        }
        if (!report.expr) {
            throw internal_error("build_witness: both perturbations failed, which is impossible");
        }
    } else {
        report.expr = mu;
    }
    report.lower_bound = std::abs(fourier(report.expr, t).approx);

    // exact equality of Fourier angle maps along the progression; the
    // expression's value at frequency a depends on a only mod M
    FourierValue target = fourier(report.expr, t);
    for (unsigned long k = 0; k < checked_ks; ++k) {
        Int n = w.n_progression.nth(Int(k));
        Int a_k = canon_mod(h * sequences::eval_mod(cert.spec, n, M), M);
        FourierValue fk = fourier(report.expr, a_k);
        if (!fk.exact || !target.exact || *fk.exact != *target.exact) {
            throw internal_error("build_witness: angle-map equality failed at k = " +
                                 std::to_string(k));
        }
        ++report.checked_ks;
    }
    return report;
}

double ApproxReport::integral_bound(double lipschitz, double sup_norm) const {
    double geometric = kTwoPi * lipschitz * per_j_bound;
    double boundary = 2.0 * sup_norm *
                      (static_cast<double>(buffer) + static_cast<double>(source_N)) /
                      static_cast<double>(target_N);
    return geometric + boundary;
}

ApproxReport approximate_longer_period(const COMeasure& mu, unsigned long N_k,
                                       unsigned long buffer) {
    validate(mu);
    if (buffer < 1) throw std::domain_error("approximate_longer_period: buffer must be >= 1");
    if (N_k < mu.N + buffer + 1) {
        throw precondition_error("approximate_longer_period: N_k must be >= N + buffer + 1");
    }
    // purely periodic base-p digits of m / (p^N - 1): the N-digit block of m
    std::vector<unsigned long> block(mu.N, 0);
    Int rest = mu.m;
    for (unsigned long i = 0; i < mu.N; ++i) {
        Int digit = canon_mod(rest, mu.p);
        block[mu.N - 1 - i] = digit.get_ui();
        rest = (rest - digit) / mu.p;
    }
    Int m_prime = 0;
    for (unsigned long i = 0; i < N_k; ++i) {
        m_prime = m_prime * mu.p + Int(block[i % mu.N]);
    }
    ApproxReport report;
    report.approx = COMeasure{mu.p, N_k, m_prime};
    validate(report.approx);
    report.p = mu.p;
    report.source_N = mu.N;
    report.target_N = N_k;
    report.buffer = buffer;
    report.per_j_bound = std::pow(mu.p.get_d(), 1.0 - static_cast<double>(buffer));
    report.per_j_range = N_k - buffer;
    return report;
}

double weakstar_distance(const MeasureExpr& e1, const MeasureExpr& e2, long a_max) {
    if (a_max < 1) throw std::domain_error("weakstar_distance: a_max must be >= 1");
    double sum = 0.0;
    for (long a = 1; a <= a_max; ++a) {
        double w = std::ldexp(1.0, -static_cast<int>(a));
        for (long sign : {1L, -1L}) {
            Int freq(sign * a);
            sum += w * std::abs(fourier(e1, freq).approx - fourier(e2, freq).approx);
        }
    }
    return sum;
}

double weakstar_tail_bound(long a_max) { return 4.0 * std::ldexp(1.0, -static_cast<int>(a_max)); }

std::map<Rat, Rat, RatLess> co_atom_masses(const COMeasure& mu) {
    validate(mu);
    Int M = pow_int(mu.p, mu.N) - 1;
    std::map<Rat, Rat, RatLess> masses;
    const Rat w(1, static_cast<unsigned long>(mu.N));
    Int e = M == 1 ? Int(0) : canon_mod(mu.m, M);
    for (unsigned long j = 0; j < mu.N; ++j) {
        Rat point = M == 1 ? Rat(0) : make_angle(e, M);
        masses[point] += w;
        if (M != 1) e = canon_mod(e * mu.p, M);
    }
    return masses;
}

} // namespace timesp::measures1d
