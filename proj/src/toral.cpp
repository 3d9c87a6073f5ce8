#include "timesp/toral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace timesp::toral {

using measures1d::ExactAngles;
using measures1d::FourierValue;

namespace {

Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

Rat frac(const Rat& x) {
    Int num;
    mpz_mod(num.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    Rat r(num, x.get_den());
    r.canonicalize();
    return r;
}

bool is_integral(const Rat& x) { return x.get_den() == 1; }

std::vector<Rat> mat_apply_rat(const IntMatrix& a, const std::vector<Rat>& v) {
    std::vector<Rat> out(static_cast<size_t>(a.dim()), Rat(0));
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) out[i] += Rat(a.at(i, j)) * v[j];
    return out;
}

bool is_triangular(const IntMatrix& a) {
    bool upper = true, lower = true;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            if (i > j && a.at(i, j) != 0) upper = false;
            if (i < j && a.at(i, j) != 0) lower = false;
        }
    return upper || lower;
}

std::vector<Int> detb_primes(const IntMatrix& b) {
    Int db = exactint::mat_det(b);
    if (db == 0) throw std::domain_error("det B must be nonzero");
    std::vector<Int> primes;
    if (abs(db) > 1) {
        for (const auto& [prime, e] : exactint::factorize(abs(db)).factors) {
            (void)e;
            primes.push_back(prime);
        }
    }
    return primes;
}

// excluded-period data for one diagonal entry, first and second powers checked
struct EntryPlan {
    unsigned gamma_l = 1;
    std::vector<std::optional<Int>> periods; // one per prime
};

EntryPlan plan_entry(const Int& a_abs, const std::vector<Int>& primes) {
    EntryPlan plan;
    for (const Int& prime : primes) {
        unsigned g = 1 + std::max(exactint::valuation(a_abs - 1, prime),
                                  exactint::valuation(a_abs * a_abs - 1, prime));
        plan.gamma_l = std::max(plan.gamma_l, g);
    }
    for (const Int& prime : primes) {
        if (gcd(a_abs, prime) == 1) {
            plan.periods.push_back(
                exactint::multiplicative_order(a_abs, pow_int(prime, plan.gamma_l)));
        } else {
            plan.periods.push_back(std::nullopt);
        }
    }
    return plan;
}

} // namespace

RationalTorusPoint reduce_mod_1(std::vector<Rat> coords) {
    RationalTorusPoint p;
    p.coords.reserve(coords.size());
    for (const Rat& c : coords) p.coords.push_back(frac(c));
    return p;
}

ToralCOMeasure make_toral_co(const IntMatrix& A, unsigned long N, RationalTorusPoint x) {
    if (N < 1 || N > 1'000'000) throw std::domain_error("toral CO measure: N out of range");
    if (x.dim() != A.dim()) throw std::domain_error("toral CO measure: dimension mismatch");
    x = reduce_mod_1(std::move(x.coords));
    // exact periodicity check A^N x = x mod 1
    std::vector<Rat> y(x.coords);
    for (unsigned long j = 0; j < N; ++j) y = mat_apply_rat(A, y);
    for (int i = 0; i < A.dim(); ++i) {
        if (frac(y[i]) != x.coords[i]) {
            throw std::domain_error("toral CO measure: point is not N-periodic under A");
        }
    }
    return ToralCOMeasure{A, N, std::move(x)};
}

std::vector<RationalTorusPoint> toral_orbit(const ToralCOMeasure& mu) {
    std::vector<RationalTorusPoint> orbit;
    orbit.reserve(mu.N);
    RationalTorusPoint cur = mu.x;
    for (unsigned long j = 0; j < mu.N; ++j) {
        orbit.push_back(cur);
        cur = reduce_mod_1(mat_apply_rat(mu.A, cur.coords));
    }
    return orbit;
}

IntMatrix mat_pow(const IntMatrix& a, unsigned long e) {
    IntMatrix result = IntMatrix::identity(a.dim());
    IntMatrix base = a;
    while (e > 0) {
        if (e & 1) result = result.mul(base);
        base = base.mul(base);
        e >>= 1;
    }
    return result;
}

// Faddeev-LeVerrier; every division is exact.
std::vector<Int> charpoly(const IntMatrix& a) {
    int d = a.dim();
    std::vector<Int> c(static_cast<size_t>(d) + 1, Int(0));
    c[d] = 1;
    IntMatrix m(d); // zero
    for (int k = 1; k <= d; ++k) {
        for (int i = 0; i < d; ++i) m.at(i, i) += c[d - k + 1];
        m = a.mul(m);
        Int tr = 0;
        for (int i = 0; i < d; ++i) tr += m.at(i, i);
        Int ck;
        mpz_divexact_ui(ck.get_mpz_t(), tr.get_mpz_t(), static_cast<unsigned long>(k));
        c[d - k] = -ck;
    }
    return c;
}

std::vector<std::complex<double>> poly_roots(const std::vector<Int>& monic) {
    int d = static_cast<int>(monic.size()) - 1;
    if (d < 1) return {};
    std::vector<std::complex<double>> coeff(monic.size());
    for (size_t i = 0; i < monic.size(); ++i) coeff[i] = monic[i].get_d();
    double radius = 1.0;
    for (int i = 0; i < d; ++i) radius = std::max(radius, 1.0 + std::abs(coeff[i]));
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = coeff[d];
        for (int i = d - 1; i >= 0; --i) acc = acc * z + coeff[i];
        return acc;
    };
    // Durand-Kerner
    std::vector<std::complex<double>> z(d);
    for (int i = 0; i < d; ++i) {
        double angle = 2.0 * std::numbers::pi * i / d + 0.4;
        z[i] = 0.4 * radius * std::complex<double>{std::cos(angle), std::sin(angle)};
    }
    for (int iter = 0; iter < 1000; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < d; ++i) {
            std::complex<double> denom{1.0, 0.0};
            for (int j = 0; j < d; ++j)
                if (j != i) denom *= z[i] - z[j];
            std::complex<double> delta = eval(z[i]) / denom;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

HyperbolicityReport hyperbolicity_check(const IntMatrix& A, double tol) {
    HyperbolicityReport report;
    report.charpoly = charpoly(A);

    // squarefree iff gcd(p, p') is constant, over the rationals
    std::vector<Rat> p(report.charpoly.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = Rat(report.charpoly[i]);
    std::vector<Rat> dp(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) dp[i - 1] = Rat(static_cast<unsigned long>(i)) * p[i];
    auto degree = [](const std::vector<Rat>& f) {
        int d = static_cast<int>(f.size()) - 1;
        while (d >= 0 && f[static_cast<size_t>(d)] == 0) --d;
        return d;
    };
    std::vector<Rat> f = p, g = dp;
    while (degree(g) > 0) {
        int df = degree(f), dg = degree(g);
        if (df < dg) {
            std::swap(f, g);
            continue;
        }
        Rat factor = f[static_cast<size_t>(df)] / g[static_cast<size_t>(dg)];
        for (int i = 0; i <= dg; ++i) {
            f[static_cast<size_t>(df - dg + i)] -= factor * g[static_cast<size_t>(i)];
        }
        if (degree(f) < dg) std::swap(f, g);
    }
    report.squarefree = degree(g) == 0 && g[static_cast<size_t>(0)] != 0;

    auto roots = poly_roots(report.charpoly);
    for (const auto& z : roots) report.eigen_moduli.push_back(std::abs(z));
    std::sort(report.eigen_moduli.begin(), report.eigen_moduli.end());

    double min_gap = 1e300;
    for (double m : report.eigen_moduli) min_gap = std::min(min_gap, std::fabs(m - 1.0));
    if (min_gap <= 1e-12) {
        report.verdict = Verdict::fail; // numerically on the unit circle
    } else if (!report.squarefree || min_gap <= tol) {
        report.verdict = Verdict::indeterminate;
    } else {
        report.verdict = Verdict::pass;
    }
    return report;
}

PeriodSetReport bounded_valuation_periods(const IntMatrix& A, const std::vector<Int>& primes,
                                unsigned count) {
    Int detA = exactint::mat_det(A);
    if (detA == 0) throw precondition_error("bounded_valuation_periods: det A = 0");
    Int detAmI = exactint::mat_det(A.sub(IntMatrix::identity(A.dim())));
    if (detAmI == 0) throw precondition_error("bounded_valuation_periods: det(A - I) = 0");
    for (const Int& prime : primes) {
        if (prime < 2 || !exactint::is_prime(prime)) {
            throw std::domain_error("bounded_valuation_periods: non-prime in prime list");
        }
        if (gcd(prime, detA) != 1) {
            throw precondition_error("bounded_valuation_periods: prime " + prime.get_str() +
                                     " divides det A");
        }
    }
    PeriodSetReport report;
    for (const Int& prime : primes) {
        report.gamma = std::max(report.gamma, exactint::valuation(detAmI, prime) + 1);
    }
    Int n0 = 1;
    for (const Int& prime : primes) {
        n0 *= exactint::mat_order_mod(A, pow_int(prime, report.gamma));
    }
    report.index_set = sequences::ArithProgression::make(n0, n0 + 1);
    for (unsigned k = 0; k < count; ++k) {
        Int N = report.index_set.nth(Int(k));
        if (!N.fits_ulong_p()) throw resource_error("bounded_valuation_periods: N too large to verify");
        Int q = exactint::mat_det(mat_pow(A, N.get_ui()).sub(IntMatrix::identity(A.dim())));
        for (const Int& prime : primes) {
            if (q % pow_int(prime, report.gamma) == 0) {
                throw internal_error("bounded_valuation_periods: guarantee failed at N = " + N.get_str());
            }
        }
        report.first_members.push_back(N);
    }
    return report;
}

SplitWitness determinant_split(const IntMatrix& A, const IntMatrix& B, unsigned long N) {
    if (A.dim() != B.dim()) throw std::domain_error("determinant_split: dimension mismatch");
    if (N < 1) throw std::domain_error("determinant_split: N must be >= 1");
    auto aa = hyperbolicity_check(A);
    if (aa.verdict != Verdict::pass) {
        throw precondition_error(
            "determinant_split: A must pass the diagonalizable / off-unit-circle check");
    }
    Int detA = exactint::mat_det(A);
    Int detB = exactint::mat_det(B);
    if (detB == 0) throw std::domain_error("determinant_split: det B = 0");

    SplitWitness w;
    w.N = N;
    w.q_N = exactint::mat_det(mat_pow(A, N).sub(IntMatrix::identity(A.dim())));
    if (w.q_N == 0) {
        throw internal_error("determinant_split: det(A^N - I) = 0 despite assumption (a)");
    }
    if (abs(detB) == 1) {
        w.hypothesis = SplitHypothesis::unimodular_b;
        w.h_N = w.q_N < 0 ? -1 : 1;
        w.r_N = abs(w.q_N);
    } else {
        if (gcd(detA, detB) == 1) {
            w.hypothesis = SplitHypothesis::coprime_dets;
        } else if (is_triangular(A)) {
            w.hypothesis = SplitHypothesis::triangular;
        } else {
            w.hypothesis = SplitHypothesis::none;
        }
        auto split = exactint::split_by_primes(w.q_N, detb_primes(B));
        w.h_N = split.h;
        w.r_N = split.r;
    }
    w.m_N = w.r_N == 1 ? Int(1) : exactint::mat_order_mod(B, w.r_N);
    w.h0 = w.h_N;

    // internal certification of the witness claims
    if (w.h_N * w.r_N != w.q_N) throw internal_error("determinant_split: h * r != q");
    if (gcd(w.r_N, detB) != 1) throw internal_error("determinant_split: gcd(r, det B) != 1");
    if (w.r_N > 1) {
        IntMatrix bm = exactint::mat_pow_mod(B, w.m_N, w.r_N);
        if (bm != IntMatrix::identity(B.dim()).reduced_mod(w.r_N)) {
            throw internal_error("determinant_split: B^m != I mod r");
        }
    }
    // h * B^m = h * I mod q, entrywise
    if (!w.m_N.fits_ulong_p()) throw resource_error("determinant_split: m_N too large");
    IntMatrix bm_exact = mat_pow(B, w.m_N.get_ui());
    Int q_abs = abs(w.q_N);
    for (int i = 0; i < B.dim(); ++i)
        for (int j = 0; j < B.dim(); ++j) {
            Int lhs = w.h_N * bm_exact.at(i, j);
            Int rhs = i == j ? w.h_N : Int(0);
            if ((lhs - rhs) % q_abs != 0) {
                throw internal_error("determinant_split: h B^m != h I mod q");
            }
        }
    return w;
}

AdmissibleReport admissible_periods(const IntMatrix& A, const IntMatrix& B, unsigned count,
                                    SelectionMode mode, unsigned long n_cap) {
    auto aa = hyperbolicity_check(A);
    if (aa.verdict != Verdict::pass) {
        throw precondition_error("admissible_periods: assumption (a) check must pass");
    }
    Int detA = exactint::mat_det(A);
    Int detB = exactint::mat_det(B);
    if (detB == 0) throw std::domain_error("admissible_periods: det B = 0");
    AdmissibleReport report;

    if (abs(detB) == 1) {
        report.gamma = 1;
        for (unsigned long n = 1; report.accepted.size() < count && n <= n_cap; ++n) {
            report.accepted.push_back(n);
        }
        return report;
    }
    std::vector<Int> primes = detb_primes(B);
    const bool triangular = is_triangular(A);
    const bool coprime = gcd(detA, detB) == 1;

    if (mode == SelectionMode::even_index) {
        if (!triangular) {
            throw precondition_error("admissible_periods: even-index construction needs A triangular");
        }
        std::vector<EntryPlan> plans;
        unsigned gamma0 = 1;
        for (int i = 0; i < A.dim(); ++i) {
            EntryPlan plan = plan_entry(abs(A.at(i, i)), primes);
            gamma0 = std::max(gamma0, plan.gamma_l);
            plans.push_back(std::move(plan));
        }
        report.gamma = gamma0 * static_cast<unsigned>(A.dim());
        for (unsigned long m = 1; report.accepted.size() < count && m <= n_cap; ++m) {
            unsigned long twice = 2 * m;
            bool excluded = false;
            for (const auto& plan : plans) {
                for (const auto& period : plan.periods) {
                    if (period && twice % period->get_ui() == 0) {
                        excluded = true;
                        break;
                    }
                }
                if (excluded) break;
            }
            if (!excluded) report.accepted.push_back(m);
        }
        return report;
    }

    // direct bounded-valuation scan; gamma from whichever hypothesis applies
    if (coprime) {
        Int detAmI = exactint::mat_det(A.sub(IntMatrix::identity(A.dim())));
        for (const Int& prime : primes) {
            report.gamma = std::max(report.gamma, exactint::valuation(detAmI, prime) + 1);
        }
    } else if (triangular) {
        unsigned gamma0 = 1;
        for (int i = 0; i < A.dim(); ++i) {
            gamma0 = std::max(gamma0, plan_entry(abs(A.at(i, i)), primes).gamma_l);
        }
        report.gamma = gamma0 * static_cast<unsigned>(A.dim());
    } else {
        throw precondition_error(
            "admissible_periods: neither coprime determinants nor triangular A");
    }
    for (unsigned long n = 1; report.accepted.size() < count && n <= n_cap; ++n) {
        Int q = exactint::mat_det(mat_pow(A, n).sub(IntMatrix::identity(A.dim())));
        if (q == 0) continue;
        bool ok = true;
        for (const Int& prime : primes) {
            if (exactint::valuation(q, prime) >= report.gamma) {
                ok = false;
                break;
            }
        }
        if (ok) report.accepted.push_back(n);
    }
    return report;
}

RationalTorusPoint periodic_point(const IntMatrix& A, unsigned long N,
                                  const std::vector<Int>& l) {
    if (static_cast<int>(l.size()) != A.dim()) {
        throw std::domain_error("periodic_point: lattice vector dimension mismatch");
    }
    IntMatrix S = mat_pow(A, N).sub(IntMatrix::identity(A.dim()));
    Int q = exactint::mat_det(S);
    if (q == 0) throw std::domain_error("periodic_point: det(A^N - I) = 0");
    std::vector<Int> y = exactint::mat_adjugate(S).apply(l);
    std::vector<Rat> coords;
    coords.reserve(y.size());
    for (const Int& yi : y) {
        Rat c(yi, q);
        c.canonicalize();
        coords.push_back(c);
    }
    RationalTorusPoint x = reduce_mod_1(std::move(coords));
    // exact check: (A^N - I) x integral
    std::vector<Rat> check = mat_apply_rat(S, x.coords);
    for (const Rat& c : check) {
        if (!is_integral(c)) throw internal_error("periodic_point: residual is not integral");
    }
    return x;
}

measures1d::FourierValue toral_fourier(const ToralCOMeasure& mu, const std::vector<Int>& n) {
    if (static_cast<int>(n.size()) != mu.A.dim()) {
        throw std::domain_error("toral_fourier: frequency dimension mismatch");
    }
    ExactAngles angles;
    const Rat w(1, static_cast<unsigned long>(mu.N));
    for (const auto& pt : toral_orbit(mu)) {
        Rat dot(0);
        for (size_t i = 0; i < pt.coords.size(); ++i) dot += Rat(n[i]) * pt.coords[i];
        auto [it, inserted] = angles.emplace(frac(dot), w);
        if (!inserted) it->second += w;
    }
    return measures1d::from_angles(std::move(angles));
}

measures1d::FourierValue toral_mixture_fourier(
    const std::vector<std::pair<Rat, ToralCOMeasure>>& mix, const std::vector<Int>& n) {
    if (mix.empty()) throw std::domain_error("toral_mixture_fourier: empty mixture");
    Rat total(0);
    for (const auto& [w, mu] : mix) {
        (void)mu;
        if (w <= 0) throw std::domain_error("toral_mixture_fourier: weights must be positive");
        total += w;
    }
    if (total != 1) throw std::domain_error("toral_mixture_fourier: weights must sum to 1");
    ExactAngles merged;
    for (const auto& [w, mu] : mix) {
        auto part = toral_fourier(mu, n);
        for (const auto& [angle, pw] : *part.exact) {
            auto [it, inserted] = merged.emplace(angle, w * pw);
            if (!inserted) it->second += w * pw;
        }
    }
    return measures1d::from_angles(std::move(merged));
}

ToralCertificate certify_orbit_witness(const IntMatrix& A, const IntMatrix& B, unsigned long N,
                                 const std::vector<Int>& l, unsigned long l_max) {
    if (l_max < 1) throw std::domain_error("certify_orbit_witness: l_max must be >= 1");
    SplitWitness split = determinant_split(A, B, N);
    RationalTorusPoint x = periodic_point(A, N, l);
    ToralCOMeasure mu = make_toral_co(A, N, x);

    ToralCertificate cert;
    cert.A = A;
    cert.B = B;
    cert.N = N;
    cert.l = l;
    cert.q_N = split.q_N;
    cert.h_N = split.h_N;
    cert.r_N = split.r_N;
    cert.m_N = split.m_N;
    cert.checked_l_max = l_max;
    cert.checked_j = N;

    auto orbit = toral_orbit(mu);
    if (!split.m_N.fits_ulong_p()) throw resource_error("certify_orbit_witness: m_N too large");
    IntMatrix b_step = mat_pow(B, split.m_N.get_ui());
    IntMatrix b_pow = IntMatrix::identity(B.dim());
    cert.certified = true;
    for (unsigned long lam = 1; lam <= l_max && cert.certified; ++lam) {
        b_pow = b_pow.mul(b_step);
        for (unsigned long j = 0; j < N; ++j) {
            std::vector<Rat> lhs = mat_apply_rat(b_pow, orbit[j].coords);
            for (size_t i = 0; i < lhs.size(); ++i) {
                Rat diff = Rat(split.h_N) * (lhs[i] - orbit[j].coords[i]);
                if (!is_integral(diff)) {
                    cert.certified = false;
                    cert.refutation = {j, lam};
                    break;
                }
            }
            if (!cert.certified) break;
        }
    }

    std::vector<Int> h0(static_cast<size_t>(A.dim()), split.h_N);
    auto f = toral_fourier(mu, h0);
    if (std::abs(f.approx) < 1e-9) {
        // vanishing (or undecidable) Fourier value: report the delta_0 mixture
        cert.perturbed = true;
        cert.rho = Rat(1, 4);
        cert.fourier_at_h0 = cert.rho.get_d() + (1.0 - cert.rho.get_d()) * f.approx;
        if (std::abs(cert.fourier_at_h0) < cert.rho.get_d() / 2.0) {
            cert.rho = Rat(1, 2);
            cert.fourier_at_h0 = cert.rho.get_d() + (1.0 - cert.rho.get_d()) * f.approx;
        }
    } else {
        cert.fourier_at_h0 = f.approx;
    }
    return cert;
}

ToralVerifyReport verify_toral_certificate(const ToralCertificate& cert) {
    ToralVerifyReport report;
    auto fail = [&](const std::string& why) {
        report.verified = false;
        report.failure = why;
        return report;
    };
    try {
        Int q = exactint::mat_det(mat_pow(cert.A, cert.N).sub(IntMatrix::identity(cert.A.dim())));
        if (q != cert.q_N) return fail("q_N differs from det(A^N - I)");
        if (cert.h_N * cert.r_N != cert.q_N) return fail("h_N * r_N != q_N");
        if (cert.r_N < 1) return fail("r_N must be positive");
        Int detB = exactint::mat_det(cert.B);
        if (detB == 0) return fail("det B = 0");
        if (gcd(cert.r_N, detB) != 1) return fail("gcd(r_N, det B) != 1");
        if (cert.m_N < 1 || !cert.m_N.fits_ulong_p()) return fail("m_N out of range");
        if (cert.r_N > 1) {
            if (exactint::mat_pow_mod(cert.B, cert.m_N, cert.r_N) !=
                IntMatrix::identity(cert.B.dim()).reduced_mod(cert.r_N)) {
                return fail("B^m_N != I mod r_N");
            }
        }
        RationalTorusPoint x = periodic_point(cert.A, cert.N, cert.l);
        ToralCOMeasure mu = make_toral_co(cert.A, cert.N, x);
        auto orbit = toral_orbit(mu);
        IntMatrix b_step = mat_pow(cert.B, cert.m_N.get_ui());
        IntMatrix b_pow = IntMatrix::identity(cert.B.dim());
        for (unsigned long lam = 1; lam <= cert.checked_l_max; ++lam) {
            b_pow = b_pow.mul(b_step);
            for (unsigned long j = 0; j < cert.checked_j && j < cert.N; ++j) {
                std::vector<Rat> lhs = mat_apply_rat(b_pow, orbit[j].coords);
                for (size_t i = 0; i < lhs.size(); ++i) {
                    Rat diff = Rat(cert.h_N) * (lhs[i] - orbit[j].coords[i]);
                    if (!is_integral(diff)) {
                        std::ostringstream msg;
                        msg << "congruence fails at j = " << j << ", l = " << lam;
                        return fail(msg.str());
                    }
                }
            }
        }
        std::vector<Int> h0(static_cast<size_t>(cert.A.dim()), cert.h_N);
        auto f = toral_fourier(mu, h0);
        std::complex<double> expect =
            cert.perturbed
                ? cert.rho.get_d() + (1.0 - cert.rho.get_d()) * f.approx
                : f.approx;
        if (std::abs(expect - cert.fourier_at_h0) > 1e-9) {
            return fail("stored Fourier value differs from recomputation");
        }
        if (!cert.certified) return fail("certificate marked refuted");
    } catch (const std::exception& e) {
        return fail(std::string("verification error: ") + e.what());
    }
    report.verified = true;
    return report;
}

} // namespace timesp::toral
