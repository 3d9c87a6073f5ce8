#include "timesp/exactint.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace timesp::exactint {

namespace {

const Int kTen40 = [] {
    Int b;
    mpz_ui_pow_ui(b.get_mpz_t(), 10, 40);
    return b;
}();

Int pow_ui(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

bool miller_rabin_round(const Int& n, const Int& d, unsigned long s, const Int& base) {
    Int a = base % n;
    if (a == 0) return true;
    Int x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

bool miller_rabin(const Int& n, const std::vector<Int>& bases) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    for (const Int& b : bases) {
        if (!miller_rabin_round(n, d, s, b)) return false;
    }
    return true;
}

// Witness set proving primality for n < 3.317e24 (Sorenson-Webster).
const std::vector<Int> kProvenWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool probable_prime(const Int& n) {
    if (n < kDeterministicPrimalityBound) return miller_rabin(n, kProvenWitnesses);
    std::vector<Int> bases = kProvenWitnesses;
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(42);
    for (int i = 0; i < 28; ++i) bases.push_back(rng.get_z_range(n - 3) + 2);
    return miller_rabin(n, bases);
}

// Brent's variant of Pollard rho. Returns a nontrivial factor or nullopt
// once the iteration budget is spent.
std::optional<Int> brent_rho(const Int& n, unsigned long seed, unsigned long budget) {
    if (n % 2 == 0) return Int(2);
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(seed);
    Int y = rng.get_z_range(n - 1) + 1;
    Int c = rng.get_z_range(n - 1) + 1;
    Int x, ys, q = 1, g = 1;
    unsigned long r = 1, m = 128, spent = 0;
    while (g == 1) {
        x = y;
        for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
        unsigned long k = 0;
        while (k < r && g == 1) {
            ys = y;
            unsigned long lim = std::min(m, r - k);
            for (unsigned long i = 0; i < lim; ++i) {
                y = (y * y + c) % n;
                q = q * abs(x - y) % n;
            }
            g = gcd(q, n);
            k += m;
            spent += lim;
            if (spent > budget) return std::nullopt;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            ys = (ys * ys + c) % n;
            g = gcd(abs(x - ys), n);
        } while (g == 1);
    }
    if (g == n) return std::nullopt;
    return g;
}

// Strips factors found by trial division up to 10^6; returns the cofactor.
Int trial_divide(Int n, std::map<Int, unsigned>& out) {
    for (unsigned long d : {2ul, 3ul, 5ul}) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            ++out[Int(d)];
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
        }
    }
    // wheel mod 30
    static const unsigned long wheel[] = {4, 2, 4, 2, 4, 6, 2, 6};
    unsigned long d = 7;
    size_t w = 0;
    while (d <= 1'000'000) {
        if (Int(d) * d > n) break;
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            ++out[Int(d)];
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
        }
        d += wheel[w];
        w = (w + 1) % 8;
    }
    return n;
}

Factorization to_factorization(const Int& value, const std::map<Int, unsigned>& m) {
    Factorization f;
    f.value = value;
    f.factors.assign(m.begin(), m.end());
    return f;
}

} // namespace

const Int kDeterministicPrimalityBound("3317044064679887385961981");

bool is_prime(const Int& n) {
    if (n >= kDeterministicPrimalityBound) {
        throw resource_error("primality of " + n.get_str() +
                             " exceeds the deterministic witness bound 3.3e24");
    }
    return miller_rabin(n, kProvenWitnesses);
}

Factorization factorize(const Int& n) {
    if (n < 1) throw std::domain_error("factorize: input must be >= 1");
    if (n > kTen40) throw resource_error("factorize: input exceeds the 10^40 digit bound");
    std::map<Int, unsigned> found;
    Int rest = trial_divide(n, found);
    std::vector<Int> stack;
    if (rest > 1) stack.push_back(rest);
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (is_prime(m)) {
            ++found[m];
            continue;
        }
        std::optional<Int> f;
        for (unsigned long seed = 1; seed <= 16 && !f; ++seed) {
            f = brent_rho(m, seed, 1ul << 26);
            if (f && (*f == 1 || *f == m)) f.reset();
        }
        if (!f) {
            throw resource_error("factorize: rho budget exhausted on " + m.get_str());
        }
        stack.push_back(*f);
        stack.push_back(m / *f);
    }
    return to_factorization(n, found);
}

Int mod_pow(const Int& a, const Int& e, const Int& m) {
    if (m < 2) throw std::domain_error("mod_pow: modulus must be >= 2");
    if (e < 0) throw std::domain_error("mod_pow: exponent must be >= 0");
    Int r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int carmichael(const Factorization& fm) {
    Int lambda = 1;
    for (const auto& [p, e] : fm.factors) {
        Int contrib;
        if (p == 2) {
            if (e == 1) contrib = 1;
            else if (e == 2) contrib = 2;
            else contrib = pow_ui(Int(2), e - 2);
        } else {
            contrib = pow_ui(p, e - 1) * (p - 1);
        }
        lambda = lcm(lambda, contrib);
    }
    return lambda;
}

Int multiplicative_order(const Int& a, const Int& m) {
    if (m < 2) throw std::domain_error("multiplicative_order: modulus must be >= 2");
    if (gcd(a, m) != 1) {
        throw not_invertible_error("multiplicative_order: gcd(" + a.get_str() + ", " +
                                   m.get_str() + ") != 1");
    }
    Int lambda = carmichael(factorize(m));
    Int order = lambda;
    for (const auto& [ell, e] : factorize(lambda).factors) {
        (void)e;
        while (order % ell == 0 && mod_pow(a, order / ell, m) == 1) order /= ell;
    }
    return order;
}

CoprimeSplit split_by_primes(const Int& n, const std::vector<Int>& primes) {
    if (n == 0) throw std::domain_error("split_by_primes: input must be nonzero");
    if (primes.empty()) throw std::domain_error("split_by_primes: prime set must be non-empty");
    for (const Int& p : primes) {
        if (p < 2 || !is_prime(p)) {
            throw std::domain_error("split_by_primes: " + p.get_str() + " is not prime");
        }
    }
    CoprimeSplit s;
    s.value = n;
    s.prime_support = primes;
    s.h = n < 0 ? -1 : 1;
    s.r = abs(n);
    for (const Int& p : primes) {
        while (s.r % p == 0) {
            s.r /= p;
            s.h *= p;
        }
    }
    return s;
}

IntMatrix::IntMatrix(int dim, Int fill) : dim_(dim) {
    if (dim < 1 || dim > 8) throw std::domain_error("IntMatrix: dim must be in [1, 8]");
    entries_.assign(static_cast<size_t>(dim) * dim, std::move(fill));
}

IntMatrix IntMatrix::identity(int dim) {
    IntMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<Int>>& rows) {
    IntMatrix m(static_cast<int>(rows.size()));
    for (int i = 0; i < m.dim(); ++i) {
        if (rows[i].size() != rows.size()) throw std::domain_error("IntMatrix: not square");
        for (int j = 0; j < m.dim(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::mul(const IntMatrix& o) const {
    IntMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) {
            const Int& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

IntMatrix IntMatrix::mul_mod(const IntMatrix& o, const Int& m) const {
    IntMatrix r = mul(o);
    return r.reduced_mod(m);
}

IntMatrix IntMatrix::reduced_mod(const Int& m) const {
    IntMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            mpz_mod(r.at(i, j).get_mpz_t(), at(i, j).get_mpz_t(), m.get_mpz_t());
        }
    return r;
}

IntMatrix IntMatrix::sub(const IntMatrix& o) const {
    IntMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r.at(i, j) = at(i, j) - o.at(i, j);
    return r;
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& v) const {
    std::vector<Int> r(dim_, Int(0));
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r[i] += at(i, j) * v[j];
    return r;
}

// Bareiss fraction-free elimination; all intermediate divisions are exact.
Int mat_det(const IntMatrix& a) {
    int n = a.dim();
    IntMatrix m = a;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

IntMatrix mat_adjugate(const IntMatrix& a) {
    int n = a.dim();
    IntMatrix adj(n);
    if (n == 1) {
        adj.at(0, 0) = 1;
        return adj;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            IntMatrix minor(n - 1);
            for (int r = 0, mr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, mc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor.at(mr, mc) = a.at(r, c);
                    ++mc;
                }
                ++mr;
            }
            Int cof = mat_det(minor);
            if ((i + j) % 2) cof = -cof;
            adj.at(j, i) = cof; // transpose of cofactors
        }
    return adj;
}

IntMatrix mat_pow_mod(const IntMatrix& a, const Int& e, const Int& m) {
    if (m < 2) throw std::domain_error("mat_pow_mod: modulus must be >= 2");
    if (e < 0) throw std::domain_error("mat_pow_mod: exponent must be >= 0");
    IntMatrix result = IntMatrix::identity(a.dim()).reduced_mod(m);
    IntMatrix base = a.reduced_mod(m);
    Int exp = e;
    while (exp > 0) {
        if (mpz_odd_p(exp.get_mpz_t())) result = result.mul_mod(base, m);
        base = base.mul_mod(base, m);
        exp >>= 1;
    }
    return result;
}

Int mat_order_mod(const IntMatrix& a, const Int& m) {
    if (m < 2) throw std::domain_error("mat_order_mod: modulus must be >= 2");
    if (gcd(mat_det(a), m) != 1) {
        throw not_invertible_error("mat_order_mod: matrix not invertible mod " + m.get_str());
    }
    IntMatrix id = IntMatrix::identity(a.dim()).reduced_mod(m);
    IntMatrix acc = a.reduced_mod(m);
    for (unsigned long n = 1; n <= kMatOrderCap; ++n) {
        if (acc == id) return Int(n);
        acc = acc.mul_mod(a, m);
    }
    std::ostringstream msg;
    msg << "mat_order_mod: order exceeds cap " << kMatOrderCap << " (dim " << a.dim()
        << ", modulus " << m.get_str() << ")";
    throw resource_error(msg.str());
}

unsigned valuation(const Int& n, const Int& p) {
    if (n == 0) throw std::domain_error("valuation: n must be nonzero");
    Int m = abs(n);
    unsigned v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

PartialFactorization probable_factorize(const Int& n) {
    PartialFactorization pf;
    std::map<Int, unsigned> found;
    Int rest = trial_divide(n, found);
    std::vector<Int> stack;
    if (rest > 1) stack.push_back(rest);
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (probable_prime(m)) {
            ++found[m];
            continue;
        }
        std::optional<Int> f;
        for (unsigned long seed = 1; seed <= 24 && !f; ++seed) {
            f = brent_rho(m, seed, 1ul << 26);
            if (f && (*f == 1 || *f == m)) f.reset();
        }
        if (!f) {
            pf.hard.push_back(m);
            continue;
        }
        stack.push_back(*f);
        stack.push_back(m / *f);
    }
    pf.factors.assign(found.begin(), found.end());
    return pf;
}

Int order_exponent(const Int& b, const Int& s) {
    if (s < 1) throw std::domain_error("order_exponent: modulus must be >= 1");
    if (s == 1) return 1;
    if (gcd(b, s) != 1) {
        throw not_invertible_error("order_exponent: gcd(" + b.get_str() + ", " + s.get_str() +
                                   ") != 1");
    }
    if (s < kDeterministicPrimalityBound) return multiplicative_order(b, s);
    PartialFactorization pf = probable_factorize(s);
    if (!pf.complete()) {
        throw resource_error("order_exponent: could not factor " + s.get_str() +
                             " within the rho budget");
    }
    Factorization fm;
    fm.value = s;
    fm.factors = pf.factors;
    Int r = carmichael(fm);
    // shrink by whatever primes of r we can find cheaply
    PartialFactorization pr = probable_factorize(r);
    for (const auto& [ell, e] : pr.factors) {
        (void)e;
        while (r % ell == 0 && mod_pow(b, r / ell, s) == 1) r /= ell;
    }
    if (mod_pow(b, r, s) != 1) {
        throw resource_error("order_exponent: probabilistic factorization of " + s.get_str() +
                             " failed certification");
    }
    return r;
}

} // namespace timesp::exactint
