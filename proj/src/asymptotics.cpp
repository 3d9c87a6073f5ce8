#include "timesp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace timesp::asymptotics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// certified nonvanishing of Q_theta on the circle: either theta_0 > 1/2, or
// a 2^12-point grid minimum beating the Lipschitz slack
void require_nonvanishing(const std::vector<Rat>& theta) {
    if (theta.front() > Rat(1, 2)) return;
    const int grid = 1 << 12;
    std::vector<double> th(theta.size());
    double lipschitz = 0.0;
    for (size_t j = 0; j < theta.size(); ++j) {
        th[j] = theta[j].get_d();
        lipschitz += static_cast<double>(j) * th[j];
    }
    double min_abs = 1e300;
    for (int g = 0; g < grid; ++g) {
        double t = kTwoPi * g / grid;
        std::complex<double> q{0.0, 0.0};
        for (size_t j = 0; j < th.size(); ++j) {
            q += th[j] * std::complex<double>{std::cos(t * static_cast<double>(j)),
                                              std::sin(t * static_cast<double>(j))};
        }
        min_abs = std::min(min_abs, std::abs(q));
    }
    double slack = std::numbers::pi / grid * lipschitz;
    if (min_abs <= slack) {
        throw precondition_error(
            "decay_scan: the digit polynomial Q_theta must not vanish on the circle "
            "(theta_0 > 1/2 suffices; grid check failed)");
    }
}

} // namespace

std::vector<unsigned> digits_base_p(const Int& m, const Int& p) {
    if (p < 2) throw std::domain_error("digits_base_p: base must be >= 2");
    std::vector<unsigned> digits;
    Int rest = abs(m);
    while (rest > 0) {
        Int d;
        mpz_mod(d.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
        digits.push_back(static_cast<unsigned>(d.get_ui()));
        rest = (rest - d) / p;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

DigitStats digit_stats(const Int& m, const Int& p) {
    if (m < 0) throw std::domain_error("digit_stats: m must be nonnegative");
    DigitStats st;
    st.m = m;
    st.p = p;
    std::vector<unsigned> digits = digits_base_p(m, p);
    const unsigned top = static_cast<unsigned>(Int(p - 1).get_ui());
    size_t i = 0;
    while (i < digits.size()) {
        size_t j = i;
        while (j < digits.size() && digits[j] == digits[i]) ++j;
        ++st.R;
        if (digits[i] == 0) {
            ++st.R0;
        } else if (digits[i] == top) {
            ++st.Rp1;
        } else {
            st.Nmid += j - i; // middle digits count individually
        }
        i = j;
    }
    st.psi = st.R0 + st.Rp1 + st.Nmid;
    return st;
}

DecayScan decay_scan(const Int& p, const std::vector<Rat>& theta, unsigned long m_min,
                     unsigned long m_max) {
    if (m_min < 1 || m_max < m_min) throw std::domain_error("decay_scan: bad m range");
    measures1d::BernoulliMeasure mu{p, theta};
    if (mu.uniform()) {
        throw precondition_error(
            "decay_scan: uniform weights give Lebesgue measure; every ratio is infinite "
            "(theta_0 > 1/2 excludes this)");
    }
    require_nonvanishing(theta);
    auto expr = measures1d::bernoulli(p, theta);

    DecayScan scan;
    scan.p = p;
    scan.theta = theta;
    scan.m_min = m_min;
    scan.m_max = m_max;
    scan.min_ratio = 1e300;
    scan.max_ratio = 0.0;
    scan.rows.reserve(m_max - m_min + 1);
    for (unsigned long m = m_min; m <= m_max; ++m) {
        DecayRow row;
        row.m = m;
        row.stats = digit_stats(Int(m), p);
        if (row.stats.psi < 1) continue;
        auto f = measures1d::fourier(expr, Int(m));
        row.abs_fourier = std::abs(f.approx);
        row.error_bound = f.error_bound;
        if (row.abs_fourier <= 0.0) {
            throw internal_error("decay_scan: vanishing coefficient despite nonvanishing Q");
        }
        row.neg_log_ratio = -std::log(row.abs_fourier) / static_cast<double>(row.stats.psi);
        scan.min_ratio = std::min(scan.min_ratio, row.neg_log_ratio);
        scan.max_ratio = std::max(scan.max_ratio, row.neg_log_ratio);
        scan.rows.push_back(row);
    }
    if (scan.rows.empty()) throw std::domain_error("decay_scan: empty scan range");
    scan.c1 = std::floor(scan.min_ratio * 1e9) / 1e9;
    scan.c2 = std::ceil(scan.max_ratio * 1e9) / 1e9;
    return scan;
}

double rank_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::domain_error("rank_correlation: need two samples of equal size >= 2");
    }
    auto ranks = [](const std::vector<double>& v) {
        size_t n = v.size();
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j < n && v[idx[j]] == v[idx[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
            for (size_t t = i; t < j; ++t) r[idx[t]] = avg;
            i = j;
        }
        return r;
    };
    std::vector<double> rx = ranks(xs), ry = ranks(ys);
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

ExtractionResult extract_density1(const CoefficientProvider& data,
                                  const std::function<std::complex<double>(long a)>& target,
                                  unsigned k_max) {
    if (!data.coeff) throw std::domain_error("extract_density1: missing coefficient function");
    if (k_max < 1) throw std::domain_error("extract_density1: k_max must be >= 1");

    ExtractionResult result;
    result.in_D.assign(data.length + 1, false);

    auto qualifies = [&](unsigned long n, unsigned k) {
        long cap = std::min<long>(static_cast<long>(k), data.a_cap);
        double threshold = std::ldexp(1.0, -static_cast<int>(k));
        for (long a = -cap; a <= cap; ++a) {
            if (std::abs(data.coeff(n, a) - target(a)) >= threshold) return false;
        }
        return true;
    };

    unsigned long n_prev = 0;
    for (unsigned k = 1; k <= k_max; ++k) {
        // N_k >= 2^(k-1) N_{k-1}, greedily minimal
        unsigned long lower = n_prev == 0 ? 1 : n_prev * (1ul << (k - 1));
        lower = std::max(lower, n_prev + 1);
        if (lower > data.length) break;
        unsigned long count = 0;
        std::optional<unsigned long> found;
        for (unsigned long n = 1; n <= data.length; ++n) {
            if (qualifies(n, k)) ++count;
            // count / n >= 1 - 2^-k, exactly: count * 2^k >= n * (2^k - 1)
            if (n >= lower && (count << k) >= n * ((1ul << k) - 1)) {
                found = n;
                break;
            }
        }
        result.scanned = data.length;
        if (!found) break;
        ExtractionScale scale;
        scale.k = k;
        scale.N_k = *found;
        scale.qualifying = count;
        scale.fraction = static_cast<double>(count) / static_cast<double>(*found);
        result.scales.push_back(scale);
        for (unsigned long n = n_prev + 1; n <= *found; ++n) {
            if (qualifies(n, k)) result.in_D[n] = true;
        }
        n_prev = *found;
        result.achieved_k = k;
    }
    return result;
}

CesaroValue cesaro_fourier(const measures1d::MeasureExpr& expr,
                           const sequences::SequenceSpec& spec, const Int& h, unsigned long N,
                           double eps) {
    if (h == 0) throw std::domain_error("cesaro_fourier: h must be nonzero");
    if (N < 1) throw std::domain_error("cesaro_fourier: N must be >= 1");
    CesaroValue out;
    for (unsigned long n = 0; n < N; ++n) {
        auto f = measures1d::fourier(expr, h * sequences::eval_exact(spec, Int(n)), eps);
        out.value += f.approx;
        out.error_bound += f.error_bound;
    }
    out.value /= static_cast<double>(N);
    out.error_bound /= static_cast<double>(N);
    return out;
}

CesaroValue cesaro_fourier(const std::vector<std::complex<double>>& data) {
    if (data.empty()) throw std::domain_error("cesaro_fourier: empty data");
    CesaroValue out;
    for (const auto& v : data) out.value += v;
    out.value /= static_cast<double>(data.size());
    return out;
}

WordDensity word_density(const Int& p, const Int& q, const Int& a,
                         const std::vector<unsigned>& word, unsigned long N) {
    if (p < 2 || q < 2) throw std::domain_error("word_density: p, q must be >= 2");
    if (a == 0) throw std::domain_error("word_density: a must be nonzero");
    if (word.empty()) throw std::domain_error("word_density: word must be non-empty");
    if (N < 1) throw std::domain_error("word_density: N must be >= 1");
    for (unsigned d : word) {
        if (Int(d) >= p) throw std::domain_error("word_density: word digit out of base range");
    }
    WordDensity out;
    out.total = N;
    Int value = abs(a);
    for (unsigned long n = 0; n < N; ++n) {
        std::vector<unsigned> digits = digits_base_p(value, p);
        if (digits.size() >= word.size() &&
            std::search(digits.begin(), digits.end(), word.begin(), word.end()) != digits.end()) {
            ++out.hits;
        }
        value *= q;
    }
    out.fraction = static_cast<double>(out.hits) / static_cast<double>(out.total);
    return out;
}

} // namespace timesp::asymptotics
