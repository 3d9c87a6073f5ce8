// Python surface of the library: big integers cross the boundary as decimal
// strings, structured reports as JSON strings or plain dicts.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>

#include "timesp/asymptotics.hpp"
#include "timesp/exactint.hpp"
#include "timesp/json_io.hpp"
#include "timesp/measures1d.hpp"
#include "timesp/sequences.hpp"
#include "timesp/toral.hpp"

namespace py = pybind11;
using timesp::exactint::Int;
using timesp::exactint::IntMatrix;
using timesp::json_io::json;
using Rat = mpq_class;

namespace {

Int to_int(const std::string& s) { return timesp::json_io::int_from_string(s); }

IntMatrix to_matrix(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::vector<Int>> m;
    for (const auto& row : rows) {
        m.emplace_back();
        for (const auto& e : row) m.back().push_back(to_int(e));
    }
    return IntMatrix::from_rows(m);
}

std::vector<std::vector<std::string>> from_matrix(const IntMatrix& m) {
    std::vector<std::vector<std::string>> out;
    for (int i = 0; i < m.dim(); ++i) {
        out.emplace_back();
        for (int j = 0; j < m.dim(); ++j) out.back().push_back(m.at(i, j).get_str());
    }
    return out;
}

std::vector<Int> to_ints(const std::vector<std::string>& v) {
    std::vector<Int> out;
    for (const auto& s : v) out.push_back(to_int(s));
    return out;
}

std::vector<Rat> to_rats(const std::vector<std::string>& v) {
    std::vector<Rat> out;
    for (const auto& s : v) out.push_back(timesp::json_io::rat_from_string(s));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact certificates for times-p invariant measures with large Fourier "
              "coefficients along integer sequences";

    py::register_exception<timesp::resource_error>(m, "ResourceError", PyExc_RuntimeError);

    // --- exact integer kernel ---
    m.def("factorize", [](const std::string& n) {
        std::vector<std::pair<std::string, unsigned>> out;
        for (const auto& [p, e] : timesp::exactint::factorize(to_int(n)).factors) {
            out.emplace_back(p.get_str(), e);
        }
        return out;
    });
    m.def("mod_pow", [](const std::string& a, const std::string& e, const std::string& mod) {
        return timesp::exactint::mod_pow(to_int(a), to_int(e), to_int(mod)).get_str();
    });
    m.def("multiplicative_order", [](const std::string& a, const std::string& mod) {
        return timesp::exactint::multiplicative_order(to_int(a), to_int(mod)).get_str();
    });
    m.def("split_by_primes", [](const std::string& n, const std::vector<std::string>& primes) {
        auto s = timesp::exactint::split_by_primes(to_int(n), to_ints(primes));
        py::dict d;
        d["h"] = s.h.get_str();
        d["r"] = s.r.get_str();
        return d;
    });
    m.def("mat_det", [](const std::vector<std::vector<std::string>>& a) {
        return timesp::exactint::mat_det(to_matrix(a)).get_str();
    });
    m.def("mat_adjugate", [](const std::vector<std::vector<std::string>>& a) {
        return from_matrix(timesp::exactint::mat_adjugate(to_matrix(a)));
    });
    m.def("mat_pow_mod", [](const std::vector<std::vector<std::string>>& a, const std::string& e,
                            const std::string& mod) {
        return from_matrix(timesp::exactint::mat_pow_mod(to_matrix(a), to_int(e), to_int(mod)));
    });
    m.def("mat_order_mod", [](const std::vector<std::vector<std::string>>& a,
                              const std::string& mod) {
        return timesp::exactint::mat_order_mod(to_matrix(a), to_int(mod)).get_str();
    });

    // --- sequences and certificates (JSON-string interface) ---
    m.def("eval_mod", [](const std::string& seq, const std::string& n, const std::string& mod) {
        auto spec = timesp::json_io::sequence_from_json(json::parse(seq));
        return timesp::sequences::eval_mod(spec, to_int(n), to_int(mod)).get_str();
    });
    m.def("eval_exact", [](const std::string& seq, const std::string& n) {
        auto spec = timesp::json_io::sequence_from_json(json::parse(seq));
        return timesp::sequences::eval_exact(spec, to_int(n)).get_str();
    });
    m.def("certify", [](const std::string& p, const std::string& seq, unsigned witnesses) {
        auto spec = timesp::json_io::sequence_from_json(json::parse(seq));
        auto cert = timesp::sequences::certify(to_int(p), spec, witnesses);
        return timesp::json_io::canonical_dump(timesp::json_io::to_json(cert));
    });
    m.def("verify_certificate", [](const std::string& cert_json, unsigned long k_max) {
        auto cert = timesp::json_io::hcert_from_json(json::parse(cert_json));
        auto report = timesp::sequences::verify_certificate(cert, k_max);
        py::dict d;
        d["verified"] = report.verified;
        d["no_witnesses"] = report.no_witnesses;
        d["first_failure"] = report.first_failure;
        return d;
    });

    // --- measures on the circle ---
    m.def(
        "fourier",
        [](const std::string& measure, const std::string& a, double eps) {
            auto expr = timesp::json_io::measure_from_json(json::parse(measure));
            auto f = timesp::measures1d::fourier(expr, to_int(a), eps);
            return py::make_tuple(f.approx, f.error_bound);
        },
        py::arg("measure"), py::arg("a"), py::arg("eps") = timesp::measures1d::kDefaultBernoulliEps);
    m.def("check_invariance", [](const std::string& measure, const std::string& p, long a_max) {
        auto expr = timesp::json_io::measure_from_json(json::parse(measure));
        auto rep = timesp::measures1d::check_invariance(*expr, to_int(p), a_max);
        py::dict d;
        d["invariant"] = rep.invariant;
        d["all_exact"] = rep.all_exact;
        d["max_deviation"] = rep.max_deviation;
        if (rep.witness_a) d["witness_a"] = rep.witness_a->get_str();
        return d;
    });
    m.def("build_witness", [](const std::string& p, const std::string& cert_json, size_t index,
                              const std::string& gamma, unsigned long checked_ks) {
        auto cert = timesp::json_io::hcert_from_json(json::parse(cert_json));
        auto report = timesp::measures1d::build_witness(
            to_int(p), cert, index, timesp::json_io::rat_from_string(gamma), checked_ks);
        py::dict d;
        d["measure"] = timesp::json_io::canonical_dump(timesp::json_io::to_json(*report.expr));
        d["t"] = report.t.get_str();
        d["lower_bound"] = report.lower_bound;
        d["checked_ks"] = report.checked_ks;
        d["perturbed"] = report.perturbed;
        return d;
    });
    m.def("approximate_longer_period", [](const std::string& p, unsigned long N,
                                          const std::string& m_exp, unsigned long N_k,
                                          unsigned long buffer) {
        timesp::measures1d::COMeasure mu{to_int(p), N, to_int(m_exp)};
        auto rep = timesp::measures1d::approximate_longer_period(mu, N_k, buffer);
        py::dict d;
        d["m_prime"] = rep.approx.m.get_str();
        d["target_N"] = rep.approx.N;
        d["per_j_bound"] = rep.per_j_bound;
        d["per_j_range"] = rep.per_j_range;
        return d;
    });
    m.def("weakstar_distance", [](const std::string& e1, const std::string& e2, long a_max) {
        auto x1 = timesp::json_io::measure_from_json(json::parse(e1));
        auto x2 = timesp::json_io::measure_from_json(json::parse(e2));
        return timesp::measures1d::weakstar_distance(*x1, *x2, a_max);
    });

    // --- torus ---
    m.def("hyperbolicity_check", [](const std::vector<std::vector<std::string>>& a) {
        auto rep = timesp::toral::hyperbolicity_check(to_matrix(a));
        py::dict d;
        d["squarefree"] = rep.squarefree;
        d["eigen_moduli"] = rep.eigen_moduli;
        d["verdict"] = rep.verdict == timesp::toral::Verdict::pass          ? "pass"
                       : rep.verdict == timesp::toral::Verdict::fail       ? "fail"
                                                                           : "indeterminate";
        return d;
    });
    m.def("periodic_point", [](const std::vector<std::vector<std::string>>& a, unsigned long N,
                               const std::vector<std::string>& l) {
        auto x = timesp::toral::periodic_point(to_matrix(a), N, to_ints(l));
        std::vector<std::string> out;
        for (const auto& c : x.coords) out.push_back(c.get_str());
        return out;
    });
    m.def("determinant_split", [](const std::vector<std::vector<std::string>>& a,
                              const std::vector<std::vector<std::string>>& b, unsigned long N) {
        auto w = timesp::toral::determinant_split(to_matrix(a), to_matrix(b), N);
        py::dict d;
        d["q_N"] = w.q_N.get_str();
        d["h_N"] = w.h_N.get_str();
        d["r_N"] = w.r_N.get_str();
        d["m_N"] = w.m_N.get_str();
        return d;
    });
    m.def("certify_orbit_witness", [](const std::vector<std::vector<std::string>>& a,
                                const std::vector<std::vector<std::string>>& b, unsigned long N,
                                const std::vector<std::string>& l, unsigned long l_max) {
        auto cert = timesp::toral::certify_orbit_witness(to_matrix(a), to_matrix(b), N, to_ints(l), l_max);
        return timesp::json_io::canonical_dump(timesp::json_io::to_json(cert));
    });
    m.def("verify_toral_certificate", [](const std::string& cert_json) {
        auto cert = timesp::json_io::toral_from_json(json::parse(cert_json));
        auto rep = timesp::toral::verify_toral_certificate(cert);
        py::dict d;
        d["verified"] = rep.verified;
        d["failure"] = rep.failure;
        return d;
    });

    // --- asymptotics ---
    m.def("digit_stats", [](const std::string& m_val, const std::string& p) {
        auto st = timesp::asymptotics::digit_stats(to_int(m_val), to_int(p));
        py::dict d;
        d["R0"] = st.R0;
        d["Rp1"] = st.Rp1;
        d["Nmid"] = st.Nmid;
        d["psi"] = st.psi;
        d["R"] = st.R;
        return d;
    });
    m.def("decay_scan", [](const std::string& p, const std::vector<std::string>& theta,
                           unsigned long m_min, unsigned long m_max) {
        auto scan = timesp::asymptotics::decay_scan(to_int(p), to_rats(theta), m_min, m_max);
        py::dict d;
        d["min_ratio"] = scan.min_ratio;
        d["max_ratio"] = scan.max_ratio;
        d["c1"] = scan.c1;
        d["c2"] = scan.c2;
        return d;
    });
    m.def("rank_correlation", &timesp::asymptotics::rank_correlation);
    m.def("extract_density1",
          [](unsigned long length, long a_cap,
             const std::function<std::complex<double>(unsigned long, long)>& coeff,
             const std::function<std::complex<double>(long)>& target, unsigned k_max) {
              timesp::asymptotics::CoefficientProvider data{length, a_cap, coeff};
              auto result = timesp::asymptotics::extract_density1(data, target, k_max);
              py::list scales;
              for (const auto& s : result.scales) {
                  py::dict e;
                  e["k"] = s.k;
                  e["N_k"] = s.N_k;
                  e["qualifying"] = s.qualifying;
                  e["fraction"] = s.fraction;
                  scales.append(e);
              }
              py::dict d;
              d["achieved_k"] = result.achieved_k;
              d["scales"] = scales;
              return d;
          });
    m.def(
        "cesaro_fourier",
        [](const std::string& measure, const std::string& seq, const std::string& h,
           unsigned long N) {
            auto expr = timesp::json_io::measure_from_json(json::parse(measure));
            auto spec = timesp::json_io::sequence_from_json(json::parse(seq));
            auto v = timesp::asymptotics::cesaro_fourier(*expr, spec, to_int(h), N);
            return py::make_tuple(v.value, v.error_bound);
        });
    m.def("word_density", [](const std::string& p, const std::string& q, const std::string& a,
                             const std::vector<unsigned>& word, unsigned long N) {
        auto w = timesp::asymptotics::word_density(to_int(p), to_int(q), to_int(a), word, N);
        py::dict d;
        d["hits"] = w.hits;
        d["total"] = w.total;
        d["fraction"] = w.fraction;
        return d;
    });

    m.attr("__version__") = "0.1.0";
}
