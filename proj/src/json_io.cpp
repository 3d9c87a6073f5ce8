#include "timesp/json_io.hpp"

#include <regex>

namespace timesp::json_io {

using exactint::Int;
using exactint::IntMatrix;
using Rat = mpq_class;

namespace {

std::string to_string(const Int& v) { return v.get_str(); }
std::string to_string(const Rat& v) { return v.get_str(); }

json ints_to_json(const std::vector<Int>& v) {
    json arr = json::array();
    for (const Int& x : v) arr.push_back(to_string(x));
    return arr;
}

std::vector<Int> ints_from_json(const json& arr) {
    if (!arr.is_array()) throw std::domain_error("expected an array of integer strings");
    std::vector<Int> out;
    for (const auto& x : arr) out.push_back(int_from_string(x.get<std::string>()));
    return out;
}

json rats_to_json(const std::vector<Rat>& v) {
    json arr = json::array();
    for (const Rat& x : v) arr.push_back(to_string(x));
    return arr;
}

std::vector<Rat> rats_from_json(const json& arr) {
    if (!arr.is_array()) throw std::domain_error("expected an array of rational strings");
    std::vector<Rat> out;
    for (const auto& x : arr) out.push_back(rat_from_string(x.get<std::string>()));
    return out;
}

json progression_to_json(const sequences::ArithProgression& p) {
    return json{{"modulus", to_string(p.modulus)},
                {"residue", to_string(p.residue)},
                {"min", to_string(p.min)}};
}

sequences::ArithProgression progression_from_json(const json& j) {
    return sequences::ArithProgression::make(int_from_string(j.at("modulus").get<std::string>()),
                                             int_from_string(j.at("min").get<std::string>()));
}

json matrix_to_json(const IntMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(to_string(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

IntMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::domain_error("expected a matrix as array of rows");
    std::vector<std::vector<Int>> rows;
    for (const auto& row : j) rows.push_back(ints_from_json(row));
    return IntMatrix::from_rows(rows);
}

} // namespace

Int int_from_string(const std::string& s) {
    static const std::regex pattern("-?[0-9]+");
    if (!std::regex_match(s, pattern)) {
        throw std::domain_error("malformed integer string: '" + s + "'");
    }
    return Int(s, 10);
}

Rat rat_from_string(const std::string& s) {
    static const std::regex pattern("-?[0-9]+(/[0-9]+)?");
    if (!std::regex_match(s, pattern)) {
        throw std::domain_error("malformed rational string: '" + s + "'");
    }
    Rat r(s, 10);
    if (r.get_den() == 0) throw std::domain_error("rational with zero denominator: '" + s + "'");
    r.canonicalize();
    return r;
}

json to_json(const sequences::SequenceSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, sequences::Geometric>) {
                return json{{"type", "geometric"}, {"q", to_string(s.q)}};
            } else if constexpr (std::is_same_v<T, sequences::PolyExp>) {
                json terms = json::array();
                for (const auto& t : s.terms) {
                    terms.push_back(json{{"poly", ints_to_json(t.poly)},
                                         {"base", to_string(t.base)}});
                }
                return json{{"type", "poly-exp"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, sequences::LinearRecurrence>) {
                return json{{"type", "linear-recurrence"},
                            {"coeffs", ints_to_json(s.coeffs)},
                            {"initial", ints_to_json(s.initial)}};
            } else {
                return json{{"type", "polynomial"}, {"poly", ints_to_json(s.poly)}};
            }
        },
        spec);
}

sequences::SequenceSpec sequence_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "geometric") {
        return sequences::Geometric{int_from_string(j.at("q").get<std::string>())};
    }
    if (type == "poly-exp") {
        sequences::PolyExp spec;
        for (const auto& t : j.at("terms")) {
            spec.terms.push_back({ints_from_json(t.at("poly")),
                                  int_from_string(t.at("base").get<std::string>())});
        }
        return spec;
    }
    if (type == "linear-recurrence") {
        return sequences::LinearRecurrence{ints_from_json(j.at("coeffs")),
                                           ints_from_json(j.at("initial"))};
    }
    if (type == "polynomial") {
        return sequences::Polynomial{ints_from_json(j.at("poly"))};
    }
    throw std::domain_error("unknown sequence type: '" + type + "'");
}

json to_json(const sequences::HCertificate& cert) {
    json witnesses = json::array();
    for (const auto& w : cert.witnesses) {
        json aux = json::object();
        if (w.a) aux["a"] = to_string(*w.a);
        if (w.r_N) aux["r_N"] = to_string(*w.r_N);
        if (w.n_N) aux["n_N"] = to_string(*w.n_N);
        if (w.h_N) aux["h_N"] = to_string(*w.h_N);
        witnesses.push_back(json{{"N", to_string(w.N)},
                                 {"modulus", to_string(w.modulus)},
                                 {"t_index", w.t_index},
                                 {"h_index", w.h_index},
                                 {"n_progression", progression_to_json(w.n_progression)},
                                 {"auxiliary", aux}});
    }
    return json{{"kind", "h-certificate"},
                {"p", to_string(cert.p)},
                {"sequence", to_json(cert.spec)},
                {"t_values", ints_to_json(cert.t_values)},
                {"h_values", ints_to_json(cert.h_values)},
                {"index_set", progression_to_json(cert.index_set)},
                {"witnesses", witnesses}};
}

sequences::HCertificate hcert_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "h-certificate") {
        throw std::domain_error("not an h-certificate document");
    }
    sequences::HCertificate cert;
    cert.p = int_from_string(j.at("p").get<std::string>());
    cert.spec = sequence_from_json(j.at("sequence"));
    cert.t_values = ints_from_json(j.at("t_values"));
    cert.h_values = ints_from_json(j.at("h_values"));
    cert.index_set = progression_from_json(j.at("index_set"));
    for (const auto& wj : j.at("witnesses")) {
        sequences::PerNWitness w;
        w.N = int_from_string(wj.at("N").get<std::string>());
        w.modulus = int_from_string(wj.at("modulus").get<std::string>());
        w.t_index = wj.at("t_index").get<size_t>();
        w.h_index = wj.at("h_index").get<size_t>();
        w.n_progression = progression_from_json(wj.at("n_progression"));
        const auto& aux = wj.at("auxiliary");
        if (aux.contains("a")) w.a = int_from_string(aux.at("a").get<std::string>());
        if (aux.contains("r_N")) w.r_N = int_from_string(aux.at("r_N").get<std::string>());
        if (aux.contains("n_N")) w.n_N = int_from_string(aux.at("n_N").get<std::string>());
        if (aux.contains("h_N")) w.h_N = int_from_string(aux.at("h_N").get<std::string>());
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

json to_json(const toral::ToralCertificate& cert) {
    json j{{"kind", "toral-certificate"},
           {"A", matrix_to_json(cert.A)},
           {"B", matrix_to_json(cert.B)},
           {"N", std::to_string(cert.N)},
           {"l", ints_to_json(cert.l)},
           {"q_N", to_string(cert.q_N)},
           {"h_N", to_string(cert.h_N)},
           {"r_N", to_string(cert.r_N)},
           {"m_N", to_string(cert.m_N)},
           {"checked", json{{"l_max", cert.checked_l_max}, {"j", cert.checked_j}}},
           {"fourier_at_h0",
            json{{"re", cert.fourier_at_h0.real()}, {"im", cert.fourier_at_h0.imag()}}},
           {"perturbed", cert.perturbed},
           {"rho", to_string(cert.rho)},
           {"status", cert.certified ? "certified" : "refuted"}};
    if (cert.refutation) {
        j["refutation"] = json{{"j", cert.refutation->first}, {"l", cert.refutation->second}};
    }
    return j;
}

toral::ToralCertificate toral_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "toral-certificate") {
        throw std::domain_error("not a toral-certificate document");
    }
    toral::ToralCertificate cert;
    cert.A = matrix_from_json(j.at("A"));
    cert.B = matrix_from_json(j.at("B"));
    Int n = int_from_string(j.at("N").get<std::string>());
    if (n < 1 || !n.fits_ulong_p()) throw std::domain_error("certificate N out of range");
    cert.N = n.get_ui();
    cert.l = ints_from_json(j.at("l"));
    cert.q_N = int_from_string(j.at("q_N").get<std::string>());
    cert.h_N = int_from_string(j.at("h_N").get<std::string>());
    cert.r_N = int_from_string(j.at("r_N").get<std::string>());
    cert.m_N = int_from_string(j.at("m_N").get<std::string>());
    cert.checked_l_max = j.at("checked").at("l_max").get<unsigned long>();
    cert.checked_j = j.at("checked").at("j").get<unsigned long>();
    cert.fourier_at_h0 = {j.at("fourier_at_h0").at("re").get<double>(),
                          j.at("fourier_at_h0").at("im").get<double>()};
    cert.perturbed = j.at("perturbed").get<bool>();
    cert.rho = rat_from_string(j.at("rho").get<std::string>());
    cert.certified = j.at("status").get<std::string>() == "certified";
    if (j.contains("refutation")) {
        cert.refutation = {j.at("refutation").at("j").get<unsigned long>(),
                           j.at("refutation").at("l").get<unsigned long>()};
    }
    return cert;
}

json to_json(const measures1d::MeasureExpr& expr) {
    return std::visit(
        [](const auto& node) -> json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, measures1d::COMeasure>) {
                return json{{"type", "co"},
                            {"p", to_string(node.p)},
                            {"N", node.N},
                            {"m", to_string(node.m)}};
            } else if constexpr (std::is_same_v<T, measures1d::BernoulliMeasure>) {
                return json{{"type", "bernoulli"},
                            {"p", to_string(node.p)},
                            {"theta", rats_to_json(node.theta)}};
            } else if constexpr (std::is_same_v<T, measures1d::Dirac>) {
                return json{{"type", "dirac"}, {"point", to_string(node.point)}};
            } else if constexpr (std::is_same_v<T, measures1d::Mixture>) {
                json children = json::array();
                for (const auto& c : node.children) children.push_back(to_json(*c));
                return json{{"type", "mixture"},
                            {"weights", rats_to_json(node.weights)},
                            {"children", children}};
            } else {
                json children = json::array();
                for (const auto& c : node.children) children.push_back(to_json(*c));
                return json{{"type", "convolution"}, {"children", children}};
            }
        },
        expr.node);
}

measures1d::MeasureExprPtr measure_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "co") {
        Int n = Int(j.at("N").get<unsigned long>());
        return measures1d::co(int_from_string(j.at("p").get<std::string>()), n.get_ui(),
                              int_from_string(j.at("m").get<std::string>()));
    }
    if (type == "bernoulli") {
        return measures1d::bernoulli(int_from_string(j.at("p").get<std::string>()),
                                     rats_from_json(j.at("theta")));
    }
    if (type == "dirac") {
        return measures1d::dirac(rat_from_string(j.at("point").get<std::string>()));
    }
    if (type == "mixture") {
        std::vector<measures1d::MeasureExprPtr> children;
        for (const auto& c : j.at("children")) children.push_back(measure_from_json(c));
        return measures1d::mixture(rats_from_json(j.at("weights")), std::move(children));
    }
    if (type == "convolution") {
        std::vector<measures1d::MeasureExprPtr> children;
        for (const auto& c : j.at("children")) children.push_back(measure_from_json(c));
        return measures1d::convolution(std::move(children));
    }
    throw std::domain_error("unknown measure type: '" + type + "'");
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace timesp::json_io
