// Command-line front end: certificate generators, independent verifier,
// witness builders, Fourier sweeps and scans. Exit codes: 0 success or
// verified, 1 verification refuted, 2 usage or domain error, 3 resource
// bound exceeded.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "timesp/asymptotics.hpp"
#include "timesp/exactint.hpp"
#include "timesp/json_io.hpp"
#include "timesp/measures1d.hpp"
#include "timesp/sequences.hpp"
#include "timesp/toral.hpp"

using timesp::exactint::Int;
using timesp::exactint::IntMatrix;
using timesp::json_io::json;
using Rat = mpq_class;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<Int> parse_int_list(const std::string& s) {
    std::vector<Int> out;
    for (const auto& tok : split(s, ',')) out.push_back(timesp::json_io::int_from_string(tok));
    return out;
}

std::vector<Rat> parse_rat_list(const std::string& s) {
    std::vector<Rat> out;
    for (const auto& tok : split(s, ',')) out.push_back(timesp::json_io::rat_from_string(tok));
    return out;
}

IntMatrix parse_matrix(const std::string& s) {
    std::vector<std::vector<Int>> rows;
    for (const auto& row : split(s, ';')) rows.push_back(parse_int_list(row));
    return IntMatrix::from_rows(rows);
}

// geometric:Q | polynomial:c0,c1,... | linrec:a1,..;c0,.. | polyexp:c0,c1@B;...
timesp::sequences::SequenceSpec parse_seq(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw std::domain_error("sequence spec must look like 'geometric:2'");
    }
    std::string family = s.substr(0, colon), body = s.substr(colon + 1);
    if (family == "geometric") {
        return timesp::sequences::Geometric{timesp::json_io::int_from_string(body)};
    }
    if (family == "polynomial") {
        return timesp::sequences::Polynomial{parse_int_list(body)};
    }
    if (family == "linrec") {
        auto parts = split(body, ';');
        if (parts.size() != 2) {
            throw std::domain_error("linrec spec needs 'a1,..,aL;c0,..,c_{L-1}'");
        }
        return timesp::sequences::LinearRecurrence{parse_int_list(parts[0]),
                                                   parse_int_list(parts[1])};
    }
    if (family == "polyexp") {
        timesp::sequences::PolyExp spec;
        for (const auto& term : split(body, ';')) {
            auto at = term.find('@');
            if (at == std::string::npos) {
                throw std::domain_error("polyexp term needs 'c0,c1,..@base'");
            }
            spec.terms.push_back({parse_int_list(term.substr(0, at)),
                                  timesp::json_io::int_from_string(term.substr(at + 1))});
        }
        return spec;
    }
    throw std::domain_error("unknown sequence family: '" + family + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// TIMESP_OUT_DIR redirects relative output paths
std::string resolve_out(const std::string& path) {
    const char* dir = std::getenv("TIMESP_OUT_DIR");
    if (!dir || *dir == '\0' || path.empty() || path.front() == '/') return path;
    std::string base(dir);
    if (base.back() != '/') base += '/';
    return base + path;
}

void write_text(const std::string& path, const std::string& content) {
    std::string full = resolve_out(path);
    std::ofstream out(full, std::ios::binary);
    if (!out) throw std::domain_error("cannot open '" + full + "' for writing");
    out << content;
}

// provenance lives in a sidecar so certificate bytes stay canonical
void write_with_sidecar(const std::string& path, const std::string& content,
                        const std::string& command_line) {
    write_text(path, content);
    json meta{{"command", command_line}, {"tool", "timesp"}, {"format", 1}};
    write_text(path + ".meta.json", timesp::json_io::canonical_dump(meta));
}

void emit(const std::optional<std::string>& path, const std::string& content,
          const std::string& command_line) {
    if (path) {
        write_with_sidecar(*path, content, command_line);
    } else {
        std::cout << content;
    }
}

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

std::string fourier_sweep_csv(const timesp::measures1d::MeasureExprPtr& expr,
                              const std::vector<Int>& freqs) {
    std::ostringstream csv;
    csv << "a,re,im,abs,error_bound\n";
    for (const Int& a : freqs) {
        auto f = timesp::measures1d::fourier(expr, a);
        csv << a.get_str() << ',' << format_double(f.approx.real()) << ','
            << format_double(f.approx.imag()) << ',' << format_double(std::abs(f.approx)) << ','
            << format_double(f.error_bound) << '\n';
    }
    return csv.str();
}

json witness_report_json(const timesp::sequences::HCertificate& cert, size_t witness_index,
                         const timesp::measures1d::WitnessReport& report) {
    return json{{"kind", "witness-report"},
                {"certificate", timesp::json_io::to_json(cert)},
                {"witness_index", witness_index},
                {"measure", timesp::json_io::to_json(*report.expr)},
                {"t", report.t.get_str()},
                {"gamma", report.gamma.get_str()},
                {"lower_bound", report.lower_bound},
                {"checked_ks", report.checked_ks},
                {"perturbed", report.perturbed},
                {"rho", report.rho.get_str()}};
}

int verify_document(const json& doc, unsigned long k_max) {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "h-certificate") {
        auto cert = timesp::json_io::hcert_from_json(doc);
        auto report = timesp::sequences::verify_certificate(cert, k_max);
        json out{{"kind", "verify-report"},
                 {"status", report.verified ? "verified" : "refuted"},
                 {"no_witnesses", report.no_witnesses}};
        json per = json::array();
        for (const auto& w : report.per_witness) {
            json entry{{"N", w.N.get_str()}, {"checked", w.checked}, {"ok", w.ok}};
            if (w.counterexample_k) entry["counterexample_k"] = w.counterexample_k->get_str();
            if (!w.detail.empty()) entry["detail"] = w.detail;
            per.push_back(entry);
        }
        out["witnesses"] = per;
        if (!report.first_failure.empty()) out["first_failure"] = report.first_failure;
        std::cout << timesp::json_io::canonical_dump(out);
        return report.verified ? 0 : 1;
    }
    if (kind == "toral-certificate") {
        auto cert = timesp::json_io::toral_from_json(doc);
        auto report = timesp::toral::verify_toral_certificate(cert);
        json out{{"kind", "verify-report"},
                 {"status", report.verified ? "verified" : "refuted"}};
        if (!report.failure.empty()) out["failure"] = report.failure;
        std::cout << timesp::json_io::canonical_dump(out);
        return report.verified ? 0 : 1;
    }
    if (kind == "witness-report") {
        auto cert = timesp::json_io::hcert_from_json(doc.at("certificate"));
        auto cert_report = timesp::sequences::verify_certificate(cert, k_max);
        bool ok = cert_report.verified;
        std::string failure = cert_report.first_failure;
        if (ok) {
            size_t index = doc.at("witness_index").get<size_t>();
            auto gamma = timesp::json_io::rat_from_string(doc.at("gamma").get<std::string>());
            auto checked = doc.at("checked_ks").get<unsigned long>();
            auto rebuilt = timesp::measures1d::build_witness(cert.p, cert, index, gamma, checked);
            json expected = witness_report_json(cert, index, rebuilt);
            for (const char* key : {"measure", "t", "lower_bound", "perturbed", "rho"}) {
                if (expected.at(key) != doc.at(key)) {
                    ok = false;
                    failure = std::string("witness field '") + key + "' does not re-derive";
                    break;
                }
            }
        }
        json out{{"kind", "verify-report"}, {"status", ok ? "verified" : "refuted"}};
        if (!ok && !failure.empty()) out["failure"] = failure;
        std::cout << timesp::json_io::canonical_dump(out);
        return ok ? 0 : 1;
    }
    throw std::domain_error("unknown document kind: '" + kind + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"times-p invariant measures: Fourier certificates along sequences"};
    app.require_subcommand(1);
    const std::string command_line = join_args(argc, argv);
    // subcommands take --help only; -h would shadow the --h option
    auto add_sub = [&](const std::string& name, const std::string& desc) {
        auto* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help");
        return sub;
    };

    // --- certify ---
    auto* certify = add_sub("certify", "generate a congruence certificate");
    std::string certify_seq;
    long certify_p = 0;
    unsigned certify_witnesses = 3;
    unsigned long certify_kmax = 100;
    std::optional<std::string> certify_out;
    certify->add_option("--p", certify_p, "expanding base p >= 2")->required();
    certify->add_option("--seq", certify_seq, "sequence, e.g. geometric:2")->required();
    certify->add_option("--witnesses", certify_witnesses, "number of stored witnesses");
    certify->add_option("--k-max", certify_kmax, "self-verification depth");
    certify->add_option("--out", certify_out, "output path (stdout if omitted)");

    // --- verify ---
    auto* verify = add_sub("verify", "re-check a certificate document");
    std::string verify_path;
    unsigned long verify_kmax = 100;
    verify->add_option("--cert", verify_path, "certificate JSON path")->required();
    verify->add_option("--k-max", verify_kmax, "congruence indices per witness");

    // --- witness ---
    auto* witness = add_sub("witness", "build a measure witnessing large coefficients");
    long witness_p = 0, witness_q = 0;
    size_t witness_index = 0;
    unsigned long witness_checked = 100, witness_nmax = 0;
    std::string witness_gamma = "1/2";
    std::optional<std::string> witness_json, witness_csv;
    witness->add_option("--p", witness_p, "invariance base")->required();
    witness->add_option("--q", witness_q, "geometric base")->required();
    witness->add_option("--N-index", witness_index, "witness index into the certificate");
    witness->add_option("--gamma", witness_gamma, "threshold ratio in (0,1)");
    witness->add_option("--checked-ks", witness_checked, "progression indices to check");
    witness->add_option("--n-max", witness_nmax, "CSV sweep range for |mu_hat(q^n)|");
    witness->add_option("--json", witness_json, "witness report path");
    witness->add_option("--csv", witness_csv, "Fourier sweep CSV path");

    // --- bernoulli-decay ---
    auto* bdecay = add_sub("bernoulli-decay", "|mu_Theta-hat(h c_n)| sweep");
    long bdecay_p = 0;
    std::string bdecay_theta, bdecay_seq;
    std::string bdecay_h = "1";
    unsigned long bdecay_nmax = 64;
    std::optional<std::string> bdecay_csv;
    bdecay->add_option("--p", bdecay_p, "digit base")->required();
    bdecay->add_option("--theta", bdecay_theta, "weights, e.g. 1/2,3/10,1/5")->required();
    bdecay->add_option("--seq", bdecay_seq, "sequence spec")->required();
    bdecay->add_option("--h", bdecay_h, "nonzero multiplier");
    bdecay->add_option("--n-max", bdecay_nmax, "sweep n = 0..n-max");
    bdecay->add_option("--csv", bdecay_csv, "output CSV path");

    // --- psi-scan ---
    auto* pscan = add_sub("psi-scan", "digit statistic vs Fourier decay scan");
    long pscan_p = 0;
    std::string pscan_theta;
    unsigned long pscan_mmin = 1, pscan_mmax = 4096;
    std::optional<std::string> pscan_csv, pscan_json;
    pscan->add_option("--p", pscan_p, "digit base")->required();
    pscan->add_option("--theta", pscan_theta, "weights")->required();
    pscan->add_option("--m-min", pscan_mmin, "scan start");
    pscan->add_option("--m-max", pscan_mmax, "scan end");
    pscan->add_option("--csv", pscan_csv, "row CSV path");
    pscan->add_option("--json", pscan_json, "bracket summary path");

    // --- toral-witness ---
    auto* toralw = add_sub("toral-witness", "periodic-orbit certificate for (A, B)");
    std::string toral_A, toral_B, toral_l;
    unsigned long toral_N = 1, toral_lmax = 10;
    std::optional<std::string> toral_out;
    toralw->add_option("--A", toral_A, "matrix rows 'a,b;c,d'")->required();
    toralw->add_option("--B", toral_B, "matrix rows")->required();
    toralw->add_option("--N", toral_N, "period")->required();
    toralw->add_option("--l", toral_l, "lattice vector 'x,y'");
    toralw->add_option("--l-max", toral_lmax, "iterate count to verify");
    toralw->add_option("--out", toral_out, "certificate path");

    // --- approx ---
    auto* approx = add_sub("approx", "re-periodize an orbit measure");
    long approx_p = 0;
    unsigned long approx_N = 1, approx_Nk = 0, approx_buffer = 1;
    std::string approx_m = "1";
    std::optional<std::string> approx_json;
    approx->add_option("--p", approx_p, "base")->required();
    approx->add_option("--N", approx_N, "source period")->required();
    approx->add_option("--m", approx_m, "orbit exponent")->required();
    approx->add_option("--N-k", approx_Nk, "target period")->required();
    approx->add_option("--buffer", approx_buffer, "digit buffer")->required();
    approx->add_option("--json", approx_json, "report path");

    // --- density-extract ---
    auto* extract = add_sub("density-extract", "density-1 subsequence extraction");
    std::optional<std::string> extract_csv_in;
    std::string extract_synthetic;
    unsigned long extract_length = 0;
    unsigned extract_kmax = 8;
    long extract_acap = 8;
    std::optional<std::string> extract_out, extract_json;
    extract->add_option("--csv", extract_csv_in, "input rows: n,a,re,im");
    extract->add_option("--synthetic", extract_synthetic, "built-in family: squares");
    extract->add_option("--length", extract_length, "synthetic data length");
    extract->add_option("--k-max", extract_kmax, "target scale");
    extract->add_option("--a-cap", extract_acap, "coefficient window");
    extract->add_option("--out", extract_out, "membership CSV path");
    extract->add_option("--json", extract_json, "scales report path");

    // --- cesaro ---
    auto* cesaro = add_sub("cesaro", "Cesaro averages of Fourier coefficients");
    std::string cesaro_measure, cesaro_seq;
    std::string cesaro_h = "1";
    unsigned long cesaro_N = 64;
    std::optional<std::string> cesaro_csv;
    cesaro->add_option("--measure", cesaro_measure, "measure JSON (inline or @file)")->required();
    cesaro->add_option("--seq", cesaro_seq, "sequence spec")->required();
    cesaro->add_option("--h", cesaro_h, "nonzero multiplier");
    cesaro->add_option("--N", cesaro_N, "average length");
    cesaro->add_option("--csv", cesaro_csv, "prefix-average CSV path");

    // --- word-density ---
    auto* wordd = add_sub("word-density", "digit word occurrence density");
    long word_p = 0, word_q = 0;
    std::string word_a = "1", word_word;
    unsigned long word_N = 50;
    wordd->add_option("--p", word_p, "digit base")->required();
    wordd->add_option("--q", word_q, "geometric base")->required();
    wordd->add_option("--a", word_a, "nonzero multiplier");
    wordd->add_option("--word", word_word, "digit string, e.g. 011")->required();
    wordd->add_option("--N", word_N, "sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*certify) {
            auto spec = parse_seq(certify_seq);
            auto cert = timesp::sequences::certify(Int(certify_p), spec, certify_witnesses);
            auto report = timesp::sequences::verify_certificate(cert, certify_kmax);
            if (!report.verified) {
                throw timesp::internal_error("generated certificate failed self-verification: " +
                                             report.first_failure);
            }
            emit(certify_out, timesp::json_io::canonical_dump(timesp::json_io::to_json(cert)),
                 command_line);
            return 0;
        }
        if (*verify) {
            std::ifstream in(verify_path, std::ios::binary);
            if (!in) throw std::domain_error("cannot read '" + verify_path + "'");
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw std::domain_error(std::string("malformed JSON: ") + e.what());
            }
            return verify_document(doc, verify_kmax);
        }
        if (*witness) {
            auto cert = timesp::sequences::certify_geometric(Int(witness_p), Int(witness_q),
                                                             witness_index + 1);
            auto gamma = timesp::json_io::rat_from_string(witness_gamma);
            auto report = timesp::measures1d::build_witness(Int(witness_p), cert, witness_index,
                                                            gamma, witness_checked);
            json out = witness_report_json(cert, witness_index, report);
            emit(witness_json, timesp::json_io::canonical_dump(out), command_line);
            if (witness_csv) {
                std::vector<Int> freqs;
                Int power = 1;
                for (unsigned long n = 0; n <= witness_nmax; ++n) {
                    freqs.push_back(power);
                    power *= witness_q;
                }
                write_text(*witness_csv, fourier_sweep_csv(report.expr, freqs));
            }
            return 0;
        }
        if (*bdecay) {
            auto theta = parse_rat_list(bdecay_theta);
            auto expr = timesp::measures1d::bernoulli(Int(bdecay_p), theta);
            auto spec = parse_seq(bdecay_seq);
            Int h = timesp::json_io::int_from_string(bdecay_h);
            if (h == 0) throw std::domain_error("h must be nonzero");
            std::vector<Int> freqs;
            for (unsigned long n = 0; n <= bdecay_nmax; ++n) {
                freqs.push_back(h * timesp::sequences::eval_exact(spec, Int(n)));
            }
            std::string csv = fourier_sweep_csv(expr, freqs);
            if (bdecay_csv) {
                write_text(*bdecay_csv, csv);
            } else {
                std::cout << csv;
            }
            return 0;
        }
        if (*pscan) {
            auto scan = timesp::asymptotics::decay_scan(Int(pscan_p), parse_rat_list(pscan_theta),
                                                        pscan_mmin, pscan_mmax);
            std::ostringstream csv;
            csv << "m,psi,R0,Rp1,Nmid,abs_fourier,neg_log_ratio\n";
            for (const auto& row : scan.rows) {
                csv << row.m << ',' << row.stats.psi << ',' << row.stats.R0 << ','
                    << row.stats.Rp1 << ',' << row.stats.Nmid << ','
                    << format_double(row.abs_fourier) << ',' << format_double(row.neg_log_ratio)
                    << '\n';
            }
            if (pscan_csv) {
                write_text(*pscan_csv, csv.str());
            } else {
                std::cout << csv.str();
            }
            json summary{{"kind", "psi-scan"},
                         {"m_min", scan.m_min},
                         {"m_max", scan.m_max},
                         {"min_ratio", scan.min_ratio},
                         {"max_ratio", scan.max_ratio},
                         {"c1", scan.c1},
                         {"c2", scan.c2}};
            if (pscan_json) {
                write_with_sidecar(*pscan_json, timesp::json_io::canonical_dump(summary),
                                   command_line);
            } else if (pscan_csv) {
                std::cout << timesp::json_io::canonical_dump(summary);
            }
            return 0;
        }
        if (*toralw) {
            IntMatrix A = parse_matrix(toral_A);
            IntMatrix B = parse_matrix(toral_B);
            std::vector<Int> l(static_cast<size_t>(A.dim()), Int(0));
            if (!toral_l.empty()) l = parse_int_list(toral_l);
            if (l.size() == 1 && A.dim() > 1) l.resize(static_cast<size_t>(A.dim()), Int(0));
            auto cert = timesp::toral::certify_orbit_witness(A, B, toral_N, l, toral_lmax);
            emit(toral_out, timesp::json_io::canonical_dump(timesp::json_io::to_json(cert)),
                 command_line);
            return cert.certified ? 0 : 1;
        }
        if (*approx) {
            timesp::measures1d::COMeasure mu{Int(approx_p), approx_N,
                                             timesp::json_io::int_from_string(approx_m)};
            auto rep = timesp::measures1d::approximate_longer_period(mu, approx_Nk, approx_buffer);
            auto source = timesp::measures1d::co(mu.p, mu.N, mu.m);
            auto target = timesp::measures1d::co(rep.approx.p, rep.approx.N, rep.approx.m);
            double gap = std::abs(timesp::measures1d::fourier(target, 1).approx -
                                  timesp::measures1d::fourier(source, 1).approx);
            json out{{"kind", "approx-report"},
                     {"p", Int(approx_p).get_str()},
                     {"source_N", mu.N},
                     {"m", mu.m.get_str()},
                     {"target_N", rep.approx.N},
                     {"m_prime", rep.approx.m.get_str()},
                     {"buffer", rep.buffer},
                     {"per_j_bound", rep.per_j_bound},
                     {"per_j_range", rep.per_j_range},
                     {"integral_bound_exp", rep.integral_bound(2.0 * std::numbers::pi, 1.0)},
                     {"measured_gap_exp", gap},
                     {"weakstar_distance_64",
                      timesp::measures1d::weakstar_distance(*source, *target, 64)}};
            emit(approx_json, timesp::json_io::canonical_dump(out), command_line);
            return 0;
        }
        if (*extract) {
            timesp::asymptotics::CoefficientProvider data;
            std::vector<std::vector<std::complex<double>>> rows;
            if (extract_csv_in) {
                std::ifstream in(*extract_csv_in);
                if (!in) throw std::domain_error("cannot read '" + *extract_csv_in + "'");
                std::string line;
                std::getline(in, line); // header n,a,re,im
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    auto cols = split(line, ',');
                    if (cols.size() != 4) throw std::domain_error("expected rows n,a,re,im");
                    unsigned long n = std::stoul(cols[0]);
                    long a = std::stol(cols[1]);
                    if (std::labs(a) > extract_acap) continue;
                    if (rows.size() < n) rows.resize(n);
                    auto& row = rows[n - 1];
                    row.resize(2 * extract_acap + 1);
                    row[static_cast<size_t>(a + extract_acap)] = {std::stod(cols[2]),
                                                                  std::stod(cols[3])};
                }
                data.length = rows.size();
                data.a_cap = extract_acap;
                data.coeff = [&rows, extract_acap](unsigned long n, long a) {
                    return rows[n - 1][static_cast<size_t>(a + extract_acap)];
                };
            } else if (extract_synthetic == "squares") {
                if (extract_length < 1) throw std::domain_error("--length required");
                data.length = extract_length;
                data.a_cap = extract_acap;
                data.coeff = [](unsigned long n, long a) {
                    unsigned long r = static_cast<unsigned long>(std::sqrt(static_cast<double>(n)));
                    while (r * r > n) --r;
                    while ((r + 1) * (r + 1) <= n) ++r;
                    bool square = r * r == n;
                    return std::complex<double>{(a == 1 && square) ? 1.0 : 0.0, 0.0};
                };
            } else {
                throw std::domain_error("need --csv or --synthetic squares");
            }
            auto target = [](long) { return std::complex<double>{0.0, 0.0}; };
            auto result = timesp::asymptotics::extract_density1(data, target, extract_kmax);
            json scales = json::array();
            for (const auto& s : result.scales) {
                scales.push_back(json{{"k", s.k},
                                      {"N_k", s.N_k},
                                      {"qualifying", s.qualifying},
                                      {"fraction", s.fraction}});
            }
            json out{{"kind", "density-extract"},
                     {"achieved_k", result.achieved_k},
                     {"scales", scales}};
            if (extract_json) {
                write_with_sidecar(*extract_json, timesp::json_io::canonical_dump(out),
                                   command_line);
            } else {
                std::cout << timesp::json_io::canonical_dump(out);
            }
            if (extract_out) {
                std::ostringstream csv;
                csv << "n,in_D\n";
                unsigned long upto =
                    result.scales.empty() ? 0 : result.scales.back().N_k;
                for (unsigned long n = 1; n <= upto; ++n) {
                    csv << n << ',' << (result.in_D[n] ? 1 : 0) << '\n';
                }
                write_text(*extract_out, csv.str());
            }
            return 0;
        }
        if (*cesaro) {
            json mdoc;
            if (!cesaro_measure.empty() && cesaro_measure[0] == '@') {
                std::ifstream in(cesaro_measure.substr(1));
                if (!in) throw std::domain_error("cannot read measure file");
                mdoc = json::parse(in);
            } else {
                mdoc = json::parse(cesaro_measure, nullptr, true);
            }
            auto expr = timesp::json_io::measure_from_json(mdoc);
            auto spec = parse_seq(cesaro_seq);
            Int h = timesp::json_io::int_from_string(cesaro_h);
            std::ostringstream csv;
            csv << "N,avg_re,avg_im,avg_abs\n";
            std::complex<double> running{0.0, 0.0};
            for (unsigned long n = 0; n < cesaro_N; ++n) {
                auto f = timesp::measures1d::fourier(
                    expr, h * timesp::sequences::eval_exact(spec, Int(n)));
                running += f.approx;
                std::complex<double> avg = running / static_cast<double>(n + 1);
                csv << (n + 1) << ',' << format_double(avg.real()) << ','
                    << format_double(avg.imag()) << ',' << format_double(std::abs(avg)) << '\n';
            }
            auto value = timesp::asymptotics::cesaro_fourier(*expr, spec, h, cesaro_N);
            json out{{"kind", "cesaro"},
                     {"N", cesaro_N},
                     {"re", value.value.real()},
                     {"im", value.value.imag()},
                     {"abs", std::abs(value.value)},
                     {"error_bound", value.error_bound}};
            std::cout << timesp::json_io::canonical_dump(out);
            if (cesaro_csv) write_text(*cesaro_csv, csv.str());
            return 0;
        }
        if (*wordd) {
            std::vector<unsigned> digits;
            for (char c : word_word) {
                if (c < '0' || c > '9') throw std::domain_error("word must be decimal digits");
                digits.push_back(static_cast<unsigned>(c - '0'));
            }
            auto result = timesp::asymptotics::word_density(
                Int(word_p), Int(word_q), timesp::json_io::int_from_string(word_a), digits,
                word_N);
            json out{{"kind", "word-density"},
                     {"hits", result.hits},
                     {"total", result.total},
                     {"fraction", result.fraction}};
            std::cout << timesp::json_io::canonical_dump(out);
            return 0;
        }
    } catch (const timesp::resource_error& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
