#include "suites.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "orlicz_lab/block_construction.hpp"
#include "orlicz_lab/geometry.hpp"
#include "orlicz_lab/kalton_peck.hpp"
#include "orlicz_lab/luxemburg.hpp"

namespace olab::cli {

const std::vector<std::string> kSuites{"lemma41", "lemma42", "claim33", "lemma32", "prop54", "ineq53", "lemma55"};

nlohmann::json make_report(const std::string& command, nlohmann::json input,
                           const std::vector<Certificate>& certs, nlohmann::json result, std::uint64_t seed) {
    bool passed = true;
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : certs) {
        cj.push_back(c.to_json());
        passed = passed && c.all_passed();
    }
    return {{"schema", 1},          {"tool", "orlicz-lab"}, {"version", kVersion},
            {"command", command},   {"input", std::move(input)},
            {"certificates", cj},   {"result", std::move(result)},
            {"passed", passed},     {"seed", std::to_string(seed)}};
}

std::string canonical_dump(nlohmann::json report) {
    report.erase("wall_time_s");
    return report.dump();
}

namespace {

Certificate precondition_failure(const std::string& what) {
    Certificate c;
    c.name = "precondition";
    c.passed = false;
    c.worst_margin = -1;
    c.witness = what;
    return c;
}

// Scales M so that M(1) >= 1, as a lemma32-ready section requires.
OrliczFunction unit_at_one(const OrliczFunction& M) {
    double m1 = M.eval(1.0);
    if (m1 >= 1) return M;
    auto g = M.with_normalization(1.0 / m1);
    for (int i = 0; i < 8 && g.eval(1.0) < 1; ++i) g = g.with_normalization(1 + 1e-15);
    return g;
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw ParseError("expected a rational like 1/2, got '" + s + "'", 0);
    q.canonicalize();
    return q;
}

nlohmann::json lemma41(const SuiteParams& p, std::vector<Certificate>& certs) {
    auto M = parse_orlicz_literal(p.family.empty() ? "powerlog:alpha=1" : p.family);
    auto tau = parse_rational(p.tau);
    auto r = choose_step1(M, tau, default_kappa(p.eta), p.eta);
    certs.push_back(verify_dilation_band(r.N, p.eta, tau.get_d(), BandMode::PerStep));
    return r.to_json();
}

nlohmann::json lemma42(const SuiteParams& p, std::vector<Certificate>& certs) {
    auto M = parse_orlicz_literal(p.family.empty() ? "powerlog:alpha=1" : p.family);
    auto r = build_step2(M, p.eps, p.nu);
    for (const auto& c : r.certificates) certs.push_back(c);
    certs.push_back(verify_dilation_band(r.N, p.eps, p.nu, BandMode::FullBand));
    certs.push_back(exact_weight_identity(r));
    return r.to_json(false);
}

nlohmann::json claim33(const SuiteParams& p, std::vector<Certificate>& certs) {
    std::vector<std::string> fams;
    if (p.family.empty())
        fams = {"power:p=1",         "power:p=1.5",       "power:p=2",         "power:p=3",
                "powerlog:alpha=-2", "powerlog:alpha=-1", "powerlog:alpha=1", "powerlog:alpha=2"};
    else
        fams = {p.family};
    const int samples = p.samples < 0 ? 1000 : p.samples;
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ex(-3, 1);
    std::uniform_int_distribution<std::size_t> dim(1, p.dim);
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
        auto S = MusielakSection::uniform(unit_at_one(parse_orlicz_literal(fams[fi])), p.dim, true);
        Certificate agg;
        agg.name = "unit_modular_family";
        agg.params = {{"family", fams[fi]}, {"vectors", 0}};
        agg.passed = true;
        agg.worst_margin = 1e300;
        int count = 0;
        for (int i = 0; i < samples; ++i) {
            FiniteVector x(dim(rng));
            for (auto& v : x) v = nd(rng) * std::pow(10.0, ex(rng));
            double nx = lux_norm(S, x);
            if (nx == 0) continue;
            for (auto& v : x) v /= nx;
            auto c = unit_modular_check(S, x);
            ++count;
            if (!c.applicable || c.worst_margin < agg.worst_margin) {
                agg.worst_margin = c.applicable ? c.worst_margin : -1;
                agg.witness = c.witness;
            }
            agg.passed = agg.passed && c.applicable && c.passed;
        }
        agg.params["vectors"] = count;
        out.push_back({{"family", fams[fi]}, {"vectors", count}});
        certs.push_back(agg);
    }
    return out;
}

nlohmann::json lemma32(const SuiteParams& p, std::vector<Certificate>& certs) {
    auto M = parse_orlicz_literal(p.family.empty() ? "powerlog:alpha=1" : p.family);
    auto r = build_step2(M, p.C - 1, p.nu);
    double err = 0;
    auto N = level_surrogate(r.N, r.N.log_inverse(0.0), &err);
    auto S = MusielakSection::uniform(N, 3 * p.n, true);
    const int vectors = p.samples < 0 ? 1000 : p.samples;
    certs.push_back(verify_lemma32(S, p.n, p.C, p.nu, 2, p.seed, vectors));
    return {{"R", r.step1.R}, {"surrogate_error", err}, {"bound", lemma32_bound(p.C, p.nu)}};
}

nlohmann::json prop54(const SuiteParams& p, std::vector<Certificate>& certs) {
    auto phi = parse_phi_literal(p.phi);
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ex(-4, 0);
    Certificate agg;
    agg.name = "partial_sum_bound_trials";
    agg.passed = true;
    agg.worst_margin = 1e300;
    double worst_full = 0;
    for (int t = 0; t < p.trials; ++t) {
        FiniteVector v(p.length);
        for (auto& x : v) {
            do x = nd(rng) * std::pow(10.0, ex(rng));
            while (x == 0);
        }
        auto c = partial_sum_bound_check(phi, v, p.prefixes);
        for (const auto& row : c.params["rows"])
            if (row["N"].get<std::size_t>() == p.length) worst_full = std::max(worst_full, std::fabs(row["diff"].get<double>()));
        if (c.worst_margin < agg.worst_margin) {
            agg.worst_margin = c.worst_margin;
            agg.witness = "trial " + std::to_string(t) + ": " + c.witness;
        }
        agg.passed = agg.passed && c.passed;
    }
    agg.params = {{"trials", p.trials}, {"length", p.length}, {"prefixes", p.prefixes}, {"L", phi.L()}};
    certs.push_back(agg);
    return {{"worst_full_length_diff", worst_full}};
}

nlohmann::json ineq53(const SuiteParams& p, std::vector<Certificate>& certs) {
    certs.push_back(inequality_53_check(p.samples < 0 ? 100000 : p.samples, p.seed));
    return nlohmann::json::object();
}

nlohmann::json lemma55(const SuiteParams& p, std::vector<Certificate>& certs) {
    auto phi = parse_phi_literal(p.phi);
    if (phi.slope_check) certs.push_back(*phi.slope_check);
    auto m = mollify(phi);
    auto s = synthesize_orlicz(m);
    certs.push_back(s.certificate);
    auto idx = estimate_indices(s.M);
    return {{"mollified", m.to_json()}, {"K", s.K}, {"A", s.A}, {"b", s.b}, {"c", s.c}, {"C", s.C},
            {"shift", s.shift}, {"indices", idx.to_json()}};
}

}  // namespace

nlohmann::json run_suite(const std::string& name, const SuiteParams& p) {
    nlohmann::json input = {{"suite", name}, {"seed", std::to_string(p.seed)}};
    std::vector<Certificate> certs;
    nlohmann::json result;
    using Fn = nlohmann::json (*)(const SuiteParams&, std::vector<Certificate>&);
    Fn fn = nullptr;
    if (name == "lemma41") {
        fn = lemma41;
        input.update({{"family", p.family}, {"tau", p.tau}, {"eta", p.eta}});
    } else if (name == "lemma42") {
        fn = lemma42;
        input.update({{"family", p.family}, {"eps", p.eps}, {"nu", p.nu}});
    } else if (name == "claim33") {
        fn = claim33;
        input.update({{"family", p.family}, {"dim", p.dim}, {"samples", p.samples}});
    } else if (name == "lemma32") {
        fn = lemma32;
        input.update({{"family", p.family}, {"C", p.C}, {"nu", p.nu}, {"n", p.n}, {"samples", p.samples}});
    } else if (name == "prop54") {
        fn = prop54;
        input.update({{"phi", p.phi}, {"length", p.length}, {"trials", p.trials}, {"prefixes", p.prefixes}});
    } else if (name == "ineq53") {
        fn = ineq53;
        input.update({{"samples", p.samples}});
    } else if (name == "lemma55") {
        fn = lemma55;
        input.update({{"phi", p.phi}});
    } else {
        throw std::invalid_argument("unknown suite '" + name + "'");
    }
    try {
        result = fn(p, certs);
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        certs.push_back(precondition_failure(e.what()));
        result = nlohmann::json::object();
    }
    return make_report("verify", std::move(input), certs, std::move(result), p.seed);
}

}  // namespace olab::cli
