#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "orlicz_lab/block_construction.hpp"
#include "orlicz_lab/geometry.hpp"
#include "orlicz_lab/kalton_peck.hpp"
#include "orlicz_lab/luxemburg.hpp"
#include "suites.hpp"

using namespace olab;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumeric = 3 };

struct Globals {
    std::uint64_t seed = 42;
    std::string out;
    std::string format = "json";
};

struct Emitted {
    json report;
    std::string csv;  // used when --format csv is requested
};

int emit(const Globals& g, Emitted e, double seconds) {
    std::string text;
    if (g.format == "csv") {
        if (e.csv.empty()) throw CLI::ValidationError("--format", "csv output is not available for this command");
        text = e.csv;
    } else {
        e.report["wall_time_s"] = seconds;
        text = e.report.dump(2) + "\n";
    }
    if (g.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(g.out);
        if (!f) throw DomainError("cannot write " + g.out);
        f << text;
    }
    return e.report.value("passed", false) ? kPass : kFail;
}

FiniteVector vector_arg(const std::string& list, const std::string& file) {
    if (!file.empty()) return read_vector_csv(file);
    return parse_vector_list(list);
}

json doubles(const std::vector<double>& v) { return json(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orlicz sequence space toolkit"};
    app.set_config("--config", "", "key=value configuration file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out", g.out, "write the report here instead of stdout");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate an Orlicz function");
    std::string ev_fn, ev_t = "1";
    ev->add_option("--fn", ev_fn, "Orlicz literal")->required();
    ev->add_option("--t", ev_t, "comma separated arguments")->capture_default_str();

    // norm
    auto* nm = app.add_subcommand("norm", "Luxemburg norm of a vector");
    std::string nm_space, nm_vec, nm_file;
    nm->add_option("--space", nm_space, "Orlicz literal")->required();
    auto* nm_v = nm->add_option("--vec", nm_vec, "comma separated coordinates");
    auto* nm_f = nm->add_option("--vec-file", nm_file, "one coordinate per line");
    nm_v->excludes(nm_f);

    // indices
    auto* ix = app.add_subcommand("indices", "estimate dilation indices");
    std::string ix_fn;
    ix->add_option("--fn", ix_fn, "Orlicz literal")->required();

    // construct
    auto* co = app.add_subcommand("construct", "assemble the block construction");
    std::string co_fn;
    std::vector<double> co_targets;
    std::uint64_t co_ncap = 1u << 14;
    std::size_t co_ah_n = 0;
    double co_ah_K = 1.5;
    co->add_option("--fn", co_fn, "Orlicz literal")->required();
    co->add_option("--targets", co_targets, "distance target per level")->required()->delimiter(',');
    co->add_option("--n-cap", co_ncap, "largest block dimension searched")->capture_default_str();
    co->add_option("--ah-n", co_ah_n, "also certify n-dimensional subspaces of a tail");
    co->add_option("--ah-K", co_ah_K, "distance bound for --ah-n")->capture_default_str();

    // bm
    auto* bm = app.add_subcommand("bm", "Banach-Mazur distance table");
    std::string bm_space;
    std::vector<std::size_t> bm_ns;
    std::size_t bm_lo = 2, bm_hi = 16;
    bool bm_doubling = false, bm_brute = false;
    bm->add_option("--space", bm_space, "Orlicz literal")->required();
    bm->add_option("--n", bm_ns, "explicit dimensions")->delimiter(',');
    bm->add_option("--n-min", bm_lo)->capture_default_str();
    bm->add_option("--n-max", bm_hi)->capture_default_str();
    bm->add_flag("--doubling", bm_doubling, "n-min, 2 n-min, ... up to n-max");
    bm->add_flag("--brute", bm_brute, "add a brute-force estimate (n <= 4)");

    // kp
    auto* kp = app.add_subcommand("kp", "twisted Hilbert space numerics");
    kp->require_subcommand(1);
    kp->fallthrough();
    std::string kp_phi = "identity";
    kp->add_option("--phi", kp_phi, "phi literal")->capture_default_str();
    auto* kq = kp->add_subcommand("quasinorm", "quasinorm of (f, g)");
    std::string kq_f, kq_g;
    kq->add_option("--f", kq_f)->required();
    kq->add_option("--g", kq_g)->required();
    kq->add_option("--phi", kp_phi, "phi literal");
    auto* ks = kp->add_subcommand("synthesize", "Orlicz function from phi");
    ks->add_option("--phi", kp_phi, "phi literal");
    auto* ke = kp->add_subcommand("equivalence", "quasinorm against the synthesized Orlicz norm");
    std::size_t ke_dim = 128;
    int ke_trials = 1000;
    ke->add_option("--phi", kp_phi, "phi literal");
    ke->add_option("--dim", ke_dim)->capture_default_str();
    ke->add_option("--trials", ke_trials)->capture_default_str();

    // verify
    auto* vf = app.add_subcommand("verify", "run a verification suite");
    cli::SuiteParams sp;
    std::string suite;
    vf->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(cli::kSuites));
    vf->add_option("--family", sp.family, "Orlicz literal");
    vf->add_option("--phi", sp.phi, "phi literal")->capture_default_str();
    vf->add_option("--tau", sp.tau, "rational in (0,1)")->capture_default_str();
    vf->add_option("--eta", sp.eta)->capture_default_str();
    vf->add_option("--eps", sp.eps)->capture_default_str();
    vf->add_option("--nu", sp.nu)->capture_default_str();
    vf->add_option("--C", sp.C)->capture_default_str();
    vf->add_option("--n", sp.n)->capture_default_str();
    vf->add_option("--dim", sp.dim)->capture_default_str();
    vf->add_option("--length", sp.length)->capture_default_str();
    vf->add_option("--samples", sp.samples, "suite default when negative")->capture_default_str();
    vf->add_option("--trials", sp.trials)->capture_default_str();
    vf->add_option("--prefixes", sp.prefixes)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
        Emitted e;
        if (*ev) {
            auto M = parse_orlicz_literal(ev_fn);
            auto ts = parse_vector_list(ev_t);
            std::vector<double> v, d;
            for (double t : ts) {
                v.push_back(M.eval(t));
                d.push_back(M.derivative(t));
            }
            e.report = cli::make_report("eval", {{"fn", M.to_json()}, {"t", doubles(ts)}}, {},
                                        {{"values", v}, {"derivatives", d}}, g.seed);
        } else if (*nm) {
            auto M = parse_orlicz_literal(nm_space);
            auto x = vector_arg(nm_vec, nm_file);
            auto S = MusielakSection::uniform(M, x.size());
            e.report = cli::make_report("norm", {{"space", M.to_json()}, {"vec", doubles(x)}}, {},
                                        {{"norm", lux_norm(S, x)}}, g.seed);
        } else if (*ix) {
            auto M = parse_orlicz_literal(ix_fn);
            auto idx = estimate_indices(M);
            json ranges = json::array();
            for (const auto& r : containment_report(idx))
                ranges.push_back({{"lo", r.lo}, {"hi", r.hi}, {"near_hilbert", r.near_hilbert}, {"note", r.note}});
            e.report = cli::make_report("indices", {{"fn", M.to_json()}}, {},
                                        {{"indices", idx.to_json()}, {"containment", ranges}}, g.seed);
        } else if (*co) {
            auto M = parse_orlicz_literal(co_fn);
            AHOptions opt;
            opt.n_cap = co_ncap;
            json input = {{"fn", M.to_json()}, {"targets", co_targets}, {"n_cap", co_ncap}};
            try {
                auto con = assemble_ah(M, static_cast<int>(co_targets.size()), co_targets, opt);
                std::vector<Certificate> certs;
                for (const auto& l : con.levels)
                    for (const auto& c : l.certificates) certs.push_back(c);
                if (co_ah_n > 0) {
                    input["ah_n"] = co_ah_n;
                    input["ah_K"] = co_ah_K;
                    certs.push_back(ah_certificate(con, co_ah_n, co_ah_K, g.seed));
                }
                e.report = cli::make_report("construct", input, certs, con.to_json(), g.seed);
                e.csv = con.blocks().to_csv();
            } catch (const TargetUnreachable& u) {
                Certificate c;
                c.name = "target_reachable";
                c.passed = false;
                c.worst_margin = u.achieved - co_targets[u.level - 1];
                c.witness = u.what();
                e.report = cli::make_report("construct", input, {c},
                                            {{"error", "target-unreachable"},
                                             {"level", u.level},
                                             {"achieved", u.achieved},
                                             {"n_cap", u.n_cap},
                                             {"partial", u.partial}},
                                            g.seed);
            }
        } else if (*bm) {
            auto M = parse_orlicz_literal(bm_space);
            std::vector<std::size_t> ns = bm_ns;
            if (ns.empty())
                for (std::size_t n = bm_lo; n <= bm_hi; n = bm_doubling ? 2 * n : n + 1) ns.push_back(n);
            if (ns.empty()) throw DomainError("empty dimension range");
            const std::size_t nmax = *std::max_element(ns.begin(), ns.end());
            auto S = MusielakSection::uniform(M, nmax);
            json rows = json::array();
            std::vector<DistanceRow> table;
            for (std::size_t n : ns) {
                auto d = bm_distance_symmetric(S, n);
                json row = d.to_json();
                if (bm_brute && n <= 4) row["brute_force"] = brute_force_distance(S, n, 50, g.seed).to_json();
                rows.push_back(row);
                table.push_back({n, d});
            }
            e.report = cli::make_report("bm", {{"space", M.to_json()}, {"n", ns}, {"brute", bm_brute}}, {},
                                        {{"rows", rows}}, g.seed);
            e.csv = distance_csv(table);
        } else if (*kp) {
            auto phi = parse_phi_literal(kp_phi);
            if (*kq) {
                KPVector z{parse_vector_list(kq_f), parse_vector_list(kq_g)};
                if (z.f.size() != z.g.size()) throw DomainError("--f and --g must have the same length");
                e.report = cli::make_report("kp quasinorm", {{"phi", phi.to_json()}, {"f", z.f}, {"g", z.g}}, {},
                                            {{"quasinorm", kp_quasinorm(phi, z)}, {"omega", omega_phi(phi, z.g)}},
                                            g.seed);
            } else if (*ks) {
                auto m = mollify(phi);
                auto s = synthesize_orlicz(m);
                e.report = cli::make_report("kp synthesize", {{"phi", phi.to_json()}}, {s.certificate}, s.to_json(),
                                            g.seed);
            } else {
                auto s = synthesize_orlicz(mollify(phi));
                auto rep = equivalence_report(phi, s.M, ke_trials, ke_dim, g.seed);
                Certificate c;
                c.name = "finite_spread";
                c.passed = std::isfinite(rep.spread);
                c.worst_margin = c.passed ? 0 : -1;
                e.report = cli::make_report("kp equivalence",
                                            {{"phi", phi.to_json()}, {"dim", ke_dim}, {"trials", ke_trials}},
                                            {s.certificate, c}, rep.to_json(), g.seed);
            }
        } else if (*vf) {
            sp.seed = g.seed;
            e.report = cli::run_suite(suite, sp);
        }
        return emit(g, std::move(e), elapsed());
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return kUsage;
    } catch (const CLI::Error& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return kUsage;
    } catch (const DomainError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const NumericError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    }
}
