// Acceptance runner: one line per criterion, exit status nonzero only when a
// criterion fails that is not listed in kExpectedFailures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "orlicz_lab/block_construction.hpp"
#include "orlicz_lab/geometry.hpp"
#include "orlicz_lab/kalton_peck.hpp"
#include "orlicz_lab/luxemburg.hpp"
#include "suites.hpp"

using namespace olab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Criteria that fail for reasons recorded with the project notes:
// AC7 needs distances the finite pipeline cannot reach below n = 2^14, and
// AC10 places K on the side of the sandwich where t^2 (K + psi^2) exceeds it.
const std::set<int> kExpectedFailures{7, 10};

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1);
    return v;
}

double lp_norm(const FiniteVector& x, double p) {
    double s = 0;
    for (double v : x) s += std::pow(std::fabs(v), p);
    return std::pow(s, 1 / p);
}

Outcome ac1() {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_real_distribution<double> ex(-3, 3);
    const double ps[] = {1, 1.5, 2, 3};
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        double p = ps[i % 4];
        FiniteVector x(dim(rng));
        for (auto& v : x) v = nd(rng) * std::pow(10.0, ex(rng));
        auto S = MusielakSection::uniform(OrliczFunction::power(p), x.size());
        double o = lp_norm(x, p);
        worst = std::max(worst, std::fabs(lux_norm(S, x) - o) / o);
    }
    return {worst <= 1e-10, fmt("max relative error %.3g", worst)};
}

Outcome ac2() {
    const char* fams[] = {"power:p=1",         "power:p=1.5",       "power:p=2",         "power:p=3",
                          "powerlog:alpha=-2", "powerlog:alpha=-1", "powerlog:alpha=1", "powerlog:alpha=2"};
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_real_distribution<double> ex(-3, 1);
    double worst_mod = 0, worst_coord = 0;
    for (const char* f : fams) {
        auto M = parse_orlicz_literal(f);
        if (M(1.0) < 1) M = M.with_normalization(1 / M(1.0) * (1 + 1e-15));
        auto S = MusielakSection::uniform(M, 64, true);
        for (int i = 0; i < 1000; ++i) {
            FiniteVector x(dim(rng));
            for (auto& v : x) v = nd(rng) * std::pow(10.0, ex(rng));
            double r = lux_norm(S, x);
            for (auto& v : x) v /= r;
            double s = 0;
            for (double v : x) {
                s += M(std::fabs(v));
                worst_coord = std::max(worst_coord, std::fabs(v));
            }
            worst_mod = std::max(worst_mod, std::fabs(s - 1));
        }
    }
    return {worst_mod <= 1e-8 && worst_coord <= 1 + 1e-12,
            fmt("max |sum M - 1| %.3g", worst_mod) + fmt(", max |x(i)| %.15g", worst_coord)};
}

Outcome ac3() {
    bool ok = true;
    std::string d;
    const double eta = 0.2, tau = 0.5, l1e = std::log1p(eta);
    for (double a : {-2.0, -1.0, 1.0, 2.0}) {
        auto t0 = std::chrono::steady_clock::now();
        auto r = choose_step1(OrliczFunction::power_log(a), mpq_class(1, 2), default_kappa(eta), eta);
        int viol = 0;
        for (double ll : log_grid(1e-8, 1, 200)) {
            double lr = r.N.log_eval(ll + std::log(tau)) - r.N.log_eval(ll);
            if (lr < 2 * std::log(tau) - l1e || lr > 2 * std::log(tau) + l1e) ++viol;
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && viol == 0 && sec < 30;
        d += fmt(" alpha=%g:", a) + " R=" + std::to_string(r.R) + " violations=" + std::to_string(viol) +
             fmt(" %.2fs", sec);
    }
    return {ok, d.substr(1)};
}

Outcome ac4() {
    bool ok = true;
    std::string d;
    for (auto [eps, nu] : {std::pair{0.5, 0.25}, std::pair{0.25, 0.125}})
        for (double a : {-2.0, -1.0, 1.0, 2.0}) {
            auto t0 = std::chrono::steady_clock::now();
            auto r = build_step2(OrliczFunction::power_log(a), eps, nu);
            bool integral = r.weights->all_integral();
            bool unit = r.log_N1 >= 0 && r.N.eval(1.0) >= 1;
            const double l1e = std::log1p(eps);
            int viol = 0;
            auto lts = log_grid(nu, 1, 50);
            for (double ll : log_grid(1e-8, 1, 200)) {
                double base = r.N.log_eval(ll);
                for (double s : lts) {
                    double lr = r.N.log_eval(ll + s) - base;
                    if (lr < 2 * s - l1e || lr > 2 * s + l1e) ++viol;
                }
            }
            double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            ok = ok && integral && unit && viol == 0 && sec < 120;
            d += fmt(" (%g,", eps) + fmt("%g)", nu) + fmt(" alpha=%g:", a) + " R=" + std::to_string(r.step1.R) +
                 (integral ? "" : " non-integer weights") + (unit ? "" : " N(1)<1") +
                 " violations=" + std::to_string(viol) + fmt(" %.1fs", sec);
        }
    return {ok, d.substr(1)};
}

Outcome ac5() {
    double worst = 0, worst_brute = 0;
    for (double p : {1.0, 4.0}) {
        auto S = MusielakSection::uniform(OrliczFunction::power(p), 16);
        for (std::size_t n : {2, 4, 8, 16}) {
            double expect = std::pow(double(n), std::fabs(0.5 - 1 / p));
            worst = std::max(worst, std::fabs(bm_distance_symmetric(S, n).upper - expect));
        }
        for (std::size_t n : {2, 3}) {
            double expect = std::pow(double(n), std::fabs(0.5 - 1 / p));
            auto b = brute_force_distance(MusielakSection::uniform(OrliczFunction::power(p), n), n);
            worst_brute = std::max(worst_brute, std::fabs(b.upper - expect));
        }
    }
    return {worst <= 1e-6 && worst_brute <= 1e-3,
            fmt("formula error %.3g", worst) + fmt(", brute-force error %.3g", worst_brute)};
}

Outcome ac6() {
    const double C = 1.5, nu = 0.25;
    auto r = build_step2(OrliczFunction::power_log(1), C - 1, nu);
    auto N = level_surrogate(r.N, r.N.log_inverse(0.0));
    auto S = MusielakSection::uniform(N, 12, true);
    auto c = verify_lemma32(S, 4, C, nu, 2, 42, 1000);
    return {c.applicable && c.passed,
            fmt("min |||y|||^2 margin %.3g", c.params["worst_lower_margin"].get<double>()) +
                fmt(", max margin %.3g", c.params["worst_upper_margin"].get<double>()) +
                fmt(", measured distance %.6g", c.params["max_measured_distance"].get<double>()) +
                fmt(" <= bound %.6g", c.params["implied_bound"].get<double>())};
}

Outcome ac7() {
    std::string d;
    bool null_ok = false;
    try {
        assemble_ah(OrliczFunction::power(2), 1, {1.1});
        d = "Power(2) reached 1.1";
    } catch (const TargetUnreachable& e) {
        null_ok = std::fabs(e.achieved - 1) <= 1e-6 && e.n_cap == (1u << 14);
        d = fmt("Power(2) unreachable, achieved %.9g", e.achieved);
    }
    bool pipe_ok = false;
    try {
        auto con = assemble_ah(OrliczFunction::power_log(2), 2, {1.05, 1.1});
        pipe_ok = con.all_passed() && con.levels[0].s <= con.levels[1].s;
        d += "; PowerLog(2) s=" + std::to_string(con.levels[0].s) + "," + std::to_string(con.levels[1].s);
    } catch (const TargetUnreachable& e) {
        d += "; PowerLog(2) level " + std::to_string(e.level) + fmt(" reaches only %.7g", e.achieved) +
             " at n <= " + std::to_string(e.n_cap);
    }
    return {null_ok && pipe_ok, d};
}

Outcome ac8() {
    auto S = MusielakSection::uniform(OrliczFunction::power_log(2), 256);
    bool mono = true;
    double prev = 0, d4 = 0, d256 = 0;
    for (std::size_t n = 2; n <= 256; n *= 2) {
        double d = bm_distance_symmetric(S, n).upper;
        mono = mono && d >= prev;
        prev = d;
        if (n == 4) d4 = d;
        if (n == 256) d256 = d;
    }
    return {mono && d256 - d4 > 0.01, fmt("d(4)=%.6g", d4) + fmt(", d(256)=%.6g", d256) + (mono ? ", nondecreasing" : ", not monotone")};
}

Outcome ac9() {
    auto c = inequality_53_check(100000, 42);
    return {c.passed, fmt("worst margin %.3g", c.worst_margin)};
}

// Second divided differences of M over a log grid on [1e-12, 1].
double convexity_margin(const OrliczFunction& M) {
    auto g = log_grid(1e-12, 1, 200);
    double worst = 1e300;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        double t0 = std::exp(g[i - 1]), t1 = std::exp(g[i]), t2 = std::exp(g[i + 1]);
        double s0 = (M(t1) - M(t0)) / (t1 - t0), s1 = (M(t2) - M(t1)) / (t2 - t1);
        worst = std::min(worst, (s1 - s0) / std::max(std::fabs(s0), std::fabs(s1)));
    }
    return worst;
}

Outcome ac10() {
    bool ok = true;
    std::string d;
    const std::pair<const char*, LipschitzFunction> phis[] = {
        {"zero", LipschitzFunction::constant(0)},
        {"identity", LipschitzFunction::identity()},
        {"from-orlicz(power:p=4)", phi_from_orlicz(OrliczFunction::power(4))}};
    for (const auto& [name, phi] : phis) {
        auto s = synthesize_orlicz(mollify(phi));
        double conv = convexity_margin(s.M);
        // Literal constants: c = 1/(2(1+A^2)), C = 2K(1+A^2), c M <= t^2(1+phi^2) <= C M.
        const double c = 1 / (2 * (1 + s.A * s.A)), C = 2 * s.K * (1 + s.A * s.A);
        double lit = 1e300, swapped = 1e300;
        for (double lt : log_grid(1e-12, 1, 200)) {
            double t = std::exp(lt), m = s.M(t), f = phi(-lt) + s.shift, mid = t * t * (1 + f * f);
            lit = std::min({lit, mid / (c * m) - 1, 1 - mid / (C * m)});
            // K on the other side: M / (2K(1+A^2)) <= t^2(1+phi^2) <= 2(1+A^2) M.
            swapped = std::min({swapped, mid * C / m - 1, 1 - mid / (m / c)});
        }
        bool pass = conv >= -1e-9 && lit >= -1e-12;
        d += std::string(name) + fmt(": K=%g", double(s.K)) + fmt(" A=%.4g", s.A) + fmt(" convexity %.2g", conv) +
             fmt(" literal sandwich margin %.4g", lit) + fmt(" (K-swapped %.4g)", swapped);
        if (std::string(name) == "identity") {
            auto e = estimate_indices(s.M);
            bool idx = std::fabs(e.alpha_lo - 2) <= 0.1 && std::fabs(e.beta_hi - 2) <= 0.1;
            pass = pass && idx;
            d += fmt(" indices [%.3f,", e.alpha_lo) + fmt(" %.3f]", e.beta_hi);
        }
        d += "; ";
        ok = ok && pass;
    }
    d.resize(d.size() - 2);
    return {ok, d};
}

Outcome ac11() {
    cli::SuiteParams p;
    p.trials = 100;
    auto r = cli::run_suite("prop54", p);
    double full = r["result"]["worst_full_length_diff"].get<double>();
    return {r["passed"].get<bool>() && full <= 1e-8,
            fmt("worst margin %.3g", r["certificates"][0]["worst_margin"].get<double>()) +
                fmt(", full-length diff %.3g", full)};
}

Outcome ac12() {
    auto p2 = phi_from_orlicz(OrliczFunction::power(2)), p4 = phi_from_orlicz(OrliczFunction::power(4));
    double e2 = 0, e4 = 0;
    for (int i = 0; i < 100; ++i) {
        double x = -10 + 37.7 * i / 99;
        e2 = std::max(e2, std::fabs(p2(x)));
        e4 = std::max(e4, std::fabs(p4(x) - x));
    }
    return {e2 <= 1e-8 && e4 <= 1e-8, fmt("max |phi_2| %.3g", e2) + fmt(", max |phi_4 - x| %.3g", e4)};
}

Outcome ac13() {
    int same = 0;
    std::string diff;
    for (const auto& s : cli::kSuites) {
        cli::SuiteParams p;
        if (cli::canonical_dump(cli::run_suite(s, p)) == cli::canonical_dump(cli::run_suite(s, p)))
            ++same;
        else
            diff += " " + s;
    }
    return {diff.empty(), std::to_string(same) + "/" + std::to_string(cli::kSuites.size()) + " suites identical" + diff};
}

}  // namespace

int main() {
    const std::vector<std::pair<double, std::function<Outcome()>>> acs{
        {5, ac1},   {10, ac2}, {120, ac3}, {960, ac4}, {120, ac5}, {60, ac6}, {600, ac7},
        {120, ac8}, {1, ac9},  {60, ac10}, {60, ac11}, {5, ac12},  {60, ac13}};
    int unexpected = 0;
    for (std::size_t i = 0; i < acs.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = acs[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (sec > acs[i].first) {
            o.pass = false;
            o.detail += fmt("; over the %gs budget", acs[i].first);
        }
        bool expected = kExpectedFailures.count(id) > 0;
        if (!o.pass && !expected) ++unexpected;
        std::printf("AC%-2d %s (%.1fs) %s%s\n", id, o.pass ? "PASS" : "FAIL", sec, o.detail.c_str(),
                    !o.pass && expected ? " [known failure]" : "");
        std::fflush(stdout);
    }
    std::printf("%d unexpected failure(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}
