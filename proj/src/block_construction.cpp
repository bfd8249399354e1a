#include "orlicz_lab/block_construction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace olab {

namespace {

nlohmann::json rational_json(const mpq_class& q) {
    return {{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

std::string rational_power_string(const mpq_class& q, long r) {
    if (r == 0) return "1";
    if (r == 1) return q.get_str();
    return q.get_num().get_str() + "^" + std::to_string(r) + "/" + q.get_den().get_str() + "^" +
           std::to_string(r);
}

mpq_class exact_from_double(double x) {
    mpq_class q(x);
    q.canonicalize();
    return q;
}

// Multiplies by a factor just above exp(-log f(1)) when f(1) < 1.
OrliczFunction ensure_unit_at_one(const OrliczFunction& f) {
    double l1 = f.log_eval(0.0);
    if (l1 >= 0) return f;
    auto g = f.with_normalization(std::exp(-l1) * (1 + 4e-16));
    for (int i = 0; i < 8 && g.log_eval(0.0) < 0; ++i) g = g.with_normalization(1 + 1e-15);
    if (g.log_eval(0.0) < 0) throw NumericError("could not normalize level function to 1 at 1");
    return g;
}

OrliczFunction shift_argument(const OrliczFunction& N, double log_scale) {
    if (log_scale == 0.0) return N;
    if (N.kind() == OrliczKind::DilationSum) {
        auto ll = N.log_lambda();
        for (auto& v : ll) v += log_scale;
        return OrliczFunction::dilation_sum(N.base(), ll, N.log_omega()).with_normalization(N.normalization());
    }
    return OrliczFunction::dilation_sum(N, {log_scale}, {0.0});
}

// Lower and upper residuals of the two selection inequalities at R.
std::pair<double, double> selection_residuals(double log_rp, double log_rq, double kappa, double eta, double c,
                                              double C, double tau_q2, long R) {
    double lower = kappa - std::exp(R * log_rp) * kappa / c - 1.0 / (1.0 + eta);
    double upper = (1.0 + eta) - (1.0 / kappa + std::exp(R * log_rq) * C * tau_q2);
    return {lower, upper};
}

}  // namespace

nlohmann::json BlockBasisSpec::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& b : blocks) {
        nlohmann::json e = nlohmann::json::array();
        for (const auto& x : b.entries)
            e.push_back({{"value", format_log10(x.log_value / std::log(10.0), 17)},
                         {"value_exact", x.value_exact},
                         {"count", x.count}});
        j.push_back({{"level", b.level}, {"repeat", std::to_string(b.repeat)}, {"entries", e}});
    }
    return j;
}

std::string BlockBasisSpec::to_csv() const {
    std::ostringstream os;
    os << "block,level,repeat,value,value_exact,count\n";
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (const auto& x : blocks[i].entries)
            os << i + 1 << ',' << blocks[i].level << ',' << blocks[i].repeat << ','
               << format_log10(x.log_value / std::log(10.0), 17) << ',' << x.value_exact << ',' << x.count << '\n';
    return os.str();
}

OrliczFunction induce_block_function(const OrliczFunction& M, const BlockDescriptor& block) {
    if (block.entries.empty()) throw DomainError("block has no entries");
    std::vector<double> ll, lw;
    for (const auto& e : block.entries) {
        if (!(e.log_value <= 0.0) || !std::isfinite(e.log_value))
            throw DomainError("block values must lie in (0,1]");
        if (!std::isfinite(e.log_count) || e.log_count < 0) throw DomainError("block counts must be positive integers");
        ll.push_back(e.log_value);
        lw.push_back(e.log_count);
    }
    if (ll.size() == 1 && ll[0] == 0.0 && lw[0] == 0.0) return M;
    return OrliczFunction::dilation_sum(M, ll, lw);
}

void require_near_hilbert(const OrliczFunction& M) {
    auto idx = estimate_indices(M);
    auto cr = containment_report(idx).front();
    if (!cr.near_hilbert) {
        std::ostringstream os;
        os << "index precondition: estimated range [" << cr.lo << ", " << cr.hi << "] is not within 0.1 of 2";
        throw DomainError(os.str());
    }
}

mpq_class default_kappa(double eta) {
    if (!(eta > 0)) throw DomainError("eta must be positive");
    double lo = 1.0 / (1.0 + eta);
    double w = 1.0 - lo;
    return stern_brocot(lo + 0.25 * w, 1.0 - 0.25 * w);
}

nlohmann::json Step1Result::to_json() const {
    return {{"p", p},
            {"q", q},
            {"delta", delta},
            {"c", c},
            {"C", C},
            {"R", R},
            {"tau", rational_json(tau)},
            {"kappa", rational_json(kappa)},
            {"eta", eta},
            {"lower_residual", lower_residual},
            {"upper_residual", upper_residual},
            {"envelope", {{"u_log_min", envelope.u_log_min}, {"s_log_min", envelope.s_log_min}}}};
}

Step1Result choose_step1(const OrliczFunction& M, const mpq_class& tau_in, const mpq_class& kappa_in, double eta,
                         const Step1Options& opt) {
    mpq_class tau = tau_in, kappa = kappa_in;
    tau.canonicalize();
    kappa.canonicalize();
    if (!(tau > 0 && tau < 1)) throw DomainError("tau must lie in (0,1)");
    if (!(kappa > 0 && kappa < 1)) throw DomainError("kappa must lie in (0,1)");
    if (!(eta > 0) || !std::isfinite(eta)) throw DomainError("eta must be positive");
    if (!(kappa * (1 + exact_from_double(eta)) > 1))
        throw DomainError("precondition: kappa must exceed 1/(1+eta)");
    if (!(opt.lambda_min > 0 && opt.lambda_min < 1)) throw DomainError("lambda_min must lie in (0,1)");
    require_near_hilbert(M);

    const double lt = std::log(tau.get_d()), lk = std::log(kappa.get_d());
    const double kd = kappa.get_d();
    std::vector<std::pair<double, double>> cands;
    if (opt.p || opt.q) {
        if (!opt.p || !opt.q) throw DomainError("give both p and q or neither");
        cands.push_back({*opt.p, *opt.q});
    } else {
        for (int j = 0; j <= 40; ++j) {
            double d = std::ldexp(1.0, -j);
            cands.push_back({2 + d, std::max(1.0, 2 - d)});
        }
    }

    std::optional<Step1Result> best;
    nlohmann::json failures = nlohmann::json::array();
    for (auto [p, q] : cands) {
        const double log_rp = lk + (2 - p) * lt, log_rq = lk + (q - 2) * lt;
        if (!(log_rp < 0 && log_rq < 0)) {
            failures.push_back({{"p", p}, {"q", q}, {"reason", "rate not below 1"}});
            continue;
        }
        const double tau_q2 = std::exp((q - 2) * lt);
        EnvelopeGrid grid;
        grid.u_log_min = std::min(-40.0, std::log(opt.lambda_min) - 10.0);
        long R = 0;
        PowerEnvelope env;
        bool ok = false;
        try {
            for (int round = 0; round < 16; ++round) {
                env = estimate_power_envelope(M, p, q, grid);
                const double a1 = (kd - 1.0 / (1.0 + eta)) * env.c / kd;
                const double a2 = (1.0 + eta - 1.0 / kd) / (env.C * tau_q2);
                double r1 = a1 >= 1 ? 1.0 : std::floor(std::log(a1) / log_rp) + 1;
                double r2 = a2 >= 1 ? 1.0 : std::floor(std::log(a2) / log_rq) + 1;
                double rr = std::max({1.0, r1, r2});
                if (rr > double(opt.R_cap)) {
                    auto [lo, up] = selection_residuals(log_rp, log_rq, kd, eta, env.c, env.C, tau_q2, opt.R_cap);
                    failures.push_back({{"p", p}, {"q", q}, {"c", env.c}, {"C", env.C}, {"reason", "R above cap"},
                                        {"lower_residual_at_cap", lo}, {"upper_residual_at_cap", up}});
                    break;
                }
                R = static_cast<long>(rr);
                // Closed form up to rounding; settle on the exact minimum.
                auto good = [&](long r) {
                    auto [lo, up] = selection_residuals(log_rp, log_rq, kd, eta, env.c, env.C, tau_q2, r);
                    return lo > 0 && up > 0;
                };
                while (!good(R) && R <= opt.R_cap) ++R;
                while (R > 1 && good(R - 1)) --R;
                if (R > opt.R_cap) break;
                // The envelope must cover the ratios used in the selection argument.
                const double need_s = (R + 1) * -lt;
                const double need_u = -std::log(opt.lambda_min) + R * -lt;
                if (need_s <= -grid.s_log_min && need_u <= -grid.u_log_min) {
                    ok = true;
                    break;
                }
                grid.s_log_min = -std::max(1.25 * need_s, -grid.s_log_min);
                grid.u_log_min = -std::max(1.25 * need_u, -grid.u_log_min);
            }
        } catch (const NumericError& e) {
            failures.push_back({{"p", p}, {"q", q}, {"reason", e.what()}});
            continue;
        }
        if (!ok) continue;
        if (best && best->R <= R) continue;
        Step1Result r{p, q, p - 2, env.c, env.C, R, tau, kappa, eta, 0, 0, grid, M};
        auto [lo, up] = selection_residuals(log_rp, log_rq, kd, eta, env.c, env.C, tau_q2, R);
        r.lower_residual = lo;
        r.upper_residual = up;
        best = r;
    }
    if (!best) throw SelectionError("selection failure: no admissible (p, q, R)", failures);

    std::vector<double> ll(2 * best->R + 1), lw(2 * best->R + 1);
    for (long r = 0; r <= 2 * best->R; ++r) {
        ll[r] = r * lt;
        lw[r] = std::labs(r - best->R) * lk - 2.0 * r * lt;
    }
    best->N = OrliczFunction::dilation_sum(M, ll, lw);
    return *best;
}

Step2Result build_step2(const OrliczFunction& M, double eps, double nu, const Step1Options& opt) {
    if (!(eps > 0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
    if (!(nu > 0 && nu < 1)) throw DomainError("nu must lie in (0,1)");
    Step2Result out;
    out.eps = eps;
    out.nu = nu;
    const mpq_class one_eps = 1 + exact_from_double(eps);
    // Smallest-denominator tau with tau^2 (1+eps) > 1; nudge on rounding.
    double lo = std::sqrt(1.0 / (1.0 + eps));
    mpq_class tau;
    for (;;) {
        tau = stern_brocot(lo, 1.0);
        if (tau * tau * one_eps > 1) break;
        lo = tau.get_d();
    }
    long L = 1;
    {
        mpq_class pw = tau, nuq = exact_from_double(nu);
        while (pw > nuq) {
            pw *= tau;
            ++L;
        }
    }
    double eta = 0;
    for (int j = 0; j <= 60; ++j) {
        mpq_class e(1, 1);
        e /= mpq_class(mpz_class(1) << j);
        mpq_class pw = 1;
        for (long i = 0; i < L; ++i) pw *= (1 + e);
        if (tau * tau * one_eps > pw) {
            eta = std::ldexp(1.0, -j);
            break;
        }
    }
    if (eta == 0) throw SelectionError("no dyadic eta satisfies the L-fold inequality", {{"L", L}});
    out.tau = tau;
    out.L = L;
    out.eta = eta;
    out.kappa = default_kappa(eta);
    out.step1 = choose_step1(M, tau, out.kappa, eta, opt);
    auto w = std::make_shared<ExactWeights>(tau, out.kappa, out.step1.R);

    out.log_N1 = w->log_K() + out.step1.N.log_eval(0.0);
    if (out.log_N1 < 0) {
        mpz_class extra(std::ceil(std::exp(-out.log_N1) * (1 + 1e-12)));
        w->scale_K(extra);
        out.log_N1 = w->log_K() + out.step1.N.log_eval(0.0);
    }
    out.weights = w;

    const long R = out.step1.R;
    const double lt = std::log(tau.get_d());
    std::vector<double> ll(2 * R + 1), lw(2 * R + 1);
    for (long r = 0; r <= 2 * R; ++r) {
        ll[r] = r * lt;
        lw[r] = w->log_weight(r);
    }
    out.N = OrliczFunction::dilation_sum(M, ll, lw);
    out.log_sigma = w->log_sigma();
    mpz_class sig;
    if (w->sigma_exact(sig)) out.sigma = sig.get_str();

    Certificate integral;
    integral.name = "integral_weights";
    integral.passed = w->all_integral();
    // Independent rational check at sampled indices.
    std::vector<long> sample = {0, 1, R / 2, R - 1, R, R + 1, (3 * R) / 2, 2 * R - 1, 2 * R};
    std::sort(sample.begin(), sample.end());
    sample.erase(std::unique(sample.begin(), sample.end()), sample.end());
    nlohmann::json checked = nlohmann::json::array();
    for (long r : sample) {
        if (r < 0 || r > 2 * R || w->weight_bits(r) > 4e6) continue;
        mpq_class q = w->weight_rational(r);
        bool same = q.get_den() == 1 && q.get_num() == w->weight(r);
        if (!same) {
            integral.passed = false;
            integral.witness = "rational and factored weights differ at r=" + std::to_string(r);
        }
        checked.push_back(r);
    }
    integral.params = {{"symbolic", w->all_integral()}, {"rational_checked", checked}};
    integral.worst_margin = integral.passed ? 0 : -1;
    out.certificates.push_back(integral);

    Certificate n1;
    n1.name = "N_at_one";
    n1.worst_margin = out.log_N1;
    n1.passed = out.log_N1 >= 0;
    n1.params = {{"log_N1", out.log_N1}};
    out.certificates.push_back(n1);
    return out;
}

nlohmann::json Step2Result::to_json(bool with_weights) const {
    nlohmann::json j = {{"eps", eps},
                        {"nu", nu},
                        {"eta", eta},
                        {"L", L},
                        {"tau", rational_json(tau)},
                        {"kappa", rational_json(kappa)},
                        {"step1", step1.to_json()},
                        {"R", step1.R},
                        {"K", weights->K_string()},
                        {"log_K", weights->log_K()},
                        {"log_N1", log_N1},
                        {"log_sigma", log_sigma},
                        {"sigma", sigma.empty() ? nlohmann::json() : nlohmann::json(sigma)}};
    nlohmann::json ws = nlohmann::json::array();
    const long R = step1.R;
    for (long r = 0; r <= 2 * R; ++r) {
        if (!with_weights && r > 2 && r < 2 * R - 2 && r != R) continue;
        ws.push_back({{"r", r}, {"omega", weights->weight_string(r)}});
    }
    j["weights"] = ws;
    j["weights_complete"] = with_weights;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : certificates) cs.push_back(c.to_json());
    j["certificates"] = cs;
    return j;
}

Certificate verify_dilation_band(const OrliczFunction& N, double e, double t_lo, BandMode mode,
                                 const BandOptions& opt) {
    if (!(e > 0)) throw DomainError("band width must be positive");
    if (!(t_lo > 0 && t_lo <= 1)) throw DomainError("t_lo must lie in (0,1]");
    Certificate c;
    c.name = mode == BandMode::PerStep ? "dilation_band_per_step" : "dilation_band_full";
    std::vector<double> lts;
    if (mode == BandMode::PerStep || t_lo == 1.0) {
        lts = {std::log(t_lo)};
    } else {
        lts = GridSpec{t_lo, 1.0, opt.t_points}.log_points();
    }
    auto lls = opt.lambda.log_points();
    std::ostringstream g;
    g << "lambda " << opt.lambda.describe() << "; t ";
    if (lts.size() == 1) g << "{" << std::exp(lts[0]) << "}";
    else g << GridSpec{t_lo, 1.0, opt.t_points}.describe();
    c.grid = g.str();
    const double l1e = std::log1p(e);
    struct Worst {
        double lower = 1e300, upper = 1e300;
        double l_lambda = 0, l_t = 0, ratio = 0;
        bool lower_side = true;
    };
    std::vector<Worst> ws(lls.size());
    parallel_for(lls.size(), [&](std::size_t i) {
        const double base = N.log_eval(lls[i]);
        Worst w;
        double worst = 1e300;
        for (double s : lts) {
            double lr = N.log_eval(lls[i] + s) - base;
            double ratio = std::exp(lr);
            double lo = std::exp(2 * s - l1e), hi = std::exp(2 * s + l1e);
            double ml = ratio - lo, mu = hi - ratio;
            w.lower = std::min(w.lower, ml);
            w.upper = std::min(w.upper, mu);
            if (std::min(ml, mu) < worst) {
                worst = std::min(ml, mu);
                w.l_lambda = lls[i];
                w.l_t = s;
                w.ratio = ratio;
                w.lower_side = ml <= mu;
            }
        }
        ws[i] = w;
    });
    double lower = 1e300, upper = 1e300;
    std::size_t arg = 0;
    double worst = 1e300;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        lower = std::min(lower, ws[i].lower);
        upper = std::min(upper, ws[i].upper);
        double m = std::min(ws[i].lower, ws[i].upper);
        if (m < worst) {
            worst = m;
            arg = i;
        }
    }
    c.worst_margin = worst;
    c.passed = lower >= 0 && upper >= 0;
    c.params = {{"eps", e}, {"t_lo", t_lo}, {"worst_lower_margin", lower}, {"worst_upper_margin", upper}};
    const auto& w = ws[arg];
    std::ostringstream os;
    os.precision(10);
    os << "lambda=" << std::exp(w.l_lambda) << " t=" << std::exp(w.l_t) << " ratio=" << w.ratio << " band=["
       << std::exp(2 * w.l_t - l1e) << ", " << std::exp(2 * w.l_t + l1e) << "]";
    if (!c.passed) c.witness = os.str();
    c.params["worst_point"] = os.str();
    return c;
}

Certificate exact_weight_identity(const Step2Result& res) {
    Certificate c;
    c.name = "exact_weight_identity";
    const auto& w = *res.weights;
    const long R = w.R();
    const double lt = std::log(res.tau.get_d());
    std::vector<double> lwf(2 * R + 1);
    for (long r = 0; r <= 2 * R; ++r) lwf[r] = w.log_weight_factored(r);
    GridSpec g{1e-12, 1.0, 50};
    c.grid = g.describe();
    auto ls = g.log_points();
    const OrliczFunction& M = res.N.base();
    std::vector<double> err(ls.size());
    parallel_for(ls.size(), [&](std::size_t i) {
        std::vector<double> terms(2 * R + 1);
        for (long r = 0; r <= 2 * R; ++r) terms[r] = lwf[r] + M.log_eval(r * lt + ls[i]);
        err[i] = std::fabs(log_sum_exp(terms) - res.N.log_eval(ls[i]));
    });
    double worst = *std::max_element(err.begin(), err.end());
    // Weights near e^(1e5) carry absolute log rounding of a few 1e-11.
    const double tol = 1e-14 * std::max(1.0, std::fabs(w.log_K())) + 1e-12;
    // Exact integers against their logs at sampled indices.
    double worst_int = 0;
    for (long r : {0L, R, 2 * R}) {
        if (w.weight_bits(r) > 4e6) continue;
        mpz_class z = w.weight(r);
        long ex = 0;
        double m = mpz_get_d_2exp(&ex, z.get_mpz_t());
        worst_int = std::max(worst_int, std::fabs(std::log(m) + ex * std::log(2.0) - w.log_weight(r)));
    }
    c.worst_margin = tol - std::max(worst, worst_int);
    c.passed = c.worst_margin >= 0;
    c.params = {{"max_log_difference", worst}, {"max_integer_log_difference", worst_int}, {"tolerance", tol}};
    return c;
}

OrliczFunction level_surrogate(const OrliczFunction& N, double log_scale, double* max_rel_err) {
    auto shifted = shift_argument(N, log_scale);
    // Evaluating N itself carries an absolute log error of order
    // eps * |log_scale|, which floors the achievable relative accuracy.
    const double tol = std::max(1e-10, 1e-15 * std::fabs(log_scale));
    double err = 1;
    int points = 521;  // 0 falls on a node: 26 units, 20 nodes per unit
    OrliczFunction tab = shifted;
    for (; points <= 16641; points = 2 * points - 1) {
        tab = tabulate(shifted, -25.0, 1.0, points, &err);
        if (err <= tol) break;
    }
    if (err > tol) throw NumericError("surrogate did not reach the relative accuracy " + std::to_string(tol));
    if (max_rel_err) *max_rel_err = err;
    return ensure_unit_at_one(tab);
}

MusielakSection AHConstruction::section() const {
    std::vector<SectionTerm> terms;
    for (const auto& l : levels) terms.push_back({l.surrogate, l.s});
    return MusielakSection(std::move(terms), true);
}

std::uint64_t AHConstruction::level_start(int k) const {
    if (k < 1 || k > static_cast<int>(levels.size())) throw DomainError("level out of range");
    std::uint64_t s = 0;
    for (int i = 0; i + 1 < k; ++i) s += levels[i].s;
    return s;
}

BlockBasisSpec AHConstruction::blocks() const {
    BlockBasisSpec b;
    for (const auto& l : levels) b.blocks.push_back(l.block);
    return b;
}

bool AHConstruction::all_passed() const {
    for (const auto& l : levels)
        for (const auto& c : l.certificates)
            if (c.applicable && !c.all_passed()) return false;
    return true;
}

nlohmann::json AHConstruction::to_json() const {
    nlohmann::json j;
    j["base"] = M.to_json();
    j["targets"] = targets;
    j["special_case"] = special_case;
    j["levels"] = nlohmann::json::array();
    for (const auto& l : levels) {
        nlohmann::json lj = {{"k", l.k},
                             {"eps", l.eps},
                             {"nu", l.nu},
                             {"s", std::to_string(l.s)},
                             {"log_scale", l.log_scale},
                             {"surrogate_error", l.surrogate_error},
                             {"distance", l.distance.to_json()},
                             {"block_entries", l.block.entries.size()}};
        if (l.step2) lj["step2"] = l.step2->to_json();
        lj["certificates"] = nlohmann::json::array();
        for (const auto& c : l.certificates) lj["certificates"].push_back(c.to_json());
        j["levels"].push_back(lj);
    }
    j["all_passed"] = all_passed();
    return j;
}

namespace {

// M(lambda_min t) <= N(t) <= sigma M(t) on a grid, in logs.
Certificate sandwich_certificate(const OrliczFunction& M, const OrliczFunction& N, double log_lambda_min,
                                 double log_sigma) {
    Certificate c;
    c.name = "sandwich";
    GridSpec g{1e-12, 1.0, 50};
    c.grid = g.describe();
    double worst = 1e300;
    for (double s : g.log_points()) {
        double ln = N.log_eval(s);
        double m1 = ln - M.log_eval(log_lambda_min + s);
        double m2 = log_sigma + M.log_eval(s) - ln;
        worst = std::min({worst, m1, m2});
    }
    // Log-domain rounding on weights of size e^(1e5).
    const double tol = 1e-9;
    c.worst_margin = worst;
    c.passed = worst >= -tol;
    c.params = {{"log_lambda_min", log_lambda_min}, {"log_sigma", log_sigma}};
    return c;
}

BlockDescriptor step2_block(const Step2Result& r, int level, std::uint64_t repeat) {
    BlockDescriptor b;
    b.level = level;
    b.repeat = repeat;
    const long R = r.step1.R;
    const double lt = std::log(r.tau.get_d());
    b.entries.reserve(2 * R + 1);
    for (long i = 0; i <= 2 * R; ++i)
        b.entries.push_back({i * lt, rational_power_string(r.tau, i), r.weights->log_weight(i),
                             r.weights->weight_string(i)});
    return b;
}

// The block's induced function has N's scale/weight multiset, and both
// evaluate alike.
Certificate block_identity(const OrliczFunction& M, const BlockDescriptor& b, const Step2Result& r) {
    Certificate c;
    c.name = "block_identity";
    const long R = r.step1.R;
    bool symbolic = static_cast<long>(b.entries.size()) == 2 * R + 1;
    for (long i = 0; symbolic && i <= 2 * R; ++i) {
        symbolic = b.entries[i].value_exact == rational_power_string(r.tau, i) &&
                   b.entries[i].count == r.weights->weight_string(i);
    }
    auto induced = induce_block_function(M, b);
    double worst = 0;
    for (double s : GridSpec{1e-8, 1.0, 20}.log_points())
        worst = std::max(worst, std::fabs(induced.log_eval(s) - r.N.log_eval(s)));
    c.passed = symbolic && worst <= 1e-12;
    c.worst_margin = 1e-12 - worst;
    c.params = {{"symbolic_match", symbolic}, {"max_log_difference", worst}};
    return c;
}

}  // namespace

AHConstruction assemble_ah(const OrliczFunction& M, int k_max, const std::vector<double>& targets,
                           const AHOptions& opt) {
    if (k_max < 1) throw DomainError("k_max must be positive");
    if (static_cast<int>(targets.size()) != k_max) throw DomainError("distance_targets must have length k_max");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!(targets[i] >= 1)) throw DomainError("distance targets must be >= 1");
        if (i > 0 && targets[i] < targets[i - 1]) throw DomainError("distance targets must be nondecreasing");
    }
    require_near_hilbert(M);
    AHConstruction out;
    out.M = M;
    out.targets = targets;
    for (int k = 1; k <= k_max; ++k) {
        AHLevel lv;
        lv.k = k;
        lv.eps = lv.nu = std::ldexp(1.0, -k);
        auto s2 = std::make_shared<Step2Result>(build_step2(M, lv.eps, lv.nu, opt.step1));
        lv.step2 = s2;
        lv.N = s2->N;
        for (const auto& c : s2->certificates) lv.certificates.push_back(c);
        lv.certificates.push_back(verify_dilation_band(s2->N, lv.eps, lv.nu, BandMode::FullBand, opt.band));
        lv.certificates.push_back(exact_weight_identity(*s2));
        const double lt = std::log(s2->tau.get_d());
        lv.certificates.push_back(sandwich_certificate(M, s2->N, 2 * s2->step1.R * lt, s2->log_sigma));
        lv.log_scale = s2->N.log_inverse(0.0);
        lv.surrogate = level_surrogate(s2->N, lv.log_scale, &lv.surrogate_error);

        auto f = constant_profile(lv.surrogate, opt.n_cap);
        double fmax = f[0], fmin = f[0], d = 1;
        std::uint64_t found = 0;
        for (std::size_t n = 1; n <= f.size(); ++n) {
            fmax = std::max(fmax, f[n - 1]);
            fmin = std::min(fmin, f[n - 1]);
            d = fmax / fmin;
            if (d >= targets[k - 1]) {
                found = n;
                break;
            }
        }
        if (!found) {
            out.levels.push_back(lv);
            std::ostringstream os;
            os.precision(10);
            os << "target unreachable at level " << k << ": distance " << d << " at n=" << opt.n_cap << " < "
               << targets[k - 1];
            throw TargetUnreachable(os.str(), k, d, opt.n_cap, out.to_json());
        }
        lv.s = found;
        lv.distance = bm_distance_symmetric(MusielakSection::uniform(lv.surrogate, found, true), found);
        lv.block = step2_block(*s2, k, found);
        lv.certificates.push_back(block_identity(M, lv.block, *s2));
        out.levels.push_back(std::move(lv));
    }
    return out;
}

AHConstruction special_case_blocks(const OrliczFunction& M, int k_max, const std::vector<std::uint64_t>& s) {
    if (k_max < 1) throw DomainError("k_max must be positive");
    if (static_cast<int>(s.size()) != k_max) throw DomainError("s must have length k_max");
    for (auto v : s)
        if (v == 0) throw DomainError("multiplicities must be positive");
    // lambda_k = M^-1(1/k) must be a contraction.
    if (M.log_eval(0.0) < 0) throw DomainError("special case needs M(1) >= 1");
    AHConstruction out;
    out.M = M;
    out.special_case = true;

    // The dilation ratio should settle as lambda -> 0.
    Certificate lim;
    lim.name = "pointwise_limit";
    double worst = 1e300;
    nlohmann::json rows = nlohmann::json::array();
    for (double t : {0.5, 0.25}) {
        double r1 = dilation_ratio(M, 1e-6, t), r2 = dilation_ratio(M, 1e-9, t), r3 = dilation_ratio(M, 1e-12, t);
        double m = std::fabs(r2 - r1) + 1e-12 - std::fabs(r3 - r2);
        worst = std::min(worst, m);
        rows.push_back({{"t", t}, {"ratios", {r1, r2, r3}}});
    }
    lim.worst_margin = worst;
    lim.passed = worst >= 0;
    lim.params = {{"samples", rows}};
    if (!lim.passed) lim.witness = "dilation ratios do not contract toward a limit";

    for (int k = 1; k <= k_max; ++k) {
        AHLevel lv;
        lv.k = k;
        const double lk = std::log(double(k));
        const double l_lambda = M.log_inverse(-lk);
        lv.N = OrliczFunction::dilation_sum(M, {l_lambda}, {lk});
        lv.log_scale = lv.N.log_inverse(0.0);
        lv.surrogate = ensure_unit_at_one(shift_argument(lv.N, lv.log_scale));
        lv.s = s[k - 1];
        lv.distance = bm_distance_symmetric(MusielakSection::uniform(lv.surrogate, lv.s, true), lv.s);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", std::exp(l_lambda));
        lv.block.level = k;
        lv.block.repeat = lv.s;
        lv.block.entries.push_back({l_lambda, buf, lk, std::to_string(k)});
        lv.certificates.push_back(lim);
        out.levels.push_back(std::move(lv));
    }
    return out;
}

}  // namespace olab
