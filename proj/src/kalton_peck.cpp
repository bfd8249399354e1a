#include "orlicz_lab/kalton_peck.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace olab {

namespace {

double parse_num(const std::string& s, std::size_t pos) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'", pos);
    }
    if (used != s.size()) throw ParseError("trailing characters in number '" + s + "'", pos + used);
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double norm2(const FiniteVector& v) {
    CompensatedSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value());
}

}  // namespace

LipschitzFunction LipschitzFunction::identity() { return {}; }

LipschitzFunction LipschitzFunction::constant(double c) {
    if (!std::isfinite(c)) throw DomainError("constant must be finite");
    LipschitzFunction f;
    f.kind_ = PhiKind::Constant;
    f.L_ = 0;
    f.a_ = c;
    return f;
}

LipschitzFunction LipschitzFunction::clamp(double lo, double hi) {
    if (!(lo < hi)) throw DomainError("clamp needs lo < hi");
    LipschitzFunction f;
    f.kind_ = PhiKind::Clamp;
    f.L_ = 1;
    f.a_ = lo;
    f.b_ = hi;
    return f;
}

LipschitzFunction LipschitzFunction::from_orlicz(const OrliczFunction& M1) {
    LipschitzFunction f;
    f.kind_ = PhiKind::FromOrlicz;
    f.L_ = 2;
    f.M1_ = M1;
    return f;
}

LipschitzFunction LipschitzFunction::tabulated(std::vector<double> x, std::vector<double> y) {
    if (x.size() < 2 || x.size() != y.size()) throw DomainError("tabulated phi needs at least two (x, phi) rows");
    double L = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (!(x[i + 1] > x[i])) throw DomainError("tabulated phi needs strictly increasing x");
        L = std::max(L, std::fabs(y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    LipschitzFunction f;
    f.kind_ = PhiKind::Tabulated;
    f.L_ = L;
    f.xs_ = std::make_shared<const std::vector<double>>(std::move(x));
    f.ys_ = std::make_shared<const std::vector<double>>(std::move(y));
    return f;
}

LipschitzFunction LipschitzFunction::tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::vector<double> x, y;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'x,phi' in " + path, 0);
        try {
            x.push_back(std::stod(line.substr(0, comma)));
            y.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            if (x.empty()) continue;  // header row
            throw ParseError("bad number in " + path, 0);
        }
    }
    auto f = tabulated(std::move(x), std::move(y));
    f.source_ = path;
    return f;
}

double LipschitzFunction::operator()(double x) const {
    switch (kind_) {
        case PhiKind::Identity: return x;
        case PhiKind::Constant: return a_;
        case PhiKind::Clamp: return std::min(std::max(x, a_), b_);
        case PhiKind::FromOrlicz: return 2 * x + 2 * M1_.log_inverse(-2 * x);
        case PhiKind::Tabulated: {
            const auto& xs = *xs_;
            const auto& ys = *ys_;
            std::size_t i;
            if (x <= xs.front())
                i = 0;
            else if (x >= xs.back())
                i = xs.size() - 2;
            else
                i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin() - 1;
            double s = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            return ys[i] + s * (x - xs[i]);
        }
    }
    return 0;
}

std::string LipschitzFunction::literal() const {
    switch (kind_) {
        case PhiKind::Identity: return "identity";
        case PhiKind::Constant: return a_ == 0 ? "zero" : "constant:c=" + fmt(a_);
        case PhiKind::Clamp: return "clamp:lo=" + fmt(a_) + ",hi=" + fmt(b_);
        case PhiKind::FromOrlicz: {
            auto l = M1_.literal();
            return "from-orlicz:" + (l.empty() ? kind_name(M1_.kind()) : l);
        }
        case PhiKind::Tabulated: return "tabulated:file=" + source_;
    }
    return "";
}

nlohmann::json LipschitzFunction::to_json() const {
    nlohmann::json j = {{"literal", literal()}, {"L", L_}};
    switch (kind_) {
        case PhiKind::Identity: j["kind"] = "identity"; break;
        case PhiKind::Constant: j["kind"] = "constant"; j["c"] = a_; break;
        case PhiKind::Clamp: j["kind"] = "clamp"; j["lo"] = a_; j["hi"] = b_; break;
        case PhiKind::FromOrlicz: j["kind"] = "from-orlicz"; j["M1"] = M1_.to_json(); break;
        case PhiKind::Tabulated:
            j["kind"] = "tabulated";
            j["x"] = *xs_;
            j["phi"] = *ys_;
            break;
    }
    if (slope_check) j["slope_check"] = slope_check->to_json();
    return j;
}

LipschitzFunction parse_phi_literal(const std::string& text) {
    if (text == "identity") return LipschitzFunction::identity();
    if (text == "zero") return LipschitzFunction::constant(0);
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("unknown phi literal '" + text + "'", 0);
    std::string kind = text.substr(0, colon);
    std::string body = text.substr(colon + 1);
    const std::size_t off = colon + 1;
    if (kind == "from-orlicz") {
        try {
            return phi_from_orlicz(parse_orlicz_literal(body));
        } catch (const ParseError& e) {
            throw ParseError(std::string("in from-orlicz: ") + e.what(), off + e.pos);
        }
    }
    std::map<std::string, std::pair<std::string, std::size_t>> ps;
    for (std::size_t i = 0; i < body.size();) {
        std::size_t end = body.find_first_of(",;", i);
        if (end == std::string::npos) end = body.size();
        std::string item = body.substr(i, end - i);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value", off + i);
        ps[item.substr(0, eq)] = {item.substr(eq + 1), off + i + eq + 1};
        i = end + 1;
    }
    auto need = [&](const char* key) -> std::pair<std::string, std::size_t> {
        auto it = ps.find(key);
        if (it == ps.end()) throw ParseError(kind + " needs " + key, off);
        return it->second;
    };
    if (kind == "constant") {
        auto c = need("c");
        return LipschitzFunction::constant(parse_num(c.first, c.second));
    }
    if (kind == "clamp") {
        auto lo = need("lo"), hi = need("hi");
        double a = parse_num(lo.first, lo.second), b = parse_num(hi.first, hi.second);
        if (!(a < b)) throw ParseError("clamp needs lo < hi", hi.second);
        return LipschitzFunction::clamp(a, b);
    }
    if (kind == "tabulated") return LipschitzFunction::tabulated_csv(need("file").first);
    throw ParseError("unknown phi kind '" + kind + "'", 0);
}

Certificate empirical_slope_check(const LipschitzFunction& phi, double lo, double hi, int n) {
    if (n < 2 || !(lo < hi)) throw DomainError("slope check needs n >= 2 and lo < hi");
    Certificate c;
    c.name = "lipschitz_slope";
    std::ostringstream g;
    g << "x in [" << lo << ", " << hi << "], " << n << " points";
    c.grid = g.str();
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
    parallel_for(n, [&](std::size_t i) { y[i] = phi(x[i]); });
    double worst = 0;
    std::size_t at = 0;
    for (int i = 0; i + 1 < n; ++i) {
        double s = std::fabs(y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (!std::isfinite(s)) throw NumericError("phi is not finite near x=" + fmt(x[i]));
        if (s > worst) {
            worst = s;
            at = i;
        }
    }
    c.worst_margin = phi.L() + 1e-6 - worst;
    c.passed = c.worst_margin >= 0;
    c.params = {{"L", phi.L()}, {"max_slope", worst}};
    c.witness = "x=" + fmt(x[at]);
    return c;
}

LipschitzFunction phi_from_orlicz(const OrliczFunction& M1) {
    auto f = LipschitzFunction::from_orlicz(M1);
    f.slope_check = empirical_slope_check(f, -20.0, 27.7, 2000);
    return f;
}

FiniteVector omega_phi(const LipschitzFunction& phi, const FiniteVector& g) {
    FiniteVector out(g.size(), 0.0);
    double s = norm2(g);
    if (s == 0) return out;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g[k] != 0) out[k] = g[k] * phi(-std::log(std::fabs(g[k]) / s));
    return out;
}

double kp_quasinorm(const LipschitzFunction& phi, const KPVector& z) {
    if (z.f.size() != z.g.size()) throw DomainError("f and g must have the same length");
    auto w = omega_phi(phi, z.g);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = z.f[k] - w[k];
    return norm2(w) + norm2(z.g);
}

double quasi_triangle_probe(const LipschitzFunction& phi, int trials, std::size_t dim, std::uint64_t seed) {
    if (trials < 1 || dim == 0) throw DomainError("probe needs trials >= 1 and dim >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> scale(-3, 3);
    double worst = 0;
    auto draw = [&] {
        KPVector z{FiniteVector(dim), FiniteVector(dim)};
        double sf = std::pow(10.0, scale(rng)), sg = std::pow(10.0, scale(rng));
        for (std::size_t k = 0; k < dim; ++k) {
            z.f[k] = sf * nd(rng);
            z.g[k] = sg * nd(rng) * std::pow(10.0, scale(rng));
        }
        return z;
    };
    for (int t = 0; t < trials; ++t) {
        KPVector a = draw(), b = draw();
        if (t == 0) b = a;  // the pair (z, z) pins the ratio 1
        // Near-cancelling pairs are where the quasinorm constant shows up.
        if (t % 2 == 1)
            for (std::size_t k = 0; k < dim; ++k) {
                b.g[k] = -a.g[k] + 1e-3 * b.g[k];
                b.f[k] = -a.f[k] + 1e-3 * b.f[k];
            }
        KPVector s{FiniteVector(dim), FiniteVector(dim)};
        for (std::size_t k = 0; k < dim; ++k) {
            s.f[k] = a.f[k] + b.f[k];
            s.g[k] = a.g[k] + b.g[k];
        }
        double den = kp_quasinorm(phi, a) + kp_quasinorm(phi, b);
        if (den > 0) worst = std::max(worst, kp_quasinorm(phi, s) / den);
    }
    return worst;
}

// Bump: exp(-1/(y(1-y))) / Z on (0, 1).
Bump::Bump() : log_Z(0), mean(0) {
    using boost::math::quadrature::gauss_kronrod;
    auto raw = [](double y) {
        double w = y * (1 - y);
        return w <= 0 ? 0.0 : std::exp(-1 / w);
    };
    double Z = gauss_kronrod<double, 61>::integrate(raw, 0.0, 1.0, 15, 1e-13);
    log_Z = std::log(Z);
    mean = gauss_kronrod<double, 61>::integrate([&](double y) { return y * f(y); }, 0.0, 1.0, 15, 1e-13);
}

double Bump::f(double y) const {
    double w = y * (1 - y);
    if (w <= 1.0 / 700) return 0.0;
    return std::exp(-1 / w - log_Z);
}

double Bump::f1(double y) const {
    double w = y * (1 - y);
    if (w <= 1.0 / 700) return 0.0;
    return f(y) * (1 - 2 * y) / (w * w);
}

double Bump::f2(double y) const {
    double w = y * (1 - y);
    if (w <= 1.0 / 700) return 0.0;
    double g = (1 - 2 * y) / (w * w);
    double g1 = -2 * (w + (1 - 2 * y) * (1 - 2 * y)) / (w * w * w);
    return f(y) * (g * g + g1);
}

nlohmann::json MollifiedPhi::to_json() const {
    return {{"phi", phi.to_json()}, {"A", A}, {"b", b}, {"K", K}, {"bump_mean", mean},
            {"claim", claim.to_json()}, {"window", window}};
}

MollifiedPhi mollify(const LipschitzFunction& phi, const MollifyOptions& opt) {
    using boost::math::quadrature::gauss_kronrod;
    if (opt.points < 2 || !(opt.x_lo < opt.x_hi)) throw DomainError("mollify needs a grid with at least two points");
    static const Bump bump;
    auto tab = std::make_shared<PsiTable>();
    tab->x0 = opt.x_lo;
    tab->dx = (opt.x_hi - opt.x_lo) / (opt.points - 1);
    tab->psi.resize(opt.points);
    tab->psi1.resize(opt.points);
    tab->psi2.resize(opt.points);
    std::vector<double> ph(opt.points);

    // phi evaluated through a numerical inverse carries ~1e-12 jitter, which
    // floors the error estimate near kinks; only a 100x miss is fatal.
    std::vector<double> qerr(opt.points, 0.0);
    auto integrate = [&](double x, auto kernel, const char* what, double& worst) {
        double err = 0, l1 = 0;
        double v = gauss_kronrod<double, 31>::integrate([&](double u) { return phi(x - u) * kernel(u); }, 0.0, 1.0,
                                                        30, opt.tol, &err, &l1);
        double rel = err / std::max(1.0, l1);
        if (!(std::isfinite(v) && rel <= 100 * opt.tol))
            throw NumericError(std::string("quadrature for ") + what + " did not converge at x=" + fmt(x));
        worst = std::max(worst, rel);
        return v;
    };
    parallel_for(opt.points, [&](std::size_t i) {
        double x = opt.x_lo + tab->dx * i;
        ph[i] = phi(x);
        tab->psi[i] = integrate(x, [](double u) { return bump.f(u); }, "psi", qerr[i]);
        tab->psi1[i] = integrate(x, [](double u) { return bump.f1(u); }, "psi'", qerr[i]);
        tab->psi2[i] = integrate(x, [](double u) { return bump.f2(u); }, "psi''", qerr[i]);
    });

    MollifiedPhi m;
    m.phi = phi;
    m.mean = bump.mean;
    double A = 0, b = 1e300, d1 = 0;
    std::size_t ia = 0, id = 0;
    for (int i = 0; i < opt.points; ++i) {
        double e = std::fabs(tab->psi[i] - ph[i]);
        if (e > A) {
            A = e;
            ia = i;
        }
        b = std::min(b, tab->psi2[i] - 3 * tab->psi1[i]);
        if (std::fabs(tab->psi1[i]) > d1) {
            d1 = std::fabs(tab->psi1[i]);
            id = i;
        }
    }
    m.A = A;
    m.b = b;
    m.K = std::max<long>(1, static_cast<long>(std::ceil(b * b / 4)));
    m.table = tab;
    std::ostringstream w;
    w << "x in [" << opt.x_lo << ", " << opt.x_hi << "], " << opt.points << " points";
    m.window = w.str();

    const double tol = 1e-8;
    Certificate dev;
    dev.name = "psi_minus_phi_bound";
    dev.grid = m.window;
    dev.worst_margin = phi.L() * bump.mean + tol - A;
    dev.passed = dev.worst_margin >= 0;
    dev.witness = "x=" + fmt(opt.x_lo + tab->dx * ia);
    dev.params = {{"A", A}, {"bound", phi.L() * bump.mean}};
    Certificate der;
    der.name = "psi_derivative_bound";
    der.grid = m.window;
    der.worst_margin = phi.L() + tol - d1;
    der.passed = der.worst_margin >= 0;
    der.witness = "x=" + fmt(opt.x_lo + tab->dx * id);
    der.params = {{"max_abs_psi1", d1}, {"L", phi.L()}};
    m.claim.name = "mollification_bounds";
    m.claim.grid = m.window;
    m.claim.params = {{"quadrature_tol", opt.tol}, {"max_quadrature_error", *std::max_element(qerr.begin(), qerr.end())}};
    m.claim.add(dev);
    m.claim.add(der);
    m.claim.passed = dev.passed && der.passed;
    m.claim.worst_margin = std::min(dev.worst_margin, der.worst_margin);
    return m;
}

nlohmann::json SynthesisResult::to_json() const {
    return {{"M", M.to_json()}, {"K", K},         {"A", A},         {"b", b},
            {"c", c},           {"C", C},         {"shift", shift}, {"certificate", certificate.to_json()}};
}

SynthesisResult synthesize_orlicz(const MollifiedPhi& m) {
    if (!m.table) throw DomainError("mollified phi has no table");
    const double x_hi = -std::log(1e-12);
    double inf = 1e300;
    for (int i = 0; i <= 2770; ++i) inf = std::min(inf, m.phi(x_hi * i / 2770));
    SynthesisResult r;
    r.shift = inf < 0 ? -inf : 0.0;
    auto tab = std::make_shared<PsiTable>(*m.table);
    if (r.shift != 0)
        for (double& v : tab->psi) v += r.shift;
    r.K = m.K;
    r.A = m.A;
    r.b = m.b;
    r.c = 1.0 / (2.0 * m.K * (1 + m.A * m.A));
    r.C = 2.0 * (1 + m.A * m.A);
    r.M = OrliczFunction::synthesized(tab, static_cast<double>(m.K));

    const GridSpec grid{1e-12, 1.0, 200};
    auto conv = check_convexity(r.M, grid, 1e-9);
    if (!conv.passed) throw NumericError("synthesis failure: convexity check failed at " + conv.witness);

    Certificate sw;
    sw.name = "synthesis_sandwich";
    sw.grid = grid.describe();
    double worst = 1e300;
    for (double t : grid.log_points()) {
        double tt = std::exp(t);
        double p = m.phi(-t) + r.shift;
        double ratio = r.M.eval(tt) / (tt * tt * (1 + p * p));
        // c M <= t^2 (1 + phi^2) <= C M  <=>  1/C <= ratio <= 1/c.
        double margin = std::min(ratio * r.C - 1, 1 - ratio * r.c);
        if (margin < worst) {
            worst = margin;
            sw.witness = "t=" + fmt(tt) + " ratio=" + fmt(ratio);
        }
    }
    sw.worst_margin = worst;
    sw.passed = worst >= -1e-12;
    sw.params = {{"c", r.c}, {"C", r.C}};
    if (sw.passed) sw.witness.clear();

    r.certificate.name = "synthesis";
    r.certificate.grid = m.window + "; t in [1e-12, 1]";
    r.certificate.params = {{"K", r.K}, {"A", r.A}, {"b", r.b}, {"shift", r.shift}};
    r.certificate.add(m.claim);
    r.certificate.add(conv);
    r.certificate.add(sw);
    r.certificate.passed = true;
    r.certificate.passed = r.certificate.all_passed();
    r.certificate.worst_margin = std::min({m.claim.worst_margin, conv.worst_margin, sw.worst_margin});
    return r;
}

Certificate inequality_53_check(int samples, std::uint64_t seed) {
    Certificate c;
    c.name = "inequality_53";
    c.grid = "u, v = +-10^U(-6, 6)";
    auto ratio = [](double u, double v) {
        double d = u - v;
        return ((1 + u * u) / (1 + v * v)) / (2 * (1 + d * d));
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ex(-6, 6);
    std::bernoulli_distribution sign;
    double worst = std::max(ratio(1, 0), ratio(0.5, 0.5));
    std::string wit = "u=1 v=0";
    for (int i = 0; i < samples; ++i) {
        double u = std::pow(10.0, ex(rng)) * (sign(rng) ? -1 : 1);
        double v = std::pow(10.0, ex(rng)) * (sign(rng) ? -1 : 1);
        double q = ratio(u, v);
        if (q > worst) {
            worst = q;
            wit = "u=" + fmt(u) + " v=" + fmt(v);
        }
    }
    c.worst_margin = 1 - worst;
    c.passed = worst <= 1;
    c.witness = wit;
    c.params = {{"samples", samples}, {"seed", seed}, {"max_ratio", worst}};
    return c;
}

double expr_51(const LipschitzFunction& phi, const FiniteVector& t) {
    double s = norm2(t);
    if (s == 0) throw DomainError("expr_51 needs a nonzero vector");
    const double p0 = phi(0);
    CompensatedSum acc;
    for (double x : t) {
        if (x == 0) continue;
        double d = phi(-std::log(std::fabs(x) / s)) - p0;
        acc.add(x * x * d * d);
    }
    return s + std::sqrt(acc.value());
}

Certificate partial_sum_bound_check(const LipschitzFunction& phi, const FiniteVector& t,
                                    const std::vector<std::size_t>& prefixes, double tol) {
    for (double x : t)
        if (x == 0 || !std::isfinite(x)) throw DomainError("partial sums need nonzero finite coefficients");
    Certificate c;
    c.name = "partial_sum_bound";
    c.params = {{"L", phi.L()}, {"tol", tol}, {"length", t.size()}};
    const double sigma = norm2(t);
    const double p0 = phi(0);
    double worst = 1e300;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t N : prefixes) {
        if (N == 0 || N > t.size()) throw DomainError("prefix out of range");
        FiniteVector head(t.begin(), t.begin() + N);
        KPVector z{head, head};
        for (double& v : z.f) v *= p0;
        double Q = kp_quasinorm(phi, z);
        double sN = norm2(head);
        FiniteVector d(N);
        for (std::size_t n = 0; n < N; ++n) d[n] = head[n] * (p0 - phi(-std::log(std::fabs(head[n]) / sigma)));
        double E = norm2(d) + sN;
        double bound = phi.L() * sN * std::log(sigma / sN);
        double diff = std::fabs(Q - E);
        double margin = bound + tol - diff;
        rows.push_back({{"N", N}, {"quasinorm", Q}, {"comparison", E}, {"bound", bound}, {"diff", diff}});
        if (margin < worst) {
            worst = margin;
            c.witness = "N=" + std::to_string(N) + " diff=" + fmt(diff) + " bound=" + fmt(bound);
        }
    }
    c.params["rows"] = rows;
    c.worst_margin = prefixes.empty() ? 0 : worst;
    c.passed = c.worst_margin >= 0;
    return c;
}

nlohmann::json EquivalenceReport::to_json() const {
    return {{"min_ratio", min_ratio}, {"max_ratio", max_ratio}, {"spread", spread}, {"growth", growth}};
}

EquivalenceReport equivalence_report(const LipschitzFunction& phi, const OrliczFunction& M, int trials,
                                     std::size_t dim, std::uint64_t seed) {
    if (trials < 1 || dim == 0) throw DomainError("equivalence report needs trials >= 1 and dim >= 1");
    auto S = MusielakSection::uniform(M, dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ex(-4, 0);
    std::uniform_int_distribution<std::size_t> supp(1, dim);
    std::vector<FiniteVector> ts(trials);
    for (auto& t : ts) {
        t.assign(dim, 0.0);
        std::size_t k = supp(rng);
        for (std::size_t n = 0; n < k; ++n) t[n] = nd(rng) * std::pow(10.0, ex(rng));
    }
    std::vector<double> r(trials);
    const double p0 = phi(0);
    parallel_for(trials, [&](std::size_t i) {
        KPVector z{ts[i], ts[i]};
        for (double& v : z.f) v *= p0;
        r[i] = kp_quasinorm(phi, z) / lux_norm(S, ts[i]);
    });
    EquivalenceReport e;
    e.min_ratio = *std::min_element(r.begin(), r.end());
    e.max_ratio = *std::max_element(r.begin(), r.end());
    e.spread = e.max_ratio / e.min_ratio;
    if (!std::isfinite(e.spread)) throw NumericError("equivalence spread is not finite");
    e.growth = (M.eval(1e-8) / 1e-16) / (M.eval(1e-1) / 1e-2);
    return e;
}

double centralizer_probe(const LipschitzFunction& phi, int trials, std::size_t dim, std::uint64_t seed) {
    if (trials < 1 || dim == 0) throw DomainError("probe needs trials >= 1 and dim >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-1, 1);
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        FiniteVector g(dim), u(dim), ug(dim);
        for (auto& x : g) x = nd(rng);
        double s = norm2(g);
        for (auto& x : g) x /= s;
        double umax = 0;
        for (std::size_t k = 0; k < dim; ++k) {
            u[k] = ud(rng);
            umax = std::max(umax, std::fabs(u[k]));
            ug[k] = u[k] * g[k];
        }
        auto a = omega_phi(phi, ug);
        auto b = omega_phi(phi, g);
        for (std::size_t k = 0; k < dim; ++k) a[k] -= u[k] * b[k];
        if (umax > 0) worst = std::max(worst, norm2(a) / umax);
    }
    return worst;
}

}  // namespace olab
