#include "orlicz_lab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/interpolators/cubic_hermite.hpp>
// pchip.hpp in Boost 1.74 calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

namespace olab {

namespace detail {

using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;

struct OrliczImpl {
    OrliczKind kind = OrliczKind::Power;
    double norm = 1.0;
    double log_norm = 0.0;
    double cutoff = 1.0;

    double p = 2.0;

    double alpha = 0.0;
    double log_eps = 0.0;
    double me = 0.0;   // M(eps)
    double dme = 0.0;  // M'(eps)

    std::shared_ptr<const OrliczFunction> base;
    std::vector<double> log_lambda, log_omega;

    std::shared_ptr<const PsiTable> psi;
    double K = 1.0;

    std::vector<double> tlog, mlog, slope;
    bool extrapolate_below = false;
    double t_max = 1.0, m_max = 0.0, dm_max = 0.0;
    std::shared_ptr<const Hermite> interp;
    std::string source;
};

}  // namespace detail

using detail::OrliczImpl;

namespace {

double lerp_cubic(double h, double y0, double y1, double d0, double d1, double u) {
    double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 +
           (u3 - u2) * h * d1;
}

double lerp_cubic_deriv(double h, double y0, double y1, double d0, double d1, double u) {
    double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * h * d0 + (-6 * u2 + 6 * u) * y1 +
            (3 * u2 - 2 * u) * h * d1) /
           h;
}

}  // namespace

double PsiTable::value(double x) const {
    const std::size_t n = psi.size();
    if (x <= x0) return psi.front() + psi1.front() * (x - x0);
    double xm = x_max();
    if (x >= xm) return psi.back() + psi1.back() * (x - xm);
    double pos = (x - x0) / dx;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 2);
    return lerp_cubic(dx, psi[i], psi[i + 1], psi1[i], psi1[i + 1], pos - i);
}

double PsiTable::deriv(double x) const {
    const std::size_t n = psi.size();
    if (x <= x0) return psi1.front();
    if (x >= x_max()) return psi1.back();
    double pos = (x - x0) / dx;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 2);
    return lerp_cubic(dx, psi1[i], psi1[i + 1], psi2[i], psi2[i + 1], pos - i);
}

double PsiTable::deriv2(double x) const {
    const std::size_t n = psi.size();
    if (x <= x0 || x >= x_max()) return 0.0;
    double pos = (x - x0) / dx;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 2);
    return lerp_cubic_deriv(dx, psi1[i], psi1[i + 1], psi2[i], psi2[i + 1], pos - i);
}

std::string kind_name(OrliczKind k) {
    switch (k) {
        case OrliczKind::Power: return "power";
        case OrliczKind::PowerLog: return "powerlog";
        case OrliczKind::DilationSum: return "dilsum";
        case OrliczKind::Synthesized: return "synthesized";
        case OrliczKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

double power_log_cutoff(double alpha) {
    // M'' = L^(alpha-2) (2L^2 - 3 alpha L + alpha(alpha-1)) with L = -log t,
    // M' > 0 iff 2L > alpha.
    double disc = alpha * alpha + 8.0 * alpha;
    double root = disc >= 0 ? (3.0 * alpha + std::sqrt(disc)) / 4.0 : -1e300;
    double eps = 0.25;
    for (int i = 0; i < 1100; ++i) {
        double L = -std::log(eps);
        if (L > root && 2.0 * L > alpha) return eps;
        eps *= 0.5;
    }
    throw NumericError("no admissible cutoff for powerlog alpha=" + std::to_string(alpha));
}

OrliczFunction OrliczFunction::power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power exponent must be >= 1");
    auto im = std::make_shared<OrliczImpl>();
    im->kind = OrliczKind::Power;
    im->p = p;
    im->cutoff = 1.0;
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::power_log(double alpha) {
    return power_log(alpha, power_log_cutoff(alpha));
}

OrliczFunction OrliczFunction::power_log(double alpha, double cutoff_eps) {
    if (!std::isfinite(alpha)) throw DomainError("powerlog alpha must be finite");
    if (!(cutoff_eps > 0 && cutoff_eps < 1)) throw DomainError("powerlog cutoff must lie in (0,1)");
    auto im = std::make_shared<OrliczImpl>();
    im->kind = OrliczKind::PowerLog;
    im->alpha = alpha;
    im->cutoff = cutoff_eps;
    im->log_eps = std::log(cutoff_eps);
    double L = -im->log_eps;
    im->me = cutoff_eps * cutoff_eps * std::pow(L, alpha);
    im->dme = cutoff_eps * std::pow(L, alpha - 1.0) * (2.0 * L - alpha);
    if (!(im->dme > 0)) throw DomainError("powerlog cutoff leaves the increasing range");
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::dilation_sum(const OrliczFunction& base, std::vector<double> log_lambda,
                                            std::vector<double> log_omega) {
    if (log_lambda.size() != log_omega.size() || log_lambda.empty())
        throw DomainError("dilation sum needs matching non-empty scale and weight lists");
    for (double l : log_lambda)
        if (!(l <= 0.0) || std::isnan(l)) throw DomainError("dilation scales must lie in (0,1]");
    for (double w : log_omega)
        if (!std::isfinite(w)) throw DomainError("dilation weights must be positive and finite");
    auto im = std::make_shared<OrliczImpl>();
    im->kind = OrliczKind::DilationSum;
    im->base = std::make_shared<const OrliczFunction>(base);
    im->log_lambda = std::move(log_lambda);
    im->log_omega = std::move(log_omega);
    // The sum is convex wherever every term is; the tightest term cutoff is
    // at the largest scale.
    double lmax = *std::max_element(im->log_lambda.begin(), im->log_lambda.end());
    im->cutoff = std::min(1.0, base.cutoff_eps() / std::exp(lmax));
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::dilation_sum(const OrliczFunction& base,
                                            const std::vector<std::pair<double, double>>& lambda_omega) {
    std::vector<double> ll, lw;
    for (auto [l, w] : lambda_omega) {
        if (!(l > 0 && l <= 1)) throw DomainError("dilation scale outside (0,1]");
        if (!(w > 0)) throw DomainError("dilation weight must be positive");
        ll.push_back(std::log(l));
        lw.push_back(std::log(w));
    }
    return dilation_sum(base, std::move(ll), std::move(lw));
}

OrliczFunction OrliczFunction::synthesized(std::shared_ptr<const PsiTable> psi, double K) {
    if (!psi || psi->psi.size() < 2) throw DomainError("synthesized function needs a psi table");
    if (!(K >= 1)) throw DomainError("synthesized K must be >= 1");
    auto im = std::make_shared<OrliczImpl>();
    im->kind = OrliczKind::Synthesized;
    im->psi = std::move(psi);
    im->K = K;
    im->cutoff = 1.0;
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::tabulated(std::vector<double> log_t, std::vector<double> log_m,
                                         std::vector<double> slopes, bool extrapolate_below) {
    const std::size_t n = log_t.size();
    if (n < 4 || log_m.size() != n) throw DomainError("tabulated function needs >= 4 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(log_t[i] > log_t[i - 1])) throw DomainError("tabulated grid must be strictly increasing");
    for (double v : log_m)
        if (!std::isfinite(v)) throw DomainError("tabulated values must be positive");
    if (slopes.empty()) {
        auto xs = log_t, ys = log_m;
        boost::math::interpolators::pchip<std::vector<double>> pc(std::move(xs), std::move(ys));
        slopes.resize(n);
        for (std::size_t i = 0; i < n; ++i) slopes[i] = pc.prime(log_t[i]);
    }
    if (slopes.size() != n) throw DomainError("tabulated slopes must match the grid");
    auto im = std::make_shared<OrliczImpl>();
    im->kind = OrliczKind::Tabulated;
    im->tlog = log_t;
    im->mlog = log_m;
    im->slope = slopes;
    im->extrapolate_below = extrapolate_below;
    im->t_max = std::exp(log_t.back());
    im->m_max = std::exp(log_m.back());
    im->dm_max = im->m_max * slopes.back() / im->t_max;
    im->cutoff = std::min(1.0, im->t_max);
    im->interp = std::make_shared<const detail::Hermite>(std::move(log_t), std::move(log_m), std::move(slopes));
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::tabulated_csv(const std::string& path, bool extrapolate_below) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open tabulated file " + path);
    std::vector<double> lt, lm;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (lt.empty()) continue;  // header
            throw ParseError("bad tabulated row in " + path, lineno);
        }
        if (!(b > 0)) throw ParseError("tabulated values must be positive", lineno);
        lt.push_back(a * std::log(10.0));
        lm.push_back(std::log(b));
    }
    auto f = tabulated(std::move(lt), std::move(lm), {}, extrapolate_below);
    auto im = std::make_shared<OrliczImpl>(f.impl());
    im->source = path;
    return OrliczFunction(im);
}

OrliczFunction OrliczFunction::with_normalization(double c) const {
    if (!(c > 0) || !std::isfinite(c)) throw DomainError("normalization must be positive");
    auto im = std::make_shared<OrliczImpl>(impl());
    im->norm = impl().norm * c;
    im->log_norm = std::log(im->norm);
    return OrliczFunction(im);
}

OrliczKind OrliczFunction::kind() const { return impl().kind; }
double OrliczFunction::cutoff_eps() const { return impl().cutoff; }
double OrliczFunction::normalization() const { return impl().norm; }

double OrliczFunction::log_eval(double s) const {
    const auto& m = impl();
    if (std::isnan(s)) throw DomainError("log argument is NaN");
    if (s == kNegInf) return kNegInf;
    double v = 0.0;
    switch (m.kind) {
        case OrliczKind::Power: v = m.p * s; break;
        case OrliczKind::PowerLog:
            if (s <= m.log_eps)
                v = 2.0 * s + m.alpha * std::log(-s);
            else
                v = std::log(m.me + m.dme * (std::exp(s) - m.cutoff));
            break;
        case OrliczKind::DilationSum: {
            thread_local std::vector<double> buf;
            const std::size_t n = m.log_lambda.size();
            buf.resize(n);
            double mx = kNegInf;
            for (std::size_t j = 0; j < n; ++j) {
                buf[j] = m.log_omega[j] + m.base->log_eval(m.log_lambda[j] + s);
                mx = std::max(mx, buf[j]);
            }
            if (mx == kNegInf) return kNegInf;
            CompensatedSum acc;
            for (std::size_t j = 0; j < n; ++j) acc.add(std::exp(buf[j] - mx));
            v = mx + std::log(acc.value());
            break;
        }
        case OrliczKind::Synthesized: {
            double ps = m.psi->value(-s);
            v = 2.0 * s + std::log(m.K + ps * ps);
            break;
        }
        case OrliczKind::Tabulated:
            if (s < m.tlog.front()) {
                if (!m.extrapolate_below)
                    throw DomainError("tabulated function queried below its grid minimum");
                v = m.mlog.front() + m.slope.front() * (s - m.tlog.front());
            } else if (s > m.tlog.back()) {
                v = std::log(m.m_max + m.dm_max * (std::exp(s) - m.t_max));
            } else {
                v = (*m.interp)(s);
            }
            break;
    }
    return v + m.log_norm;
}

double OrliczFunction::log_slope(double s) const {
    const auto& m = impl();
    switch (m.kind) {
        case OrliczKind::Power: return m.p;
        case OrliczKind::PowerLog: {
            if (s <= m.log_eps) return 2.0 + m.alpha / s;
            double t = std::exp(s);
            return t * m.dme / (m.me + m.dme * (t - m.cutoff));
        }
        case OrliczKind::DilationSum: {
            const std::size_t n = m.log_lambda.size();
            std::vector<double> terms(n);
            double mx = kNegInf;
            for (std::size_t j = 0; j < n; ++j) {
                terms[j] = m.log_omega[j] + m.base->log_eval(m.log_lambda[j] + s);
                mx = std::max(mx, terms[j]);
            }
            CompensatedSum w, ws;
            for (std::size_t j = 0; j < n; ++j) {
                double e = std::exp(terms[j] - mx);
                w.add(e);
                if (e > 0) ws.add(e * m.base->log_slope(m.log_lambda[j] + s));
            }
            return ws.value() / w.value();
        }
        case OrliczKind::Synthesized: {
            double x = -s;
            double ps = m.psi->value(x);
            return 2.0 - 2.0 * ps * m.psi->deriv(x) / (m.K + ps * ps);
        }
        case OrliczKind::Tabulated:
            if (s < m.tlog.front()) return m.slope.front();
            if (s > m.tlog.back()) {
                double t = std::exp(s);
                return t * m.dm_max / (m.m_max + m.dm_max * (t - m.t_max));
            }
            return m.interp->prime(s);
    }
    return 0.0;
}

double OrliczFunction::eval(double t) const {
    if (!(t >= 0)) throw DomainError("Orlicz functions are evaluated at t >= 0");
    if (t == 0) return 0.0;
    return std::exp(log_eval(std::log(t)));
}

double OrliczFunction::derivative(double t) const {
    if (!(t > 0)) {
        if (t == 0) return kind() == OrliczKind::Power && p() == 1.0 ? normalization() : 0.0;
        throw DomainError("derivative needs t >= 0");
    }
    double s = std::log(t);
    return std::exp(log_eval(s) - s) * log_slope(s);
}

double OrliczFunction::log_inverse_bisect(double log_y) const {
    if (std::isnan(log_y)) throw DomainError("inverse of NaN");
    if (log_y == kNegInf) return kNegInf;
    auto f = [&](double s) { return log_eval(s) - log_y; };
    double lo = 0.0, hi = 0.0;
    double f0 = f(0.0);
    if (f0 == 0.0) return 0.0;
    if (f0 < 0) {
        double step = 1.0;
        for (;;) {
            lo = hi;
            hi += step;
            if (f(hi) >= 0) break;
            step *= 2;
            if (hi > 1e6) throw NumericError("value unreachable by bracket doubling");
        }
    } else {
        double step = 1.0;
        for (;;) {
            hi = lo;
            lo -= step;
            if (f(lo) < 0) break;
            step *= 2;
            if (lo < -1e9) throw NumericError("value below the reachable range");
        }
    }
    auto tol = [](double a, double b) {
        return std::fabs(b - a) <= 1e-14 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
    };
    std::uintmax_t iters = 400;
    auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
    // Upper end keeps M(t) >= y, matching the smallest-t convention on flats.
    return r.second;
}

double OrliczFunction::log_inverse(double log_y) const {
    const auto& m = impl();
    if (m.kind == OrliczKind::Power && std::isfinite(log_y)) return (log_y - m.log_norm) / m.p;
    return log_inverse_bisect(log_y);
}

double OrliczFunction::inverse(double y) const {
    if (!(y >= 0)) throw DomainError("inverse needs y >= 0");
    if (y == 0) return 0.0;
    return std::exp(log_inverse(std::log(y)));
}

double OrliczFunction::p() const {
    if (kind() != OrliczKind::Power) throw DomainError("not a power function");
    return impl().p;
}
double OrliczFunction::alpha() const {
    if (kind() != OrliczKind::PowerLog) throw DomainError("not a powerlog function");
    return impl().alpha;
}
const OrliczFunction& OrliczFunction::base() const {
    if (kind() != OrliczKind::DilationSum) throw DomainError("not a dilation sum");
    return *impl().base;
}
const std::vector<double>& OrliczFunction::log_lambda() const {
    if (kind() != OrliczKind::DilationSum) throw DomainError("not a dilation sum");
    return impl().log_lambda;
}
const std::vector<double>& OrliczFunction::log_omega() const {
    if (kind() != OrliczKind::DilationSum) throw DomainError("not a dilation sum");
    return impl().log_omega;
}
std::shared_ptr<const PsiTable> OrliczFunction::psi() const {
    if (kind() != OrliczKind::Synthesized) throw DomainError("not a synthesized function");
    return impl().psi;
}
double OrliczFunction::synth_K() const {
    if (kind() != OrliczKind::Synthesized) throw DomainError("not a synthesized function");
    return impl().K;
}
const std::vector<double>& OrliczFunction::table_log_t() const {
    if (kind() != OrliczKind::Tabulated) throw DomainError("not a tabulated function");
    return impl().tlog;
}
const std::vector<double>& OrliczFunction::table_log_m() const {
    if (kind() != OrliczKind::Tabulated) throw DomainError("not a tabulated function");
    return impl().mlog;
}

const std::vector<double>& OrliczFunction::table_slopes() const {
    if (kind() != OrliczKind::Tabulated) throw DomainError("not a tabulated function");
    return impl().slope;
}
bool OrliczFunction::table_extrapolates_below() const {
    if (kind() != OrliczKind::Tabulated) throw DomainError("not a tabulated function");
    return impl().extrapolate_below;
}

double dilation_ratio(const OrliczFunction& M, double lambda, double t) {
    if (!(lambda > 0 && lambda <= 1) || !(t > 0 && t <= 1))
        throw DomainError("dilation_ratio needs lambda, t in (0,1]");
    double ll = std::log(lambda);
    double den = M.log_eval(ll);
    if (den == kNegInf) {
        std::ostringstream os;
        os << "M(lambda) underflows at lambda=" << lambda;
        throw NumericError(os.str());
    }
    return std::exp(M.log_eval(ll + std::log(t)) - den);
}

OrliczFunction tabulate(const OrliczFunction& M, double log_lo, double log_hi, int points,
                        double* max_rel_err) {
    if (points < 4 || !(log_hi > log_lo)) throw DomainError("tabulate needs >= 4 points on a proper range");
    std::vector<double> lt(points), lm(points), sl(points);
    parallel_for(points, [&](std::size_t i) {
        lt[i] = log_lo + (log_hi - log_lo) * static_cast<double>(i) / (points - 1);
        lm[i] = M.log_eval(lt[i]);
        sl[i] = M.log_slope(lt[i]);
    });
    auto out = OrliczFunction::tabulated(lt, lm, sl, true);
    if (max_rel_err) {
        std::vector<double> err(points - 1);
        parallel_for(points - 1, [&](std::size_t i) {
            double mid = 0.5 * (lt[i] + lt[i + 1]);
            err[i] = std::fabs(std::expm1(out.log_eval(mid) - M.log_eval(mid)));
        });
        *max_rel_err = *std::max_element(err.begin(), err.end());
    }
    return out;
}

}  // namespace olab
