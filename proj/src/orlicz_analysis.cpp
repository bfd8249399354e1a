#include <algorithm>
#include <cmath>
#include <sstream>

#include "orlicz_lab/orlicz.hpp"

namespace olab {

std::string IndexGrid::describe() const {
    std::ostringstream os;
    os << "lambda " << lambda.describe() << "; t " << t.describe() << "; mesh " << mesh;
    return os.str();
}

nlohmann::json IndexEstimate::to_json() const {
    return {{"alpha_lo", alpha_lo}, {"alpha_hi", alpha_hi}, {"beta_lo", beta_lo},
            {"beta_hi", beta_hi},   {"min_slope", min_slope}, {"max_slope", max_slope},
            {"grid", grid_spec}};
}

IndexEstimate estimate_indices(const OrliczFunction& M, const IndexGrid& grid) {
    if (grid.lambda.n < 32 || grid.t.n < 32) throw DomainError("index grids need >= 32 points per axis");
    if (grid.lambda.hi > 1.0 || grid.t.hi > 1.0) throw DomainError("index grids must lie in (0,1]");
    auto ll = grid.lambda.log_points();
    auto lt = grid.t.log_points();
    std::vector<double> lo(ll.size()), hi(ll.size());
    parallel_for(ll.size(), [&](std::size_t i) {
        double base = M.log_eval(ll[i]);
        double mn = 1e300, mx = -1e300;
        for (double s : lt) {
            if (s >= 0.0) continue;
            double slope = (M.log_eval(ll[i] + s) - base) / s;
            mn = std::min(mn, slope);
            mx = std::max(mx, slope);
        }
        lo[i] = mn;
        hi[i] = mx;
    });
    IndexEstimate e;
    e.min_slope = *std::min_element(lo.begin(), lo.end());
    e.max_slope = *std::max_element(hi.begin(), hi.end());
    // M(lt)/(M(l) t^q) <= 1 on the grid iff q <= every sampled slope, and
    // >= 1 iff q >= every sampled slope. Brackets are the mesh cells holding
    // the crossovers.
    const double h = grid.mesh;
    e.alpha_lo = std::floor(e.min_slope / h + 1e-9) * h;
    e.alpha_hi = e.alpha_lo + h;
    e.beta_hi = std::ceil(e.max_slope / h - 1e-9) * h;
    e.beta_lo = e.beta_hi - h;
    e.grid_spec = grid.describe();
    return e;
}

std::vector<ContainmentRange> containment_report(const IndexEstimate& idx, double tol) {
    ContainmentRange r;
    r.lo = idx.alpha_lo;
    r.hi = idx.beta_hi;
    r.near_hilbert = std::fabs(r.lo - 2.0) <= tol && std::fabs(r.hi - 2.0) <= tol;
    std::ostringstream os;
    os << "l_p embeds for p in [" << r.lo << ", " << r.hi << "] (empirical, " << idx.grid_spec << ")";
    if (r.near_hilbert) os << "; near-Hilbert candidate";
    r.note = os.str();
    return {r};
}

namespace {

// Dense uniform part near zero plus a log-spaced tail out to the range end.
std::vector<double> two_scale_axis(double log_min, int n) {
    std::vector<double> out;
    const double near = std::max(log_min, -40.0);
    const int dense = log_min < -40.0 ? n / 2 : n;
    for (int i = 0; i < dense; ++i) out.push_back(near * i / std::max(1, dense - 1));
    if (log_min < -40.0) {
        const int tail = n - dense;
        double a = std::log(40.0), b = std::log(-log_min);
        for (int i = 1; i <= tail; ++i) out.push_back(-std::exp(a + (b - a) * i / tail));
    }
    return out;
}

}  // namespace

PowerEnvelope estimate_power_envelope(const OrliczFunction& M, double p, double q, const EnvelopeGrid& grid) {
    if (!(p > 2.0 && q < 2.0 && q >= 1.0)) throw DomainError("envelope needs p > 2 > q >= 1");
    auto us = two_scale_axis(grid.u_log_min, grid.nu);
    auto ss = two_scale_axis(grid.s_log_min, grid.ns);
    std::sort(ss.begin(), ss.end(), [](double a, double b) { return a > b; });  // 0 first
    const double half = 0.5 * ss.back();
    std::vector<double> cmin(us.size()), cmax(us.size()), hmin(us.size()), hmax(us.size());
    parallel_for(us.size(), [&](std::size_t i) {
        double lu = M.log_eval(us[i]);
        double mn = 1e300, mx = -1e300, hmn = 1e300, hmx = -1e300;
        for (double s : ss) {
            double r = M.log_eval(us[i] + s) - lu;
            double a = r - p * s, b = r - q * s;
            mn = std::min(mn, a);
            mx = std::max(mx, b);
            if (s >= half) {
                hmn = std::min(hmn, a);
                hmx = std::max(hmx, b);
            }
        }
        cmin[i] = mn;
        cmax[i] = mx;
        hmin[i] = hmn;
        hmax[i] = hmx;
    });
    double lc = *std::min_element(cmin.begin(), cmin.end());
    double lC = *std::max_element(cmax.begin(), cmax.end());
    double lc_half = *std::min_element(hmin.begin(), hmin.end());
    double lC_half = *std::max_element(hmax.begin(), hmax.end());
    // A ratio that is genuinely bounded settles; one that grows linearly in
    // the log range means the exponent sits inside the index interval.
    const double span = -half;
    const double rate = 0.1;
    std::ostringstream why;
    if (!std::isfinite(lc) || !std::isfinite(lC)) why << "non-finite envelope";
    else if (lc_half - lc > rate * span) why << "lower envelope keeps falling (p=" << p << ")";
    else if (lC - lC_half > rate * span) why << "upper envelope keeps growing (q=" << q << ")";
    if (!why.str().empty()) throw NumericError("envelope failure: " + why.str());
    PowerEnvelope e;
    e.raw_c = std::exp(lc);
    e.raw_C = std::exp(lC);
    e.c = 0.9 * e.raw_c;
    e.C = 1.1 * e.raw_C;
    if (!(e.c > 0) || !std::isfinite(e.C)) throw NumericError("envelope failure: constants out of range");
    return e;
}

Certificate check_equivalence(const OrliczFunction& M, const OrliczFunction& N, const GridSpec& grid) {
    Certificate cert;
    cert.name = "orlicz_equivalence";
    cert.grid = grid.describe();
    auto lt = grid.log_points();
    const double t0s[] = {0.0, std::log(0.1), std::log(0.01)};
    double bestC = 1e300;
    int bestK = 0;
    double bestT0 = 0;
    std::string witness;
    double worst_rate = 0;
    for (int k = 0; k <= 10; ++k) {
        const double lk = k * std::log(2.0);
        std::vector<double> h(lt.size());
        for (std::size_t i = 0; i < lt.size(); ++i) {
            double ln = N.log_eval(lt[i]);
            h[i] = std::max(M.log_eval(lt[i] - lk) - ln, ln - M.log_eval(lt[i] + lk));
        }
        for (double t0 : t0s) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < lt.size(); ++i)
                if (lt[i] <= t0 + 1e-12) idx.push_back(i);
            if (idx.size() < 8) continue;
            std::size_t mid = idx.size() / 2;
            double lower = -1e300, upper = -1e300;
            std::size_t argl = idx[0];
            for (std::size_t j = 0; j < idx.size(); ++j) {
                double v = h[idx[j]];
                if (j < mid) {
                    if (v > lower) { lower = v; argl = idx[j]; }
                } else {
                    upper = std::max(upper, v);
                }
            }
            double span = lt[idx[mid]] - lt[idx[0]];
            double rate = (lower - upper) / span;
            if (rate > 0.1) {
                if (rate > worst_rate) {
                    worst_rate = rate;
                    std::ostringstream os;
                    os.precision(6);
                    os << "ratio grows toward 0: t=" << std::exp(lt[argl]) << " K=" << (1 << k)
                       << " log-ratio " << lower;
                    witness = os.str();
                }
                continue;
            }
            double C = std::exp(std::max(lower, upper));
            if (C < bestC) {
                bestC = C;
                bestK = 1 << k;
                bestT0 = std::exp(t0);
            }
        }
    }
    if (bestK > 0) {
        cert.passed = true;
        cert.worst_margin = 0;
        cert.params = {{"C", std::max(1.0, bestC)}, {"K", bestK}, {"t0", bestT0}};
    } else {
        cert.passed = false;
        cert.worst_margin = -worst_rate;
        cert.witness = witness;
    }
    return cert;
}

Certificate check_convexity(const OrliczFunction& M, const GridSpec& grid, double tol) {
    Certificate cert;
    cert.name = "convexity";
    cert.grid = grid.describe();
    auto ts = grid.points();
    std::vector<double> v(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) { v[i] = M.eval(ts[i]); });
    double worst = 1e300;
    std::string wit;
    bool monotone = true;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        double sl = (v[i] - v[i - 1]) / (ts[i] - ts[i - 1]);
        double sr = (v[i + 1] - v[i]) / (ts[i + 1] - ts[i]);
        double scale = std::max({std::fabs(sl), std::fabs(sr), 1e-300});
        double margin = (sr - sl) / scale + tol;
        if (margin < worst) {
            worst = margin;
            std::ostringstream os;
            os.precision(6);
            os << "t=" << ts[i];
            wit = os.str();
        }
        if (v[i] < v[i - 1]) monotone = false;
    }
    cert.worst_margin = worst;
    cert.passed = worst >= 0 && monotone && v.front() >= 0;
    if (!cert.passed) cert.witness = monotone ? wit : "values decrease on the grid";
    cert.params = {{"tol", tol}};
    return cert;
}

}  // namespace olab
