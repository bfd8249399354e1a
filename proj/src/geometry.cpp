#include "orlicz_lab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>

namespace olab {

nlohmann::json BMDistanceEstimate::to_json() const {
    return {{"n", n},
            {"lower", lower},
            {"upper", upper},
            {"method_lower", method_lower},
            {"method_upper", method_upper},
            {"refinement_flag", refinement_flag}};
}

namespace {

double sum_sq(const FiniteVector& x, const std::vector<double>& w) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(w[i] * x[i] * x[i]);
    return s.value();
}

// M'(t) at t = e^s.
double derivative_at(const OrliczFunction& M, double s) { return std::exp(M.log_eval(s) - s) * M.log_slope(s); }

// Euclidean projection onto the nonincreasing cone (pool adjacent
// violators), then onto the nonnegative orthant.
void project_monotone(FiniteVector& x) {
    std::vector<double> val, wt;
    std::vector<std::size_t> len;
    for (double v : x) {
        val.push_back(v);
        wt.push_back(1);
        len.push_back(1);
        while (val.size() > 1 && val[val.size() - 2] < val.back()) {
            std::size_t k = val.size() - 1;
            double w = wt[k - 1] + wt[k];
            val[k - 1] = (wt[k - 1] * val[k - 1] + wt[k] * val[k]) / w;
            wt[k - 1] = w;
            len[k - 1] += len[k];
            val.pop_back();
            wt.pop_back();
            len.pop_back();
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < val.size(); ++b)
        for (std::size_t j = 0; j < len[b]; ++j) x[i++] = std::max(0.0, val[b]);
}

// sign * (log |x|_S - log |x|_w) for x >= 0.
struct RatioObjective {
    const MusielakSection& S;
    std::vector<OrliczFunction> fs;
    std::vector<double> w;
    double sign;

    double value(const FiniteVector& x) const {
        double e = sum_sq(x, w);
        if (!(e > 0)) return -1e300;
        return sign * (std::log(lux_norm(S, x)) - 0.5 * std::log(e));
    }

    FiniteVector gradient(const FiniteVector& x) const {
        const double rho = lux_norm(S, x);
        const double e = sum_sq(x, w);
        FiniteVector d(x.size(), 0.0), g(x.size());
        CompensatedSum den;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] <= 0) continue;
            d[i] = derivative_at(fs[i], std::log(x[i] / rho));
            den.add(d[i] * x[i]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            // Directional limit at x_i = 0 uses M_i'(0+) = 0.
            g[i] = sign * (d[i] / den.value() - w[i] * x[i] / e);
        }
        return g;
    }
};

void normalize_max(FiniteVector& x) {
    double m = *std::max_element(x.begin(), x.end());
    if (m > 0)
        for (auto& v : x) v /= m;
}

// Projected gradient ascent with backtracking; returns the final value.
double refine(const RatioObjective& obj, FiniteVector& x, bool monotone, int max_iter) {
    auto project = [&](FiniteVector& v) {
        if (monotone) project_monotone(v);
        else
            for (auto& a : v) a = std::max(0.0, a);
        normalize_max(v);
    };
    project(x);
    double f = obj.value(x);
    double step = 0.1;
    int stall = 0;
    for (int it = 0; it < max_iter && step > 1e-14; ++it) {
        auto g = obj.gradient(x);
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            FiniteVector y = x;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += step * g[i];
            project(y);
            double fy = obj.value(y);
            if (fy > f) {
                stall = (fy - f < 1e-14 * std::max(1.0, std::fabs(f))) ? stall + 1 : 0;
                x = y;
                f = fy;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved || stall >= 10) break;
    }
    return f;
}

RatioResult ratio_search(const MusielakSection& S, std::size_t n, const std::vector<double>& w, RatioDirection dir,
                         const RatioOptions& opt) {
    if (n == 0 || n > S.total_dim()) throw DomainError("dimension must lie in [1, total_dim]");
    const bool ident = S.identical();
    bool unit_w = std::all_of(w.begin(), w.end(), [](double v) { return v == 1.0; });
    RatioObjective obj{S, S.functions(n), w, dir == RatioDirection::NormOverEuclid ? 1.0 : -1.0};
    RatioResult res;
    double best = -1e300;
    FiniteVector best_x;
    if (ident && unit_w) {
        // Constant vectors through the inverse: |1_k| = 1 / M^-1(1/k).
        auto f = constant_profile(obj.fs[0], n);
        for (std::size_t k = 1; k <= n; ++k) {
            double v = obj.sign * -std::log(f[k - 1]);
            if (v > best) {
                best = v;
                best_x.assign(n, 0.0);
                std::fill(best_x.begin(), best_x.begin() + k, 1.0);
            }
        }
    } else {
        std::vector<FiniteVector> cands;
        for (std::size_t j = 0; j < n; ++j) {
            FiniteVector e(n, 0.0);
            e[j] = 1;
            cands.push_back(e);
        }
        for (std::size_t k = 2; k <= n; ++k) {
            FiniteVector c(n, 0.0);
            std::fill(c.begin(), c.begin() + k, 1.0);
            cands.push_back(c);
        }
        for (auto& c : cands) {
            double v = obj.value(c);
            if (v > best) {
                best = v;
                best_x = c;
            }
        }
    }
    res.structured = std::exp(best);
    if (opt.refine && n > 1 && n <= opt.refine_max_n) {
        std::vector<FiniteVector> starts{best_x};
        for (int s = 0; s < opt.starts; ++s) {
            std::mt19937_64 rng(opt.seed + 1000003ULL * (s + 1));
            std::uniform_real_distribution<double> U(0.0, 1.0);
            FiniteVector x(n);
            for (auto& v : x) v = U(rng);
            if (ident) std::sort(x.begin(), x.end(), std::greater<>());
            starts.push_back(x);
        }
        std::vector<double> vals(starts.size());
        parallel_for(starts.size(),
                     [&](std::size_t i) { vals[i] = refine(obj, starts[i], ident, opt.max_iter); });
        for (std::size_t i = 0; i < starts.size(); ++i)
            if (vals[i] > best) {
                best = vals[i];
                best_x = starts[i];
            }
    }
    res.value = std::exp(best);
    res.witness = best_x;
    res.refined_better = std::fabs(res.value / res.structured - 1) > 1e-6;
    return res;
}

// GSL simplex minimizer; stops on simplex size below size_tol or max_iter.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int max_iter, double size_tol, double* fbest) {
    const std::size_t d = x0.size();
    struct Ctx {
        const std::function<double(const std::vector<double>&)>* f;
        std::vector<double> buf;
    } ctx{&f, std::vector<double>(d)};
    gsl_multimin_function fn;
    fn.n = d;
    fn.params = &ctx;
    fn.f = [](const gsl_vector* v, void* p) {
        auto* c = static_cast<Ctx*>(p);
        for (std::size_t k = 0; k < c->buf.size(); ++k) c->buf[k] = gsl_vector_get(v, k);
        return (*c->f)(c->buf);
    };
    gsl_vector* x = gsl_vector_alloc(d);
    gsl_vector* ss = gsl_vector_alloc(d);
    for (std::size_t k = 0; k < d; ++k) gsl_vector_set(x, k, x0[k]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d);
    gsl_multimin_fminimizer_set(m, &fn, x, ss);
    for (int it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(m)) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), size_tol) == GSL_SUCCESS) break;
    }
    for (std::size_t k = 0; k < d; ++k) x0[k] = gsl_vector_get(m->x, k);
    if (fbest) *fbest = m->fval;
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return x0;
}

}  // namespace

std::vector<double> constant_profile(const OrliczFunction& M, std::size_t n_max) {
    std::vector<double> f(n_max);
    parallel_for(n_max, [&](std::size_t i) {
        double k = double(i + 1);
        f[i] = std::sqrt(k) * std::exp(M.log_inverse(-std::log(k)));
    });
    return f;
}

RatioResult max_ratio(const MusielakSection& S, std::size_t n, RatioDirection dir, const RatioOptions& opt) {
    return ratio_search(S, n, std::vector<double>(n, 1.0), dir, opt);
}

BMDistanceEstimate bm_distance_symmetric(const MusielakSection& S, std::size_t n, const RatioOptions& opt) {
    if (!S.identical()) throw DomainError("symmetric formula needs identical coordinate functions");
    auto a = max_ratio(S, n, RatioDirection::NormOverEuclid, opt);
    auto b = max_ratio(S, n, RatioDirection::EuclidOverNorm, opt);
    BMDistanceEstimate d;
    d.n = n;
    d.lower = d.upper = a.value * b.value;
    d.method_lower = d.method_upper = "symmetric-formula";
    d.refinement_flag = a.refined_better || b.refined_better;
    return d;
}

BMDistanceEstimate bm_distance_diagonal(const MusielakSection& S, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n > S.total_dim()) throw DomainError("dimension must lie in [1, total_dim]");
    auto fs = S.functions(n);
    std::vector<double> e2(n);  // |e_j|^2
    for (std::size_t j = 0; j < n; ++j) {
        double inv = std::exp(fs[j].log_inverse(0.0));
        e2[j] = 1.0 / (inv * inv);
    }
    std::vector<FiniteVector> xs;
    for (std::size_t j = 0; j < n; ++j) {
        FiniteVector e(n, 0.0);
        e[j] = 1;
        xs.push_back(e);
    }
    if (n <= 10) {
        for (std::uint64_t m = 1; m < (1ULL << n); ++m) {
            if (__builtin_popcountll(m) < 2) continue;
            FiniteVector v(n, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (m >> j & 1) v[j] = 1;
            xs.push_back(v);
        }
    } else {
        for (std::size_t k = 2; k <= n; ++k) {
            FiniteVector v(n, 0.0);
            std::fill(v.begin(), v.begin() + k, 1.0);
            xs.push_back(v);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        FiniteVector v(n);
        for (auto& a : v) a = U(rng);
        if (i % 2) {
            // Sparse samples catch extremes near coordinate subspaces.
            for (auto& a : v)
                if (U(rng) < 0.5) a = 0;
            if (*std::max_element(v.begin(), v.end()) == 0) v[i % n] = 1;
        }
        xs.push_back(v);
    }
    std::vector<double> lnorm(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { lnorm[i] = std::log(lux_norm(S, xs[i])); });

    double lower = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = std::exp(lnorm[i] - 0.5 * std::log(sum_sq(xs[i], e2)));
        lower = std::max({lower, r, 1.0 / r});
    }
    auto sampled = [&](const std::vector<double>& lw) {
        std::vector<double> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(lw[j]);
        double a = -1e300, b = -1e300;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double le = 0.5 * std::log(sum_sq(xs[i], w));
            a = std::max(a, lnorm[i] - le);
            b = std::max(b, le - lnorm[i]);
        }
        return a + b;
    };
    std::vector<double> lw(n);
    for (std::size_t j = 0; j < n; ++j) lw[j] = std::log(e2[j]);
    double cur = sampled(lw);
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    for (int sweep = 0; sweep < 6; ++sweep) {
        double before = cur;
        for (std::size_t j = 0; j < n; ++j) {
            double a = lw[j] - 1.0, b = lw[j] + 1.0;
            auto at = [&](double v) {
                auto t = lw;
                t[j] = v;
                return sampled(t);
            };
            double c = b - gr * (b - a), d = a + gr * (b - a), fc = at(c), fd = at(d);
            for (int it = 0; it < 40; ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gr * (b - a);
                    fc = at(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gr * (b - a);
                    fd = at(d);
                }
            }
            double v = 0.5 * (a + b), fv = at(v);
            if (fv < cur) {
                lw[j] = v;
                cur = fv;
            }
        }
        if (before - cur < 1e-12) break;
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(lw[j]);
    RatioOptions ro;
    ro.seed = seed;
    auto ra = ratio_search(S, n, w, RatioDirection::NormOverEuclid, ro);
    auto rb = ratio_search(S, n, w, RatioDirection::EuclidOverNorm, ro);
    BMDistanceEstimate d;
    d.n = n;
    d.lower = lower;
    d.upper = std::max(std::exp(cur), ra.value * rb.value);
    d.method_lower = d.method_upper = "diagonal-search";
    d.refinement_flag = ra.refined_better || rb.refined_better;
    return d;
}

BMDistanceEstimate bm_distance(const MusielakSection& S, std::size_t n, const RatioOptions& opt) {
    if (S.identical()) return bm_distance_symmetric(S, n, opt);
    // Coordinates beyond n do not matter; check only the first n.
    auto fs = S.functions(n);
    bool same = std::all_of(fs.begin(), fs.end(), [&](const OrliczFunction& f) { return f.same(fs[0]); });
    if (same) return bm_distance_symmetric(MusielakSection::uniform(fs[0], n, S.lemma32_ready()), n, opt);
    return bm_distance_diagonal(S, n, opt.seed);
}

BMDistanceEstimate brute_force_distance(const MusielakSection& S, std::size_t n, int restarts, std::uint64_t seed) {
    if (n < 1 || n > 4) throw DomainError("brute force is limited to n <= 4");
    if (n > S.total_dim()) throw DomainError("dimension exceeds the section");
    std::vector<FiniteVector> dirs;
    auto unit = [](FiniteVector v) {
        double s = 0;
        for (double a : v) s += a * a;
        for (auto& a : v) a /= std::sqrt(s);
        return v;
    };
    for (std::size_t j = 0; j < n; ++j) {
        FiniteVector e(n, 0.0);
        e[j] = 1;
        dirs.push_back(e);
    }
    for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
        FiniteVector v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = (m >> j & 1) ? -1.0 : 1.0;
        dirs.push_back(unit(v));
    }
    if (n == 2) {
        const int K = 8192;
        for (int i = 0; i < K; ++i) {
            double a = M_PI * i / K;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    } else if (n == 3) {
        const int K = 20000;
        const double ga = M_PI * (3 - std::sqrt(5.0));
        for (int i = 0; i < K; ++i) {
            double z = 1 - 2.0 * (i + 0.5) / K, r = std::sqrt(1 - z * z);
            dirs.push_back({r * std::cos(ga * i), r * std::sin(ga * i), z});
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> G;
        for (int i = 0; i < 40000; ++i) {
            FiniteVector v(n);
            for (auto& a : v) a = G(rng);
            dirs.push_back(unit(v));
        }
    }
    std::vector<double> lnorm(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) { lnorm[i] = std::log(lux_norm(S, dirs[i])); });

    const std::size_t dim = n * (n + 1) / 2;
    // Lower-triangular T with log-diagonal; |Tx| depends only on T^T T.
    auto apply = [n](const std::vector<double>& th, const FiniteVector& x) {
        double s = 0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double yi = 0;
            for (std::size_t j = 0; j < i; ++j) yi += th[k++] * x[j];
            yi += std::exp(th[k++]) * x[i];
            s += yi * yi;
        }
        return 0.5 * std::log(s);
    };
    auto objective_on = [&](const std::vector<std::size_t>& idx) {
        return [&, idx](const std::vector<double>& th) {
            double a = -1e300, b = -1e300;
            for (std::size_t i : idx) {
                double lt = apply(th, dirs[i]);
                a = std::max(a, lt - lnorm[i]);
                b = std::max(b, lnorm[i] - lt);
            }
            return a + b;
        };
    };
    // Restarts run against a coarse subset; the best few are re-optimized
    // against every direction.
    const std::size_t base = n + (std::size_t(1) << n);
    const std::size_t stride = std::max<std::size_t>(1, (dirs.size() - base) / 1024);
    std::vector<std::size_t> coarse_idx, full_idx(dirs.size());
    std::iota(full_idx.begin(), full_idx.end(), 0);
    for (std::size_t i = 0; i < dirs.size(); ++i)
        if (i < base || (i - base) % stride == 0) coarse_idx.push_back(i);
    auto coarse = objective_on(coarse_idx);
    auto full = objective_on(full_idx);
    std::vector<std::vector<double>> sols(restarts);
    std::vector<double> vals(restarts);
    parallel_for(restarts, [&](std::size_t r) {
        std::vector<double> x0(dim, 0.0);
        if (r > 0) {
            std::mt19937_64 rng(seed + 7919ULL * r);
            std::normal_distribution<double> G(0.0, 0.5);
            for (auto& v : x0) v = G(rng);
        }
        double fb = 0;
        sols[r] = nelder_mead(coarse, x0, 0.3, 400 * int(dim), 1e-9, &fb);
        vals[r] = fb;
    });
    std::vector<std::size_t> order(restarts);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t keep = std::min<std::size_t>(4, order.size());
    std::vector<std::vector<double>> fine(keep);
    std::vector<double> fine_val(keep);
    parallel_for(keep, [&](std::size_t i) {
        double fb = 0;
        fine[i] = nelder_mead(full, sols[order[i]], 0.05, 1000 * int(dim), 1e-10, &fb);
        fine_val[i] = fb;
    });
    std::size_t best = std::min_element(fine_val.begin(), fine_val.end()) - fine_val.begin();
    const auto th = fine[best];
    // Polish both maxima for the chosen map by local search on the sphere.
    auto polish = [&](double sgn) {
        std::size_t arg = 0;
        double mv = -1e300;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            double v = sgn * (apply(th, dirs[i]) - lnorm[i]);
            if (v > mv) {
                mv = v;
                arg = i;
            }
        }
        auto f = [&](const std::vector<double>& x) {
            double s = 0;
            for (double a : x) s += a * a;
            if (!(s > 0)) return 1e300;
            return -sgn * (apply(th, x) - std::log(lux_norm(S, x)));
        };
        double fb = 0;
        nelder_mead(f, dirs[arg], 1e-3, 2000, 1e-12, &fb);
        return std::max(mv, -fb);
    };
    BMDistanceEstimate d;
    d.n = n;
    d.lower = d.upper = std::exp(polish(1.0) + polish(-1.0));
    d.method_lower = d.method_upper = "brute-force";
    return d;
}

FiniteVector norming_vector(const MusielakSection& S, const FiniteVector& f, double* value) {
    const std::size_t n = f.size();
    auto fs = S.functions(n);
    double gmax = 0;
    for (double v : f) gmax = std::max(gmax, std::fabs(v));
    if (!(gmax > 0) || !std::isfinite(gmax)) throw DomainError("norming functional must be nonzero and finite");
    // Maximize sum g_j y_j subject to sum M_j(y_j) <= 1: y_j = (M_j')^-1(g_j / mu).
    auto inv_deriv = [&](std::size_t j, double v) {
        double lo = -745, hi = 40;
        if (derivative_at(fs[j], lo) >= v) return 0.0;
        if (derivative_at(fs[j], hi) < v) return std::exp(hi);
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            if (derivative_at(fs[j], mid) < v) lo = mid;
            else hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };
    auto ys = [&](double lmu) {
        FiniteVector y(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (f[j] != 0) y[j] = inv_deriv(j, std::exp(std::log(std::fabs(f[j]) / gmax) - lmu));
        return y;
    };
    auto h = [&](double lmu) {
        auto y = ys(lmu);
        CompensatedSum s;
        for (std::size_t j = 0; j < n; ++j)
            if (y[j] > 0) s.add(fs[j].eval(y[j]));
        return s.value() - 1.0;
    };
    double lo = 0, hi = 0;
    if (h(0) > 0) {
        for (int g = 0; h(hi) > 0; ++g) {
            lo = hi;
            hi += 2;
            if (g > 400) throw NumericError("norming multiplier bracket failed");
        }
    } else {
        for (int g = 0; h(lo) <= 0; ++g) {
            hi = lo;
            lo -= 2;
            if (g > 400) throw NumericError("norming multiplier bracket failed");
        }
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) > 0) lo = mid;
        else hi = mid;
    }
    auto y = ys(hi);
    double nrm = lux_norm(S, y);
    if (!(nrm > 0)) {
        // Degenerate multiplier (linear pieces): fall back to the largest coordinate.
        y.assign(n, 0.0);
        std::size_t j = std::max_element(f.begin(), f.end(), [](double a, double b) {
                            return std::fabs(a) < std::fabs(b);
                        }) - f.begin();
        y[j] = 1;
        nrm = lux_norm(S, y);
    }
    FiniteVector x(n);
    CompensatedSum val;
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = std::copysign(y[j] / nrm, f[j]);
        val.add(f[j] * x[j]);
    }
    if (value) *value = val.value();
    return x;
}

AuerbachBasis auerbach_basis(const MusielakSection& S, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n > 64 || n > S.total_dim()) throw DomainError("auerbach_basis needs 1 <= n <= 64");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        FiniteVector e(n, 0.0);
        e[i] = 1;
        B(i, i) = 1.0 / lux_norm(S, e);
    }
    double det = B.determinant();
    for (int attempt = 0; std::fabs(det) == 0 && attempt < 8; ++attempt) {
        std::mt19937_64 rng(seed + attempt);
        std::normal_distribution<double> G;
        for (std::size_t i = 0; i < n; ++i) {
            FiniteVector v(n);
            for (auto& a : v) a = G(rng);
            double nr = lux_norm(S, v);
            for (std::size_t j = 0; j < n; ++j) B(j, i) = v[j] / nr;
        }
        det = B.determinant();
    }
    if (std::fabs(det) == 0) throw NumericError("optimization failure: degenerate Auerbach start");
    AuerbachBasis out;
    for (int sweep = 0; sweep < 200; ++sweep) {
        const double start = std::fabs(det);
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::MatrixXd inv = B.inverse();
            FiniteVector f(n);
            for (std::size_t j = 0; j < n; ++j) f[j] = det * inv(i, j);
            double v = 0;
            auto x = norming_vector(S, f, &v);
            if (std::fabs(v) > std::fabs(det) * (1 + 1e-15)) {
                for (std::size_t j = 0; j < n; ++j) B(j, i) = x[j];
                det = B.determinant();
            }
        }
        out.sweeps = sweep + 1;
        if (std::fabs(det) - start <= 1e-8 * start) break;
    }
    out.det = det;
    Eigen::MatrixXd inv = B.inverse();
    for (std::size_t i = 0; i < n; ++i) {
        FiniteVector row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = inv(i, j);
        double v = 0;
        norming_vector(S, row, &v);
        out.coefficient_bound = std::max(out.coefficient_bound, v);
    }
    out.vectors.assign(n, FiniteVector(n));
    FiniteVector ref(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.vectors[i][j] = B(j, i);
            ref[j] += std::fabs(B(j, i));
        }
    double nr = lux_norm(S, ref);
    for (auto& v : ref) v /= nr;
    out.reference = ref;
    return out;
}

double lemma32_norm(const MusielakSection& S, const AuerbachBasis& basis, const FiniteVector& y) {
    const auto& x = basis.reference;
    if (y.size() != x.size()) throw DomainError("vector length does not match the basis");
    auto fs = S.functions(x.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || y[i] == 0) continue;
        s.add(y[i] * y[i] * std::exp(fs[i].log_eval(std::log(x[i])) - 2 * std::log(x[i])));
    }
    return std::sqrt(s.value());
}

double lemma32_bound(double C, double nu) {
    if (!(C >= 1) || !(nu > 0 && nu < 1)) throw DomainError("lemma32_bound needs C >= 1 and nu in (0,1)");
    return std::sqrt(C * (C + nu * nu) / (1 - nu));
}

namespace {

// Dilation band of each distinct function, as used by the hypothesis check.
Certificate function_band(const OrliczFunction& M, double C, double nu) {
    // Local copy of the full-band test to keep geometry independent of the
    // construction module's options.
    Certificate c;
    c.name = "hypothesis_band";
    const double e = std::max(C - 1.0, 1e-12);
    const double l1e = std::log1p(e);
    auto lls = GridSpec{1e-8, 1.0, 100}.log_points();
    auto lts = GridSpec{nu, 1.0, 30}.log_points();
    std::vector<double> worst(lls.size());
    parallel_for(lls.size(), [&](std::size_t i) {
        double b = M.log_eval(lls[i]), w = 1e300;
        for (double s : lts) {
            double lr = M.log_eval(lls[i] + s) - b;
            w = std::min({w, lr - (2 * s - l1e), (2 * s + l1e) - lr});
        }
        worst[i] = w;
    });
    c.worst_margin = *std::min_element(worst.begin(), worst.end());
    c.passed = c.worst_margin >= -1e-12;
    c.params = {{"C", C}, {"nu", nu}};
    c.grid = "lambda " + GridSpec{1e-8, 1.0, 100}.describe() + "; t " + GridSpec{nu, 1.0, 30}.describe();
    return c;
}

// Random disjoint blocks on the leading coordinates, each turned into its
// induced function; the result is isometric to the span of the blocks.
MusielakSection block_subspace(const MusielakSection& S, std::size_t n, std::mt19937_64& rng) {
    const std::uint64_t avail = std::min<std::uint64_t>(S.total_dim(), 3 * n);
    auto fs = S.functions(avail);
    std::uniform_int_distribution<int> size(1, 3);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    std::vector<SectionTerm> terms;
    std::uint64_t pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::uint64_t remaining_blocks = n - j - 1;
        std::uint64_t room = avail - pos - remaining_blocks;
        std::uint64_t len = std::min<std::uint64_t>(size(rng), room);
        FiniteVector u;
        std::uint64_t k = 0;
        for (; k < len && (k == 0 || fs[pos + k].same(fs[pos])); ++k) u.push_back(U(rng));
        MusielakSection local = MusielakSection::uniform(fs[pos], u.size());
        double nr = lux_norm(local, u);
        std::vector<double> ll, lw;
        for (double a : u) {
            ll.push_back(std::log(a / nr));
            lw.push_back(0.0);
        }
        auto g = OrliczFunction::dilation_sum(fs[pos], ll, lw);
        double l1 = g.log_eval(0.0);
        if (l1 < 0) g = g.with_normalization(std::exp(-l1) * (1 + 1e-15));
        terms.push_back({g, 1});
        pos += k;
    }
    return MusielakSection(std::move(terms), true);
}

}  // namespace

Certificate verify_lemma32(const MusielakSection& S, std::size_t n, double C, double nu, int samples,
                           std::uint64_t seed, int per_subspace) {
    if (n == 0 || n > S.total_dim()) throw DomainError("dimension must lie in [1, total_dim]");
    if (!(C >= 1) || !(nu > 0 && nu < 1)) throw DomainError("need C >= 1 and nu in (0,1)");
    if (double(n) > (1 + 1e-12) / nu) throw DomainError("dimension must satisfy n <= 1/nu");
    Certificate c;
    c.name = "lemma32";
    const double bound = lemma32_bound(C, nu);
    c.params = {{"n", n}, {"C", C}, {"nu", nu}, {"implied_bound", bound}, {"samples", samples}};
    if (!S.lemma32_ready()) {
        c.applicable = false;
        c.witness = "section is not flagged lemma32_ready";
        return c;
    }
    const std::uint64_t used = std::min<std::uint64_t>(S.total_dim(), 3 * n);
    std::vector<OrliczFunction> distinct;
    for (const auto& f : S.functions(used))
        if (std::none_of(distinct.begin(), distinct.end(), [&](const OrliczFunction& g) { return g.same(f); }))
            distinct.push_back(f);
    bool hyp = true;
    for (const auto& f : distinct) {
        auto b = function_band(f, C, nu);
        hyp = hyp && b.passed;
        c.add(b);
    }
    if (!hyp) {
        c.applicable = false;
        c.witness = "dilation hypothesis fails for a coordinate function";
        return c;
    }
    std::vector<MusielakSection> spaces{S};
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) spaces.push_back(block_subspace(S, n, rng));

    const double tol = 1e-6;
    double worst_lo = 1e300, worst_hi = 1e300, worst_coef = 0, max_measured = 0;
    bool consistent = true;
    nlohmann::json subs = nlohmann::json::array();
    for (std::size_t sp = 0; sp < spaces.size(); ++sp) {
        const auto& X = spaces[sp];
        auto basis = auerbach_basis(X, n, seed + sp);
        worst_coef = std::max(worst_coef, basis.coefficient_bound);
        std::mt19937_64 r2(seed * 31 + sp);
        std::normal_distribution<double> G;
        double qmin = 1e300, qmax = 0;
        for (int s = 0; s < per_subspace; ++s) {
            FiniteVector y(n, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                double a = G(r2);
                for (std::size_t j = 0; j < n; ++j) y[j] += a * basis.vectors[k][j];
            }
            double nr = lux_norm(X, y);
            if (!(nr > 0)) continue;
            for (auto& v : y) v /= nr;
            double q = lemma32_norm(X, basis, y);
            q *= q;
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
        }
        double lo = qmin - (1 - nu) / C + tol, hi = C + nu * nu + tol - qmax;
        worst_lo = std::min(worst_lo, lo);
        worst_hi = std::min(worst_hi, hi);
        auto d = bm_distance(X, n);
        max_measured = std::max(max_measured, d.upper);
        consistent = consistent && d.upper <= bound + 1e-6;
        subs.push_back({{"subspace", sp == 0 ? "span(e_1..e_n)" : "random blocks"},
                        {"min_norm_sq", qmin},
                        {"max_norm_sq", qmax},
                        {"coefficient_bound", basis.coefficient_bound},
                        {"measured_distance", d.to_json()}});
    }
    c.worst_margin = std::min({worst_lo, worst_hi, bound + 1e-6 - max_measured});
    c.passed = worst_lo >= 0 && worst_hi >= 0 && consistent;
    c.params["worst_lower_margin"] = worst_lo;
    c.params["worst_upper_margin"] = worst_hi;
    c.params["coefficient_bound"] = worst_coef;
    c.params["max_measured_distance"] = max_measured;
    c.params["subspaces"] = subs;
    if (!c.passed) {
        std::ostringstream os;
        os.precision(10);
        os << "lower margin " << worst_lo << ", upper margin " << worst_hi << ", measured distance " << max_measured
           << " vs bound " << bound;
        c.witness = os.str();
    }
    return c;
}

std::string distance_csv(const std::vector<DistanceRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n,lower,upper,method_lower,method_upper\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.d.lower << ',' << r.d.upper << ',' << r.d.method_lower << ',' << r.d.method_upper << '\n';
    return os.str();
}

}  // namespace olab
