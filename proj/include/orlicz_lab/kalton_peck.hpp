#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orlicz_lab/certificate.hpp"
#include "orlicz_lab/luxemburg.hpp"
#include "orlicz_lab/orlicz.hpp"

namespace olab {

enum class PhiKind { Identity, Constant, Clamp, FromOrlicz, Tabulated };

/// Lipschitz map R -> R with a known (or bounded) Lipschitz constant.
class LipschitzFunction {
public:
    static LipschitzFunction identity();
    static LipschitzFunction constant(double c);
    /// min(max(x, lo), hi).
    static LipschitzFunction clamp(double lo, double hi);
    /// 2x + 2 log M1^-1(e^(-2x)), with L = 2.
    static LipschitzFunction from_orlicz(const OrliczFunction& M1);
    /// Piecewise linear through (x_i, y_i), continued linearly; L is the
    /// largest node-to-node slope.
    static LipschitzFunction tabulated(std::vector<double> x, std::vector<double> y);
    /// CSV with columns x, phi(x).
    static LipschitzFunction tabulated_csv(const std::string& path);

    PhiKind kind() const { return kind_; }
    double L() const { return L_; }
    double operator()(double x) const;

    std::string literal() const;
    nlohmann::json to_json() const;

    /// Slope scan attached by phi_from_orlicz.
    std::optional<Certificate> slope_check;

private:
    PhiKind kind_ = PhiKind::Identity;
    double L_ = 1.0;
    double a_ = 0, b_ = 0;
    OrliczFunction M1_;
    std::shared_ptr<const std::vector<double>> xs_, ys_;
    std::string source_;
};

/// `identity`, `zero`, `constant:c=<v>`, `clamp:lo=<a>,hi=<b>`,
/// `from-orlicz:<orlicz literal>`, `tabulated:file=<path>`.
LipschitzFunction parse_phi_literal(const std::string& text);

/// Largest |phi(x') - phi(x)| / |x' - x| between neighbours of an n-point
/// uniform grid on [lo, hi], checked against L + 1e-6.
Certificate empirical_slope_check(const LipschitzFunction& phi, double lo, double hi, int n);

LipschitzFunction phi_from_orlicz(const OrliczFunction& M1);

/// g(k) phi(-log(|g(k)| / |g|_2)), zero where g(k) = 0.
FiniteVector omega_phi(const LipschitzFunction& phi, const FiniteVector& g);

struct KPVector {
    FiniteVector f, g;
};

/// |f - Omega(g)|_2 + |g|_2.
double kp_quasinorm(const LipschitzFunction& phi, const KPVector& z);

/// max over random pairs of |z + w| / (|z| + |w|); the first pair is (z, z).
double quasi_triangle_probe(const LipschitzFunction& phi, int trials, std::size_t dim, std::uint64_t seed);

/// The standard bump exp(-1/(y(1-y))) on (0,1) scaled to integral 1.
struct Bump {
    Bump();
    double f(double y) const;
    double f1(double y) const;
    double f2(double y) const;
    double log_Z;
    double mean;  // integral of y f(y)
};

struct MollifyOptions {
    double x_lo = -40, x_hi = 40;
    int points = 4096;
    double tol = 1e-10;
};

struct MollifiedPhi {
    LipschitzFunction phi;
    std::shared_ptr<const PsiTable> table;
    double A = 0;  // max |psi - phi| on the grid
    double b = 0;  // min psi'' - 3 psi' on the grid
    long K = 1;
    double mean = 0.5;
    Certificate claim;
    std::string window;
    nlohmann::json to_json() const;
};

/// psi = phi * f with psi', psi'' from the derivatives of the bump.
MollifiedPhi mollify(const LipschitzFunction& phi, const MollifyOptions& opt = {});

struct SynthesisResult {
    OrliczFunction M;
    long K = 1;
    double A = 0, b = 0;
    /// c M(t) <= t^2 (1 + phi(-log t)^2) <= C M(t) with c = 1/(2K(1+A^2)), C = 2(1+A^2).
    double c = 0, C = 0;
    double shift = 0;
    Certificate certificate;
    nlohmann::json to_json() const;
};

/// M(t) = t^2 (K + psi(-log t)^2). phi is shifted to be nonnegative on the
/// working window x in [0, 27.7] when needed. Throws NumericError when the
/// convexity check fails.
SynthesisResult synthesize_orlicz(const MollifiedPhi& m);

/// (1+u^2)/(1+v^2) <= 2(1+(u-v)^2) on random pairs in [-1e6, 1e6].
Certificate inequality_53_check(int samples, std::uint64_t seed);

/// sigma + (sum t_n^2 [phi(-log(|t_n|/sigma)) - phi(0)]^2)^(1/2), sigma = |t|_2.
double expr_51(const LipschitzFunction& phi, const FiniteVector& t);

/// |quasinorm of sum_{n<=N} t_n w_n - comparison| <= L sigma_N log(sigma/sigma_N)
/// for each prefix N, with sigma_N = (sum_{n<=N} t_n^2)^(1/2).
Certificate partial_sum_bound_check(const LipschitzFunction& phi, const FiniteVector& t,
                                    const std::vector<std::size_t>& prefixes, double tol = 1e-8);

struct EquivalenceReport {
    double min_ratio = 0, max_ratio = 0, spread = 0;
    double growth = 0;  // (M(t)/t^2 at 1e-8) / (M(t)/t^2 at 1e-1)
    nlohmann::json to_json() const;
};

/// Ratio of |sum t_n w_n| to the Luxemburg norm of t in h_M over random t.
EquivalenceReport equivalence_report(const LipschitzFunction& phi, const OrliczFunction& M, int trials,
                                     std::size_t dim, std::uint64_t seed);

/// max |Omega(u g) - u Omega(g)|_2 over random unit g and |u(k)| <= 1.
double centralizer_probe(const LipschitzFunction& phi, int trials, std::size_t dim, std::uint64_t seed);

}  // namespace olab
