#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orlicz_lab/certificate.hpp"
#include "orlicz_lab/numerics.hpp"

namespace olab {

/// Literal or JSON input that cannot be parsed; pos is a byte offset.
struct ParseError : std::invalid_argument {
    ParseError(const std::string& msg, std::size_t pos)
        : std::invalid_argument(msg + " (at position " + std::to_string(pos) + ")"), pos(pos) {}
    std::size_t pos;
};

/// Smooth function sampled on a uniform grid together with its first two
/// derivatives. Evaluation is cubic Hermite; outside the grid it continues
/// linearly with the end slope.
struct PsiTable {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<double> psi, psi1, psi2;

    double x_max() const { return x0 + dx * (psi.size() - 1); }
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

enum class OrliczKind { Power, PowerLog, DilationSum, Synthesized, Tabulated };

std::string kind_name(OrliczKind k);

namespace detail {
struct OrliczImpl;
}

/// Immutable Orlicz function. Copies share state.
///
/// Every kind evaluates in the log domain: log_eval(s) = log M(e^s). This keeps
/// dilation sums with scales like tau^(2R) and weights far outside the double
/// range representable.
class OrliczFunction {
public:
    /// Empty handle; every query on it throws.
    OrliczFunction() = default;
    bool empty() const { return !impl_; }

    static OrliczFunction power(double p);
    /// t^2 |log t|^alpha with the adaptive dyadic cutoff.
    static OrliczFunction power_log(double alpha);
    static OrliczFunction power_log(double alpha, double cutoff_eps);
    /// Sum over j of exp(log_omega[j]) * base(exp(log_lambda[j]) * t).
    static OrliczFunction dilation_sum(const OrliczFunction& base, std::vector<double> log_lambda,
                                       std::vector<double> log_omega);
    static OrliczFunction dilation_sum(const OrliczFunction& base,
                                       const std::vector<std::pair<double, double>>& lambda_omega);
    /// t^2 (K + psi(-log t)^2).
    static OrliczFunction synthesized(std::shared_ptr<const PsiTable> psi, double K);
    /// Cubic Hermite in (log t, log M). Slopes are d log M / d log t; when
    /// empty they are estimated by monotone (PCHIP) rules. Beyond the last
    /// node the function continues along its tangent line. Below the first
    /// node it continues as a power law if extrapolate_below, otherwise
    /// evaluation is a domain error.
    static OrliczFunction tabulated(std::vector<double> log_t, std::vector<double> log_m,
                                    std::vector<double> slopes = {}, bool extrapolate_below = false);
    /// CSV with columns log10(t), M(t). Lines starting with '#' are skipped.
    static OrliczFunction tabulated_csv(const std::string& path, bool extrapolate_below = false);

    OrliczFunction with_normalization(double c) const;
    /// True when both handles share one representation.
    bool same(const OrliczFunction& o) const { return impl_ == o.impl_; }

    OrliczKind kind() const;
    double cutoff_eps() const;
    double normalization() const;

    double operator()(double t) const { return eval(t); }
    double eval(double t) const;
    double log_eval(double s) const;
    /// d log M / d log t at log t = s.
    double log_slope(double s) const;
    double derivative(double t) const;

    /// Smallest t with M(t) = y, to 1e-12 relative.
    double inverse(double y) const;
    double log_inverse(double log_y) const;
    /// Same result through the generic bracket-and-bisect path only.
    double log_inverse_bisect(double log_y) const;

    // Kind-specific accessors; calling one on the wrong kind throws.
    double p() const;
    double alpha() const;
    const OrliczFunction& base() const;
    const std::vector<double>& log_lambda() const;
    const std::vector<double>& log_omega() const;
    std::shared_ptr<const PsiTable> psi() const;
    double synth_K() const;
    const std::vector<double>& table_log_t() const;
    const std::vector<double>& table_log_m() const;
    const std::vector<double>& table_slopes() const;
    bool table_extrapolates_below() const;

    nlohmann::json to_json() const;
    static OrliczFunction from_json(const nlohmann::json& j);
    /// Literal form where one exists (power, powerlog, small dilsum).
    std::string literal() const;

private:
    explicit OrliczFunction(std::shared_ptr<const detail::OrliczImpl> impl) : impl_(std::move(impl)) {}
    const detail::OrliczImpl& impl() const {
        if (!impl_) throw DomainError("empty Orlicz function handle");
        return *impl_;
    }
    std::shared_ptr<const detail::OrliczImpl> impl_;
};

/// Parses `power:p=2`, `powerlog:alpha=1`, `dilsum:base=<lit>;pairs=[(l,w),...]`,
/// `tabulated:file=<path>`. Simple kinds accept an extra `scale=<c>` parameter.
OrliczFunction parse_orlicz_literal(const std::string& text);

/// Largest dyadic eps <= 1/4 on which t^2|log t|^alpha is increasing and convex.
double power_log_cutoff(double alpha);

/// M(lambda t) / M(lambda).
double dilation_ratio(const OrliczFunction& M, double lambda, double t);

struct IndexGrid {
    GridSpec lambda{1e-30, 1e-10, 48};
    GridSpec t{1e-6, 1.0, 48};
    double mesh = 0.01;
    std::string describe() const;
};

struct IndexEstimate {
    double alpha_lo = 0, alpha_hi = 0, beta_lo = 0, beta_hi = 0;
    double min_slope = 0, max_slope = 0;
    std::string grid_spec;
    nlohmann::json to_json() const;
};

/// Empirical brackets for the lower and upper dilation indices.
IndexEstimate estimate_indices(const OrliczFunction& M, const IndexGrid& grid = {});

struct EnvelopeGrid {
    double u_log_min = -40.0;
    double s_log_min = -40.0;
    int nu = 160;
    int ns = 240;
};

struct PowerEnvelope {
    double c = 0, C = 0;
    double raw_c = 0, raw_C = 0;
};

/// c (v/u)^p <= M(v)/M(u) <= C (v/u)^q on the sampled 0 < v <= u <= 1,
/// with 10% safety on both constants. Throws NumericError when the sampled
/// ratio keeps growing with the range (exponent inside the index range).
PowerEnvelope estimate_power_envelope(const OrliczFunction& M, double p, double q,
                                      const EnvelopeGrid& grid = {});

/// Searches (C, K, t0) with C^-1 M(t/K) <= N(t) <= C M(K t) for grid t <= t0.
Certificate check_equivalence(const OrliczFunction& M, const OrliczFunction& N,
                              const GridSpec& grid = {1e-12, 1.0, 200});

struct ContainmentRange {
    double lo = 0, hi = 0;
    bool near_hilbert = false;
    std::string note;
};

std::vector<ContainmentRange> containment_report(const IndexEstimate& idx, double tol = 0.1);

/// Second differences on a geometric grid are >= -tol * local slope scale.
Certificate check_convexity(const OrliczFunction& M, const GridSpec& grid = {1e-12, 1.0, 200},
                            double tol = 1e-9);

/// Tabulated copy of M on [exp(log_lo), exp(log_hi)] with exact node slopes.
/// The certified maximum relative error at cell midpoints is stored in
/// *max_rel_err when non-null.
OrliczFunction tabulate(const OrliczFunction& M, double log_lo, double log_hi, int points,
                        double* max_rel_err = nullptr);

}  // namespace olab
