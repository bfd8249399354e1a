#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "orlicz_lab/certificate.hpp"
#include "orlicz_lab/exact.hpp"
#include "orlicz_lab/geometry.hpp"
#include "orlicz_lab/luxemburg.hpp"
#include "orlicz_lab/orlicz.hpp"

namespace olab {

/// Selection of R or of the parameters failed; residuals explain why.
struct SelectionError : NumericError {
    SelectionError(const std::string& msg, nlohmann::json residuals)
        : NumericError(msg), residuals(std::move(residuals)) {}
    nlohmann::json residuals;
};

/// One coefficient value of a block vector and how often it occurs.
struct BlockEntry {
    double log_value = 0;     // log of the value, which lies in (0,1]
    std::string value_exact;  // "a^r/b^r" or a decimal literal
    double log_count = 0;
    std::string count;  // decimal or factored big integer
};

struct BlockDescriptor {
    std::vector<BlockEntry> entries;
    int level = 0;
    /// Consecutive identical copies of this block.
    std::uint64_t repeat = 1;
};

struct BlockBasisSpec {
    std::vector<BlockDescriptor> blocks;
    nlohmann::json to_json() const;
    /// Columns block, level, repeat, value, value_exact, count.
    std::string to_csv() const;
};

/// sum over entries of count * M(value * t).
OrliczFunction induce_block_function(const OrliczFunction& M, const BlockDescriptor& block);

struct Step1Options {
    std::optional<double> p, q;
    long R_cap = 1000000;
    double lambda_min = 1e-8;
};

struct Step1Result {
    double p = 0, q = 0, delta = 0;
    double c = 0, C = 0;
    long R = 0;
    mpq_class tau, kappa;
    double eta = 0;
    double lower_residual = 0, upper_residual = 0;
    EnvelopeGrid envelope;
    OrliczFunction N;
    nlohmann::json to_json() const;
};

/// Smallest-denominator rational in the middle half of (1/(1+eta), 1).
mpq_class default_kappa(double eta);

Step1Result choose_step1(const OrliczFunction& M, const mpq_class& tau, const mpq_class& kappa, double eta,
                         const Step1Options& opt = {});

struct Step2Result {
    double eps = 0, nu = 0, eta = 0;
    long L = 0;
    mpq_class tau, kappa;
    Step1Result step1;
    std::shared_ptr<const ExactWeights> weights;
    OrliczFunction N;
    double log_N1 = 0;
    double log_sigma = 0;
    std::string sigma;  // exact decimal when small enough, else empty
    std::vector<Certificate> certificates;
    nlohmann::json to_json(bool with_weights = false) const;
};

Step2Result build_step2(const OrliczFunction& M, double eps, double nu, const Step1Options& opt = {});

/// Index estimate within 0.1 of 2 or a DomainError.
void require_near_hilbert(const OrliczFunction& M);

enum class BandMode { PerStep, FullBand };

struct BandOptions {
    GridSpec lambda{1e-8, 1.0, 200};
    int t_points = 50;
};

/// Per-step: tau^2/(1+e) <= N(l tau)/N(l) <= (1+e) tau^2 with tau = t_lo.
/// Full band: t^2/(1+e) <= N(l t)/N(l) <= (1+e) t^2 for t in [t_lo, 1].
/// Margins are distances from the ratio to the band edges.
Certificate verify_dilation_band(const OrliczFunction& N, double eps_or_eta, double t_lo, BandMode mode,
                                 const BandOptions& opt = {});

/// Termwise sum with weights taken from the factored integers against
/// N.log_eval on a 50-point grid, plus an exact-integer spot check.
Certificate exact_weight_identity(const Step2Result& r);

struct AHLevel {
    int k = 0;
    double eps = 0, nu = 0;
    std::shared_ptr<const Step2Result> step2;  // empty in the special case
    OrliczFunction N;                           // unscaled level function
    double log_scale = 0;                       // log N^-1(1)
    OrliczFunction surrogate;                   // tabulated N(e^log_scale t)
    double surrogate_error = 0;
    std::uint64_t s = 0;
    BMDistanceEstimate distance;
    BlockDescriptor block;
    std::vector<Certificate> certificates;
};

struct AHConstruction {
    OrliczFunction M;
    std::vector<AHLevel> levels;
    std::vector<double> targets;
    bool special_case = false;

    /// Level surrogates repeated s_k times. Each surrogate is the level
    /// function with its argument scaled so that it equals 1 at 1; the
    /// coordinate scaling is an isometry of the sequence spaces.
    MusielakSection section() const;
    /// Index of the first coordinate of level k (1-based level).
    std::uint64_t level_start(int k) const;
    BlockBasisSpec blocks() const;
    bool all_passed() const;
    nlohmann::json to_json() const;
};

struct AHOptions {
    std::uint64_t n_cap = 1u << 14;
    Step1Options step1;
    BandOptions band;
};

/// Raised when no n <= n_cap reaches a level's distance target.
struct TargetUnreachable : NumericError {
    TargetUnreachable(const std::string& msg, int level, double achieved, std::uint64_t n_cap, nlohmann::json partial)
        : NumericError(msg), level(level), achieved(achieved), n_cap(n_cap), partial(std::move(partial)) {}
    int level;
    double achieved;
    std::uint64_t n_cap;
    nlohmann::json partial;
};

/// Levels k = 1..k_max with N_k from build_step2(M, 2^-k, 2^-k).
AHConstruction assemble_ah(const OrliczFunction& M, int k_max, const std::vector<double>& distance_targets,
                           const AHOptions& opt = {});

/// Constant blocks: lambda_k = M^-1(1/k), M_k(t) = k M(lambda_k t), s(k) copies.
AHConstruction special_case_blocks(const OrliczFunction& M, int k_max, const std::vector<std::uint64_t>& s);

/// Cubic Hermite copy of t -> N(e^log_scale t) on log t in [-25, 1] with
/// power-law extension below; refined until the midpoint error is at most
/// max(1e-10, 1e-15 |log_scale|).
OrliczFunction level_surrogate(const OrliczFunction& N, double log_scale, double* max_rel_err = nullptr);

}  // namespace olab
