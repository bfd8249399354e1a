#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orlicz_lab/certificate.hpp"
#include "orlicz_lab/luxemburg.hpp"

namespace olab {

struct AHConstruction;

struct BMDistanceEstimate {
    double lower = 1.0;
    double upper = 1.0;
    std::string method_lower, method_upper;
    std::size_t n = 0;
    /// Projected-gradient refinement beat the structured candidates by more
    /// than 1e-6 (relative).
    bool refinement_flag = false;
    nlohmann::json to_json() const;
};

enum class RatioDirection { NormOverEuclid, EuclidOverNorm };

struct RatioResult {
    double value = 0;
    FiniteVector witness;
    double structured = 0;
    bool refined_better = false;
};

struct RatioOptions {
    bool refine = true;
    std::size_t refine_max_n = 64;
    int starts = 8;
    int max_iter = 300;
    std::uint64_t seed = 42;
};

/// sup of |x|_S / |x|_2 (or the reverse) over the first n coordinates.
/// Identical sections search nonnegative nonincreasing vectors; otherwise
/// nonnegative ones.
RatioResult max_ratio(const MusielakSection& S, std::size_t n, RatioDirection dir, const RatioOptions& opt = {});

/// sqrt(k) * M^-1(1/k) for k = 1..n_max: the Euclidean-over-norm ratio of
/// the constant vector of length k in a uniform section.
std::vector<double> constant_profile(const OrliczFunction& M, std::size_t n_max);

/// d(span{e_1..e_n}, l_2^n) for an identical section: the product of the two
/// extreme ratios (the identity is optimal under signed-permutation symmetry).
BMDistanceEstimate bm_distance_symmetric(const MusielakSection& S, std::size_t n, const RatioOptions& opt = {});

/// Bounds for unconditional but non-symmetric sections: lower from sampled
/// vectors against the best diagonal ellipsoid, upper from the best diagonal
/// map found by coordinate descent.
BMDistanceEstimate bm_distance_diagonal(const MusielakSection& S, std::size_t n, std::uint64_t seed = 42);

/// Symmetric formula when possible, diagonal search otherwise.
BMDistanceEstimate bm_distance(const MusielakSection& S, std::size_t n, const RatioOptions& opt = {});

/// Direct minimization of |T| |T^-1| over positive definite T (n <= 4).
BMDistanceEstimate brute_force_distance(const MusielakSection& S, std::size_t n, int restarts = 50,
                                        std::uint64_t seed = 42);

struct AuerbachBasis {
    std::vector<FiniteVector> vectors;
    double coefficient_bound = 0;
    double det = 0;
    int sweeps = 0;
    /// Normalized coordinatewise sum of |x_k|.
    FiniteVector reference;
};

/// Unit vector maximizing <f, x> over the unit ball of the first f.size()
/// coordinates; the maximum (the dual norm of f) is stored in *value.
FiniteVector norming_vector(const MusielakSection& S, const FiniteVector& f, double* value = nullptr);

AuerbachBasis auerbach_basis(const MusielakSection& S, std::size_t n, std::uint64_t seed = 42);

/// Weighted Euclidean norm sqrt(sum y_i^2 M_i(x_i)/x_i^2) over x_i > 0.
double lemma32_norm(const MusielakSection& S, const AuerbachBasis& basis, const FiniteVector& y);

/// sqrt(C (C + nu^2) / (1 - nu)).
double lemma32_bound(double C, double nu);

Certificate verify_lemma32(const MusielakSection& S, std::size_t n, double C, double nu, int samples = 2,
                           std::uint64_t seed = 42, int vectors_per_subspace = 1000);

Certificate ah_certificate(const AHConstruction& construction, std::size_t n, double K_target,
                           std::uint64_t seed = 42);

struct DistanceRow {
    std::size_t n;
    BMDistanceEstimate d;
};
std::string distance_csv(const std::vector<DistanceRow>& rows);

}  // namespace olab
