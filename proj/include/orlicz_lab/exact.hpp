#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "orlicz_lab/numerics.hpp"

namespace olab {

/// Smallest-denominator rational strictly inside (lo, hi), 0 <= lo < hi <= 1.
mpq_class stern_brocot(double lo, double hi);

/// Prime factorization of a positive integer that fits in 64 bits.
std::map<std::uint64_t, long> factorize(const mpz_class& n);

/// Renders p1^e1*p2^e2*... (exponents of 1 omitted, "1" when empty).
std::string factored_string(const std::map<std::uint64_t, long>& f);

/// Decimal string for huge positive values given only log10(v).
std::string format_log10(double log10v, int digits = 12);

/// omega_r = K * kappa^|r-R| * tau^(-2r), r = 0..2R, kept as prime exponents.
///
/// Each prime exponent of omega_r is piecewise linear in r with its break at
/// r = R, so integrality of all 2R+1 weights is decided by r in {0, R, 2R}.
class ExactWeights {
public:
    ExactWeights(const mpq_class& tau, const mpq_class& kappa, long R);

    /// Scales K by an extra positive integer (used for N(1) >= 1).
    void scale_K(const mpz_class& extra);

    long R() const { return R_; }
    const mpq_class& tau() const { return tau_; }
    const mpq_class& kappa() const { return kappa_; }
    const std::map<std::uint64_t, long>& K_exponents() const { return k_exp_; }
    const mpz_class& K_extra() const { return k_extra_; }

    double log_K() const;
    /// log omega_r from log K, log kappa and log tau.
    double log_weight(long r) const;
    /// log omega_r summed from the prime exponents (independent route).
    double log_weight_factored(long r) const;
    std::map<std::uint64_t, long> weight_exponents(long r) const;
    /// Symbolic integrality: every prime exponent of every weight is >= 0.
    bool all_integral() const;
    /// Approximate bit length of omega_r.
    double weight_bits(long r) const;
    /// K as an integer; throws if it exceeds max_bits.
    mpz_class K(double max_bits = 1e7) const;
    /// omega_r as an integer from its factorization.
    mpz_class weight(long r) const;
    /// omega_r via independent rational arithmetic; the denominator is 1
    /// exactly when the weight is integral.
    mpq_class weight_rational(long r) const;
    /// Decimal digits when short enough, else the factored form.
    std::string weight_string(long r, std::size_t max_digits = 400) const;
    std::string K_string(std::size_t max_digits = 400) const;
    /// log of the total weight sigma.
    double log_sigma() const;
    /// Exact sigma when the total bit size stays under max_total_bits.
    bool sigma_exact(mpz_class& out, double max_total_bits = 2e7) const;

private:
    long prime_exp_at(std::uint64_t p, long r) const;

    mpq_class tau_, kappa_;
    long R_;
    std::map<std::uint64_t, long> a_, b_, c_, d_;  // tau = a/b, kappa = c/d
    std::vector<std::uint64_t> primes_;
    std::map<std::uint64_t, long> k_exp_;
    mpz_class k_extra_ = 1;
};

}  // namespace olab
