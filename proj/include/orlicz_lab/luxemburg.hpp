#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orlicz_lab/certificate.hpp"
#include "orlicz_lab/orlicz.hpp"

namespace olab {

using FiniteVector = std::vector<double>;

struct SectionTerm {
    OrliczFunction M;
    std::uint64_t multiplicity = 1;
};

/// Ordered Orlicz functions with multiplicities; coordinate i uses the term
/// whose cumulative multiplicity first exceeds i (0-based).
class MusielakSection {
public:
    explicit MusielakSection(std::vector<SectionTerm> terms, bool lemma32_ready = false);
    static MusielakSection uniform(const OrliczFunction& M, std::uint64_t dim, bool lemma32_ready = false);

    std::uint64_t total_dim() const { return total_; }
    bool lemma32_ready() const { return ready_; }
    /// Every coordinate uses one shared function.
    bool identical() const;
    const std::vector<SectionTerm>& terms() const { return terms_; }
    const OrliczFunction& function_at(std::uint64_t i) const;
    /// Functions for coordinates [0, n).
    std::vector<OrliczFunction> functions(std::uint64_t n) const;
    /// Section of the coordinates from `start` (0-based) onward.
    MusielakSection tail_from(std::uint64_t start) const;

    nlohmann::json to_json() const;

private:
    std::vector<SectionTerm> terms_;
    std::vector<std::uint64_t> cumulative_;
    std::uint64_t total_ = 0;
    bool ready_ = false;
};

/// Sum of M_i(|x(i)| / rho), compensated.
double modular(const MusielakSection& S, const FiniteVector& x, double rho);

/// Luxemburg norm by bracket doubling from max|x(i)| and 60 bisection steps.
double lux_norm(const MusielakSection& S, const FiniteVector& x);

/// For a lemma32-ready section and a unit vector: max|x(i)| <= 1 and the
/// modular at rho = 1 equals 1 within 1e-8.
Certificate unit_modular_check(const MusielakSection& S, const FiniteVector& x);

/// Norm of x with coordinates before start_index (1-based) set to zero.
double tail_norm(const MusielakSection& S, const FiniteVector& x, std::uint64_t start_index);

/// Comma or whitespace separated list.
FiniteVector parse_vector_list(const std::string& text);
/// One coordinate per line.
FiniteVector read_vector_csv(const std::string& path);

inline constexpr double kTolNorm = 1e-12;
inline constexpr double kTolClaim = 1e-8;

}  // namespace olab
