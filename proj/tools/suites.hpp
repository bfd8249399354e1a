#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz_lab/certificate.hpp"

namespace olab::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Parameters shared by the verification suites. Each suite reads the
/// fields it needs and echoes them into the report input.
struct SuiteParams {
    std::string family;  // empty: suite default
    std::string phi = "identity";
    std::string tau = "1/2";
    double eta = 0.2;
    double eps = 0.5;
    double nu = 0.25;
    double C = 1.5;
    std::size_t n = 4;
    std::size_t dim = 64;
    std::size_t length = 128;
    int samples = -1;  // -1: suite default
    int trials = 100;
    std::vector<std::size_t> prefixes{8, 32, 128};
    std::uint64_t seed = 42;
};

extern const std::vector<std::string> kSuites;

/// Report skeleton with schema, tool version, command and seed. passed is
/// the conjunction of the applicable certificates.
nlohmann::json make_report(const std::string& command, nlohmann::json input,
                           const std::vector<Certificate>& certs, nlohmann::json result, std::uint64_t seed);

/// Runs a named suite. Precondition failures are reported as a failing
/// certificate rather than thrown. Unknown names throw std::invalid_argument.
nlohmann::json run_suite(const std::string& name, const SuiteParams& p);

/// Report without the wall-time field, for determinism comparisons.
std::string canonical_dump(nlohmann::json report);

}  // namespace olab::cli
