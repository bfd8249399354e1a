#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace olab {

/// Record of a grid-checked inequality.
struct Certificate {
    std::string name;
    bool passed = false;
    bool applicable = true;
    double worst_margin = 0.0;
    std::string witness;
    std::string grid;
    nlohmann::json params = nlohmann::json::object();
    std::vector<Certificate> children;

    void add(Certificate c) { children.push_back(std::move(c)); }
    bool all_passed() const;
    nlohmann::json to_json() const;
};

}  // namespace olab
