#include "orlicz_lab/certificate.hpp"

namespace olab {

bool Certificate::all_passed() const {
    if (!passed) return false;
    for (const auto& c : children)
        if (!c.all_passed()) return false;
    return true;
}

nlohmann::json Certificate::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["passed"] = passed;
    j["applicable"] = applicable;
    j["worst_margin"] = worst_margin;
    if (!witness.empty()) j["witness"] = witness;
    if (!grid.empty()) j["grid"] = grid;
    j["params"] = params;
    if (!children.empty()) {
        j["children"] = nlohmann::json::array();
        for (const auto& c : children) j["children"].push_back(c.to_json());
    }
    return j;
}

}  // namespace olab
