#include "orlicz_lab/luxemburg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace olab {

MusielakSection::MusielakSection(std::vector<SectionTerm> terms, bool lemma32_ready)
    : terms_(std::move(terms)), ready_(lemma32_ready) {
    if (terms_.empty()) throw DomainError("a section needs at least one term");
    for (const auto& t : terms_) {
        if (t.multiplicity == 0) throw DomainError("multiplicities must be positive");
        total_ += t.multiplicity;
        cumulative_.push_back(total_);
        if (ready_ && !(t.M.eval(1.0) >= 1.0)) {
            std::ostringstream os;
            os << "lemma32-ready section requires M_i(1) >= 1, got " << t.M.eval(1.0);
            throw DomainError(os.str());
        }
    }
}

MusielakSection MusielakSection::uniform(const OrliczFunction& M, std::uint64_t dim, bool lemma32_ready) {
    return MusielakSection({{M, dim}}, lemma32_ready);
}

bool MusielakSection::identical() const {
    for (const auto& t : terms_)
        if (!t.M.same(terms_.front().M)) return false;
    return true;
}

const OrliczFunction& MusielakSection::function_at(std::uint64_t i) const {
    if (i >= total_) throw DomainError("coordinate outside the section");
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), i);
    return terms_[it - cumulative_.begin()].M;
}

std::vector<OrliczFunction> MusielakSection::functions(std::uint64_t n) const {
    if (n > total_) throw DomainError("vector longer than the section");
    std::vector<OrliczFunction> out;
    out.reserve(n);
    std::size_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        while (i >= cumulative_[k]) ++k;
        out.push_back(terms_[k].M);
    }
    return out;
}

MusielakSection MusielakSection::tail_from(std::uint64_t start) const {
    if (start >= total_) throw DomainError("tail start beyond the section");
    std::vector<SectionTerm> out;
    std::uint64_t prev = 0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        std::uint64_t end = cumulative_[k];
        if (end > start) out.push_back({terms_[k].M, end - std::max(prev, start)});
        prev = end;
    }
    return MusielakSection(std::move(out), ready_);
}

nlohmann::json MusielakSection::to_json() const {
    nlohmann::json j;
    j["total_dim"] = std::to_string(total_);
    j["lemma32_ready"] = ready_;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms_)
        j["terms"].push_back({{"function", t.M.to_json()}, {"multiplicity", std::to_string(t.multiplicity)}});
    return j;
}

namespace {

double modular_fns(const std::vector<OrliczFunction>& fs, const FiniteVector& x, double log_rho) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = std::fabs(x[i]);
        if (a == 0) continue;
        s.add(std::exp(fs[i].log_eval(std::log(a) - log_rho)));
    }
    return s.value();
}

}  // namespace

double modular(const MusielakSection& S, const FiniteVector& x, double rho) {
    if (!(rho > 0)) throw DomainError("modular needs rho > 0");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("vector entries must be finite");
    return modular_fns(S.functions(x.size()), x, std::log(rho));
}

double lux_norm(const MusielakSection& S, const FiniteVector& x) {
    double amax = 0;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("vector entries must be finite");
        amax = std::max(amax, std::fabs(v));
    }
    if (amax == 0) return 0.0;
    auto fs = S.functions(x.size());
    // Bracket in log rho: lo has modular > 1, hi has modular <= 1.
    double lo = std::log(amax), hi = lo;
    double m = modular_fns(fs, x, lo);
    if (m > 1) {
        int guard = 0;
        do {
            lo = hi;
            hi += std::log(2.0);
            if (++guard > 4000) throw NumericError("norm bracket doubling did not terminate");
        } while (modular_fns(fs, x, hi) > 1);
    } else {
        int guard = 0;
        do {
            hi = lo;
            lo -= std::log(2.0);
            if (++guard > 4000) throw NumericError("norm bracket halving did not terminate");
        } while (modular_fns(fs, x, lo) <= 1);
    }
    double mlo = modular_fns(fs, x, lo), mhi = modular_fns(fs, x, hi);
    for (int it = 0; it < 60; ++it) {
        double mid = std::log(0.5 * (std::exp(lo) + std::exp(hi)));
        if (!(mid > lo && mid < hi)) break;
        double mm = modular_fns(fs, x, mid);
        if (mm > 1) {
            if (mm > mlo * (1 + 1e-12)) throw NumericError("modular increased with rho");
            lo = mid;
            mlo = mm;
        } else {
            if (mm < mhi * (1 - 1e-12)) throw NumericError("modular increased with rho");
            hi = mid;
            mhi = mm;
        }
    }
    return std::exp(hi);
}

Certificate unit_modular_check(const MusielakSection& S, const FiniteVector& x) {
    Certificate c;
    c.name = "unit_modular";
    if (!S.lemma32_ready()) {
        c.applicable = false;
        c.passed = false;
        c.witness = "section is not flagged lemma32_ready";
        return c;
    }
    double n = lux_norm(S, x);
    c.params = {{"norm", n}};
    // Normalizing by a computed norm leaves a residual of a few ulps.
    const double slack = 20 * kTolNorm;
    if (std::fabs(n - 1.0) > slack) {
        c.applicable = false;
        c.passed = false;
        c.witness = "vector is not normalized";
        return c;
    }
    double amax = 0;
    for (double v : x) amax = std::max(amax, std::fabs(v));
    double mod = modular(S, x, 1.0);
    double m1 = kTolClaim - std::fabs(mod - 1.0);
    double m2 = 1.0 + slack - amax;
    c.worst_margin = std::min(m1, m2);
    c.passed = m1 >= 0 && m2 >= 0;
    c.params["modular"] = mod;
    c.params["max_abs"] = amax;
    if (!c.passed) {
        std::ostringstream os;
        os.precision(17);
        os << "modular=" << mod << " max|x|=" << amax;
        c.witness = os.str();
    }
    return c;
}

double tail_norm(const MusielakSection& S, const FiniteVector& x, std::uint64_t start_index) {
    if (start_index < 1 || start_index > x.size())
        throw DomainError("tail start must lie in [1, length]");
    FiniteVector y = x;
    std::fill(y.begin(), y.begin() + (start_index - 1), 0.0);
    return lux_norm(S, y);
}

FiniteVector parse_vector_list(const std::string& text) {
    FiniteVector out;
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    std::size_t pos = 0;
    while (is >> tok) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("bad vector entry '" + tok + "'", text.find(tok, pos));
        }
        if (used != tok.size() || !std::isfinite(v))
            throw ParseError("bad vector entry '" + tok + "'", text.find(tok, pos));
        pos = text.find(tok, pos) + tok.size();
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty vector", 0);
    return out;
}

FiniteVector read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open vector file " + path);
    std::ostringstream all;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        all << line << '\n';
    }
    return parse_vector_list(all.str());
}

}  // namespace olab
