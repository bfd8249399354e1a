#include <cmath>
#include <map>
#include <sstream>

#include "orlicz_lab/orlicz.hpp"

namespace olab {

namespace {

double parse_number(const std::string& s, std::size_t pos) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'", pos);
    }
    if (used != s.size()) throw ParseError("trailing characters in number '" + s + "'", pos + used);
    return v;
}

// key=value pairs separated by ',' or ';'.
std::map<std::string, std::pair<std::string, std::size_t>> parse_params(const std::string& body,
                                                                        std::size_t offset) {
    std::map<std::string, std::pair<std::string, std::size_t>> out;
    std::size_t i = 0;
    while (i < body.size()) {
        std::size_t end = body.find_first_of(",;", i);
        if (end == std::string::npos) end = body.size();
        std::string item = body.substr(i, end - i);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value", offset + i);
        out[item.substr(0, eq)] = {item.substr(eq + 1), offset + i + eq + 1};
        i = end + 1;
    }
    return out;
}

OrliczFunction apply_scale(OrliczFunction f, const std::map<std::string, std::pair<std::string, std::size_t>>& ps) {
    auto it = ps.find("scale");
    if (it == ps.end()) return f;
    double c = parse_number(it->second.first, it->second.second);
    if (!(c > 0)) throw ParseError("scale must be positive", it->second.second);
    return f.with_normalization(c);
}

void check_keys(const std::map<std::string, std::pair<std::string, std::size_t>>& ps,
                std::initializer_list<const char*> allowed, std::size_t pos) {
    for (const auto& [k, v] : ps) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ParseError("unknown parameter '" + k + "'", v.second - k.size() - 1);
    }
    (void)pos;
}

OrliczFunction parse_at(const std::string& text, std::size_t offset);

std::vector<std::pair<double, double>> parse_pairs(const std::string& s, std::size_t offset) {
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    auto skip = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
    skip();
    if (i >= s.size() || s[i] != '[') throw ParseError("pairs must start with '['", offset + i);
    ++i;
    skip();
    if (i < s.size() && s[i] == ']') throw ParseError("pairs list is empty", offset + i);
    for (;;) {
        skip();
        if (i >= s.size() || s[i] != '(') throw ParseError("expected '('", offset + i);
        std::size_t close = s.find(')', i);
        if (close == std::string::npos) throw ParseError("unterminated pair", offset + i);
        std::string inner = s.substr(i + 1, close - i - 1);
        std::size_t comma = inner.find(',');
        if (comma == std::string::npos) throw ParseError("pair needs two entries", offset + i);
        double l = parse_number(inner.substr(0, comma), offset + i + 1);
        double w = parse_number(inner.substr(comma + 1), offset + i + 2 + comma);
        if (!(l > 0 && l <= 1)) throw ParseError("lambda must lie in (0,1]", offset + i + 1);
        if (!(w > 0)) throw ParseError("omega must be positive", offset + i + 2 + comma);
        out.emplace_back(l, w);
        i = close + 1;
        skip();
        if (i < s.size() && s[i] == ',') { ++i; continue; }
        if (i < s.size() && s[i] == ']') { ++i; break; }
        throw ParseError("expected ',' or ']'", offset + i);
    }
    skip();
    if (i != s.size()) throw ParseError("trailing characters after pairs", offset + i);
    return out;
}

OrliczFunction parse_at(const std::string& text, std::size_t offset) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("expected '<kind>:<params>'", offset);
    std::string kind = text.substr(0, colon);
    std::string body = text.substr(colon + 1);
    std::size_t boff = offset + colon + 1;
    if (kind == "power") {
        auto ps = parse_params(body, boff);
        check_keys(ps, {"p", "scale"}, boff);
        auto it = ps.find("p");
        if (it == ps.end()) throw ParseError("power needs p", boff);
        double p = parse_number(it->second.first, it->second.second);
        if (!(p >= 1)) throw ParseError("power exponent must be >= 1", it->second.second);
        return apply_scale(OrliczFunction::power(p), ps);
    }
    if (kind == "powerlog") {
        auto ps = parse_params(body, boff);
        check_keys(ps, {"alpha", "cutoff", "scale"}, boff);
        auto it = ps.find("alpha");
        if (it == ps.end()) throw ParseError("powerlog needs alpha", boff);
        double a = parse_number(it->second.first, it->second.second);
        auto ct = ps.find("cutoff");
        auto f = ct == ps.end() ? OrliczFunction::power_log(a)
                                : OrliczFunction::power_log(a, parse_number(ct->second.first, ct->second.second));
        return apply_scale(f, ps);
    }
    if (kind == "tabulated") {
        auto ps = parse_params(body, boff);
        check_keys(ps, {"file", "extrapolate", "scale"}, boff);
        auto it = ps.find("file");
        if (it == ps.end() || it->second.first.empty()) throw ParseError("tabulated needs file", boff);
        bool extra = false;
        if (auto ex = ps.find("extrapolate"); ex != ps.end()) {
            if (ex->second.first == "power") extra = true;
            else if (ex->second.first != "none") throw ParseError("extrapolate is power or none", ex->second.second);
        }
        return apply_scale(OrliczFunction::tabulated_csv(it->second.first, extra), ps);
    }
    if (kind == "dilsum") {
        if (body.rfind("base=", 0) != 0) throw ParseError("dilsum needs base=", boff);
        std::size_t pp = body.rfind(";pairs=");
        if (pp == std::string::npos) throw ParseError("dilsum needs ;pairs=", boff + body.size());
        auto base = parse_at(body.substr(5, pp - 5), boff + 5);
        auto pairs = parse_pairs(body.substr(pp + 7), boff + pp + 7);
        return OrliczFunction::dilation_sum(base, pairs);
    }
    throw ParseError("unknown Orlicz kind '" + kind + "'", offset);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

OrliczFunction parse_orlicz_literal(const std::string& text) {
    try {
        return parse_at(text, 0);
    } catch (const ParseError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

std::string OrliczFunction::literal() const {
    std::string scale = normalization() != 1.0 ? ",scale=" + fmt(normalization()) : "";
    switch (kind()) {
        case OrliczKind::Power: return "power:p=" + fmt(p()) + scale;
        case OrliczKind::PowerLog: {
            std::string s = "powerlog:alpha=" + fmt(alpha());
            if (cutoff_eps() != power_log_cutoff(alpha())) s += ",cutoff=" + fmt(cutoff_eps());
            return s + scale;
        }
        case OrliczKind::DilationSum: {
            if (normalization() != 1.0 || log_lambda().size() > 64) break;
            std::string s = "dilsum:base=" + base().literal() + ";pairs=[";
            for (std::size_t j = 0; j < log_lambda().size(); ++j) {
                if (j) s += ",";
                s += "(" + fmt(std::exp(log_lambda()[j])) + "," + fmt(std::exp(log_omega()[j])) + ")";
            }
            return s + "]";
        }
        default: break;
    }
    return "";
}

nlohmann::json OrliczFunction::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind());
    j["cutoff_eps"] = cutoff_eps();
    j["normalization"] = normalization();
    nlohmann::json ps = nlohmann::json::object();
    switch (kind()) {
        case OrliczKind::Power: ps["p"] = p(); break;
        case OrliczKind::PowerLog: ps["alpha"] = alpha(); break;
        case OrliczKind::DilationSum:
            ps["base"] = base().to_json();
            ps["log_lambda"] = log_lambda();
            ps["log_omega"] = log_omega();
            break;
        case OrliczKind::Synthesized: {
            auto t = psi();
            ps["K"] = synth_K();
            ps["x0"] = t->x0;
            ps["dx"] = t->dx;
            ps["psi"] = t->psi;
            ps["psi1"] = t->psi1;
            ps["psi2"] = t->psi2;
            break;
        }
        case OrliczKind::Tabulated:
            ps["log_t"] = table_log_t();
            ps["log_m"] = table_log_m();
            ps["slopes"] = table_slopes();
            ps["extrapolate_below"] = table_extrapolates_below();
            break;
    }
    j["params"] = ps;
    return j;
}

OrliczFunction OrliczFunction::from_json(const nlohmann::json& j) {
    try {
        std::string kind = j.at("kind").get<std::string>();
        const auto& ps = j.at("params");
        double norm = j.value("normalization", 1.0);
        auto finish = [&](OrliczFunction f) { return norm != 1.0 ? f.with_normalization(norm) : f; };
        if (kind == "power") return finish(power(ps.at("p").get<double>()));
        if (kind == "powerlog") {
            double a = ps.at("alpha").get<double>();
            if (j.contains("cutoff_eps")) return finish(power_log(a, j.at("cutoff_eps").get<double>()));
            return finish(power_log(a));
        }
        if (kind == "dilsum") {
            auto b = from_json(ps.at("base"));
            if (ps.contains("pairs")) {
                std::vector<std::pair<double, double>> pr;
                for (const auto& e : ps.at("pairs")) pr.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
                return finish(dilation_sum(b, pr));
            }
            return finish(dilation_sum(b, ps.at("log_lambda").get<std::vector<double>>(),
                                       ps.at("log_omega").get<std::vector<double>>()));
        }
        if (kind == "synthesized") {
            auto t = std::make_shared<PsiTable>();
            t->x0 = ps.at("x0").get<double>();
            t->dx = ps.at("dx").get<double>();
            t->psi = ps.at("psi").get<std::vector<double>>();
            t->psi1 = ps.at("psi1").get<std::vector<double>>();
            t->psi2 = ps.at("psi2").get<std::vector<double>>();
            return finish(synthesized(t, ps.at("K").get<double>()));
        }
        if (kind == "tabulated") {
            return finish(tabulated(ps.at("log_t").get<std::vector<double>>(), ps.at("log_m").get<std::vector<double>>(),
                                    ps.value("slopes", std::vector<double>{}), ps.value("extrapolate_below", false)));
        }
        throw ParseError("unknown kind '" + kind + "' in JSON", 0);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed Orlicz JSON: ") + e.what(), 0);
    }
}

}  // namespace olab
