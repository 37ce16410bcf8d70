#include "crgeo/spec_file.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crgeo/models.hpp"

namespace crgeo {

namespace {

using nlohmann::json;

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& need(const json& j, const char* key) {
    if (!j.contains(key)) throw SpecError(key, "missing");
    return j.at(key);
}

Expr compile(const json& v, const std::string& field, const std::vector<std::string>& coords,
             const std::map<std::string, double>& consts) {
    if (v.is_number()) return Expr::constant(v.get<double>());
    if (!v.is_string()) throw SpecError(field, "expected an expression string or a number");
    try {
        return Expr::parse(v.get<std::string>(), coords, consts);
    } catch (const ParseError& e) {
        throw SpecError(field, e.what(), static_cast<std::ptrdiff_t>(e.column()));
    }
}

std::vector<Expr> vector_of(const json& v, const std::string& field, int n, const std::vector<std::string>& coords,
                            const std::map<std::string, double>& consts) {
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        throw SpecError(field, "expected an array of " + std::to_string(n) + " entries");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(compile(v[i], at(field, i), coords, consts));
    return out;
}

std::vector<Expr> matrix_of(const json& v, const std::string& field, int n, const std::vector<std::string>& coords,
                            const std::map<std::string, double>& consts) {
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        throw SpecError(field, "expected " + std::to_string(n) + " rows");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto row = vector_of(v[i], at(field, i), n, coords, consts);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

}  // namespace

std::vector<std::string> default_coordinate_names(int m) {
    if (m == 1) return {"x", "y", "t"};
    std::vector<std::string> c;
    for (int a = 1; a <= m; ++a) {
        c.push_back("x" + std::to_string(a));
        c.push_back("y" + std::to_string(a));
    }
    c.push_back("t");
    return c;
}

Structure parse_structure_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("", std::string("invalid JSON: ") + e.what(), static_cast<std::ptrdiff_t>(e.byte));
    }
    if (!j.is_object()) throw SpecError("", "top level must be an object");

    if (j.contains("model")) {
        ModelSpec ms;
        try {
            ms.kind = parse_model_kind(j["model"].get<std::string>());
            if (j.contains("m")) ms.m = j["m"].get<int>();
            if (j.contains("chart_radius")) ms.chart_radius = j["chart_radius"].get<double>();
        } catch (const DomainError& e) {
            throw SpecError("model", e.what());
        } catch (const json::exception& e) {
            throw SpecError("model", e.what());
        }
        for (auto& [k, v] : j.items())
            if (k != "model" && k != "m" && k != "chart_radius")
                throw SpecError(k, "not allowed together with \"model\"");
        if (ms.m < 1 || 2 * ms.m + 1 > kMaxDim) throw SpecError("m", "out of range");
        try {
            return make_model(ms);
        } catch (const DomainError& e) {
            throw SpecError("model", e.what());
        }
    }

    const json& jm = need(j, "m");
    if (!jm.is_number_integer() || jm.get<int>() < 1 || 2 * jm.get<int>() + 1 > kMaxDim)
        throw SpecError("m", "expected an integer between 1 and " + std::to_string((kMaxDim - 1) / 2));
    const int m = jm.get<int>();
    const int n = 2 * m + 1;

    std::vector<std::string> coords = default_coordinate_names(m);
    if (j.contains("coordinates")) {
        const json& c = j["coordinates"];
        if (!c.is_array() || static_cast<int>(c.size()) != n)
            throw SpecError("coordinates", "expected " + std::to_string(n) + " names");
        coords.clear();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_string()) throw SpecError(at("coordinates", i), "expected a name");
            coords.push_back(c[i].get<std::string>());
        }
    }
    std::map<std::string, double> consts;
    if (j.contains("constants")) {
        if (!j["constants"].is_object()) throw SpecError("constants", "expected an object");
        for (auto& [k, v] : j["constants"].items()) {
            if (!v.is_number()) throw SpecError("constants." + k, "expected a number");
            consts[k] = v.get<double>();
        }
    }

    const json& jb = need(j, "bounds");
    if (!jb.is_array() || static_cast<int>(jb.size()) != n)
        throw SpecError("bounds", "expected " + std::to_string(n) + " intervals");
    std::vector<Interval> bounds;
    for (std::size_t i = 0; i < jb.size(); ++i) {
        const json& b = jb[i];
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number() ||
            !(b[0].get<double>() < b[1].get<double>()))
            throw SpecError(at("bounds", i), "expected [lo, hi] with lo < hi");
        bounds.push_back({b[0].get<double>(), b[1].get<double>()});
    }

    auto theta = std::make_shared<const std::vector<Expr>>(vector_of(need(j, "theta"), "theta", n, coords, consts));
    auto J = std::make_shared<const std::vector<Expr>>(matrix_of(need(j, "J"), "J", n, coords, consts));
    auto h = std::make_shared<const std::vector<Expr>>(matrix_of(need(j, "h"), "h", n, coords, consts));

    std::string name = "spec";
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw SpecError("name", "expected a string");
        name = j["name"].get<std::string>();
    }

    Structure s;
    s.chart = Chart(bounds, name);
    s.name = name;
    s.theta = [theta, n](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        Vec<T> v(n);
        for (int i = 0; i < n; ++i) v[i] = (*theta)[static_cast<std::size_t>(i)](x);
        return v;
    };
    auto matrix = [n](std::shared_ptr<const std::vector<Expr>> e) {
        return [e, n](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            Mat<T> M(n, n);
            for (int i = 0; i < n * n; ++i) M.a[static_cast<std::size_t>(i)] = (*e)[static_cast<std::size_t>(i)](x);
            return M;
        };
    };
    s.J = matrix(J);
    s.h = matrix(h);
    for (const auto& [k, v] : consts) s.params[k] = v;
    return s;
}

Structure load_structure_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_structure_spec(ss.str());
}

}  // namespace crgeo
