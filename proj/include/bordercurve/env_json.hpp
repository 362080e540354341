#pragma once

// JSON environment specs:
//   { "t_max": 30, "tolerances": {"eta": 1e-7, "quadrature": 1e-9, "root": 1e-11},
//     "bidders": [ {"family": "cra", "ce": {"kind": "quadratic", "alpha": 1},
//                   "dist": {"kind": "uniform"}, "count": 2}, ... ] }
// Tabulated distributions use {"kind": "table", "path": "v.csv"} with the path
// relative to the spec file. The flat spelling {"dist": "power-mvv", "beta": 0.5}
// and {"g": "quadratic", "alpha": 1} is accepted too. Unknown keys are rejected.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "environments.hpp"
#include "errors.hpp"
#include "monotone.hpp"

namespace bordercurve {

namespace detail {

using Json = nlohmann::json;

inline void allow_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw InputError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw InputError(where + ": unknown key \"" + it.key() + "\"");
    }
}

inline double number(const Json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw InputError(where + ": \"" + key + "\" must be a number");
    return obj.at(key).get<double>();
}

inline double required_number(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
    return number(obj, key, where, 0.0);
}

inline std::string text(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw InputError(where + ": \"" + key + "\" must be a string");
    return obj.at(key).get<std::string>();
}

inline Dist parse_dist(const Json& j, const std::filesystem::path& base, const std::string& where) {
    allow_keys(j, {"kind", "beta", "path"}, where);
    const std::string kind = text(j, "kind", where);
    if (kind == "uniform") return Dist::uniform();
    if (kind == "power-mvv") return Dist::power_mvv(required_number(j, "beta", where));
    if (kind == "table") {
        const std::filesystem::path p = base / text(j, "path", where);
        return Dist::tabulated(MonotoneFn::read_csv(p.string()));
    }
    throw InputError(where + ": unknown distribution kind \"" + kind + "\"");
}

inline CertaintyEquivalent parse_ce(const Json& j, const std::string& where) {
    allow_keys(j, {"kind", "alpha"}, where);
    const std::string kind = text(j, "kind", where);
    CertaintyEquivalent ce;
    if (kind == "quadratic")
        ce.kind = CertaintyEquivalent::Kind::Quadratic;
    else if (kind == "gul")
        ce.kind = CertaintyEquivalent::Kind::Gul;
    else
        throw InputError(where + ": unknown certainty equivalent \"" + kind + "\"");
    ce.alpha = required_number(j, "alpha", where);
    return ce;
}

// "dist" as an object, or as a bare kind string with "beta"/"path" beside it.
inline Dist bidder_dist(const Json& b, const std::filesystem::path& base, const std::string& where) {
    if (!b.contains("dist")) {
        if (b.contains("beta") || b.contains("path")) throw InputError(where + ": \"beta\"/\"path\" need \"dist\"");
        return Dist::uniform();
    }
    const Json& d = b.at("dist");
    if (!d.is_string()) return parse_dist(d, base, where);
    Json flat{{"kind", d}};
    for (const char* k : {"beta", "path"})
        if (b.contains(k)) flat[k] = b.at(k);
    return parse_dist(flat, base, where);
}

// "ce" as an object, or "g" and "alpha" on the bidder.
inline CertaintyEquivalent bidder_ce(const Json& b, const std::string& where) {
    if (b.contains("ce")) {
        if (b.contains("g") || b.contains("alpha")) throw InputError(where + ": give either \"ce\" or \"g\"");
        return parse_ce(b.at("ce"), where);
    }
    if (!b.contains("g")) throw InputError(where + ": missing \"ce\"");
    Json flat{{"kind", b.at("g")}};
    if (b.contains("alpha")) flat["alpha"] = b.at("alpha");
    return parse_ce(flat, where);
}

}  // namespace detail

inline Environment parse_environment(const nlohmann::json& j, const std::filesystem::path& base = ".") {
    using detail::allow_keys;
    allow_keys(j, {"t_max", "tolerances", "bidders"}, "environment");
    const double t_max = detail::number(j, "t_max", "environment", 30.0);
    Tolerances tol;
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        allow_keys(t, {"eta", "quadrature", "root"}, "tolerances");
        tol.eta = detail::number(t, "eta", "tolerances", tol.eta);
        tol.quadrature = detail::number(t, "quadrature", "tolerances", tol.quadrature);
        tol.root = detail::number(t, "root", "tolerances", tol.root);
    }
    if (!j.contains("bidders") || !j.at("bidders").is_array())
        throw InputError("environment: \"bidders\" must be an array");
    std::vector<BidderSpec> bidders;
    std::size_t idx = 0;
    for (const auto& b : j.at("bidders")) {
        const std::string where = "bidder entry " + std::to_string(++idx);
        if (!b.is_object()) throw InputError(where + ": expected an object");
        const std::string family = detail::text(b, "family", where);
        BidderSpec spec;
        if (family == "linear") {
            allow_keys(b, {"family", "dist", "beta", "path", "count"}, where);
            spec = BidderSpec::linear(detail::bidder_dist(b, base, where));
        } else if (family == "ev-power") {
            allow_keys(b, {"family", "beta", "count"}, where);
            spec = BidderSpec::ev_power(detail::required_number(b, "beta", where));
        } else if (family == "ev-h") {
            allow_keys(b, {"family", "gamma", "dist", "beta", "path", "count"}, where);
            spec = BidderSpec::ev_h(detail::required_number(b, "gamma", where), detail::bidder_dist(b, base, where));
        } else if (family == "cra") {
            allow_keys(b, {"family", "ce", "g", "alpha", "dist", "path", "count"}, where);
            spec = BidderSpec::cra(detail::bidder_ce(b, where), detail::bidder_dist(b, base, where));
        } else {
            throw InputError(where + ": unknown family \"" + family + "\"");
        }
        double count = detail::number(b, "count", where, 1.0);
        if (!(count >= 1.0) || count != std::floor(count) || count > 1000.0)
            throw InputError(where + ": \"count\" must be a positive integer");
        bidders.insert(bidders.end(), static_cast<std::size_t>(count), spec);
    }
    return Environment(std::move(bidders), t_max, tol);
}

inline Environment load_environment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return parse_environment(j, path.parent_path());
}

}  // namespace bordercurve
