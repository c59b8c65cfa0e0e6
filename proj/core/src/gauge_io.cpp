#include <json.hpp>

#include "dhc/error.hpp"
#include "dhc/gauge.hpp"

namespace dhc {

namespace {

using nlohmann::json;

json signs(const std::vector<Z2>& values) {
    json arr = json::array();
    for (Z2 s : values) arr.push_back(static_cast<int>(s));
    return arr;
}

std::vector<Z2> read_signs(const json& doc, const char* key, bool required = true) {
    std::vector<Z2> out;
    if (!doc.contains(key)) {
        if (required) throw ConfigError(std::string("missing key '") + key + "'");
        return out;
    }
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of +1/-1");
    for (const json& x : arr) {
        if (!x.is_number_integer() || (x.get<int>() != 1 && x.get<int>() != -1)) {
            throw ConfigError(std::string("'") + key + "' entries must be +1 or -1");
        }
        out.push_back(static_cast<Z2>(x.get<int>()));
    }
    return out;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

std::string to_json(const FluxAssignment& f) {
    json doc;
    doc["W"] = signs(f.W);
    doc["W_tilde"] = signs(f.W_tilde);
    doc["V"] = signs(f.V);
    doc["wilson"] = signs(f.wilson);
    doc["wilson_tilde"] = signs(f.wilson_tilde);
    return doc.dump();
}

std::string to_json(const GaugeConfig& g) {
    json doc;
    doc["u"] = signs(g.u);
    doc["u_tilde"] = signs(g.u_tilde);
    doc["v"] = signs(g.v);
    return doc.dump();
}

FluxAssignment flux_from_json(const std::string& text) {
    const json doc = parse(text);
    FluxAssignment f;
    f.W = read_signs(doc, "W");
    f.W_tilde = read_signs(doc, "W_tilde");
    f.V = read_signs(doc, "V");
    f.wilson = read_signs(doc, "wilson", false);
    f.wilson_tilde = read_signs(doc, "wilson_tilde", false);
    return f;
}

GaugeConfig gauge_from_json(const std::string& text) {
    const json doc = parse(text);
    return GaugeConfig{read_signs(doc, "u"), read_signs(doc, "u_tilde"), read_signs(doc, "v")};
}

GaugeConfig load_gauge(const Lattice& lattice, const std::string& text) {
    const json doc = parse(text);
    if (doc.contains("u")) {
        GaugeConfig g = gauge_from_json(text);
        validate(lattice, g);
        return g;
    }
    if (doc.contains("W")) {
        FluxAssignment f = flux_from_json(text);
        if (f.wilson.empty() && lattice.periodic()) f.wilson = {1, 1};
        if (f.wilson_tilde.empty() && lattice.periodic()) f.wilson_tilde = {1, 1};
        return lift_to_gauge(lattice, f);
    }
    throw ConfigError("gauge file must contain either 'u'/'u_tilde'/'v' or 'W'/'W_tilde'/'V'");
}

}  // namespace dhc
