#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/events.hpp"
#include "loadshare/monotone_map.hpp"

namespace loadshare {

inline json map_to_json(const MonotoneMap& h) {
    json j;
    j["kind"] = to_string(h.kind());
    j["domain_max"] = h.domain_max();
    j["slope_at_zero"] = h.derivative_at_zero();
    switch (h.kind()) {
        case MapKind::linear:
            j["a"] = h.param_a();
            break;
        case MapKind::moebius:
            j["a"] = h.param_a();
            j["b"] = h.param_b();
            break;
        default: {
            json knots = json::array();
            const auto& kx = h.interpolant().knot_x();
            const auto& ky = h.interpolant().knot_y();
            for (size_t i = 0; i < kx.size(); ++i) knots.push_back({kx[i], ky[i]});
            j["knots"] = std::move(knots);
        }
    }
    return j;
}

// Reconstructs through the factory functions, so a loaded model passes the
// same validation as a freshly built one. The stored slope_at_zero is
// informational; it is recomputed, never trusted.
inline MonotoneMap map_from_json(const json& j, const std::string& name) {
    try {
        if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
            throw ValidationError(name + ": model must be an object with a 'kind' string");
        std::string kind = j.at("kind").get<std::string>();
        double dm = j.at("domain_max").get<double>();
        if (kind == "linear") return MonotoneMap::linear(j.at("a").get<double>(), dm);
        if (kind == "moebius")
            return MonotoneMap::moebius(j.at("a").get<double>(), j.at("b").get<double>(), dm);
        if (kind == "tabulated") {
            if (!j.contains("knots") || !j.at("knots").is_array())
                throw ValidationError(name + ": tabulated model needs a 'knots' array");
            std::vector<std::array<double, 2>> samples;
            samples.reserve(j.at("knots").size());
            for (const auto& row : j.at("knots")) {
                if (!row.is_array() || row.size() != 2)
                    throw ValidationError(name + ": each knot must be a [force, response] pair");
                samples.push_back({row[0].get<double>(), row[1].get<double>()});
            }
            return MonotoneMap::make_tabulated(samples, dm);
        }
        throw ValidationError(name + ": unknown model kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ValidationError(name + ": " + e.what());
    }
}

inline void save_model(const MonotoneMap& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << map_to_json(h).dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing model to '" + path + "'");
}

inline MonotoneMap load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return map_from_json(doc, path);
}

}
