#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace loadshare {

using json = nlohmann::ordered_json;

// Single-line JSON event on a diagnostic stream. Data streams stay clean:
// warnings, errors and manifests all go through here.
inline void emit_event(std::ostream& os, const std::string& level, const std::string& event,
                       const json& extra = json::object()) {
    json j;
    j["level"] = level;
    j["event"] = event;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    os << j.dump() << '\n';
}

}
