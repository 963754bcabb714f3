#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "loadshare/csv.hpp"
#include "loadshare/errors.hpp"
#include "loadshare/events.hpp"

namespace loadshare {

struct ExperimentTable {
    std::vector<std::array<double, 2>> rows;  // (f_k, f_j), sorted by f_k
    std::string source;
    std::string units;
    int duplicates_merged = 0;
    bool origin_injected = false;
};

// CSV of (F_k, F_j) measurements. Accepts an optional header line, '#'
// comments (a "# units: ..." comment is captured), blank lines, and repeated
// F_k values (merged by averaging, reported as a warning). The origin row is
// injected when missing: h(0) = 0 is structural, not empirical.
inline ExperimentTable parse_samples(std::istream& in, const std::string& name,
                                     std::ostream* events = nullptr) {
    ExperimentTable table;
    table.source = name;
    std::string line;
    int line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            sv.remove_prefix(1);
            sv = trim(sv);
            if (sv.substr(0, 6) == "units:") table.units = std::string(trim(sv.substr(6)));
            continue;
        }
        auto fields = split_csv_line(sv);
        if (!seen_data && !parse_double(fields[0]).has_value()) continue;  // header line
        seen_data = true;
        if (fields.size() != 2)
            throw ParseError(name + ":" + std::to_string(line_no) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        std::array<double, 2> row{};
        for (int c = 0; c < 2; ++c) {
            auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError(name + ":" + std::to_string(line_no) + ": bad number '" +
                                 std::string(fields[c]) + "'");
            if (*v < 0.0)
                throw ValidationError(name + ":" + std::to_string(line_no) +
                                      ": forces must be >= 0, got " + std::string(fields[c]));
            row[c] = *v;
        }
        table.rows.push_back(row);
    }
    if (table.rows.empty()) throw ValidationError(name + ": no data rows");

    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const auto& a, const auto& b) { return a[0] < b[0]; });

    std::vector<std::array<double, 2>> merged;
    merged.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size();) {
        size_t k = i;
        double sum = 0.0;
        while (k < table.rows.size() && table.rows[k][0] == table.rows[i][0]) sum += table.rows[k++][1];
        merged.push_back({table.rows[i][0], sum / double(k - i)});
        if (k - i > 1) {
            table.duplicates_merged += int(k - i - 1);
            if (events)
                emit_event(*events, "warning", "duplicates_merged",
                           {{"f_k", table.rows[i][0]}, {"count", k - i}});
        }
        i = k;
    }
    table.rows = std::move(merged);

    if (table.rows.front()[0] == 0.0) {
        if (table.rows.front()[1] != 0.0)
            throw ValidationError(name + ": the zero-force sample must have zero response");
    } else {
        table.rows.insert(table.rows.begin(), {0.0, 0.0});
        table.origin_injected = true;
        if (events) emit_event(*events, "warning", "origin_injected", {{"source", name}});
    }
    if (table.rows.size() < 4)
        throw ValidationError(name + ": need at least 4 rows after deduplication, got " +
                              std::to_string(table.rows.size()));
    return table;
}

inline ExperimentTable read_samples(const std::string& path, std::ostream* events = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open samples file '" + path + "'");
    return parse_samples(in, path, events);
}

struct SweepSpec {
    double m_min = 0.0;
    double m_max = 0.0;
    int count = 0;
};

struct NumericSpec {
    double tol = 1e-10;
    int n_max = 64;
    int grid_size = 257;
    double ref_force = 1.0;
};

struct ProblemConfig {
    std::vector<std::string> arm_names;  // JSON insertion order, fixes CSV column order
    std::vector<double> arm_values;
    std::string pair_j, pair_k;
    SweepSpec sweep;
    NumericSpec numeric;

    size_t index_of(const std::string& name) const {
        for (size_t i = 0; i < arm_names.size(); ++i)
            if (arm_names[i] == name) return i;
        throw ValidationError("muscle '" + name + "' is not declared in arms");
    }
};

namespace detail {

inline double config_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.at(key).is_number())
        throw ValidationError(ctx + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

}

inline ProblemConfig parse_config(const json& doc, const std::string& name) {
    ProblemConfig cfg;
    try {
        if (!doc.is_object()) throw ValidationError(name + ": config must be a JSON object");
        if (!doc.contains("arms") || !doc.at("arms").is_object())
            throw ValidationError(name + ": missing 'arms' object");
        for (const auto& [key, value] : doc.at("arms").items()) {
            if (!value.is_number())
                throw ValidationError(name + ": arm '" + key + "' must be a number");
            double r = value.get<double>();
            if (!(std::isfinite(r) && r > 0.0))
                throw ValidationError(name + ": arm '" + key + "' must be > 0");
            cfg.arm_names.push_back(key);
            cfg.arm_values.push_back(r);
        }
        if (cfg.arm_names.size() < 2)
            throw ValidationError(name + ": need at least 2 arms");

        if (!doc.contains("pair") || !doc.at("pair").is_array() || doc.at("pair").size() != 2 ||
            !doc.at("pair")[0].is_string() || !doc.at("pair")[1].is_string())
            throw ValidationError(name + ": 'pair' must be an array of two muscle names [j, k]");
        cfg.pair_j = doc.at("pair")[0].get<std::string>();
        cfg.pair_k = doc.at("pair")[1].get<std::string>();
        cfg.index_of(cfg.pair_j);
        cfg.index_of(cfg.pair_k);

        if (!doc.contains("sweep") || !doc.at("sweep").is_object())
            throw ValidationError(name + ": missing 'sweep' object");
        const json& sw = doc.at("sweep");
        cfg.sweep.m_min = sw.contains("m_min") ? detail::config_number(sw, "m_min", name)
                                               : detail::config_number(sw, "M_min", name);
        cfg.sweep.m_max = sw.contains("m_max") ? detail::config_number(sw, "m_max", name)
                                               : detail::config_number(sw, "M_max", name);
        if (!sw.contains("count") || !sw.at("count").is_number_integer())
            throw ValidationError(name + ": sweep 'count' must be an integer");
        cfg.sweep.count = sw.at("count").get<int>();
        if (!(std::isfinite(cfg.sweep.m_min) && cfg.sweep.m_min >= 0.0))
            throw ValidationError(name + ": sweep m_min must be >= 0");
        if (!(std::isfinite(cfg.sweep.m_max) && cfg.sweep.m_max > cfg.sweep.m_min))
            throw ValidationError(name + ": sweep m_max must exceed m_min");
        if (cfg.sweep.count < 2)
            throw ValidationError(name + ": sweep count must be >= 2");

        if (doc.contains("numeric")) {
            const json& nu = doc.at("numeric");
            if (!nu.is_object()) throw ValidationError(name + ": 'numeric' must be an object");
            if (nu.contains("tol")) cfg.numeric.tol = detail::config_number(nu, "tol", name);
            if (nu.contains("n_max")) cfg.numeric.n_max = nu.at("n_max").get<int>();
            if (nu.contains("grid_size")) cfg.numeric.grid_size = nu.at("grid_size").get<int>();
            if (nu.contains("ref_force"))
                cfg.numeric.ref_force = detail::config_number(nu, "ref_force", name);
            if (!(cfg.numeric.tol > 0.0))
                throw ValidationError(name + ": numeric tol must be > 0");
            if (cfg.numeric.n_max < 3)
                throw ValidationError(name + ": numeric n_max must be >= 3");
            if (cfg.numeric.grid_size < 16)
                throw ValidationError(name + ": numeric grid_size must be >= 16");
            if (!(std::isfinite(cfg.numeric.ref_force) && cfg.numeric.ref_force > 0.0))
                throw ValidationError(name + ": numeric ref_force must be > 0");
        }
    } catch (const json::exception& e) {
        throw ValidationError(name + ": " + e.what());
    }
    return cfg;
}

inline ProblemConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_config(doc, path);
}

}
