#pragma once

// Output records: a flat numeric table plus string metadata (the resolved
// configuration and library version), serialized to CSV or JSON with
// round-trippable doubles so that identical inputs give identical bytes.

#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "magnus/constants.hpp"

namespace magnus {

// shortest exact decimal form is not needed; 17 significant digits always
// round-trip and keep the byte stream stable
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct OutputTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const OutputTable& table) {
    std::string out;
    for (const auto& [key, value] : table.meta) out += "# " + key + " = " + value + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const OutputTable& table) {
    nlohmann::ordered_json j;
    auto& meta = j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.meta) meta[key] = value;
    j["columns"] = table.columns;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) rows.push_back(row);
    return j.dump(2) + "\n";
}

// Suffixed physical quantities for the SI-unit command line. Angles stay in
// radians and take no suffix; frequencies written in Hz convert to rad/s.
enum class Unit { length, energy, mass, magnetic_field, angular_frequency, time };

inline double parse_quantity(const std::string& text, Unit unit) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    std::string suffix = text.substr(pos);
    while (!suffix.empty() && suffix.front() == ' ') suffix.erase(0, 1);

    static const std::map<Unit, std::map<std::string, double>> tables = {
        {Unit::length, {{"", 1.0}, {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}},
        {Unit::energy,
         {{"", 1.0},
          {"J", 1.0},
          {"K", si::boltzmann},
          {"mK", 1e-3 * si::boltzmann},
          {"uK", 1e-6 * si::boltzmann},
          {"nK", 1e-9 * si::boltzmann}}},
        {Unit::mass, {{"", 1.0}, {"kg", 1.0}, {"u", si::atomic_mass_unit}}},
        {Unit::magnetic_field,
         {{"", 1.0}, {"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"G", 1e-4}}},
        {Unit::angular_frequency,
         {{"", 1.0},
          {"rads", 1.0},
          {"Hz", 2.0 * std::numbers::pi},
          {"kHz", 2.0 * std::numbers::pi * 1e3},
          {"MHz", 2.0 * std::numbers::pi * 1e6}}},
        {Unit::time, {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}},
    };
    const auto& table = tables.at(unit);
    const auto it = table.find(suffix);
    if (it == table.end())
        throw std::invalid_argument("unknown unit suffix '" + suffix + "' in '" + text + "'");
    return value * it->second;
}

} // namespace magnus
