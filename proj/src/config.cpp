#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace weakflow {

namespace {

const std::vector<std::string> kKnownKeys = {
    "selection.theta",
    "selection.overlap_floor",
    "selection.post",
    "operators.weak",
    "operators.strong",
    "coupling.eps_a",
    "coupling.eps_st_qx",
    "coupling.q_z",
    "coupling.q_x",
    "grid.t_end",
    "grid.steps",
    "grid.order",
    "ensemble.n",
    "ensemble.scaled",
    "pointer.q0",
    "pointer.delta",
    "pointer.n_points",
    "pointer.box_halfwidth",
    "pointer.eps_list",
    "sweep.n_values",
    "sweep.theta_values",
    "sweep.eps_a_values",
    "sweep.eps_st_qx_values",
    "output.path",
    "output.format",
    "output.margin_factor",
    "output.phase_threshold",
    "output.error_breakdown_level",
    "run.seed",
};

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size())
        throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
    return v;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> parts;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

}  // namespace

KeyValueConfig::KeyValueConfig() = default;

const std::vector<std::string>& KeyValueConfig::known_keys() { return kKnownKeys; }

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
        throw ConfigError("unknown configuration key '" + key + "'");
    values_[key] = trim(value);
}

void KeyValueConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    load_text(buffer.str(), path);
}

void KeyValueConfig::load_text(const std::string& text, const std::string& origin) {
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string name = trim(line.substr(0, eq));
        if (name.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        const std::string key = section.empty() ? name : section + "." + name;
        try {
            set(key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(key, it->second);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = parse_double(key, it->second);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
    return i;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const std::string& part : split_list(it->second)) out.push_back(parse_double(key, part));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const std::string& part : split_list(it->second)) {
        const double v = parse_double(key, part);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("key '" + key + "': expected integers, got '" + part + "'");
        out.push_back(i);
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

}  // namespace weakflow
