#pragma once

#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace weakflow {

// Flat key=value store with [section] headers in files; keys are
// "section.name". Unknown keys are rejected at set time.
class KeyValueConfig {
public:
    KeyValueConfig();

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    void load_text(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace weakflow
