#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace weakflow {

enum class FieldKind { Real, Int, Bool, Text };

struct Field {
    std::string name;
    FieldKind kind;
};

using Value = std::variant<double, std::int64_t, bool, std::string>;

// Flat table of records with a fixed schema; the unit every command emits.
class RecordTable {
public:
    RecordTable(std::string command, std::vector<Field> schema);

    void add_row(std::vector<Value> row);

    const std::string& command() const { return command_; }
    size_t rows() const { return rows_.size(); }
    size_t cols() const { return schema_.size(); }
    const Field& field(size_t index) const { return schema_.at(index); }
    const Value& cell(size_t row, size_t col) const { return rows_.at(row).at(col); }

private:
    std::string command_;
    std::vector<Field> schema_;
    std::vector<std::vector<Value>> rows_;
};

// Shortest decimal string that round-trips to the same double.
std::string render_double(double value);

// Header row plus one line per record; ',' separators, '.' decimal points,
// Unix newlines. Numeric strings are identical to the JSON rendering.
std::string render_csv(const RecordTable& table);

// {"schema":"weakflow/1","command":...,"records":[...]} on one line.
std::string render_json(const RecordTable& table);

inline constexpr const char* kSchemaVersion = "weakflow/1";

}  // namespace weakflow
