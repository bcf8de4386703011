#include "render.hpp"

#include <charconv>
#include <cmath>

namespace weakflow {

RecordTable::RecordTable(std::string command, std::vector<Field> schema)
    : command_(std::move(command)), schema_(std::move(schema)) {
    if (schema_.empty()) throw ConfigError("record table requires at least one field");
}

void RecordTable::add_row(std::vector<Value> row) {
    if (row.size() != schema_.size())
        throw ConfigError("record width does not match the table schema");
    for (size_t k = 0; k < row.size(); ++k) {
        const bool ok = (schema_[k].kind == FieldKind::Real && std::holds_alternative<double>(row[k])) ||
                        (schema_[k].kind == FieldKind::Int && std::holds_alternative<std::int64_t>(row[k])) ||
                        (schema_[k].kind == FieldKind::Bool && std::holds_alternative<bool>(row[k])) ||
                        (schema_[k].kind == FieldKind::Text && std::holds_alternative<std::string>(row[k]));
        if (!ok) throw ConfigError("record value type does not match field '" + schema_[k].name + "'");
    }
    rows_.push_back(std::move(row));
}

std::string render_double(double value) {
    if (!std::isfinite(value)) throw NumericError("cannot render a non-finite number");
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string render_int(std::int64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string render_value(const Value& value) {
    if (const auto* d = std::get_if<double>(&value)) return render_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&value)) return render_int(*i);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    return std::get<std::string>(value);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

std::string render_csv(const RecordTable& table) {
    std::string out;
    for (size_t c = 0; c < table.cols(); ++c) {
        if (c) out += ',';
        out += table.field(c).name;
    }
    out += '\n';
    for (size_t r = 0; r < table.rows(); ++r) {
        for (size_t c = 0; c < table.cols(); ++c) {
            if (c) out += ',';
            const std::string cell = render_value(table.cell(r, c));
            if (cell.find_first_of(",\"\n") != std::string::npos)
                throw ConfigError("CSV cell would require quoting: '" + cell + "'");
            out += cell;
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const RecordTable& table) {
    std::string out = "{\"schema\":\"";
    out += kSchemaVersion;
    out += "\",\"command\":\"";
    out += json_escape(table.command());
    out += "\",\"records\":[";
    for (size_t r = 0; r < table.rows(); ++r) {
        if (r) out += ',';
        out += '{';
        for (size_t c = 0; c < table.cols(); ++c) {
            if (c) out += ',';
            out += '"';
            out += json_escape(table.field(c).name);
            out += "\":";
            if (table.field(c).kind == FieldKind::Text) {
                out += '"';
                out += json_escape(std::get<std::string>(table.cell(r, c)));
                out += '"';
            } else {
                out += render_value(table.cell(r, c));
            }
        }
        out += '}';
    }
    out += "]}";
    out += '\n';
    return out;
}

}  // namespace weakflow
