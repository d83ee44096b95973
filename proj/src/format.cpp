#include "hcs/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace hcs {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("table row width does not match the header");
    rows_.push_back(std::move(row));
}

namespace {

std::string cell_text(const Table::Cell& c) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += csv_field(columns_[i]);
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cell_text(row[i]));
        }
        out += '\n';
    }
    return out;
}

std::string Table::to_json(int indent) const {
    using Json = nlohmann::ordered_json;
    Json arr = Json::array();
    for (const auto& row : rows_) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (const double* v = std::get_if<double>(&c)) {
                // JSON has no non-finite numbers; keep them as strings.
                if (std::isfinite(*v)) obj[columns_[i]] = *v;
                else obj[columns_[i]] = format_double(*v);
            } else if (const auto* s = std::get_if<std::string>(&c)) {
                obj[columns_[i]] = *s;
            } else if (const auto* n = std::get_if<long long>(&c)) {
                obj[columns_[i]] = *n;
            } else {
                obj[columns_[i]] = std::get<bool>(c);
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(indent) + "\n";
}

std::string Table::render(std::string_view format) const {
    if (format == "csv") return to_csv();
    if (format == "json") return to_json();
    throw std::invalid_argument("unknown output format '" + std::string(format) + "'");
}

}  // namespace hcs
