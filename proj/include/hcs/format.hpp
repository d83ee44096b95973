#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hcs {

/// Shortest decimal form that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view s);

/// Column-ordered result table written as CSV (LF line endings) or as a
/// JSON array of row objects.
class Table {
public:
    using Cell = std::variant<std::string, double, long long, bool>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    void add_row(std::vector<Cell> row);

    std::string to_csv() const;
    std::string to_json(int indent = 2) const;
    std::string render(std::string_view format) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace hcs
