#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace curvehedge::cli {

inline constexpr const char* kVersion = "0.1.0";

/// One long-format row. Empty optionals are written as empty fields.
struct Row {
    std::string section;
    std::optional<std::size_t> steps;
    std::optional<double> date;
    std::optional<double> maturity;
    std::string quantity;
    double value = 0.0;
    double se = 0.0;
    std::string status;
};

/// CSV table: `#`-prefixed metadata, one header line, LF endings, %.17g numbers.
class Table {
public:
    void meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }
    void add(Row row) { rows_.push_back(std::move(row)); }
    const std::vector<Row>& rows() const { return rows_; }

    std::string str() const;
    /// Writes to dir/name, creating dir if needed.
    void write(const std::string& dir, const std::string& name) const;

private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<Row> rows_;
};

std::string format_number(double x);

}  // namespace curvehedge::cli
