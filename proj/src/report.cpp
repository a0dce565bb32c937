#include "sqlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sqlab {

void ExperimentReport::add_row(std::vector<double> r) {
    if (r.size() != columns.size()) throw std::logic_error("report " + name + ": row width mismatch");
    rows.push_back(std::move(r));
}

void ExperimentReport::fit(const std::string& constant, double value, const std::string& method) {
    if (!metadata.contains("fits")) metadata["fits"] = ojson::array();
    metadata["fits"].push_back({{"constant", constant}, {"value", value}, {"method", method}});
}

std::size_t ExperimentReport::column_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column) return i;
    throw std::out_of_range("report " + name + ": no column " + column);
}

double ExperimentReport::cell(std::size_t row, const std::string& column) const {
    return rows.at(row).at(column_index(column));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string ExperimentReport::to_json() const {
    ojson j;
    j["name"] = name;
    j["parameters"] = parameters;
    j["metadata"] = metadata;
    j["metadata"]["violations"] = violations;
    j["columns"] = columns;
    ojson rs = ojson::array();
    for (auto& r : rows) {
        ojson row = ojson::array();
        for (double v : r) {
            if (std::isfinite(v))
                row.push_back(v);
            else
                row.push_back(format_number(v));
        }
        rs.push_back(row);
    }
    j["rows"] = rs;
    return j.dump(1) + "\n";
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace sqlab
