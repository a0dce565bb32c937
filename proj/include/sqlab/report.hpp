#pragma once
// Tabular experiment reports: {name, parameters, metadata, columns, rows}.

#include <string>
#include <vector>

#include "json.hpp"

namespace sqlab {

using ojson = nlohmann::ordered_json;

struct ExperimentReport {
    std::string name;
    ojson parameters = ojson::object();
    ojson metadata = ojson::object();
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> violations;  // failed invariants; nonempty means exit code 2

    void add_row(std::vector<double> r);
    void fail(const std::string& what) { violations.push_back(what); }
    bool ok() const { return violations.empty(); }
    // records a fitted constant together with how it was obtained
    void fit(const std::string& constant, double value, const std::string& method);

    std::string to_json() const;
    std::string to_csv() const;
    double cell(std::size_t row, const std::string& column) const;
    std::size_t column_index(const std::string& column) const;
};

std::string format_number(double v);

}  // namespace sqlab
