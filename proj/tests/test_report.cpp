#include "doctest.h"
#include "sqlab/report.hpp"

#include <cmath>

using namespace sqlab;

namespace {

ExperimentReport sample() {
    ExperimentReport r;
    r.name = "demo";
    r.parameters = {{"N", 4}};
    r.columns = {"a", "b"};
    r.add_row({1, 0.1});
    r.add_row({2, NAN});
    return r;
}

}  // namespace

TEST_CASE("rows must match the header") {
    ExperimentReport r = sample();
    CHECK_THROWS(r.add_row({1, 2, 3}));
    CHECK(r.cell(0, "b") == 0.1);
    CHECK(r.column_index("b") == 1);
    CHECK_THROWS(r.column_index("c"));
}

TEST_CASE("csv is a header plus round-trippable rows") {
    std::string csv = sample().to_csv();
    CHECK(csv == "a,b\n1,0.10000000000000001\n2,nan\n");
}

TEST_CASE("json schema") {
    ExperimentReport r = sample();
    r.fit("C", 1.5, "max over rows");
    r.fail("broken");
    CHECK_FALSE(r.ok());
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["name"] == "demo");
    CHECK(j["parameters"]["N"] == 4);
    CHECK(j["columns"].size() == 2);
    CHECK(j["rows"][0][1] == 0.1);
    CHECK(j["rows"][1][1] == "nan");
    CHECK(j["metadata"]["fits"][0]["method"] == "max over rows");
    CHECK(j["metadata"]["violations"][0] == "broken");
    CHECK(r.to_json() != sample().to_json());
}

TEST_CASE("json output is deterministic") {
    CHECK(sample().to_json() == sample().to_json());
}

TEST_CASE("format_number") {
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(0.5) == "0.5");
    CHECK(std::stod(format_number(M_PI)) == M_PI);
}
