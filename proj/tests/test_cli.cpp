#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(SQLAB_EXE) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

}  // namespace

TEST_CASE("json report on stdout") {
    Run r = run("gauss-check --q-max 20");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["name"] == "gauss-check");
    CHECK(j["rows"].size() == 20);
    CHECK(j["columns"][0] == "q");
}

TEST_CASE("csv format") {
    Run r = run("lowpass-scan --j 4,8 --x-max 50 --format csv");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("J,", 0) == 0);
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == 3);
}

TEST_CASE("same seed gives identical bytes, threads do not matter") {
    Run a = run("orlicz-ratio --n 16,32 --trials 4 --seed 9 --threads 1");
    Run b = run("orlicz-ratio --n 16,32 --trials 4 --seed 9 --threads 3");
    Run c = run("orlicz-ratio --n 16,32 --trials 4 --seed 10");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("").code == 1);
    CHECK(run("no-such-command").code == 1);
    CHECK(run("gauss-check --format xml").code == 1);
    CHECK(run("lowpass-scan --j 8,x").code == 1);
    CHECK(run("sparse-demo --e 300").code == 1);
}

TEST_CASE("invariant violations exit 2") {
    // a tolerance of 1e-300 cannot be met by floating-point identities
    CHECK(run("gauss-check --q-max 10 --tol 1e-300").code == 2);
}

TEST_CASE("output file") {
    std::string path = "cli_test_out.json";
    Run r = run("minor-arc --n 64 --m 4,8 --grid 1024 --out " + path);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    std::fclose(f);
    std::remove(path.c_str());
}
