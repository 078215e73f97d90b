#include "qdho/cli.hpp"

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

using Catch::Approx;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = qdho::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("float formatting", "[cli]") {
    using qdho::cli::format_double;
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1e300) == "1.0000000000000001e+300");
    CHECK(format_double(std::nan("")) == "null");
    CHECK(format_double(-INFINITY) == "null");
}

TEST_CASE("frame envelope", "[cli]") {
    const auto r = run({"frame", "--alpha", "0.3333333333333333", "--beta", "0.3333333333333333"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.back() == '\n');
    const auto j = json::parse(r.out);
    CHECK(j["schema_version"] == qdho::cli::schema_version);
    CHECK(j["command"] == "frame");
    CHECK(j["results"]["q"].get<double>() == Approx(2.0));
    CHECK(j["results"]["m_alpha"].get<double>() == Approx(1.1547005).epsilon(1e-7));
    CHECK(j["warnings"].empty());
    const std::vector<std::string> keys{"schema_version", "command", "parameters", "results", "warnings"};
    std::vector<std::string> seen;
    for (auto it = j.begin(); it != j.end(); ++it) seen.push_back(it.key());
    std::sort(seen.begin(), seen.end());
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    CHECK(seen == sorted);
    CHECK(r.out.rfind("{\"schema_version\"", 0) == 0);
}

TEST_CASE("spectrum in the undeformed limit", "[cli]") {
    const auto r = run({"spectrum", "--alpha", "1e-6", "--beta", "1e-6", "--levels", "5"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j["results"]["levels"].size() == 6);
    for (const auto& row : j["results"]["levels"])
        CHECK(std::abs(row["E"].get<double>() - (row["n"].get<int>() + 0.5)) < 1e-4);
}

TEST_CASE("invalid parameters exit 2 without an envelope", "[cli]") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"frame", "--alpha", "2", "--beta", "1"},
             {"frame"},
             {},
             {"frame", "--alpha", "abc", "--beta", "0.1"},
             {"spectrum", "--q", "2", "--alpha", "0.1"},
             {"polys", "--q", "2", "--format", "xml"},
             {"sweep", "--command", "sweep", "--param", "alpha", "--grid", "0:1:3"},
             {"sweep", "--command", "frame", "--param", "alpha", "--grid", "1:0:3"},
             {"sweep", "--command", "frame", "--param", "colour", "--grid", "0:1:3"},
             {"frame", "--alpha", "0.1", "--beta", "0.1", "--param", "alpha", "--grid", "0:1:3"},
         }) {
        const auto r = run(args);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK_FALSE(r.err.empty());
    }
}

TEST_CASE("numerical failure exits 3", "[cli]") {
    const auto r = run({"polys", "--q", "1.5", "--degree", "2000"});
    CHECK(r.code == 3);
    CHECK(r.out.empty());
    const auto s = run({"matelem", "--q", "2", "--kind", "normal", "--l", "2", "--r", "0", "--n", "2000"});
    CHECK(s.code == 3);
}

TEST_CASE("every subcommand produces a parseable envelope", "[cli]") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"operators", "--q", "2", "--dim", "4"},
             {"operators", "--alpha", "0.3", "--beta", "0.2", "--dim", "5"},
             {"selfadjoint", "--alpha", "0.3", "--beta", "0.3", "--terms", "50"},
             {"polys", "--q", "1.5", "--degree", "6", "--family", "hermite-x"},
             {"polys", "--alpha", "0.2", "--beta", "0.2", "--degree", "4"},
             {"matelem", "--q", "2", "--kind", "antinormal", "--l", "2", "--r", "1", "--n", "1"},
             {"su2", "--j", "1", "--alpha", "0.5"},
             {"xrep", "--alpha", "0.5", "--points", "101", "--refinements", "1"},
         }) {
        const auto r = run(args);
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        CHECK(j["command"] == args[0]);
        CHECK(j["results"].is_object());
    }
}

TEST_CASE("operators payload", "[cli]") {
    const auto j = json::parse(run({"operators", "--alpha", "0.3333333333333333", "--beta", "0.3333333333333333",
                                    "--dim", "4"})
                                   .out);
    CHECK(j["results"]["operators"].size() == 6);
    CHECK(j["results"]["commutator_interior_max"].get<double>() < 1e-12);
    CHECK(j["results"]["theta_identity_interior_max"].get<double>() < 1e-10);
    const auto& b = j["results"]["operators"][0];
    CHECK(b["label"] == "annihilator");
    CHECK(b["re"][1][2].get<double>() == Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("matelem reports oracle deltas", "[cli]") {
    const auto j = json::parse(
        run({"matelem", "--alpha", "0.3333333333333333", "--beta", "0.3333333333333333", "--kind", "xp", "--l", "1",
             "--r", "0", "--n", "0", "--m", "1"})
            .out);
    CHECK(j["results"]["value"]["re"].get<double>() == Approx(0.8660254037844386).epsilon(1e-12));
    CHECK(j["results"]["provenance"] == "closed_form");
    CHECK(j["results"]["oracle_abs_delta"].get<double>() < 1e-14);
}

TEST_CASE("sweep emits points in lexicographic order regardless of threads", "[cli]") {
    const std::vector<std::string> base{"sweep", "--command", "frame", "--param", "alpha", "--grid", "0.1:0.9:5",
                                        "--param", "beta", "--grid", "0.2:0.6:3"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1"});
    auto many = base;
    many.insert(many.end(), {"--threads", "8"});
    const auto a = run(one);
    const auto b = run(many);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream lines(a.out);
    std::vector<std::pair<double, double>> coords;
    for (std::string line; std::getline(lines, line);) {
        const auto j = json::parse(line);
        coords.emplace_back(j["parameters"]["sweep"]["alpha"].get<double>(),
                            j["parameters"]["sweep"]["beta"].get<double>());
    }
    REQUIRE(coords.size() == 15);
    CHECK(std::is_sorted(coords.begin(), coords.end()));
}

TEST_CASE("sweep records failing points instead of aborting", "[cli]") {
    const auto r = run({"sweep", "--command", "frame", "--param", "alpha", "--grid", "0.5:3:6", "--beta", "0.5"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    int failed = 0, total = 0;
    for (std::string line; std::getline(lines, line); ++total) {
        const auto j = json::parse(line);
        if (j["results"].is_null()) {
            ++failed;
            CHECK(j["warnings"][0].get<std::string>().rfind("domain error", 0) == 0);
        }
    }
    CHECK(total == 6);
    CHECK(failed == 3);  // alpha = 2, 2.5, 3 give alpha beta >= 1
}

TEST_CASE("csv projection", "[cli]") {
    const auto r = run({"frame", "--alpha", "0.25", "--beta", "0.1111111111111111", "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row, extra;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(header.rfind("command,parameters.alpha,parameters.beta,results.alpha", 0) == 0);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(row.find("1.4000000000000001") != std::string::npos);  // q = 7/5
}
