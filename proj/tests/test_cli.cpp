#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "topoeval/cli.hpp"

using namespace topoeval;
using Catch::Matchers::ContainsSubstring;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> toy_args(const std::string& subcommand) {
    return {subcommand, "--dataset", testsupport::toy6_csv(),
            "--schema", testsupport::toy6_schema()};
}

std::vector<std::string> toy_report_args() {
    auto args = toy_args("report");
    args.insert(args.end(), {"--predictions", testsupport::toy6_preds(),
                             "--min-cardinality", "1", "--k", "2"});
    return args;
}

}  // namespace

TEST_CASE("build writes the artifact, its manifest, and a one-line summary", "[cli]") {
    std::string dir = testsupport::fresh_tmp_dir("clibuild");
    std::string artifact = dir + "/topo.json";
    auto args = toy_args("build");
    args.insert(args.end(), {"--min-cardinality", "1", "--out", artifact});
    CliResult r = run(args);

    INFO(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "11 open sets\n");
    REQUIRE(std::filesystem::exists(artifact));
    REQUIRE(std::filesystem::exists(artifact + ".manifest.json"));

    auto t = testsupport::load_toy6();
    REQUIRE(testsupport::read_file(artifact) ==
            topology_to_json(t.topology, *t.dataset).dump(2) + "\n");

    Topology back = topology_from_json(
        nlohmann::json::parse(testsupport::read_file(artifact)), *t.dataset);
    REQUIRE(back.size() == 11);

    nlohmann::json m = nlohmann::json::parse(testsupport::read_file(artifact + ".manifest.json"));
    REQUIRE(m["tool"] == "topoeval");
    REQUIRE(m["command"] == "build");
    REQUIRE(m["open_set_count"] == 11);
    REQUIRE(m["config"]["min_cardinality"] == 1);
    REQUIRE(m["inputs"]["dataset"]["fnv1a64"].get<std::string>().size() == 16);
    REQUIRE(m["inputs"].contains("schema"));
    REQUIRE_FALSE(m["timings_ms"].empty());
}

TEST_CASE("the default cardinality floor keeps only the constants on tiny data", "[cli]") {
    std::string dir = testsupport::fresh_tmp_dir("clifloor");
    std::string artifact = dir + "/topo.json";
    auto args = toy_args("build");
    args.insert(args.end(), {"--out", artifact});
    CliResult r = run(args);
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "2 open sets\n");
}

TEST_CASE("build requires an output path", "[cli]") {
    CliResult r = run(toy_args("build"));
    REQUIRE(r.code == 1);
    REQUIRE_THAT(r.err, ContainsSubstring("build requires --out"));
}

TEST_CASE("report renders markdown to stdout and the manifest to stderr", "[cli]") {
    CliResult r = run(toy_report_args());
    INFO(r.err);
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("# Accuracy report\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("- Global value (X): 66.67\n"));
    REQUIRE_THAT(r.err, ContainsSubstring("\"command\": \"report\""));
}

TEST_CASE("report output is byte-identical across runs", "[cli]") {
    std::string dir = testsupport::fresh_tmp_dir("clidet");
    for (const std::string format : {"md", "json"}) {
        auto base = toy_report_args();
        base.insert(base.end(), {"--item", "5", "--format", format});
        auto first = base;
        first.insert(first.end(), {"--out", dir + "/a." + format});
        auto second = base;
        second.insert(second.end(), {"--out", dir + "/b." + format});
        REQUIRE(run(first).code == 0);
        REQUIRE(run(second).code == 0);
        std::string a = testsupport::read_file(dir + "/a." + format);
        std::string b = testsupport::read_file(dir + "/b." + format);
        REQUIRE_FALSE(a.empty());
        REQUIRE(a == b);
    }
}

TEST_CASE("report restricts the inconsistency table to requested sets", "[cli]") {
    std::string dir = testsupport::fresh_tmp_dir("cliset");
    auto args = toy_report_args();
    args.insert(args.end(),
                {"--set", "attr:red", "--format", "json", "--out", dir + "/r.json"});
    REQUIRE(run(args).code == 0);
    nlohmann::json doc = nlohmann::json::parse(testsupport::read_file(dir + "/r.json"));
    REQUIRE(doc["inconsistency"]["results"].size() == 1);
    REQUIRE(doc["inconsistency"]["results"][0]["expr"] == "attr:red");
    REQUIRE(doc["inconsistency"]["results"][0]["value"] == 0.25);
}

TEST_CASE("report csv needs a stem and writes the family next to it", "[cli]") {
    CliResult bare = run([] {
        auto args = toy_report_args();
        args.insert(args.end(), {"--format", "csv"});
        return args;
    }());
    REQUIRE(bare.code == 1);
    REQUIRE_THAT(bare.err, ContainsSubstring("requires --out"));

    std::string dir = testsupport::fresh_tmp_dir("clicsv");
    auto args = toy_report_args();
    args.insert(args.end(), {"--format", "csv", "--out", dir + "/fam"});
    REQUIRE(run(args).code == 0);
    for (const char* suffix : {".summary.csv", ".ranked.csv", ".inconsistency.csv",
                               ".items.csv", ".neighborhoods.csv"})
        REQUIRE(std::filesystem::exists(dir + "/fam" + suffix));
}

TEST_CASE("inspect profiles the requested items", "[cli]") {
    auto args = toy_args("inspect");
    args.insert(args.end(), {"--predictions", testsupport::toy6_preds(),
                             "--min-cardinality", "1", "--item", "5", "--item", "1"});
    CliResult r = run(args);
    INFO(r.err);
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("## Item 5\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("- a_max: 75.00 (attr:red)\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("## Item 1\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("- a_max: 100.00 (label:A ∩ attr:red)\n"));
}

TEST_CASE("inspect rejects csv and requires at least one item", "[cli]") {
    auto csv_args = toy_args("inspect");
    csv_args.insert(csv_args.end(), {"--predictions", testsupport::toy6_preds(),
                                     "--item", "5", "--format", "csv"});
    CliResult r = run(csv_args);
    REQUIRE(r.code == 1);
    REQUIRE_THAT(r.err, ContainsSubstring("not supported for inspect"));

    auto bare = toy_args("inspect");
    bare.insert(bare.end(), {"--predictions", testsupport::toy6_preds()});
    CliResult missing = run(bare);
    REQUIRE(missing.code != 0);
    REQUIRE_THAT(missing.err, ContainsSubstring("--item"));
}

TEST_CASE("input and argument failures exit nonzero with a reason", "[cli]") {
    auto ghost = toy_report_args();
    ghost[4] = "/nonexistent/schema.json";
    CliResult r = run(ghost);
    REQUIRE(r.code == 1);
    REQUIRE_THAT(r.err, ContainsSubstring("/nonexistent/schema.json"));

    auto bad_stat = toy_report_args();
    bad_stat.insert(bad_stat.end(), {"--statistic", "acc"});
    CliResult s = run(bad_stat);
    REQUIRE(s.code == 1);
    REQUIRE_THAT(s.err, ContainsSubstring("unknown statistic: acc"));

    auto bad_k = toy_report_args();
    bad_k.back() = "-1";
    CliResult k = run(bad_k);
    REQUIRE(k.code == 1);
    REQUIRE_THAT(k.err, ContainsSubstring("k must be nonnegative"));

    auto bad_item = toy_report_args();
    bad_item.insert(bad_item.end(), {"--item", "zz"});
    CliResult item = run(bad_item);
    REQUIRE(item.code == 1);
    REQUIRE_THAT(item.err, ContainsSubstring("unknown item id: zz"));

    CliResult flag = run({"report", "--bogus"});
    REQUIRE(flag.code != 0);
    REQUIRE_FALSE(flag.err.empty());
}

TEST_CASE("version flag prints the tool version", "[cli]") {
    CliResult r = run({"--version"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("0.1.0"));
}
