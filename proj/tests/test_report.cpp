#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>

#include "support.hpp"
#include "topoeval/report.hpp"

using namespace topoeval;
using Catch::Matchers::ContainsSubstring;

static ReportRequest toy_request() {
    ReportRequest req;
    req.k = 2;
    req.item_ids = {"5"};
    return req;
}

TEST_CASE("report aggregates global value, counts, and rankings", "[report]") {
    auto t = testsupport::load_toy6();
    AnalysisReport r = build_report(t.accuracy, t.topology, *t.dataset, toy_request());

    REQUIRE(r.statistic == StatKind::accuracy);
    REQUIRE(r.source_tag == "toy6-preds");
    REQUIRE(r.n_items == 6);
    REQUIRE(r.n_open_sets == 11);
    REQUIRE(r.global_value == 4.0 / 6.0);
    REQUIRE(r.sets_at_one == 1);
    REQUIRE(r.sets_at_zero == 0);

    REQUIRE(r.top.size() == 3);
    REQUIRE(r.top[0].os_id == 6);
    REQUIRE(r.bottom[0].os_id == 5);

    REQUIRE(r.inconsistency.size() == 11);  // no targets requested, so every set
    REQUIRE(r.inconsistency[4].value == 0.25);
    REQUIRE(r.inconsistency[4].witness_v == 6);

    REQUIRE(r.items.size() == 1);
    REQUIRE(r.items[0].item_id == "5");
    REQUIRE(r.items[0].item_index == 4);
    REQUIRE(r.items[0].extrema.a_max == 0.75);
    REQUIRE(r.items[0].bottom.size() == 3);
    REQUIRE(r.items[0].bottom[0].os_id == 5);
    REQUIRE(r.items[0].top[0].os_id == 4);
}

TEST_CASE("inconsistency targets are addressed by expression text", "[report]") {
    auto t = testsupport::load_toy6();
    ReportRequest req;
    req.k = 2;
    req.set_exprs = {"attr:red", "label:A ∩ attr:red"};
    AnalysisReport r = build_report(t.accuracy, t.topology, *t.dataset, req);
    REQUIRE(r.inconsistency.size() == 2);
    REQUIRE(r.inconsistency[0].u == 4);
    REQUIRE(r.inconsistency[1].u == 6);

    req.set_exprs = {"attr:blue"};
    REQUIRE_THROWS_WITH(build_report(t.accuracy, t.topology, *t.dataset, req),
                        ContainsSubstring("unknown open set: \"attr:blue\"") &&
                            ContainsSubstring("label:A"));
}

TEST_CASE("unknown item ids name a few valid ones", "[report]") {
    auto t = testsupport::load_toy6();
    ReportRequest req;
    req.item_ids = {"zz"};
    REQUIRE_THROWS_WITH(build_report(t.accuracy, t.topology, *t.dataset, req),
                        ContainsSubstring("unknown item id: zz") &&
                            ContainsSubstring("1, 2, 3, 4, 5, ..."));
}

TEST_CASE("markdown rendering shape", "[report]") {
    auto t = testsupport::load_toy6();
    AnalysisReport r = build_report(t.accuracy, t.topology, *t.dataset, toy_request());
    std::ostringstream out;
    report_to_markdown(r, t.topology, out);
    std::string md = out.str();

    REQUIRE(md.rfind("# Accuracy report\n", 0) == 0);
    REQUIRE(md.find("- Predictions: toy6-preds\n") != std::string::npos);
    REQUIRE(md.find("- Global value (X): 66.67\n") != std::string::npos);
    REQUIRE(md.find("- Open sets at exactly 1.000: 1\n") != std::string::npos);
    REQUIRE(md.find("- Open sets at exactly 0.000: 0\n") != std::string::npos);

    REQUIRE(md.find("## Top 3 open sets\n\n| Open set | Accuracy |\n| --- | --- |\n"
                    "| label:A ∩ attr:red | 100.00 |\n") != std::string::npos);
    REQUIRE(md.find("## Bottom 3 open sets\n\n| Open set | Accuracy |\n| --- | --- |\n"
                    "| attr:big | 50.00 |\n") != std::string::npos);

    REQUIRE(md.find("## Local inconsistency (k = 2)\n\n"
                    "| Open set | Incon | Witness | Candidates |\n") != std::string::npos);
    REQUIRE(md.find("| attr:red | 0.250 | label:A ∩ attr:red | 4 |\n") != std::string::npos);
    REQUIRE(md.find("| X | 0.167 | attr:big | 3 |\n") != std::string::npos);

    REQUIRE(md.find("## Item 5\n\n- Neighborhoods: 7\n"
                    "- a_min: 50.00 (attr:big)\n"
                    "- a_max: 75.00 (attr:red)\n") != std::string::npos);
    REQUIRE(md.find("### Lowest values\n") != std::string::npos);
    REQUIRE(md.find("### Highest values\n") != std::string::npos);
}

TEST_CASE("markdown renders mean loss as a raw value", "[report]") {
    auto t = testsupport::load_toy6();
    Assignment loss = compute_assignment(t.topology, StatKind::mean_loss, t.ctx, "toy6-preds");
    ReportRequest req;
    req.k = 0;
    AnalysisReport r = build_report(loss, t.topology, *t.dataset, req);
    std::ostringstream out;
    report_to_markdown(r, t.topology, out);
    std::string md = out.str();
    REQUIRE(md.rfind("# Mean loss report\n", 0) == 0);
    REQUIRE(md.find("- Global value (X): 0.5417\n") != std::string::npos);
    REQUIRE(md.find("| Open set | Mean loss |\n") != std::string::npos);
}

TEST_CASE("a perfect prediction table saturates the one counters", "[report]") {
    auto t = testsupport::load_toy6();
    PredictionTable perfect;
    perfect.source_tag = "perfect";
    for (const auto& item : t.dataset->items) {
        perfect.id_index.emplace(item.id, perfect.entries.size());
        perfect.entries.emplace_back(
            item.id, PredictionEntry{t.dataset->label_space.name(item.true_label), 0.0});
    }
    EvaluationContext ctx = join_validate(t.dataset, perfect);
    Assignment a = compute_assignment(t.topology, StatKind::accuracy, ctx, "perfect");
    AnalysisReport r = build_report(a, t.topology, *t.dataset, ReportRequest{});
    REQUIRE(r.global_value == 1.0);
    REQUIRE(r.sets_at_one == 10);
    REQUIRE(r.sets_at_zero == 0);
}

TEST_CASE("JSON rendering rounds values to six decimals", "[report]") {
    auto t = testsupport::load_toy6();
    AnalysisReport r = build_report(t.accuracy, t.topology, *t.dataset, toy_request());
    nlohmann::ordered_json doc = report_to_json(r, t.topology);

    REQUIRE(doc["statistic"] == "accuracy");
    REQUIRE(doc["global_value"] == 0.666667);
    REQUIRE(doc["n_open_sets"] == 11);
    REQUIRE(doc["top"][0]["expr"] == "label:A ∩ attr:red");
    REQUIRE(doc["top"][0]["value"] == 1.0);
    REQUIRE(doc["inconsistency"]["k"] == 2);
    REQUIRE(doc["inconsistency"]["results"].size() == 11);
    REQUIRE(doc["inconsistency"]["results"][4]["value"] == 0.25);
    REQUIRE(doc["inconsistency"]["results"][4]["witness_os_id"] == 6);
    REQUIRE(doc["inconsistency"]["results"][1]["value"] == 0.166667);
    REQUIRE(doc["items"][0]["item_id"] == "5");
    REQUIRE(doc["items"][0]["a_max"] == 0.75);
    REQUIRE(doc["items"][0]["argmax"]["expr"] == "attr:red");
}

TEST_CASE("CSV rendering writes the full file family", "[report]") {
    auto t = testsupport::load_toy6();
    AnalysisReport r = build_report(t.accuracy, t.topology, *t.dataset, toy_request());
    std::string stem = testsupport::fresh_tmp_dir("reportcsv") + "/toy";
    std::vector<std::string> written = report_to_csv(r, t.topology, stem);

    REQUIRE(written == std::vector<std::string>{
                           stem + ".summary.csv", stem + ".ranked.csv",
                           stem + ".inconsistency.csv", stem + ".items.csv",
                           stem + ".neighborhoods.csv"});
    for (const auto& path : written) REQUIRE(std::filesystem::exists(path));

    std::string summary = testsupport::read_file(stem + ".summary.csv");
    REQUIRE(summary.rfind("key,value\n", 0) == 0);
    REQUIRE(summary.find("global_value,0.666667\n") != std::string::npos);
    REQUIRE(summary.find("sets_at_one,1\n") != std::string::npos);

    std::string ranked = testsupport::read_file(stem + ".ranked.csv");
    REQUIRE(ranked.rfind("direction,rank,os_id,expr,cardinality,value\n", 0) == 0);
    REQUIRE(ranked.find("top,1,6,label:A ∩ attr:red,2,1.000000\n") != std::string::npos);
    REQUIRE(ranked.find("bottom,1,5,attr:big,4,0.500000\n") != std::string::npos);

    std::string incon = testsupport::read_file(stem + ".inconsistency.csv");
    REQUIRE(incon.find("4,attr:red,2,0.250000,6,label:A ∩ attr:red,4\n") != std::string::npos);

    std::string items = testsupport::read_file(stem + ".items.csv");
    REQUIRE(items.find("5,4,7,0.500000,5,attr:big,0.750000,4,attr:red\n") != std::string::npos);

    std::string hoods = testsupport::read_file(stem + ".neighborhoods.csv");
    REQUIRE(hoods.find("5,bottom,1,5,attr:big,4,0.500000\n") != std::string::npos);
    REQUIRE(hoods.find("5,top,1,4,attr:red,4,0.750000\n") != std::string::npos);
}
