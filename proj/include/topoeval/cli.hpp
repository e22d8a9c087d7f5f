#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "topoeval/analysis.hpp"
#include "topoeval/data.hpp"
#include "topoeval/error.hpp"
#include "topoeval/manifest.hpp"
#include "topoeval/presheaf.hpp"
#include "topoeval/report.hpp"
#include "topoeval/topology.hpp"
#include "topoeval/version.hpp"

namespace topoeval {

struct RunConfig {
    std::string dataset_path;
    std::string schema_path;
    std::string predictions_path;
    GenerationConfig gen;
    std::string statistic = "accuracy";
    long long k = 20;
    std::size_t top_n = 3;
    std::size_t bottom_n = 3;
    std::vector<std::string> item_ids;
    std::vector<std::string> set_exprs;
    std::string format = "md";
    std::string out_path;
};

namespace detail {

struct LoadedInputs {
    SchemaDescriptor schema;
    std::shared_ptr<const Dataset> dataset;
    PredictionTable predictions;  // untouched for build
    std::vector<InputRecord> records;
};

inline LoadedInputs load_inputs(const RunConfig& cfg, bool need_predictions) {
    LoadedInputs in;
    in.records.push_back({"dataset", cfg.dataset_path, digest_file(cfg.dataset_path)});
    in.records.push_back({"schema", cfg.schema_path, digest_file(cfg.schema_path)});
    if (need_predictions)
        in.records.push_back(
            {"predictions", cfg.predictions_path, digest_file(cfg.predictions_path)});
    in.schema = load_schema(cfg.schema_path);
    in.dataset = std::make_shared<const Dataset>(load_dataset(in.schema, cfg.dataset_path));
    if (need_predictions) in.predictions = load_predictions(cfg.predictions_path);
    return in;
}

inline nlohmann::ordered_json gen_config_json(const GenerationConfig& g) {
    return {{"max_intersection_arity", g.max_intersection_arity},
            {"max_union_arity", g.max_union_arity},
            {"min_cardinality", g.min_cardinality},
            {"max_open_sets", g.max_open_sets},
            {"keep_empty_intersections", g.keep_empty_intersections}};
}

inline void emit_manifest(const RunManifest& m, const std::string& out_path,
                          std::ostream& err) {
    if (out_path.empty()) {
        write_manifest(m, err);
        return;
    }
    std::string path = out_path + ".manifest.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) fail("cannot write manifest file: " + path);
    write_manifest(m, f);
}

inline void write_text_output(const std::string& text, const std::string& out_path,
                              std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) fail("cannot write output file: " + out_path);
    f << text;
}

inline int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.out_path.empty()) fail("build requires --out for the topology artifact");
    StageTimer timer;
    LoadedInputs in = load_inputs(cfg, false);
    timer.lap("ingest");
    Subbasis sb = build_subbasis(*in.dataset);
    timer.lap("subbasis");
    Topology topo = generate_topology(sb, cfg.gen);
    timer.lap("topology");
    {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) fail("cannot write output file: " + cfg.out_path);
        write_topology_json(topo, *in.dataset, f);
    }
    timer.lap("write");

    RunManifest m;
    m.command = "build";
    m.inputs = in.records;
    m.config = gen_config_json(cfg.gen);
    m.config["out"] = cfg.out_path;
    m.open_set_count = topo.size();
    m.timings = std::move(timer.timings);
    emit_manifest(m, cfg.out_path, err);

    out << topo.size() << " open sets\n";
    return 0;
}

struct PipelineResult {
    LoadedInputs in;
    Topology topo;
    Assignment assign;
};

inline PipelineResult run_pipeline(const RunConfig& cfg, StageTimer& timer) {
    if (cfg.k < 0) fail("k must be nonnegative");
    StatKind stat = stat_kind_from_string(cfg.statistic);
    LoadedInputs in = load_inputs(cfg, true);
    EvaluationContext ctx = join_validate(in.dataset, in.predictions);
    timer.lap("ingest");
    Subbasis sb = build_subbasis(*in.dataset);
    timer.lap("subbasis");
    Topology topo = generate_topology(sb, cfg.gen);
    timer.lap("topology");
    Assignment assign = compute_assignment(topo, stat, ctx, cfg.predictions_path);
    timer.lap("assignment");
    return PipelineResult{std::move(in), std::move(topo), std::move(assign)};
}

inline nlohmann::ordered_json analysis_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json c = gen_config_json(cfg.gen);
    c["statistic"] = cfg.statistic;
    c["k"] = cfg.k;
    c["top"] = cfg.top_n;
    c["bottom"] = cfg.bottom_n;
    c["items"] = cfg.item_ids;
    c["sets"] = cfg.set_exprs;
    c["format"] = cfg.format;
    c["out"] = cfg.out_path;
    return c;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.format == "csv" && cfg.out_path.empty())
        fail("csv format writes a family of files and requires --out");
    StageTimer timer;
    PipelineResult p = run_pipeline(cfg, timer);
    ReportRequest req;
    req.top_n = cfg.top_n;
    req.bottom_n = cfg.bottom_n;
    req.k = static_cast<std::size_t>(cfg.k);
    req.item_ids = cfg.item_ids;
    req.set_exprs = cfg.set_exprs;
    AnalysisReport report = build_report(p.assign, p.topo, *p.in.dataset, req);
    timer.lap("analysis");

    if (cfg.format == "md") {
        std::ostringstream text;
        report_to_markdown(report, p.topo, text);
        write_text_output(text.str(), cfg.out_path, out);
    } else if (cfg.format == "json") {
        write_text_output(report_to_json(report, p.topo).dump(2) + "\n", cfg.out_path, out);
    } else {
        report_to_csv(report, p.topo, cfg.out_path);
    }
    timer.lap("render");

    RunManifest m;
    m.command = "report";
    m.inputs = p.in.records;
    m.config = analysis_config_json(cfg);
    m.open_set_count = p.topo.size();
    m.timings = std::move(timer.timings);
    emit_manifest(m, cfg.out_path, err);
    return 0;
}

inline int cmd_inspect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.format == "csv") fail("csv format is not supported for inspect; use md or json");
    StageTimer timer;
    PipelineResult p = run_pipeline(cfg, timer);
    std::vector<ItemSection> sections;
    for (const auto& id : cfg.item_ids)
        sections.push_back(
            build_item_section(p.assign, p.topo, *p.in.dataset, id, cfg.bottom_n, cfg.top_n));
    timer.lap("analysis");

    StatKind stat = p.assign.presheaf.statistic;
    if (cfg.format == "md") {
        std::ostringstream text;
        for (const auto& sec : sections) detail::md_item_section(text, stat, sec, p.topo);
        write_text_output(text.str(), cfg.out_path, out);
    } else {
        nlohmann::ordered_json doc;
        doc["statistic"] = to_string(stat);
        doc["items"] = nlohmann::ordered_json::array();
        for (const auto& sec : sections)
            doc["items"].push_back(detail::item_section_to_json(sec, p.topo));
        write_text_output(doc.dump(2) + "\n", cfg.out_path, out);
    }
    timer.lap("render");

    RunManifest m;
    m.command = "inspect";
    m.inputs = p.in.records;
    m.config = analysis_config_json(cfg);
    m.open_set_count = p.topo.size();
    m.timings = std::move(timer.timings);
    emit_manifest(m, cfg.out_path, err);
    return 0;
}

}  // namespace detail

/// Entry point behind main(). `args` excludes the program name; output and
/// error streams are injectable for tests.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Per-subpopulation model evaluation over a metadata-induced topology"};
    app.name(kToolName);
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    auto add_common = [&cfg](CLI::App* sub, bool with_predictions) {
        sub->add_option("--dataset", cfg.dataset_path, "Dataset file (CSV or JSON-lines)")
            ->required();
        sub->add_option("--schema", cfg.schema_path, "Schema sidecar JSON assigning column roles")
            ->required();
        if (with_predictions)
            sub->add_option("--predictions", cfg.predictions_path,
                            "Predictions CSV (item_id,predicted_label[,loss])")
                ->required();
        sub->add_option("--max-intersection-arity", cfg.gen.max_intersection_arity,
                        "Largest number of subbasis elements intersected")
            ->capture_default_str();
        sub->add_option("--max-union-arity", cfg.gen.max_union_arity,
                        "Largest number of subbasis elements unioned")
            ->capture_default_str();
        sub->add_option("--min-cardinality", cfg.gen.min_cardinality,
                        "Smallest open set materialized")
            ->capture_default_str();
        sub->add_option("--max-open-sets", cfg.gen.max_open_sets,
                        "Hard cap on materialized open sets")
            ->capture_default_str();
        sub->add_flag("--keep-empty-intersections", cfg.gen.keep_empty_intersections,
                      "Record empty intersections as provenance on the empty set");
        sub->add_option("--out", cfg.out_path, "Output path (stdout when omitted)");
    };
    auto add_analysis = [&cfg](CLI::App* sub) {
        sub->add_option("--statistic", cfg.statistic,
                        "accuracy, precision_macro, recall_macro, f1_macro, or mean_loss")
            ->capture_default_str();
        sub->add_option("--k", cfg.k, "Bound on removed items for local inconsistency")
            ->capture_default_str();
        sub->add_option("--top", cfg.top_n, "Rows in best-value rankings")
            ->capture_default_str();
        sub->add_option("--bottom", cfg.bottom_n, "Rows in worst-value rankings")
            ->capture_default_str();
        sub->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"json", "csv", "md"}))
            ->capture_default_str();
    };

    CLI::App* build = app.add_subcommand("build", "Generate the topology artifact");
    add_common(build, false);

    CLI::App* report = app.add_subcommand("report", "Evaluate a model across all open sets");
    add_common(report, true);
    add_analysis(report);
    report->add_option("--item", cfg.item_ids, "Item id to profile (repeatable)");
    report->add_option("--set", cfg.set_exprs,
                       "Open set to inspect for inconsistency, by expression text (repeatable)");

    CLI::App* inspect = app.add_subcommand("inspect", "Neighborhood profile of single items");
    add_common(inspect, true);
    add_analysis(inspect);
    inspect->add_option("--item", cfg.item_ids, "Item id to profile (repeatable)")
        ->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (build->parsed()) return detail::cmd_build(cfg, out, err);
        if (report->parsed()) return detail::cmd_report(cfg, out, err);
        return detail::cmd_inspect(cfg, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace topoeval
