#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "topoeval/analysis.hpp"
#include "topoeval/data.hpp"
#include "topoeval/error.hpp"
#include "topoeval/format.hpp"
#include "topoeval/presheaf.hpp"
#include "topoeval/topology.hpp"

namespace topoeval {

struct ReportRequest {
    std::size_t top_n = 3;
    std::size_t bottom_n = 3;
    std::size_t k = 20;
    std::vector<std::string> item_ids;    // neighborhood sections, in request order
    std::vector<std::string> set_exprs;   // inconsistency targets; empty means all sets
};

struct ItemSection {
    std::string item_id;
    std::size_t item_index = 0;
    NeighborhoodExtrema extrema;
    std::vector<RankedSlice> bottom;
    std::vector<RankedSlice> top;
};

struct AnalysisReport {
    StatKind statistic = StatKind::accuracy;
    std::string source_tag;
    std::size_t n_items = 0;
    std::size_t n_open_sets = 0;
    double global_value = 0.0;    // value on FULL
    std::size_t sets_at_one = 0;  // nonempty sets valued exactly 1.0
    std::size_t sets_at_zero = 0; // nonempty sets valued exactly 0.0
    std::vector<RankedSlice> top;
    std::vector<RankedSlice> bottom;
    std::size_t k = 0;
    std::vector<InconsistencyResult> inconsistency;
    std::vector<ItemSection> items;
};

namespace detail {

inline std::string id_hint(const Dataset& d) {
    std::string hint;
    for (std::size_t i = 0; i < d.size() && i < 5; ++i) {
        if (i) hint += ", ";
        hint += d.items[i].id;
    }
    if (d.size() > 5) hint += ", ...";
    return hint;
}

}  // namespace detail

/// Extrema plus worst/best neighborhood rankings for one item, addressed
/// by its id.
inline ItemSection build_item_section(const Assignment& a, const Topology& t, const Dataset& d,
                                      const std::string& item_id, std::size_t bottom_n,
                                      std::size_t top_n) {
    auto it = d.id_index.find(item_id);
    if (it == d.id_index.end())
        fail("unknown item id: " + item_id + " (valid ids include: " + detail::id_hint(d) + ")");
    ItemSection sec;
    sec.item_id = item_id;
    sec.item_index = it->second;
    sec.extrema = neighborhood_extrema(a, t, it->second);
    RankFilter contains = [idx = it->second](const OpenSet& s) { return s.members.test(idx); };
    sec.bottom = rank_open_sets(a, t, RankDirection::bottom, bottom_n, contains);
    sec.top = rank_open_sets(a, t, RankDirection::top, top_n, contains);
    return sec;
}

inline AnalysisReport build_report(const Assignment& a, const Topology& t, const Dataset& d,
                                   const ReportRequest& req) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    if (t.n_items() != d.size()) fail("topology and dataset item counts differ");
    AnalysisReport r;
    r.statistic = a.presheaf.statistic;
    r.source_tag = a.source_tag;
    r.n_items = d.size();
    r.n_open_sets = t.size();
    r.global_value = a.value(Topology::kFullId);
    for (const OpenSet& s : t.open_sets()) {
        if (s.cardinality == 0) continue;
        if (a.values[s.os_id] == 1.0) ++r.sets_at_one;
        if (a.values[s.os_id] == 0.0) ++r.sets_at_zero;
    }
    r.top = rank_open_sets(a, t, RankDirection::top, req.top_n);
    r.bottom = rank_open_sets(a, t, RankDirection::bottom, req.bottom_n);
    r.k = req.k;

    if (req.set_exprs.empty()) {
        for (const OpenSet& s : t.open_sets())
            r.inconsistency.push_back(local_inconsistency(a, t, s.os_id, req.k));
    } else {
        for (const auto& text : req.set_exprs) {
            auto os_id = t.find_by_expr_text(text);
            if (!os_id)
                fail("unknown open set: \"" + text +
                     "\" (sets are addressed by expression text, e.g. \"" +
                     t.expr_text(std::min<std::size_t>(2, t.size() - 1)) + "\")");
            r.inconsistency.push_back(local_inconsistency(a, t, *os_id, req.k));
        }
    }

    for (const auto& id : req.item_ids)
        r.items.push_back(build_item_section(a, t, d, id, req.bottom_n, req.top_n));
    return r;
}

inline const char* display_name(StatKind s) {
    switch (s) {
        case StatKind::accuracy: return "Accuracy";
        case StatKind::precision_macro: return "Macro precision";
        case StatKind::recall_macro: return "Macro recall";
        case StatKind::f1_macro: return "Macro F1";
        default: return "Mean loss";
    }
}

namespace detail {

/// Rate statistics print as percent with 2 decimals (66.67); losses as raw
/// values with 4 decimals.
inline std::string render_stat(StatKind s, double v) {
    if (is_rate_statistic(s)) return format_fixed(v * 100.0, 2);
    return format_fixed(v, 4);
}

inline std::string md_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '|') out += "\\|";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out;
}

inline void md_slice_table(std::ostream& out, StatKind stat,
                           const std::vector<RankedSlice>& slices) {
    out << "| Open set | " << display_name(stat) << " |\n";
    out << "| --- | --- |\n";
    for (const auto& s : slices)
        out << "| " << md_escape(s.expr) << " | " << render_stat(stat, s.value) << " |\n";
    out << "\n";
}

inline void md_item_section(std::ostream& out, StatKind stat, const ItemSection& sec,
                            const Topology& t) {
    out << "## Item " << md_escape(sec.item_id) << "\n\n";
    out << "- Neighborhoods: " << sec.extrema.neighborhood_count << "\n";
    out << "- a_min: " << render_stat(stat, sec.extrema.a_min) << " ("
        << md_escape(t.expr_text(sec.extrema.argmin)) << ")\n";
    out << "- a_max: " << render_stat(stat, sec.extrema.a_max) << " ("
        << md_escape(t.expr_text(sec.extrema.argmax)) << ")\n\n";
    out << "### Lowest values\n\n";
    md_slice_table(out, stat, sec.bottom);
    out << "### Highest values\n\n";
    md_slice_table(out, stat, sec.top);
}

}  // namespace detail

inline void report_to_markdown(const AnalysisReport& r, const Topology& t, std::ostream& out) {
    out << "# " << display_name(r.statistic) << " report\n\n";
    out << "- Statistic: " << to_string(r.statistic) << "\n";
    if (!r.source_tag.empty()) out << "- Predictions: " << detail::md_escape(r.source_tag) << "\n";
    out << "- Items: " << r.n_items << "\n";
    out << "- Open sets: " << r.n_open_sets << "\n";
    out << "- Global value (X): " << detail::render_stat(r.statistic, r.global_value) << "\n";
    out << "- Open sets at exactly 1.000: " << r.sets_at_one << "\n";
    out << "- Open sets at exactly 0.000: " << r.sets_at_zero << "\n\n";

    out << "## Top " << r.top.size() << " open sets\n\n";
    detail::md_slice_table(out, r.statistic, r.top);
    out << "## Bottom " << r.bottom.size() << " open sets\n\n";
    detail::md_slice_table(out, r.statistic, r.bottom);

    if (!r.inconsistency.empty()) {
        out << "## Local inconsistency (k = " << r.k << ")\n\n";
        out << "| Open set | Incon | Witness | Candidates |\n";
        out << "| --- | --- | --- | --- |\n";
        for (const auto& ic : r.inconsistency)
            out << "| " << detail::md_escape(t.expr_text(ic.u)) << " | "
                << format_fixed(ic.value, 3) << " | "
                << detail::md_escape(t.expr_text(ic.witness_v)) << " | "
                << ic.candidates_examined << " |\n";
        out << "\n";
    }

    for (const auto& sec : r.items) detail::md_item_section(out, r.statistic, sec, t);
}

namespace detail {

inline nlohmann::ordered_json slice_to_json(const RankedSlice& s) {
    nlohmann::ordered_json j;
    j["rank"] = s.rank;
    j["os_id"] = s.os_id;
    j["expr"] = s.expr;
    j["cardinality"] = s.cardinality;
    j["value"] = round_to(s.value, 6);
    return j;
}

inline nlohmann::ordered_json item_section_to_json(const ItemSection& sec, const Topology& t) {
    nlohmann::ordered_json j;
    j["item_id"] = sec.item_id;
    j["item_index"] = sec.item_index;
    j["neighborhood_count"] = sec.extrema.neighborhood_count;
    j["a_min"] = round_to(sec.extrema.a_min, 6);
    j["argmin"] = {{"os_id", sec.extrema.argmin}, {"expr", t.expr_text(sec.extrema.argmin)}};
    j["a_max"] = round_to(sec.extrema.a_max, 6);
    j["argmax"] = {{"os_id", sec.extrema.argmax}, {"expr", t.expr_text(sec.extrema.argmax)}};
    j["bottom"] = nlohmann::ordered_json::array();
    for (const auto& s : sec.bottom) j["bottom"].push_back(slice_to_json(s));
    j["top"] = nlohmann::ordered_json::array();
    for (const auto& s : sec.top) j["top"].push_back(slice_to_json(s));
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const AnalysisReport& r, const Topology& t) {
    nlohmann::ordered_json doc;
    doc["statistic"] = to_string(r.statistic);
    doc["source_tag"] = r.source_tag;
    doc["n_items"] = r.n_items;
    doc["n_open_sets"] = r.n_open_sets;
    doc["global_value"] = round_to(r.global_value, 6);
    doc["sets_at_one"] = r.sets_at_one;
    doc["sets_at_zero"] = r.sets_at_zero;
    doc["top"] = nlohmann::ordered_json::array();
    for (const auto& s : r.top) doc["top"].push_back(detail::slice_to_json(s));
    doc["bottom"] = nlohmann::ordered_json::array();
    for (const auto& s : r.bottom) doc["bottom"].push_back(detail::slice_to_json(s));
    doc["inconsistency"] = {{"k", r.k}, {"results", nlohmann::ordered_json::array()}};
    for (const auto& ic : r.inconsistency) {
        nlohmann::ordered_json j;
        j["os_id"] = ic.u;
        j["expr"] = t.expr_text(ic.u);
        j["value"] = round_to(ic.value, 6);
        j["witness_os_id"] = ic.witness_v;
        j["witness_expr"] = t.expr_text(ic.witness_v);
        j["candidates_examined"] = ic.candidates_examined;
        doc["inconsistency"]["results"].push_back(std::move(j));
    }
    doc["items"] = nlohmann::ordered_json::array();
    for (const auto& sec : r.items) doc["items"].push_back(detail::item_section_to_json(sec, t));
    return doc;
}

/// Writes the CSV rendering as a family of files sharing a stem:
/// <stem>.summary.csv, .ranked.csv, .inconsistency.csv, .items.csv,
/// .neighborhoods.csv. Returns the paths written.
inline std::vector<std::string> report_to_csv(const AnalysisReport& r, const Topology& t,
                                              const std::string& stem) {
    std::vector<std::string> written;
    auto open = [&written](const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) fail("cannot write output file: " + path);
        written.push_back(path);
        return out;
    };

    {
        auto out = open(stem + ".summary.csv");
        csv::write_row(out, {"key", "value"});
        csv::write_row(out, {"statistic", to_string(r.statistic)});
        csv::write_row(out, {"source_tag", r.source_tag});
        csv::write_row(out, {"n_items", std::to_string(r.n_items)});
        csv::write_row(out, {"n_open_sets", std::to_string(r.n_open_sets)});
        csv::write_row(out, {"global_value", format_fixed(r.global_value, 6)});
        csv::write_row(out, {"sets_at_one", std::to_string(r.sets_at_one)});
        csv::write_row(out, {"sets_at_zero", std::to_string(r.sets_at_zero)});
        csv::write_row(out, {"k", std::to_string(r.k)});
    }
    {
        auto out = open(stem + ".ranked.csv");
        csv::write_row(out, {"direction", "rank", "os_id", "expr", "cardinality", "value"});
        for (const auto& s : r.top)
            csv::write_row(out, {"top", std::to_string(s.rank), std::to_string(s.os_id), s.expr,
                                 std::to_string(s.cardinality), format_fixed(s.value, 6)});
        for (const auto& s : r.bottom)
            csv::write_row(out, {"bottom", std::to_string(s.rank), std::to_string(s.os_id),
                                 s.expr, std::to_string(s.cardinality), format_fixed(s.value, 6)});
    }
    {
        auto out = open(stem + ".inconsistency.csv");
        csv::write_row(out, {"os_id", "expr", "k", "value", "witness_os_id", "witness_expr",
                             "candidates_examined"});
        for (const auto& ic : r.inconsistency)
            csv::write_row(out, {std::to_string(ic.u), t.expr_text(ic.u), std::to_string(ic.k),
                                 format_fixed(ic.value, 6), std::to_string(ic.witness_v),
                                 t.expr_text(ic.witness_v),
                                 std::to_string(ic.candidates_examined)});
    }
    {
        auto out = open(stem + ".items.csv");
        csv::write_row(out, {"item_id", "item_index", "neighborhood_count", "a_min",
                             "argmin_os_id", "argmin_expr", "a_max", "argmax_os_id",
                             "argmax_expr"});
        for (const auto& sec : r.items)
            csv::write_row(out,
                           {sec.item_id, std::to_string(sec.item_index),
                            std::to_string(sec.extrema.neighborhood_count),
                            format_fixed(sec.extrema.a_min, 6),
                            std::to_string(sec.extrema.argmin), t.expr_text(sec.extrema.argmin),
                            format_fixed(sec.extrema.a_max, 6),
                            std::to_string(sec.extrema.argmax), t.expr_text(sec.extrema.argmax)});
    }
    {
        auto out = open(stem + ".neighborhoods.csv");
        csv::write_row(out,
                       {"item_id", "direction", "rank", "os_id", "expr", "cardinality", "value"});
        for (const auto& sec : r.items) {
            for (const auto& s : sec.bottom)
                csv::write_row(out, {sec.item_id, "bottom", std::to_string(s.rank),
                                     std::to_string(s.os_id), s.expr,
                                     std::to_string(s.cardinality), format_fixed(s.value, 6)});
            for (const auto& s : sec.top)
                csv::write_row(out, {sec.item_id, "top", std::to_string(s.rank),
                                     std::to_string(s.os_id), s.expr,
                                     std::to_string(s.cardinality), format_fixed(s.value, 6)});
        }
    }
    return written;
}

}  // namespace topoeval
