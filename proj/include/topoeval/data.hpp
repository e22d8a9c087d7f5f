#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topoeval/bitset.hpp"
#include "topoeval/csv.hpp"
#include "topoeval/error.hpp"
#include "topoeval/format.hpp"

namespace topoeval {

/// Ternary attribute state. Only `present` grants membership in an
/// attribute's subbasis element; `absent` and `missing` both exclude, but
/// the distinction survives for diagnostics.
enum class AttributeValue { absent, present, missing };

inline const char* to_string(AttributeValue v) {
    switch (v) {
        case AttributeValue::absent: return "absent";
        case AttributeValue::present: return "present";
        default: return "missing";
    }
}

class LabelSpace {
public:
    /// Returns the index of `name`, interning it on first sight.
    std::size_t intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        std::size_t idx = names_.size();
        names_.push_back(name);
        index_.emplace(name, idx);
        return idx;
    }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(std::size_t idx) const { return names_[idx]; }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Item {
    std::string id;
    std::size_t true_label = 0;
    std::vector<AttributeValue> attributes;       // parallel to attribute_names
    std::vector<std::optional<double>> scalars;   // parallel to scalar_names
};

struct Dataset {
    std::vector<Item> items;  // row order; item index is canonical everywhere
    LabelSpace label_space;
    std::vector<std::string> attribute_names;
    std::vector<std::string> scalar_names;
    std::unordered_map<std::string, std::size_t> id_index;

    std::size_t size() const { return items.size(); }

    std::size_t attribute_index(const std::string& name) const {
        for (std::size_t i = 0; i < attribute_names.size(); ++i)
            if (attribute_names[i] == name) return i;
        fail("unknown attribute: " + name);
    }

    std::size_t scalar_index(const std::string& name) const {
        for (std::size_t i = 0; i < scalar_names.size(); ++i)
            if (scalar_names[i] == name) return i;
        fail("unknown scalar: " + name);
    }

    /// Assembles a dataset directly, for tests and programmatic use.
    /// `rows` supplies (id, label, attribute values, scalar values).
    static Dataset make(std::vector<std::string> attribute_names,
                        std::vector<std::string> scalar_names,
                        const std::vector<std::tuple<std::string, std::string,
                                                     std::vector<AttributeValue>,
                                                     std::vector<std::optional<double>>>>& rows) {
        Dataset d;
        d.attribute_names = std::move(attribute_names);
        d.scalar_names = std::move(scalar_names);
        for (const auto& [id, label, attrs, scalars] : rows) {
            if (id.empty()) fail("empty item id");
            if (attrs.size() != d.attribute_names.size())
                fail("attribute count mismatch for item " + id);
            if (scalars.size() != d.scalar_names.size())
                fail("scalar count mismatch for item " + id);
            if (!d.id_index.emplace(id, d.items.size()).second)
                fail("duplicate item id: " + id);
            Item item;
            item.id = id;
            item.true_label = d.label_space.intern(label);
            item.attributes = attrs;
            item.scalars = scalars;
            d.items.push_back(std::move(item));
        }
        if (d.items.empty()) fail("dataset has no items");
        return d;
    }
};

/// Column-role assignment for a tabular dataset file.
struct SchemaDescriptor {
    std::string id_column;
    std::string label_column;
    std::vector<std::string> attribute_columns;
    std::vector<std::string> scalar_columns;
    std::string missing_sentinel;  // empty string by default
};

inline SchemaDescriptor parse_schema(std::istream& in, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(source + ": invalid schema JSON: " + e.what());
    }
    if (!j.is_object()) fail(source + ": schema must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "id" && key != "label" && key != "attributes" && key != "scalars" &&
            key != "missing_sentinel")
            fail(source + ": unknown schema key \"" + key + "\"");
    }
    SchemaDescriptor s;
    if (!j.contains("id") || !j["id"].is_string())
        fail(source + ": schema requires a string \"id\" column");
    if (!j.contains("label") || !j["label"].is_string())
        fail(source + ": schema requires a string \"label\" column");
    s.id_column = j["id"].get<std::string>();
    s.label_column = j["label"].get<std::string>();
    auto read_list = [&](const char* key, std::vector<std::string>& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_array()) fail(source + ": schema \"" + key + "\" must be an array");
        for (const auto& v : j[key]) {
            if (!v.is_string()) fail(source + ": schema \"" + key + "\" entries must be strings");
            out.push_back(v.get<std::string>());
        }
    };
    read_list("attributes", s.attribute_columns);
    read_list("scalars", s.scalar_columns);
    if (j.contains("missing_sentinel")) {
        if (!j["missing_sentinel"].is_string())
            fail(source + ": schema \"missing_sentinel\" must be a string");
        s.missing_sentinel = j["missing_sentinel"].get<std::string>();
    }
    if (s.id_column == s.label_column)
        fail(source + ": column used twice in schema: " + s.id_column);
    std::unordered_set<std::string> seen{s.id_column, s.label_column};
    for (const auto& c : s.attribute_columns)
        if (!seen.insert(c).second) fail(source + ": column used twice in schema: " + c);
    for (const auto& c : s.scalar_columns)
        if (!seen.insert(c).second) fail(source + ": column used twice in schema: " + c);
    return s;
}

inline SchemaDescriptor load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open schema file: " + path);
    return parse_schema(in, path);
}

namespace detail {

inline AttributeValue parse_attribute_cell(const std::string& cell,
                                           const std::string& sentinel,
                                           const std::string& source, std::size_t line,
                                           const std::string& column) {
    if (cell == sentinel || cell.empty()) return AttributeValue::missing;
    if (cell == "1") return AttributeValue::present;
    if (cell == "0") return AttributeValue::absent;
    fail_at(source, line,
            "attribute column \"" + column + "\" must be 0, 1, or the missing sentinel, got \"" +
                cell + "\"");
}

inline std::optional<double> parse_scalar_cell(const std::string& cell,
                                               const std::string& sentinel,
                                               const std::string& source, std::size_t line,
                                               const std::string& column) {
    if (cell == sentinel || cell.empty()) return std::nullopt;
    double v = 0;
    if (!parse_double(cell, v))
        fail_at(source, line, "scalar column \"" + column + "\" is not numeric: \"" + cell + "\"");
    return v;
}

struct RawRecord {
    std::size_t line = 0;
    std::string id;
    std::string label;
    std::vector<std::string> attribute_cells;
    std::vector<std::string> scalar_cells;
};

inline std::vector<RawRecord> read_csv_records(const SchemaDescriptor& schema,
                                               std::istream& in, const std::string& source) {
    auto rows = csv::parse(in, source);
    if (rows.empty()) fail(source + ": no header row");
    const auto& header = rows.front().fields;
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);
    auto col_of = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) fail(source + ": header has no column \"" + name + "\"");
        return it->second;
    };
    std::size_t id_col = col_of(schema.id_column);
    std::size_t label_col = col_of(schema.label_column);
    std::vector<std::size_t> attr_cols, scalar_cols;
    for (const auto& name : schema.attribute_columns) attr_cols.push_back(col_of(name));
    for (const auto& name : schema.scalar_columns) scalar_cols.push_back(col_of(name));

    std::vector<RawRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            fail_at(source, row.line,
                    "expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.fields.size()));
        RawRecord rec;
        rec.line = row.line;
        rec.id = row.fields[id_col];
        rec.label = row.fields[label_col];
        for (std::size_t c : attr_cols) rec.attribute_cells.push_back(row.fields[c]);
        for (std::size_t c : scalar_cols) rec.scalar_cells.push_back(row.fields[c]);
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<RawRecord> read_jsonl_records(const SchemaDescriptor& schema,
                                                 std::istream& in, const std::string& source) {
    std::vector<RawRecord> records;
    std::string line_text;
    std::size_t line_no = 0;
    auto cell_of = [&](const nlohmann::json& obj, const std::string& key,
                       std::size_t line) -> std::string {
        if (!obj.contains(key)) return "";
        const auto& v = obj[key];
        if (v.is_null()) return "";
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return format_shortest(v.get<double>());
        if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
        fail_at(source, line, "field \"" + key + "\" has unsupported JSON type");
    };
    while (std::getline(in, line_text)) {
        ++line_no;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        if (line_text.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line_text);
        } catch (const nlohmann::json::exception& e) {
            fail_at(source, line_no, std::string("invalid JSON record: ") + e.what());
        }
        if (!obj.is_object()) fail_at(source, line_no, "JSON record must be an object");
        RawRecord rec;
        rec.line = line_no;
        rec.id = cell_of(obj, schema.id_column, line_no);
        rec.label = cell_of(obj, schema.label_column, line_no);
        for (const auto& name : schema.attribute_columns)
            rec.attribute_cells.push_back(cell_of(obj, name, line_no));
        for (const auto& name : schema.scalar_columns)
            rec.scalar_cells.push_back(cell_of(obj, name, line_no));
        records.push_back(std::move(rec));
    }
    return records;
}

inline bool looks_like_jsonl(const std::string& path) {
    auto ends_with = [&](const char* suffix) {
        std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    return ends_with(".jsonl") || ends_with(".ndjson") || ends_with(".json");
}

}  // namespace detail

/// Ingests a tabular dataset. `source` labels error messages and, when it
/// ends in .jsonl/.ndjson/.json, switches the reader to JSON-lines mode.
inline Dataset parse_dataset(const SchemaDescriptor& schema, std::istream& in,
                             const std::string& source) {
    std::vector<detail::RawRecord> records =
        detail::looks_like_jsonl(source) ? detail::read_jsonl_records(schema, in, source)
                                         : detail::read_csv_records(schema, in, source);
    Dataset d;
    d.attribute_names = schema.attribute_columns;
    d.scalar_names = schema.scalar_columns;
    for (const auto& rec : records) {
        if (rec.id.empty()) fail_at(source, rec.line, "empty item id");
        if (rec.label.empty()) fail_at(source, rec.line, "empty label for item " + rec.id);
        if (!d.id_index.emplace(rec.id, d.items.size()).second)
            fail_at(source, rec.line, "duplicate item id: " + rec.id);
        Item item;
        item.id = rec.id;
        item.true_label = d.label_space.intern(rec.label);
        item.attributes.reserve(rec.attribute_cells.size());
        for (std::size_t a = 0; a < rec.attribute_cells.size(); ++a)
            item.attributes.push_back(detail::parse_attribute_cell(
                rec.attribute_cells[a], schema.missing_sentinel, source, rec.line,
                schema.attribute_columns[a]));
        item.scalars.reserve(rec.scalar_cells.size());
        for (std::size_t s = 0; s < rec.scalar_cells.size(); ++s)
            item.scalars.push_back(detail::parse_scalar_cell(
                rec.scalar_cells[s], schema.missing_sentinel, source, rec.line,
                schema.scalar_columns[s]));
        d.items.push_back(std::move(item));
    }
    if (d.items.empty()) fail(source + ": dataset has no items");
    return d;
}

inline Dataset load_dataset(const SchemaDescriptor& schema, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open dataset file: " + path);
    return parse_dataset(schema, in, path);
}

/// Serializes a dataset back to CSV under the same schema; parsing the
/// output reproduces the dataset field-for-field.
inline void write_dataset_csv(const Dataset& d, const SchemaDescriptor& schema,
                              std::ostream& out) {
    std::vector<std::string> header{schema.id_column, schema.label_column};
    for (const auto& a : d.attribute_names) header.push_back(a);
    for (const auto& s : d.scalar_names) header.push_back(s);
    csv::write_row(out, header);
    for (const auto& item : d.items) {
        std::vector<std::string> row{item.id, d.label_space.name(item.true_label)};
        for (AttributeValue v : item.attributes) {
            switch (v) {
                case AttributeValue::present: row.push_back("1"); break;
                case AttributeValue::absent: row.push_back("0"); break;
                default: row.push_back(schema.missing_sentinel); break;
            }
        }
        for (const auto& s : item.scalars)
            row.push_back(s ? format_shortest(*s) : schema.missing_sentinel);
        csv::write_row(out, row);
    }
}

struct PredictionEntry {
    std::string predicted_label;
    std::optional<double> loss;
};

struct PredictionTable {
    std::vector<std::pair<std::string, PredictionEntry>> entries;  // file order
    std::unordered_map<std::string, std::size_t> id_index;
    std::string source_tag;
};

/// Reads a predictions CSV with header item_id,predicted_label[,loss].
inline PredictionTable parse_predictions(std::istream& in, const std::string& source) {
    auto rows = csv::parse(in, source);
    if (rows.empty()) fail(source + ": no header row");
    const auto& header = rows.front().fields;
    if (header.size() < 2 || header[0] != "item_id" || header[1] != "predicted_label")
        fail(source + ": header must be item_id,predicted_label[,loss]");
    bool has_loss_col = header.size() >= 3 && header[2] == "loss";
    if (header.size() > 2 && !has_loss_col)
        fail(source + ": header must be item_id,predicted_label[,loss]");
    if (header.size() > 3) fail(source + ": header must be item_id,predicted_label[,loss]");

    PredictionTable table;
    table.source_tag = source;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            fail_at(source, row.line,
                    "expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.fields.size()));
        const std::string& id = row.fields[0];
        if (id.empty()) fail_at(source, row.line, "empty item id");
        PredictionEntry entry;
        entry.predicted_label = row.fields[1];
        if (has_loss_col && !row.fields[2].empty()) {
            double v = 0;
            if (!parse_double(row.fields[2], v))
                fail_at(source, row.line, "loss is not numeric: \"" + row.fields[2] + "\"");
            if (!(v >= 0.0) || !std::isfinite(v))
                fail_at(source, row.line, "loss must be finite and nonnegative, got " + row.fields[2]);
            entry.loss = v;
        }
        if (!table.id_index.emplace(id, table.entries.size()).second)
            fail_at(source, row.line, "duplicate prediction for item " + id);
        table.entries.emplace_back(id, std::move(entry));
    }
    return table;
}

inline PredictionTable load_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open predictions file: " + path);
    return parse_predictions(in, path);
}

/// Immutable join of a dataset with one model's predictions. Per-item
/// correctness plus per-label membership masks, ready for set algebra.
struct EvaluationContext {
    std::shared_ptr<const Dataset> dataset;
    std::vector<std::size_t> predicted_label;  // index into dataset->label_space
    std::vector<std::optional<double>> loss;
    DenseBitset correct;
    DenseBitset has_loss;
    std::vector<DenseBitset> true_by_label;   // per label: items truly labeled l
    std::vector<DenseBitset> pred_by_label;   // per label: items predicted l

    std::size_t size() const { return dataset->size(); }
};

inline EvaluationContext join_validate(std::shared_ptr<const Dataset> dataset,
                                       const PredictionTable& preds) {
    const Dataset& d = *dataset;
    std::size_t n = d.size();
    for (const auto& [id, entry] : preds.entries) {
        if (!d.id_index.count(id)) fail("prediction for unknown item: " + id);
    }
    EvaluationContext ctx;
    ctx.dataset = std::move(dataset);
    ctx.predicted_label.resize(n);
    ctx.loss.resize(n);
    ctx.correct = DenseBitset(n);
    ctx.has_loss = DenseBitset(n);
    std::size_t n_labels = d.label_space.size();
    ctx.true_by_label.assign(n_labels, DenseBitset(n));
    ctx.pred_by_label.assign(n_labels, DenseBitset(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Item& item = d.items[i];
        auto it = preds.id_index.find(item.id);
        if (it == preds.id_index.end()) fail("no prediction for item " + item.id);
        const PredictionEntry& entry = preds.entries[it->second].second;
        auto label_idx = d.label_space.find(entry.predicted_label);
        if (!label_idx)
            fail("predicted label for item " + item.id + " is not in the label space: " +
                 entry.predicted_label);
        ctx.predicted_label[i] = *label_idx;
        ctx.loss[i] = entry.loss;
        if (entry.loss) ctx.has_loss.set(i);
        if (*label_idx == item.true_label) ctx.correct.set(i);
        ctx.true_by_label[item.true_label].set(i);
        ctx.pred_by_label[*label_idx].set(i);
    }
    return ctx;
}

}  // namespace topoeval
