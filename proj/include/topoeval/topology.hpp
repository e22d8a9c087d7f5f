#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topoeval/bitset.hpp"
#include "topoeval/data.hpp"
#include "topoeval/error.hpp"
#include "topoeval/format.hpp"

namespace topoeval {

enum class SubbasisKind { label, attribute, scalar_ge, scalar_le, all };

inline const char* to_string(SubbasisKind k) {
    switch (k) {
        case SubbasisKind::label: return "label";
        case SubbasisKind::attribute: return "attribute";
        case SubbasisKind::scalar_ge: return "scalar_ge";
        case SubbasisKind::scalar_le: return "scalar_le";
        default: return "all";
    }
}

inline SubbasisKind subbasis_kind_from_string(const std::string& s) {
    if (s == "label") return SubbasisKind::label;
    if (s == "attribute") return SubbasisKind::attribute;
    if (s == "scalar_ge") return SubbasisKind::scalar_ge;
    if (s == "scalar_le") return SubbasisKind::scalar_le;
    if (s == "all") return SubbasisKind::all;
    fail("unknown subbasis kind: " + s);
}

struct SubbasisElement {
    std::size_t sb_index = 0;
    std::string name;
    SubbasisKind kind = SubbasisKind::label;
    DenseBitset members;
};

struct Subbasis {
    std::vector<SubbasisElement> elements;
    std::size_t n_items = 0;

    std::size_t size() const { return elements.size(); }

    /// Union of all element member sets. Coverage makes this the full space.
    DenseBitset span() const {
        DenseBitset full(n_items);
        for (const auto& e : elements) full |= e.members;
        return full;
    }
};

struct ScalarThreshold {
    std::string scalar_name;
    bool lower_bound = true;  // true: value >= a; false: value <= a
    double a = 0.0;
};

/// Selects which subbasis elements to build. Defaults mirror the common
/// setup: one element per label plus one per attribute.
struct SubbasisSpec {
    bool use_labels = true;
    std::optional<std::vector<std::string>> attributes;  // nullopt means all
    std::vector<ScalarThreshold> thresholds;
    bool pad_to_cover = false;  // on coverage failure, append a synthetic "all" element
};

/// Builds subbasis elements in a fixed order: labels first, then attributes,
/// then thresholds, each following dataset declaration order. Elements may
/// be empty; generation decides their fate. The elements must jointly cover
/// every item unless `pad_to_cover` patches the gap.
inline Subbasis build_subbasis(const Dataset& d, const SubbasisSpec& spec = {}) {
    Subbasis sb;
    sb.n_items = d.size();
    auto add = [&sb](std::string name, SubbasisKind kind, DenseBitset members) {
        SubbasisElement e;
        e.sb_index = sb.elements.size();
        e.name = std::move(name);
        e.kind = kind;
        e.members = std::move(members);
        sb.elements.push_back(std::move(e));
    };

    if (spec.use_labels) {
        for (std::size_t l = 0; l < d.label_space.size(); ++l) {
            DenseBitset m(d.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                if (d.items[i].true_label == l) m.set(i);
            add("label:" + d.label_space.name(l), SubbasisKind::label, std::move(m));
        }
    }

    std::vector<std::size_t> attr_indices;
    if (spec.attributes) {
        for (const auto& name : *spec.attributes) attr_indices.push_back(d.attribute_index(name));
    } else {
        for (std::size_t a = 0; a < d.attribute_names.size(); ++a) attr_indices.push_back(a);
    }
    for (std::size_t a : attr_indices) {
        DenseBitset m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.items[i].attributes[a] == AttributeValue::present) m.set(i);
        add("attr:" + d.attribute_names[a], SubbasisKind::attribute, std::move(m));
    }

    for (const auto& th : spec.thresholds) {
        std::size_t s = d.scalar_index(th.scalar_name);
        DenseBitset m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto& v = d.items[i].scalars[s];
            if (!v) continue;
            if (th.lower_bound ? (*v >= th.a) : (*v <= th.a)) m.set(i);
        }
        add("scalar:" + th.scalar_name + (th.lower_bound ? ">=" : "<=") + format_shortest(th.a),
            th.lower_bound ? SubbasisKind::scalar_ge : SubbasisKind::scalar_le, std::move(m));
    }

    if (sb.elements.empty()) fail("subbasis spec selects zero elements");
    for (std::size_t i = 0; i < sb.elements.size(); ++i)
        for (std::size_t j = i + 1; j < sb.elements.size(); ++j)
            if (sb.elements[i].name == sb.elements[j].name)
                fail("duplicate subbasis element name: " + sb.elements[i].name);

    if (sb.span().count() != d.size()) {
        if (!spec.pad_to_cover)
            fail("subbasis does not cover every item; add covering elements or enable padding");
        DenseBitset everything(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) everything.set(i);
        add("all", SubbasisKind::all, std::move(everything));
    }
    return sb;
}

enum class ExprKind { empty, full, element, intersection, union_ };

/// Provenance of an open set: which subbasis elements produced it and how.
/// Operand indices are strictly increasing; generation never nests
/// operators, so one node describes the whole construction.
struct SetExpression {
    ExprKind kind = ExprKind::empty;
    std::vector<std::size_t> operands;  // sb_indices; empty for EMPTY/FULL

    static SetExpression empty_set() { return {ExprKind::empty, {}}; }
    static SetExpression full_set() { return {ExprKind::full, {}}; }
    static SetExpression element(std::size_t sb) { return {ExprKind::element, {sb}}; }
    static SetExpression intersection(std::vector<std::size_t> ops) {
        return {ExprKind::intersection, std::move(ops)};
    }
    static SetExpression union_of(std::vector<std::size_t> ops) {
        return {ExprKind::union_, std::move(ops)};
    }

    bool operator==(const SetExpression&) const = default;
};

inline std::string expr_to_text(const SetExpression& e, const Subbasis& sb) {
    switch (e.kind) {
        case ExprKind::empty: return "∅";
        case ExprKind::full: return "X";
        case ExprKind::element: return sb.elements.at(e.operands.at(0)).name;
        case ExprKind::intersection:
        case ExprKind::union_: {
            const char* sep = e.kind == ExprKind::intersection ? " ∩ " : " ∪ ";
            std::string out;
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) out += sep;
                out += sb.elements.at(e.operands[i]).name;
            }
            return out;
        }
    }
    fail("unreachable expression kind");
}

struct OpenSet {
    std::size_t os_id = 0;
    DenseBitset members;
    SetExpression canonical_expr;
    std::vector<SetExpression> all_exprs;  // canonical first, later discoveries appended
    std::size_t cardinality = 0;
};

struct GenerationConfig {
    std::size_t max_intersection_arity = 2;
    std::size_t max_union_arity = 1;
    std::size_t min_cardinality = 20;
    std::size_t max_open_sets = 1'000'000;
    bool keep_empty_intersections = false;
};

/// The materialized family of open sets. Immutable once assembled; every
/// query is safe for unlimited concurrent readers.
class Topology {
public:
    static constexpr std::size_t kEmptyId = 0;
    static constexpr std::size_t kFullId = 1;

    /// Validates invariants (ids sequential, EMPTY/FULL in place, member
    /// sets distinct and consistent) and builds the query indices.
    static Topology assemble(Subbasis subbasis, GenerationConfig config,
                             std::vector<OpenSet> sets) {
        Topology t;
        t.subbasis_ = std::move(subbasis);
        t.config_ = config;
        t.sets_ = std::move(sets);
        if (t.sets_.size() < 2) fail("topology must contain at least EMPTY and FULL");
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
        for (std::size_t i = 0; i < t.sets_.size(); ++i) {
            const OpenSet& s = t.sets_[i];
            if (s.os_id != i) fail("open set ids must be sequential");
            if (s.members.size() != t.subbasis_.n_items)
                fail("open set member width does not match the item count");
            if (s.cardinality != s.members.count())
                fail("open set cardinality does not match its member set");
            if (s.all_exprs.empty() || !(s.all_exprs.front() == s.canonical_expr))
                fail("open set expression provenance must start with the canonical form");
            for (const auto& e : s.all_exprs) t.validate_expr(e);
            auto& bucket = seen[s.members.hash()];
            for (std::size_t other : bucket)
                if (t.sets_[other].members == s.members)
                    fail("two open sets share one member set");
            bucket.push_back(i);
        }
        if (t.sets_[kEmptyId].members.any()) fail("open set 0 must be the empty set");
        if (t.sets_[kEmptyId].canonical_expr.kind != ExprKind::empty)
            fail("open set 0 must carry the EMPTY expression");
        if (!(t.sets_[kFullId].members == t.subbasis_.span()))
            fail("open set 1 must be the union of all subbasis elements");
        if (t.sets_[kFullId].canonical_expr.kind != ExprKind::full)
            fail("open set 1 must carry the FULL expression");

        t.by_cardinality_.resize(t.sets_.size());
        for (std::size_t i = 0; i < t.sets_.size(); ++i) t.by_cardinality_[i] = i;
        std::sort(t.by_cardinality_.begin(), t.by_cardinality_.end(),
                  [&t](std::size_t a, std::size_t b) {
                      if (t.sets_[a].cardinality != t.sets_[b].cardinality)
                          return t.sets_[a].cardinality < t.sets_[b].cardinality;
                      return a < b;
                  });
        for (const OpenSet& s : t.sets_) {
            t.by_expr_text_.emplace(expr_to_text(s.canonical_expr, t.subbasis_), s.os_id);
            for (std::size_t e = 1; e < s.all_exprs.size(); ++e)
                t.by_expr_text_.emplace(expr_to_text(s.all_exprs[e], t.subbasis_), s.os_id);
        }
        return t;
    }

    const std::vector<OpenSet>& open_sets() const { return sets_; }
    std::size_t size() const { return sets_.size(); }
    std::size_t n_items() const { return subbasis_.n_items; }
    const Subbasis& subbasis() const { return subbasis_; }
    const GenerationConfig& config() const { return config_; }

    const OpenSet& at(std::size_t os_id) const {
        if (os_id >= sets_.size()) fail("unknown open set id: " + std::to_string(os_id));
        return sets_[os_id];
    }

    std::string expr_text(std::size_t os_id) const {
        return expr_to_text(at(os_id).canonical_expr, subbasis_);
    }

    /// True iff members(v) is contained in members(u).
    bool is_subset(std::size_t v, std::size_t u) const {
        return at(v).members.is_subset_of(at(u).members);
    }

    /// All open sets containing the item, in os_id order. Never includes
    /// EMPTY; always includes FULL.
    std::vector<std::size_t> neighborhoods_of(std::size_t item_index) const {
        if (item_index >= n_items())
            fail("item index out of range: " + std::to_string(item_index));
        std::vector<std::size_t> out;
        for (const OpenSet& s : sets_)
            if (s.members.test(item_index)) out.push_back(s.os_id);
        return out;
    }

    std::optional<std::size_t> find_by_members(const DenseBitset& members) const {
        for (const OpenSet& s : sets_)
            if (s.members == members) return s.os_id;
        return std::nullopt;
    }

    std::optional<std::size_t> find_by_expr_text(const std::string& text) const {
        auto it = by_expr_text_.find(text);
        if (it == by_expr_text_.end()) return std::nullopt;
        return it->second;
    }

    /// os_ids ordered by (cardinality ascending, os_id ascending).
    const std::vector<std::size_t>& ids_by_cardinality() const { return by_cardinality_; }

    /// os_ids whose cardinality lies in [lo, hi], in the index order above.
    std::vector<std::size_t> ids_in_cardinality_range(std::size_t lo, std::size_t hi) const {
        auto first = std::lower_bound(by_cardinality_.begin(), by_cardinality_.end(), lo,
                                      [this](std::size_t id, std::size_t bound) {
                                          return sets_[id].cardinality < bound;
                                      });
        auto last = std::upper_bound(by_cardinality_.begin(), by_cardinality_.end(), hi,
                                     [this](std::size_t bound, std::size_t id) {
                                         return bound < sets_[id].cardinality;
                                     });
        return std::vector<std::size_t>(first, last);
    }

private:
    void validate_expr(const SetExpression& e) const {
        switch (e.kind) {
            case ExprKind::empty:
            case ExprKind::full:
                if (!e.operands.empty()) fail("constant expressions take no operands");
                return;
            case ExprKind::element:
                if (e.operands.size() != 1) fail("element expressions take one operand");
                break;
            case ExprKind::intersection:
            case ExprKind::union_:
                if (e.operands.size() < 2) fail("operator expressions take at least two operands");
                break;
        }
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
            if (e.operands[i] >= subbasis_.size()) fail("expression references an unknown element");
            if (i && e.operands[i - 1] >= e.operands[i])
                fail("expression operands must be strictly increasing");
        }
    }

    Subbasis subbasis_;
    GenerationConfig config_;
    std::vector<OpenSet> sets_;
    std::vector<std::size_t> by_cardinality_;
    std::unordered_map<std::string, std::size_t> by_expr_text_;
};

namespace detail {

class TopologyBuilder {
public:
    TopologyBuilder(const Subbasis& sb, const GenerationConfig& cfg)
        : sb_(sb), cfg_(cfg) {}

    Topology run() {
        if (cfg_.max_intersection_arity < 1 || cfg_.max_union_arity < 1)
            fail("arity bounds must be at least 1");
        if (sb_.n_items == 0) fail("cannot generate a topology over zero items");

        DenseBitset full = sb_.span();
        if (full.none()) fail("subbasis covers no items; the full space would be empty");
        materialize(DenseBitset(sb_.n_items), SetExpression::empty_set());
        materialize(std::move(full), SetExpression::full_set());
        full_card_ = sets_[Topology::kFullId].cardinality;

        for (const auto& e : sb_.elements) consider(e.members, SetExpression::element(e.sb_index));

        for (std::size_t t = 2; t <= cfg_.max_intersection_arity; ++t) {
            if (t > sb_.size()) break;
            std::vector<std::size_t> chosen;
            intersect_rec(DenseBitset{}, chosen, t);
        }
        for (std::size_t t = 2; t <= cfg_.max_union_arity; ++t) {
            if (t > sb_.size()) break;
            std::vector<std::size_t> chosen;
            union_rec(DenseBitset{}, chosen, t);
        }
        return Topology::assemble(sb_, cfg_, std::move(sets_));
    }

private:
    // Dedup against existing sets; drop new candidates under the
    // cardinality floor; otherwise materialize.
    void consider(DenseBitset members, SetExpression expr) {
        auto& bucket = by_hash_[members.hash()];
        for (std::size_t id : bucket) {
            if (sets_[id].members == members) {
                sets_[id].all_exprs.push_back(std::move(expr));
                return;
            }
        }
        if (members.count() < cfg_.min_cardinality) return;
        materialize(std::move(members), std::move(expr));
    }

    void materialize(DenseBitset members, SetExpression expr) {
        if (sets_.size() >= cfg_.max_open_sets)
            fail("generating another open set would exceed max_open_sets (" +
                 std::to_string(cfg_.max_open_sets) + ")");
        OpenSet s;
        s.os_id = sets_.size();
        s.cardinality = members.count();
        s.members = std::move(members);
        s.canonical_expr = expr;
        s.all_exprs.push_back(std::move(expr));
        by_hash_[s.members.hash()].push_back(s.os_id);
        sets_.push_back(std::move(s));
    }

    // Enumerates t-element combinations in lexicographic index order,
    // carrying the running intersection. Subtrees whose running count can
    // no longer reach the cardinality floor (nor dedup into EMPTY or FULL)
    // are cut off.
    void intersect_rec(const DenseBitset& prefix, std::vector<std::size_t>& chosen,
                       std::size_t t) {
        if (chosen.size() == t) {
            if (prefix.none() && !cfg_.keep_empty_intersections) return;
            consider(prefix, SetExpression::intersection(chosen));
            return;
        }
        std::size_t start = chosen.empty() ? 0 : chosen.back() + 1;
        std::size_t remaining = t - chosen.size();
        for (std::size_t i = start; i + remaining <= sb_.size(); ++i) {
            DenseBitset next = chosen.empty()
                                   ? sb_.elements[i].members
                                   : prefix & sb_.elements[i].members;
            if (!cfg_.keep_empty_intersections) {
                std::size_t c = next.count();
                if (c == 0) continue;
                if (c < cfg_.min_cardinality && c < full_card_) continue;
            }
            chosen.push_back(i);
            intersect_rec(next, chosen, t);
            chosen.pop_back();
        }
    }

    void union_rec(const DenseBitset& prefix, std::vector<std::size_t>& chosen, std::size_t t) {
        if (chosen.size() == t) {
            consider(prefix, SetExpression::union_of(chosen));
            return;
        }
        std::size_t start = chosen.empty() ? 0 : chosen.back() + 1;
        std::size_t remaining = t - chosen.size();
        for (std::size_t i = start; i + remaining <= sb_.size(); ++i) {
            DenseBitset next = chosen.empty()
                                   ? sb_.elements[i].members
                                   : prefix | sb_.elements[i].members;
            chosen.push_back(i);
            union_rec(next, chosen, t);
            chosen.pop_back();
        }
    }

    const Subbasis& sb_;
    const GenerationConfig& cfg_;
    std::vector<OpenSet> sets_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash_;
    std::size_t full_card_ = 0;
};

}  // namespace detail

/// Materializes the bounded topology in a fixed, reproducible order:
/// EMPTY, FULL, each subbasis element, intersections of 2..max arity in
/// lexicographic index order, then unions likewise. Duplicate member sets
/// merge into the earliest open set, which keeps the first expression as
/// canonical; later expressions are recorded as provenance. Candidates
/// below min_cardinality are dropped unless they merge; empty intersections
/// are skipped entirely unless keep_empty_intersections.
inline Topology generate_topology(const Subbasis& subbasis, const GenerationConfig& config = {}) {
    return detail::TopologyBuilder(subbasis, config).run();
}

inline nlohmann::ordered_json expr_to_json(const SetExpression& e) {
    nlohmann::ordered_json j;
    switch (e.kind) {
        case ExprKind::empty: j["op"] = "empty"; break;
        case ExprKind::full: j["op"] = "full"; break;
        case ExprKind::element:
            j["op"] = "element";
            j["sb"] = e.operands.at(0);
            break;
        case ExprKind::intersection:
        case ExprKind::union_:
            j["op"] = e.kind == ExprKind::intersection ? "intersection" : "union";
            j["args"] = e.operands;
            break;
    }
    return j;
}

inline SetExpression expr_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
        fail("expression JSON must be an object with an \"op\" string");
    std::string op = j["op"].get<std::string>();
    if (op == "empty") return SetExpression::empty_set();
    if (op == "full") return SetExpression::full_set();
    if (op == "element") {
        if (!j.contains("sb") || !j["sb"].is_number_unsigned())
            fail("element expression JSON requires an \"sb\" index");
        return SetExpression::element(j["sb"].get<std::size_t>());
    }
    if (op != "intersection" && op != "union") fail("unknown expression op: " + op);
    if (!j.contains("args") || !j["args"].is_array())
        fail("operator expression JSON requires an \"args\" array");
    std::vector<std::size_t> ops;
    for (const auto& a : j["args"]) {
        if (!a.is_number_unsigned()) fail("expression operands must be unsigned integers");
        ops.push_back(a.get<std::size_t>());
    }
    return op == "intersection" ? SetExpression::intersection(std::move(ops))
                                : SetExpression::union_of(std::move(ops));
}

namespace detail {

inline std::vector<std::string> sorted_member_ids(const DenseBitset& members, const Dataset& d) {
    std::vector<std::string> ids;
    members.for_each([&](std::size_t i) { ids.push_back(d.items[i].id); });
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline DenseBitset members_from_ids(const nlohmann::json& arr, const Dataset& d,
                                    const std::string& where) {
    if (!arr.is_array()) fail(where + ": member_ids must be an array");
    DenseBitset m(d.size());
    for (const auto& v : arr) {
        if (!v.is_string()) fail(where + ": member_ids entries must be strings");
        auto it = d.id_index.find(v.get<std::string>());
        if (it == d.id_index.end())
            fail(where + ": member id not in the dataset: " + v.get<std::string>());
        m.set(it->second);
    }
    return m;
}

}  // namespace detail

/// Serializes a topology against its dataset. member_ids are item id
/// strings in lexicographic order; export then import then export is
/// byte-identical.
inline nlohmann::ordered_json topology_to_json(const Topology& t, const Dataset& d) {
    if (t.n_items() != d.size()) fail("topology and dataset item counts differ");
    nlohmann::ordered_json doc;
    doc["subbasis"] = nlohmann::ordered_json::array();
    for (const auto& e : t.subbasis().elements) {
        nlohmann::ordered_json je;
        je["sb_index"] = e.sb_index;
        je["name"] = e.name;
        je["kind"] = to_string(e.kind);
        je["member_ids"] = detail::sorted_member_ids(e.members, d);
        doc["subbasis"].push_back(std::move(je));
    }
    doc["open_sets"] = nlohmann::ordered_json::array();
    for (const auto& s : t.open_sets()) {
        nlohmann::ordered_json js;
        js["os_id"] = s.os_id;
        js["expr"] = expr_to_json(s.canonical_expr);
        js["expr_text"] = expr_to_text(s.canonical_expr, t.subbasis());
        js["alt_exprs"] = nlohmann::ordered_json::array();
        for (std::size_t i = 1; i < s.all_exprs.size(); ++i)
            js["alt_exprs"].push_back(expr_to_json(s.all_exprs[i]));
        js["member_ids"] = detail::sorted_member_ids(s.members, d);
        js["cardinality"] = s.cardinality;
        doc["open_sets"].push_back(std::move(js));
    }
    doc["config"] = {{"max_intersection_arity", t.config().max_intersection_arity},
                     {"max_union_arity", t.config().max_union_arity},
                     {"min_cardinality", t.config().min_cardinality},
                     {"max_open_sets", t.config().max_open_sets},
                     {"keep_empty_intersections", t.config().keep_empty_intersections}};
    return doc;
}

inline Topology topology_from_json(const nlohmann::json& doc, const Dataset& d) {
    if (!doc.is_object() || !doc.contains("subbasis") || !doc.contains("open_sets") ||
        !doc.contains("config"))
        fail("topology JSON requires subbasis, open_sets, and config");
    Subbasis sb;
    sb.n_items = d.size();
    for (const auto& je : doc["subbasis"]) {
        SubbasisElement e;
        if (!je.contains("sb_index") || !je.contains("name") || !je.contains("kind") ||
            !je.contains("member_ids"))
            fail("subbasis entries require sb_index, name, kind, member_ids");
        e.sb_index = je["sb_index"].get<std::size_t>();
        if (e.sb_index != sb.elements.size()) fail("subbasis indices must be sequential");
        e.name = je["name"].get<std::string>();
        e.kind = subbasis_kind_from_string(je["kind"].get<std::string>());
        e.members = detail::members_from_ids(je["member_ids"], d, "subbasis element " + e.name);
        sb.elements.push_back(std::move(e));
    }
    const auto& jc = doc["config"];
    GenerationConfig cfg;
    if (!jc.contains("max_intersection_arity") || !jc.contains("max_union_arity") ||
        !jc.contains("min_cardinality") || !jc.contains("max_open_sets") ||
        !jc.contains("keep_empty_intersections"))
        fail("topology config JSON is missing fields");
    cfg.max_intersection_arity = jc["max_intersection_arity"].get<std::size_t>();
    cfg.max_union_arity = jc["max_union_arity"].get<std::size_t>();
    cfg.min_cardinality = jc["min_cardinality"].get<std::size_t>();
    cfg.max_open_sets = jc["max_open_sets"].get<std::size_t>();
    cfg.keep_empty_intersections = jc["keep_empty_intersections"].get<bool>();

    std::vector<OpenSet> sets;
    for (const auto& js : doc["open_sets"]) {
        if (!js.contains("os_id") || !js.contains("expr") || !js.contains("member_ids") ||
            !js.contains("cardinality"))
            fail("open set entries require os_id, expr, member_ids, cardinality");
        OpenSet s;
        s.os_id = js["os_id"].get<std::size_t>();
        s.canonical_expr = expr_from_json(js["expr"]);
        s.all_exprs.push_back(s.canonical_expr);
        if (js.contains("alt_exprs"))
            for (const auto& ja : js["alt_exprs"]) s.all_exprs.push_back(expr_from_json(ja));
        s.members = detail::members_from_ids(js["member_ids"], d,
                                             "open set " + std::to_string(s.os_id));
        s.cardinality = js["cardinality"].get<std::size_t>();
        sets.push_back(std::move(s));
    }
    return Topology::assemble(std::move(sb), cfg, std::move(sets));
}

inline void write_topology_json(const Topology& t, const Dataset& d, std::ostream& out) {
    out << topology_to_json(t, d).dump(2) << '\n';
}

}  // namespace topoeval
