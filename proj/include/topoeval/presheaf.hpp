#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "topoeval/csv.hpp"
#include "topoeval/data.hpp"
#include "topoeval/error.hpp"
#include "topoeval/format.hpp"
#include "topoeval/topology.hpp"

namespace topoeval {

enum class StatKind { accuracy, precision_macro, recall_macro, f1_macro, mean_loss };

inline const char* to_string(StatKind s) {
    switch (s) {
        case StatKind::accuracy: return "accuracy";
        case StatKind::precision_macro: return "precision_macro";
        case StatKind::recall_macro: return "recall_macro";
        case StatKind::f1_macro: return "f1_macro";
        default: return "mean_loss";
    }
}

inline StatKind stat_kind_from_string(const std::string& s) {
    if (s == "accuracy") return StatKind::accuracy;
    if (s == "precision_macro") return StatKind::precision_macro;
    if (s == "recall_macro") return StatKind::recall_macro;
    if (s == "f1_macro") return StatKind::f1_macro;
    if (s == "mean_loss") return StatKind::mean_loss;
    fail("unknown statistic: " + s +
         " (expected accuracy, precision_macro, recall_macro, f1_macro, or mean_loss)");
}

inline bool is_rate_statistic(StatKind s) { return s != StatKind::mean_loss; }

/// Value range a section may take over one open set. The empty set gets
/// the one-point space {0}; rate statistics get [0,1]; losses [0,inf).
struct SectionSpace {
    double lo = 0.0;
    double hi = 0.0;
    bool unbounded_above = false;
    bool one_point = false;

    bool contains(double v) const {
        if (one_point) return v == lo;
        return v >= lo && (unbounded_above || v <= hi);
    }
};

inline SectionSpace section_space_of(StatKind stat, bool set_is_empty) {
    if (set_is_empty) return SectionSpace{0.0, 0.0, false, true};
    if (is_rate_statistic(stat)) return SectionSpace{0.0, 1.0, false, false};
    return SectionSpace{0.0, 0.0, true, false};
}

/// Restriction map applied when passing a section from U down to V ⊆ U.
/// The default rule is the identity into nonempty sets and the zero map
/// into ∅; substitute rules are the extension point for statistics that
/// need more than identity restrictions.
using RestrictionRule = double (*)(bool v_is_empty, double value_at_u);

inline double identity_or_zero_rule(bool v_is_empty, double value_at_u) {
    return v_is_empty ? 0.0 : value_at_u;
}

struct PresheafSpec {
    StatKind statistic = StatKind::accuracy;
    RestrictionRule rule = &identity_or_zero_rule;

    SectionSpace section_space(bool set_is_empty) const {
        return section_space_of(statistic, set_is_empty);
    }
};

/// Evaluates the statistic on one open set. The empty set always yields 0.
/// Macro statistics average one-vs-rest values over the true labels present
/// in the set, skipping labels whose denominator is zero; if every label is
/// skipped the value is 0.
inline double section_value(StatKind stat, const OpenSet& u, const EvaluationContext& ctx) {
    if (u.members.size() != ctx.size()) fail("open set width does not match the context");
    if (u.cardinality == 0) return 0.0;
    switch (stat) {
        case StatKind::accuracy: {
            std::size_t correct = u.members.intersection_count(ctx.correct);
            return static_cast<double>(correct) / static_cast<double>(u.cardinality);
        }
        case StatKind::mean_loss: {
            if (!u.members.is_subset_of(ctx.has_loss)) {
                std::string offender;
                u.members.for_each([&](std::size_t i) {
                    if (offender.empty() && !ctx.has_loss.test(i))
                        offender = ctx.dataset->items[i].id;
                });
                fail("mean_loss requires a loss for every item; item " + offender +
                     " has none");
            }
            double sum = 0.0;
            u.members.for_each([&](std::size_t i) { sum += *ctx.loss[i]; });
            return sum / static_cast<double>(u.cardinality);
        }
        default: {
            double total = 0.0;
            std::size_t terms = 0;
            for (std::size_t l = 0; l < ctx.true_by_label.size(); ++l) {
                std::size_t in_true = u.members.intersection_count(ctx.true_by_label[l]);
                if (in_true == 0) continue;  // label not present among true labels of u
                std::size_t in_pred = u.members.intersection_count(ctx.pred_by_label[l]);
                std::size_t tp =
                    u.members.intersection_count(ctx.true_by_label[l], ctx.pred_by_label[l]);
                if (stat == StatKind::precision_macro) {
                    if (in_pred == 0) continue;  // undefined term, excluded
                    total += static_cast<double>(tp) / static_cast<double>(in_pred);
                } else if (stat == StatKind::recall_macro) {
                    total += static_cast<double>(tp) / static_cast<double>(in_true);
                } else {
                    total += 2.0 * static_cast<double>(tp) /
                             static_cast<double>(in_true + in_pred);
                }
                ++terms;
            }
            return terms == 0 ? 0.0 : total / static_cast<double>(terms);
        }
    }
}

/// Applies res_{U,V} to a section over U. V must be contained in U.
inline double restrict_value(const PresheafSpec& spec, const Topology& t, std::size_t u,
                             std::size_t v, double value_at_u) {
    if (!t.is_subset(v, u))
        fail("restriction undefined: \"" + t.expr_text(v) + "\" is not a subset of \"" +
             t.expr_text(u) + "\"");
    return spec.rule(t.at(v).cardinality == 0, value_at_u);
}

/// One section per open set: the statistic evaluated everywhere.
struct Assignment {
    PresheafSpec presheaf;
    std::vector<double> values;  // indexed by os_id
    std::string source_tag;

    double value(std::size_t os_id) const {
        if (os_id >= values.size()) fail("unknown open set id: " + std::to_string(os_id));
        return values[os_id];
    }
};

inline Assignment compute_assignment(const Topology& t, StatKind stat,
                                     const EvaluationContext& ctx,
                                     std::string source_tag = {}) {
    if (t.n_items() != ctx.size())
        fail("topology and evaluation context cover different item counts");
    Assignment a;
    a.presheaf.statistic = stat;
    a.source_tag = std::move(source_tag);
    a.values.reserve(t.size());
    for (const OpenSet& s : t.open_sets()) {
        double v = section_value(stat, s, ctx);
        if (!a.presheaf.section_space(s.cardinality == 0).contains(v))
            fail("statistic value left its section space on open set " +
                 std::to_string(s.os_id));
        a.values.push_back(v);
    }
    return a;
}

inline void assignment_to_csv(const Assignment& a, const Topology& t, std::ostream& out) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    csv::write_row(out, {"os_id", "expr", "cardinality", "value"});
    for (const OpenSet& s : t.open_sets())
        csv::write_row(out, {std::to_string(s.os_id), t.expr_text(s.os_id),
                             std::to_string(s.cardinality), format_fixed(a.values[s.os_id], 6)});
}

inline nlohmann::ordered_json assignment_to_json(const Assignment& a, const Topology& t) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    nlohmann::ordered_json doc;
    doc["statistic"] = to_string(a.presheaf.statistic);
    doc["source_tag"] = a.source_tag;
    doc["values"] = nlohmann::ordered_json::array();
    for (const OpenSet& s : t.open_sets()) {
        nlohmann::ordered_json row;
        row["os_id"] = s.os_id;
        row["expr"] = t.expr_text(s.os_id);
        row["cardinality"] = s.cardinality;
        row["value"] = round_to(a.values[s.os_id], 6);
        doc["values"].push_back(std::move(row));
    }
    return doc;
}

}  // namespace topoeval
