#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "topoeval/error.hpp"
#include "topoeval/presheaf.hpp"
#include "topoeval/topology.hpp"

namespace topoeval {

/// Signed drop (or gain) of the statistic when passing from U to V ⊆ U:
/// res_{U,V}(value(U)) − value(V).
inline double restriction_difference(const Assignment& a, const Topology& t, std::size_t u,
                                     std::size_t v) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    return restrict_value(a.presheaf, t, u, v, a.value(u)) - a.value(v);
}

struct InconsistencyResult {
    std::size_t u = 0;
    std::size_t k = 0;
    double value = 0.0;
    std::size_t witness_v = 0;          // maximizing subset
    std::size_t candidates_examined = 0;
};

/// Largest absolute restriction difference from U to any materialized open
/// V ⊆ U that removes at most k items. U itself always qualifies, so the
/// result is well-defined and nonnegative. Ties on the maximum go to the
/// larger cardinality, then the smaller os_id.
inline InconsistencyResult local_inconsistency(const Assignment& a, const Topology& t,
                                               std::size_t u, std::size_t k) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    const OpenSet& set_u = t.at(u);
    std::size_t lo = set_u.cardinality > k ? set_u.cardinality - k : 0;
    InconsistencyResult r;
    r.u = u;
    r.k = k;
    r.witness_v = u;
    bool have = false;
    for (std::size_t v : t.ids_in_cardinality_range(lo, set_u.cardinality)) {
        if (!t.at(v).members.is_subset_of(set_u.members)) continue;
        ++r.candidates_examined;
        double diff = restrict_value(a.presheaf, t, u, v, a.value(u)) - a.value(v);
        if (diff < 0) diff = -diff;
        const OpenSet& set_v = t.at(v);
        const OpenSet& best = t.at(r.witness_v);
        if (!have || diff > r.value ||
            (diff == r.value && (set_v.cardinality > best.cardinality ||
                                 (set_v.cardinality == best.cardinality && v < r.witness_v)))) {
            r.value = diff;
            r.witness_v = v;
            have = true;
        }
    }
    return r;
}

struct NeighborhoodExtrema {
    std::size_t item_index = 0;
    double a_max = 0.0;
    std::size_t argmax = 0;
    double a_min = 0.0;
    std::size_t argmin = 0;
    std::size_t neighborhood_count = 0;
};

/// Best and worst statistic values among the nonempty open sets containing
/// the item. Ties go to the larger cardinality, then the smaller os_id.
inline NeighborhoodExtrema neighborhood_extrema(const Assignment& a, const Topology& t,
                                                std::size_t item_index) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    if (item_index >= t.n_items())
        fail("item index out of range: " + std::to_string(item_index));
    NeighborhoodExtrema r;
    r.item_index = item_index;
    bool have = false;
    auto better = [&t](double v, std::size_t id, double best_v, std::size_t best_id,
                       bool maximize) {
        if (v != best_v) return maximize ? v > best_v : v < best_v;
        const OpenSet& s = t.at(id);
        const OpenSet& b = t.at(best_id);
        if (s.cardinality != b.cardinality) return s.cardinality > b.cardinality;
        return id < best_id;
    };
    for (const OpenSet& s : t.open_sets()) {
        if (s.cardinality == 0 || !s.members.test(item_index)) continue;
        ++r.neighborhood_count;
        double v = a.values[s.os_id];
        if (!have) {
            r.a_max = r.a_min = v;
            r.argmax = r.argmin = s.os_id;
            have = true;
            continue;
        }
        if (better(v, s.os_id, r.a_max, r.argmax, true)) {
            r.a_max = v;
            r.argmax = s.os_id;
        }
        if (better(v, s.os_id, r.a_min, r.argmin, false)) {
            r.a_min = v;
            r.argmin = s.os_id;
        }
    }
    if (!have)
        fail("item " + std::to_string(item_index) + " lies in no nonempty open set");
    return r;
}

struct RankedSlice {
    std::size_t os_id = 0;
    std::string expr;
    std::size_t cardinality = 0;
    double value = 0.0;
    std::size_t rank = 0;  // 1-based
};

enum class RankDirection { top, bottom };

using RankFilter = std::function<bool(const OpenSet&)>;

/// Open sets ordered by value (descending for top, ascending for bottom),
/// ties broken by larger cardinality then smaller os_id. ∅ is excluded;
/// the filter, when given, is applied before ranking. Returns at most n
/// entries, fewer when the family is small.
inline std::vector<RankedSlice> rank_open_sets(const Assignment& a, const Topology& t,
                                               RankDirection direction, std::size_t n,
                                               const RankFilter& filter = {}) {
    if (a.values.size() != t.size()) fail("assignment does not match the topology");
    if (n < 1) fail("ranking requires n >= 1");
    std::vector<std::size_t> ids;
    for (const OpenSet& s : t.open_sets()) {
        if (s.os_id == Topology::kEmptyId) continue;
        if (filter && !filter(s)) continue;
        ids.push_back(s.os_id);
    }
    bool top = direction == RankDirection::top;
    std::sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) {
        double vx = a.values[x], vy = a.values[y];
        if (vx != vy) return top ? vx > vy : vx < vy;
        const OpenSet& sx = t.at(x);
        const OpenSet& sy = t.at(y);
        if (sx.cardinality != sy.cardinality) return sx.cardinality > sy.cardinality;
        return x < y;
    });
    if (ids.size() > n) ids.resize(n);
    std::vector<RankedSlice> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const OpenSet& s = t.at(ids[i]);
        out.push_back(RankedSlice{s.os_id, t.expr_text(s.os_id), s.cardinality,
                                  a.values[s.os_id], i + 1});
    }
    return out;
}

struct NeighborhoodReport {
    std::size_t item_index = 0;
    std::vector<RankedSlice> bottom;
    std::vector<RankedSlice> top;
};

/// Rankings restricted to the open sets containing one item: the worst n
/// neighborhoods and the best n, in that order.
inline NeighborhoodReport neighborhood_report(const Assignment& a, const Topology& t,
                                              std::size_t item_index, std::size_t n) {
    if (item_index >= t.n_items())
        fail("item index out of range: " + std::to_string(item_index));
    RankFilter contains_item = [item_index](const OpenSet& s) {
        return s.members.test(item_index);
    };
    NeighborhoodReport r;
    r.item_index = item_index;
    r.bottom = rank_open_sets(a, t, RankDirection::bottom, n, contains_item);
    r.top = rank_open_sets(a, t, RankDirection::top, n, contains_item);
    return r;
}

}  // namespace topoeval
