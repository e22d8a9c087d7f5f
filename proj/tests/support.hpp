#pragma once

// Shared fixtures and independent oracles for the test suite. Oracles work
// on 32-bit item masks so they share no set-algebra code with the library.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "topoeval/analysis.hpp"
#include "topoeval/data.hpp"
#include "topoeval/presheaf.hpp"
#include "topoeval/topology.hpp"

namespace testsupport {

using namespace topoeval;

inline std::string data_dir() { return TOPOEVAL_DATA_DIR; }
inline std::string toy6_csv() { return data_dir() + "/toy6.csv"; }
inline std::string toy6_schema() { return data_dir() + "/toy6.schema.json"; }
inline std::string toy6_preds() { return data_dir() + "/toy6-preds.csv"; }

struct Toy6 {
    std::shared_ptr<const Dataset> dataset;
    EvaluationContext ctx;
    Subbasis subbasis;
    Topology topology;  // min_cardinality 1
    Assignment accuracy;
};

inline Toy6 load_toy6() {
    SchemaDescriptor schema = load_schema(toy6_schema());
    auto dataset = std::make_shared<const Dataset>(load_dataset(schema, toy6_csv()));
    PredictionTable preds = load_predictions(toy6_preds());
    EvaluationContext ctx = join_validate(dataset, preds);
    Subbasis sb = build_subbasis(*dataset);
    GenerationConfig cfg;
    cfg.min_cardinality = 1;
    Topology topo = generate_topology(sb, cfg);
    Assignment acc = compute_assignment(topo, StatKind::accuracy, ctx, "toy6-preds");
    return Toy6{dataset, std::move(ctx), std::move(sb), std::move(topo), std::move(acc)};
}

/// Unique writable directory for one test's artifacts.
inline std::string fresh_tmp_dir(const std::string& hint) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("topoeval-" + hint + "-" + std::to_string(getpid()) + "-" +
                std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::uint32_t mask_of(const DenseBitset& b) {
    std::uint32_t m = 0;
    b.for_each([&m](std::size_t i) { m |= (1u << i); });
    return m;
}

inline DenseBitset bitset_from_mask(std::size_t n_items, std::uint32_t mask) {
    DenseBitset b(n_items);
    for (std::size_t i = 0; i < n_items; ++i)
        if (mask & (1u << i)) b.set(i);
    return b;
}

inline int popcount32(std::uint32_t m) {
    int c = 0;
    while (m) {
        m &= m - 1;
        ++c;
    }
    return c;
}

/// Brute-force closure: every intersection of up to i_max elements, every
/// union of up to u_max, plus the empty mask and the span.
inline std::set<std::uint32_t> oracle_family(const std::vector<std::uint32_t>& elements,
                                             std::size_t i_max, std::size_t u_max) {
    std::set<std::uint32_t> family;
    std::uint32_t full = 0;
    for (std::uint32_t e : elements) full |= e;
    family.insert(0);
    family.insert(full);
    std::size_t m = elements.size();
    for (std::uint32_t combo = 1; combo < (1u << m); ++combo) {
        int size = popcount32(combo);
        std::uint32_t inter = ~0u, uni = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(combo & (1u << i))) continue;
            inter &= elements[i];
            uni |= elements[i];
        }
        if (static_cast<std::size_t>(size) <= i_max) family.insert(inter);
        if (static_cast<std::size_t>(size) <= u_max) family.insert(uni);
    }
    return family;
}

/// One reproducible random scenario: a dataset with random labels, a
/// prediction per item, and a handmade subbasis of random masks.
struct RandomFixture {
    std::shared_ptr<const Dataset> dataset;
    EvaluationContext ctx;
    Subbasis subbasis;
    std::vector<std::uint32_t> element_masks;
    GenerationConfig cfg;
};

inline RandomFixture make_random_fixture(std::uint32_t seed, bool ensure_coverage) {
    std::mt19937 rng(seed);
    std::size_t n_items = 2 + rng() % 11;       // 2..12
    std::size_t n_elements = 1 + rng() % 5;     // 1..5
    std::size_t n_labels = 2 + rng() % 2;       // 2..3

    std::vector<std::string> label_names;
    for (std::size_t l = 0; l < n_labels; ++l) label_names.push_back("L" + std::to_string(l));

    std::vector<std::tuple<std::string, std::string, std::vector<AttributeValue>,
                           std::vector<std::optional<double>>>> rows;
    for (std::size_t i = 0; i < n_items; ++i)
        rows.emplace_back("i" + std::to_string(i), label_names[rng() % n_labels],
                          std::vector<AttributeValue>{}, std::vector<std::optional<double>>{});
    auto dataset = std::make_shared<const Dataset>(Dataset::make({}, {}, rows));

    PredictionTable preds;
    preds.source_tag = "random";
    std::uniform_real_distribution<double> loss_dist(0.0, 2.0);
    for (std::size_t i = 0; i < n_items; ++i) {
        PredictionEntry e;
        bool correct = rng() % 2 == 0;
        const std::string& truth = dataset->label_space.name(dataset->items[i].true_label);
        e.predicted_label =
            correct ? truth
                    : dataset->label_space.name(rng() % dataset->label_space.size());
        e.loss = loss_dist(rng);
        preds.id_index.emplace(dataset->items[i].id, preds.entries.size());
        preds.entries.emplace_back(dataset->items[i].id, std::move(e));
    }
    EvaluationContext ctx = join_validate(dataset, preds);

    std::uint32_t item_mask = n_items == 32 ? ~0u : ((1u << n_items) - 1);
    std::vector<std::uint32_t> masks;
    for (std::size_t e = 0; e < n_elements; ++e) masks.push_back(rng() & item_mask);
    if (ensure_coverage) {
        std::uint32_t covered = 0;
        for (std::uint32_t m : masks) covered |= m;
        masks[rng() % masks.size()] |= item_mask & ~covered;
    }
    bool any = false;
    for (std::uint32_t m : masks) any = any || m != 0;
    if (!any) masks[0] = 1;  // keep the span nonempty

    Subbasis sb;
    sb.n_items = n_items;
    for (std::size_t e = 0; e < masks.size(); ++e) {
        SubbasisElement el;
        el.sb_index = e;
        el.name = "e" + std::to_string(e);
        el.kind = SubbasisKind::attribute;
        el.members = bitset_from_mask(n_items, masks[e]);
        sb.elements.push_back(std::move(el));
    }

    GenerationConfig cfg;
    cfg.max_intersection_arity = 1 + rng() % 3;
    cfg.max_union_arity = 1 + rng() % 3;
    cfg.min_cardinality = 0;
    cfg.keep_empty_intersections = rng() % 2 == 0;

    return RandomFixture{dataset, std::move(ctx), std::move(sb), std::move(masks), cfg};
}

struct OracleIncon {
    double value = 0.0;
    std::size_t witness = 0;
    std::size_t candidates = 0;
};

/// Exhaustive scan over every open-set pair, mirroring the documented
/// tie-break (larger cardinality, then smaller os_id).
inline OracleIncon oracle_incon(const Assignment& a, const Topology& t, std::size_t u,
                                std::size_t k) {
    std::uint32_t mu = mask_of(t.at(u).members);
    OracleIncon best;
    bool have = false;
    for (const OpenSet& s : t.open_sets()) {
        std::uint32_t mv = mask_of(s.members);
        if ((mv & mu) != mv) continue;
        if (popcount32(mu & ~mv) > static_cast<int>(k)) continue;
        ++best.candidates;
        double av = s.cardinality == 0 ? 0.0 : a.values[u];  // restriction of a_u into v
        double diff = av - a.values[s.os_id];
        if (diff < 0) diff = -diff;
        if (!have || diff > best.value ||
            (diff == best.value &&
             (s.cardinality > t.at(best.witness).cardinality ||
              (s.cardinality == t.at(best.witness).cardinality && s.os_id < best.witness)))) {
            best.value = diff;
            best.witness = s.os_id;
            have = true;
        }
    }
    return best;
}

struct OracleExtrema {
    double a_max = 0.0;
    std::size_t argmax = 0;
    double a_min = 0.0;
    std::size_t argmin = 0;
    std::size_t count = 0;
};

inline OracleExtrema oracle_extrema(const Assignment& a, const Topology& t,
                                    std::size_t item) {
    OracleExtrema r;
    bool have = false;
    for (const OpenSet& s : t.open_sets()) {
        if (s.cardinality == 0 || !s.members.test(item)) continue;
        ++r.count;
        double v = a.values[s.os_id];
        auto beats = [&](double cur, std::size_t cur_id, bool maximize) {
            if (v != cur) return maximize ? v > cur : v < cur;
            if (s.cardinality != t.at(cur_id).cardinality)
                return s.cardinality > t.at(cur_id).cardinality;
            return s.os_id < cur_id;
        };
        if (!have) {
            r.a_max = r.a_min = v;
            r.argmax = r.argmin = s.os_id;
            have = true;
            continue;
        }
        if (beats(r.a_max, r.argmax, true)) {
            r.a_max = v;
            r.argmax = s.os_id;
        }
        if (beats(r.a_min, r.argmin, false)) {
            r.a_min = v;
            r.argmin = s.os_id;
        }
    }
    return r;
}

/// Accuracy recount straight from the context, one item at a time.
inline double oracle_accuracy(const OpenSet& s, const EvaluationContext& ctx) {
    if (s.cardinality == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (s.members.test(i) && ctx.correct.test(i)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(s.cardinality);
}

}  // namespace testsupport
