#pragma once

#include <string>

#include "fraisse/age.hpp"

namespace fraisse {

struct FlimOptions {
    int pair_bound = 3;      // max |C| of scheduled inclusion pairs
    int amalgam_bound = 40;  // max prefix size during construction
    int age_size_bound = 6;  // sizes whose inhabitation is pre-checked
    int age_jep_bound = 3;   // bound for the JEP/AP pre-checks

    bool operator==(const FlimOptions&) const = default;
};

struct FlimLogEntry {
    int step = 0;       // 1-based schedule step
    int pair_index = 0; // index into the pair schedule
    EmbMap embedding;   // the embedding of the pair's part being served
    std::string kind;   // "extended" | "amalgam" | "nogrow" | "exhausted"
    int added = 0;      // vertices appended
};

// A finite approximation of the limit of the class: a chain of members, each
// an initial-segment substructure of the next, built by the inclusion-pair
// schedule. Deterministic in (spec, steps, seed, options).
struct FlimPrefix {
    ClassSpec spec;
    std::vector<FinStructure> chain;
    std::vector<FlimLogEntry> log;
    int steps = 0;
    unsigned seed = 0;
    FlimOptions options;
    bool exhausted = false; // an amalgam ran into the size bound

    const FinStructure& top() const { return chain.back(); }
};

struct FlimResult {
    bool refused = false;
    std::string refusal_reason;
    std::optional<FlimPrefix> prefix;
};

// Checks that chain members are members of the class and that each is an
// initial-segment substructure of the next. Used on import and by `verify`.
inline void validate_prefix(const FlimPrefix& p) {
    if (p.chain.empty()) throw InputError("prefix: empty chain");
    for (std::size_t i = 0; i < p.chain.size(); ++i) {
        if (!is_member(p.spec, p.chain[i]))
            throw InputError("prefix: chain[" + std::to_string(i) + "] is not a class member");
        if (i + 1 < p.chain.size()) {
            const auto& cur = p.chain[i];
            const auto& next = p.chain[i + 1];
            if (next.size < cur.size) throw InputError("prefix: chain shrinks");
            std::vector<int> initial(cur.size);
            for (int v = 1; v <= cur.size; ++v) initial[v - 1] = v;
            if (induced(next, initial) != cur)
                throw InputError("prefix: chain[" + std::to_string(i) +
                                 "] is not an initial segment of its successor");
        }
    }
}

inline FlimResult flim_prefix(const ClassSpec& spec, int steps, unsigned seed,
                              const FlimOptions& options = {}) {
    FlimResult result;

    for (int n = 1; n <= options.age_size_bound; ++n) {
        if (!class_inhabited_at(spec, n)) {
            result.refused = true;
            result.refusal_reason = "not an age class: no members of size " + std::to_string(n);
            return result;
        }
    }
    AgeReport age = check_age_class(spec, options.age_jep_bound);
    if (!age.jep_holds) {
        result.refused = true;
        result.refusal_reason = "not an age class: JEP fails at bound " +
                                std::to_string(options.age_jep_bound);
        return result;
    }
    APReport ap = check_AP(spec, options.age_jep_bound, 2 * options.age_jep_bound + 2);
    if (!ap.holds_at_bound) {
        result.refused = true;
        result.refusal_reason = "AP fails at bound " + std::to_string(options.age_jep_bound);
        return result;
    }

    FlimPrefix p;
    p.spec = spec;
    p.steps = steps;
    p.seed = seed;
    p.options = options;

    // start from the first size-1 representative
    auto ones = generate_structures(spec, 1);
    if (ones.empty()) {
        result.refused = true;
        result.refusal_reason = "no size-1 members";
        return result;
    }
    p.chain.push_back(ones.front());

    auto schedule = inclusion_pairs(spec, options.pair_bound);
    for (int step = 1; step <= steps && !p.exhausted; ++step) {
        int pair_index = (step - 1) % static_cast<int>(schedule.size());
        const InclusionPair& pair = schedule[pair_index];
        // embeddings of the part into the top as of the step start
        auto embs = enumerate_embeddings(pair.part, p.top());
        for (std::size_t ei = 0; ei < embs.size(); ++ei) {
            const EmbMap& emb = embs[ei];
            FlimLogEntry entry;
            entry.step = step;
            entry.pair_index = pair_index;
            entry.embedding = emb;
            if (extend_along(pair.whole, p.top(), pair.inclusion, emb)) {
                entry.kind = "extended";
                p.log.push_back(std::move(entry));
                continue;
            }
            AmalgamOptions aopt;
            aopt.size_bound = options.amalgam_bound;
            aopt.seed = seed + 1000003u * static_cast<unsigned>(step) + static_cast<unsigned>(ei);
            APCertificate cert =
                amalgamate(spec, pair.part, pair.whole, p.top(), pair.inclusion, emb, aopt);
            if (!cert.holds) {
                entry.kind = "exhausted";
                p.log.push_back(std::move(entry));
                p.exhausted = true; // reported; prefix returned as built
                break;
            }
            entry.added = cert.amalgam.size - p.top().size;
            if (entry.added == 0) {
                entry.kind = "nogrow";
            } else {
                entry.kind = "amalgam";
                // append one vertex per chain entry; every initial segment
                // of the amalgam is a member, so the chain stays inside the
                // class and grows in single steps
                for (int sz = p.top().size + 1; sz <= cert.amalgam.size; ++sz) {
                    std::vector<int> initial(sz);
                    for (int v = 1; v <= sz; ++v) initial[v - 1] = v;
                    p.chain.push_back(induced(cert.amalgam, initial));
                }
            }
            p.log.push_back(std::move(entry));
        }
    }
    result.prefix = std::move(p);
    return result;
}

// ---- extension property coverage -----------------------------------------

struct ExtensionInstance {
    int pair_index = 0; // into the report's pair list
    EmbMap g;           // embedding of the part into the top
    bool extendable = false;
};

struct ExtensionReport {
    std::vector<InclusionPair> pairs; // all (A ⊆ B) with |B| <= s
    std::vector<ExtensionInstance> instances;
    long extendable_count = 0;

    double coverage() const {
        if (instances.empty()) return 1.0;
        return static_cast<double>(extendable_count) / static_cast<double>(instances.size());
    }
};

// Over all class pairs A ⊆ B with |B| <= s and all embeddings g of A into
// the prefix top: can g be extended to an embedding of B?
inline ExtensionReport check_extension_property(const FlimPrefix& prefix, int s) {
    if (s < 1) throw InputError("check_extension_property: s must be >= 1");
    ExtensionReport rep;
    rep.pairs = inclusion_pairs(prefix.spec, s);
    const FinStructure& top = prefix.top();
    for (std::size_t pi = 0; pi < rep.pairs.size(); ++pi) {
        const auto& pair = rep.pairs[pi];
        for (const auto& g : enumerate_embeddings(pair.part, top)) {
            ExtensionInstance inst;
            inst.pair_index = static_cast<int>(pi);
            inst.g = g;
            inst.extendable = extend_along(pair.whole, top, pair.inclusion, g).has_value();
            if (inst.extendable) ++rep.extendable_count;
            rep.instances.push_back(std::move(inst));
        }
    }
    return rep;
}

// ---- ultrahomogeneity coverage ---------------------------------------------

struct PartialIsoInstance {
    std::vector<int> domain; // subset of the top, ascending
    EmbMap images;           // images[i] = image of domain[i]
    int rounds_completed = 0;
    bool success = false; // completed `depth` rounds (or became total)
};

struct UltrahomogeneityReport {
    int s = 0;
    int depth = 0;
    std::vector<PartialIsoInstance> instances;
    long successes = 0;
    int max_rounds = 0;

    double coverage() const {
        if (instances.empty()) return 1.0;
        return static_cast<double>(successes) / static_cast<double>(instances.size());
    }
};

// For every partial isomorphism between <= s-subsets of the top, runs up to
// `depth` alternating single-point extension rounds (forth on the least
// vertex outside the domain, back on the least vertex outside the range).
inline UltrahomogeneityReport check_ultrahomogeneity(const FlimPrefix& prefix, int s,
                                                     int depth = -1) {
    if (s < 1) throw InputError("check_ultrahomogeneity: s must be >= 1");
    const FinStructure& top = prefix.top();
    if (depth < 0) depth = top.size; // enough rounds to reach a total map
    UltrahomogeneityReport rep;
    rep.s = s;
    rep.depth = depth;

    for (int a = 1; a <= std::min(s, top.size); ++a) {
        detail::for_each_subset(top.size, a, [&](const std::vector<int>& subset) {
            auto [sub, inc] = induced_substructure(top, subset);
            for (const auto& emb : enumerate_embeddings(sub, top)) {
                PartialIsoInstance inst;
                inst.domain = subset;
                inst.images = emb;

                // forward and inverse maps on top's vertices
                std::vector<int> fwd(top.size + 1, 0), bwd(top.size + 1, 0);
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    fwd[subset[i]] = emb[i];
                    bwd[emb[i]] = subset[i];
                }
                int mapped = static_cast<int>(subset.size());
                bool alive = true;
                for (int round = 1; round <= depth && alive; ++round) {
                    if (mapped == top.size) break; // already total
                    bool forth = (round % 2) == 1;
                    const std::vector<int>& from = forth ? fwd : bwd;
                    // least vertex missing from the relevant side
                    int v = 0;
                    for (int u = 1; u <= top.size; ++u)
                        if (from[u] == 0) { v = u; break; }
                    // try each image in ascending order
                    int w_found = 0;
                    for (int w = 1; w <= top.size && w_found == 0; ++w) {
                        const std::vector<int>& to = forth ? bwd : fwd;
                        if (to[w] != 0) continue;
                        // the extended map must be a partial isomorphism
                        std::vector<int> dom;
                        std::vector<std::pair<int, int>> pins;
                        for (int u = 1; u <= top.size; ++u)
                            if (fwd[u] != 0) dom.push_back(u);
                        dom.push_back(forth ? v : w);
                        std::sort(dom.begin(), dom.end());
                        auto [dsub, dinc] = induced_substructure(top, dom);
                        for (std::size_t i = 0; i < dom.size(); ++i) {
                            int u = dom[i];
                            int img = (u == (forth ? v : w)) ? (forth ? w : v) : fwd[u];
                            pins.emplace_back(static_cast<int>(i) + 1, img);
                        }
                        // all positions pinned: just validate
                        EmbMap cand(dom.size());
                        for (auto [pos, img] : pins) cand[pos - 1] = img;
                        if (is_embedding(cand, dsub, top)) w_found = w;
                    }
                    if (w_found == 0) {
                        alive = false;
                    } else {
                        int u = forth ? v : w_found;
                        int img = forth ? w_found : v;
                        fwd[u] = img;
                        bwd[img] = u;
                        ++mapped;
                        inst.rounds_completed = round;
                    }
                }
                inst.success = alive;
                if (alive) ++rep.successes;
                rep.max_rounds = std::max(rep.max_rounds, inst.rounds_completed);
                rep.instances.push_back(std::move(inst));
            }
        });
    }
    return rep;
}

} // namespace fraisse
