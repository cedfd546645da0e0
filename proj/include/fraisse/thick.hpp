#pragma once

#include "fraisse/coloring.hpp"
#include "fraisse/generate.hpp"

namespace fraisse {

// Thickness and syndeticity, truncated at a finite horizon. A set S of
// embeddings of A into the target is thick at horizon s when every class
// member B of size <= s that embeds A has a witness f in Emb(B, target)
// with f∘Emb(A,B) inside S. Syndetic is the complement characterization:
// S is syndetic iff its complement is not thick. (The meets-every-thick-set
// form is equivalent: a set missed by S would be a thick subset of the
// complement and conversely; at a fixed horizon the two readings coincide
// by definition here.) Every verdict carries its (target, s) parameters; no
// claim is made beyond the horizon.

struct ThickWitness {
    FinStructure b;
    EmbMap f;
};

struct ThickReport {
    bool thick = false;
    int s = 0;
    std::optional<FinStructure> blocking; // a B with no witness (not thick)
    std::vector<ThickWitness> witnesses;  // one per B (thick)
};

// `member_set` holds indices into base.embs.
inline ThickReport thick_at_horizon(const ClassSpec& spec, const EmbBase& base,
                                    const std::vector<int>& member_set, int s) {
    ThickReport rep;
    rep.s = s;
    std::vector<char> in_set(base.embs.size(), 0);
    for (int i : member_set) {
        if (i < 0 || i >= static_cast<int>(base.embs.size()))
            throw InputError("thick_at_horizon: index out of range");
        in_set[i] = 1;
    }
    for (int n = base.a.size; n <= s; ++n) {
        for (const auto& b : generate_structures(spec, n)) {
            auto ab = enumerate_embeddings(base.a, b);
            if (ab.empty()) continue;
            std::optional<EmbMap> witness;
            for (const auto& f : enumerate_embeddings(b, base.target)) {
                bool inside = true;
                for (const auto& e : ab) {
                    auto it = base.index.find(compose(f, e));
                    if (it == base.index.end() || !in_set[it->second]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) {
                    witness = f;
                    break;
                }
            }
            if (!witness) {
                rep.thick = false;
                rep.blocking = b;
                return rep;
            }
            rep.witnesses.push_back({b, *witness});
        }
    }
    rep.thick = true;
    return rep;
}

struct SyndeticReport {
    bool syndetic = false;
    int s = 0;
    ThickReport complement_report; // thickness of the complement
};

inline SyndeticReport syndetic_at_horizon(const ClassSpec& spec, const EmbBase& base,
                                          const std::vector<int>& member_set, int s) {
    std::vector<char> in_set(base.embs.size(), 0);
    for (int i : member_set) in_set[i] = 1;
    std::vector<int> complement;
    for (std::size_t i = 0; i < base.embs.size(); ++i)
        if (!in_set[i]) complement.push_back(static_cast<int>(i));
    SyndeticReport rep;
    rep.s = s;
    rep.complement_report = thick_at_horizon(spec, base, complement, s);
    rep.syndetic = !rep.complement_report.thick;
    return rep;
}

// Convenience: syndeticity of every class of a full coloring.
inline std::vector<bool> syndetic_classes(const ClassSpec& spec, const EmbBase& base,
                                          const Coloring& gamma, int s) {
    std::vector<bool> out;
    for (int c = 1; c <= gamma.num_colors; ++c)
        out.push_back(syndetic_at_horizon(spec, base, gamma.color_class(c), s).syndetic);
    return out;
}

} // namespace fraisse
