#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraisse/canonical.hpp"
#include "fraisse/io.hpp"
#include "fraisse/structure.hpp"

namespace fraisse {

// A class of finite structures given by a finite list of forbidden induced
// substructures. Membership is hereditary by construction. Forbidden
// structures are stored in canonical form, deduplicated by code.
struct ClassSpec {
    std::string name;
    SignatureRef sig;
    std::vector<FinStructure> forbidden;            // canonical forms, sorted by (size, code)
    std::map<int, std::set<std::string>> forbidden_codes; // size -> codes
    std::map<std::string, int> forbidden_index;     // code -> index into `forbidden`
    int max_forbidden_size = 0;
    int dedup_dropped = 0; // duplicates dropped when the spec was built

    std::uint64_t fingerprint() const {
        Fnv64 h;
        for (const auto& s : sig->symbols) h.bytes(s.name).i64(s.arity);
        for (const auto& f : forbidden) h.bytes(canonical_form(f).code);
        return h.value();
    }
};

inline ClassSpec make_class_spec(std::string name, SignatureRef sig,
                                 const std::vector<FinStructure>& forbidden) {
    ClassSpec spec;
    spec.name = std::move(name);
    spec.sig = std::move(sig);
    std::vector<std::pair<std::pair<int, std::string>, FinStructure>> canon;
    for (const auto& f : forbidden) {
        if (!same_signature(f.sig, spec.sig))
            throw InputError("class spec '" + spec.name + "': forbidden structure signature mismatch");
        if (f.size == 0)
            throw InputError("class spec '" + spec.name + "': size-0 forbidden structure");
        CanonicalCode cc = canonical_form(f);
        canon.push_back({{f.size, cc.code}, relabel(f, cc.relabeling)});
    }
    std::sort(canon.begin(), canon.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [key, s] : canon) {
        if (spec.forbidden_codes[key.first].insert(key.second).second) {
            spec.max_forbidden_size = std::max(spec.max_forbidden_size, key.first);
            spec.forbidden_index[key.second] = static_cast<int>(spec.forbidden.size());
            spec.forbidden.push_back(std::move(s));
        } else {
            ++spec.dedup_dropped;
        }
    }
    return spec;
}

struct MemberViolation {
    std::vector<int> subset;  // vertices of A inducing a forbidden structure
    int forbidden_index = -1; // index into spec.forbidden
};

namespace detail {

template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    if (k > n || k <= 0) return;
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i + 1;
    while (true) {
        fn(subset);
        int i = k - 1;
        while (i >= 0 && subset[i] == n - (k - 1 - i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
}

} // namespace detail

// First forbidden occurrence in A, if any. `must_contain` restricts the scan
// to subsets containing that vertex — used when A grew by one vertex and the
// rest is already known clean.
inline std::optional<MemberViolation> member_violation(const ClassSpec& spec,
                                                       const FinStructure& a,
                                                       int must_contain = 0) {
    if (!same_signature(a.sig, spec.sig)) throw InputError("is_member: signature mismatch");
    for (const auto& [size, codes] : spec.forbidden_codes) {
        if (size > a.size) break;
        std::optional<MemberViolation> hit;
        detail::for_each_subset(a.size, size, [&](const std::vector<int>& subset) {
            if (hit) return;
            if (must_contain != 0 &&
                !std::binary_search(subset.begin(), subset.end(), must_contain))
                return;
            std::string code = canonical_form(induced(a, subset)).code;
            auto it = codes.find(code);
            if (it == codes.end()) return;
            hit = MemberViolation{subset, spec.forbidden_index.at(code)};
        });
        if (hit) return hit;
    }
    return std::nullopt;
}

inline bool is_member(const ClassSpec& spec, const FinStructure& a) {
    return !member_violation(spec, a).has_value();
}

inline bool is_member_incremental(const ClassSpec& spec, const FinStructure& a, int new_vertex) {
    return !member_violation(spec, a, new_vertex).has_value();
}

// --- text format ------------------------------------------------------

struct ParsedClassSpec {
    ClassSpec spec;
    std::vector<std::string> warnings;
};

inline ParsedClassSpec parse_class_spec(const Json& j, const std::string& where = "class") {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    detail::reject_unknown_fields(j, {"name", "signature", "forbidden"}, where);
    const Json& jn = detail::require_field(j, "name", where);
    if (!jn.is_string()) throw ParseError(where + ".name", "expected a string");
    SignatureRef sig = parse_signature(detail::require_field(j, "signature", where),
                                       where + ".signature");
    std::vector<FinStructure> forbidden;
    if (j.contains("forbidden")) {
        const Json& jf = j["forbidden"];
        if (!jf.is_array()) throw ParseError(where + ".forbidden", "expected an array");
        for (std::size_t i = 0; i < jf.size(); ++i)
            forbidden.push_back(
                parse_structure(jf[i], where + ".forbidden[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < forbidden.size(); ++i)
        if (!same_signature(forbidden[i].sig, sig))
            throw ParseError(where + ".forbidden[" + std::to_string(i) + "]",
                             "signature differs from the class signature");
    ParsedClassSpec out{make_class_spec(jn.get<std::string>(), sig, forbidden), {}};
    if (out.spec.dedup_dropped > 0)
        out.warnings.push_back(where + ".forbidden: dropped " +
                               std::to_string(out.spec.dedup_dropped) +
                               " duplicate isomorphism type(s)");
    return out;
}

inline Json class_spec_to_json(const ClassSpec& spec) {
    Json jf = Json::array();
    for (const auto& f : spec.forbidden) jf.push_back(structure_to_json(f));
    return Json{{"name", spec.name},
                {"signature", signature_to_json(*spec.sig)},
                {"forbidden", std::move(jf)}};
}

} // namespace fraisse
