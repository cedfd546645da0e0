#pragma once

#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "fraisse/class_spec.hpp"

namespace fraisse {

namespace detail {

// All tuples over {1..n} that mention vertex n, per symbol, in lexicographic
// order. These are exactly the decoration choices when a structure grows by
// one vertex.
inline std::vector<std::pair<int, Tuple>> fresh_tuples(const Signature& sig, int n) {
    std::vector<std::pair<int, Tuple>> out;
    for (std::size_t s = 0; s < sig.symbols.size(); ++s) {
        int arity = sig.symbols[s].arity;
        Tuple t(arity, 1);
        while (true) {
            bool mentions = false;
            for (int v : t)
                if (v == n) { mentions = true; break; }
            if (mentions) out.emplace_back(static_cast<int>(s), t);
            int i = arity - 1;
            while (i >= 0 && t[i] == n) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < arity; ++j) t[j] = 1;
        }
    }
    return out;
}

// Extends `base` (a member of size n-1) by vertex n with every admissible
// decoration; calls fn on each member found. fn returns false to stop.
// Tuples over the same vertex set are decided consecutively, and a vertex
// subset is checked against the forbidden patterns the moment its last
// tuple is decided, so doomed branches die early.
template <typename Fn>
void extend_members(const ClassSpec& spec, const FinStructure& base, Fn&& fn) {
    int n = base.size + 1;
    auto fresh = fresh_tuples(*spec.sig, n);
    // decide tuples over small vertex sets first so that every watched
    // subset completes as early as possible
    std::sort(fresh.begin(), fresh.end(), [](const auto& x, const auto& y) {
        Tuple xs = x.second, ys = y.second;
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        if (xs.size() != ys.size()) return xs.size() < ys.size();
        if (xs != ys) return xs < ys;
        return x < y;
    });
    FinStructure cur = base;
    cur.size = n;

    // subsets containing the new vertex, of forbidden sizes, with the fresh
    // tuples lying over them
    std::vector<std::vector<int>> watch_sets;
    std::vector<int> remaining;
    std::vector<std::vector<int>> tuple_watchers(fresh.size());
    for (const auto& [sz, codes] : spec.forbidden_codes) {
        if (sz > n) continue;
        auto add_watch = [&](const std::vector<int>& subset) {
            std::vector<int> over;
            for (std::size_t i = 0; i < fresh.size(); ++i) {
                bool inside = true;
                for (int v : fresh[i].second)
                    if (!std::binary_search(subset.begin(), subset.end(), v)) {
                        inside = false;
                        break;
                    }
                if (inside) over.push_back(static_cast<int>(i));
            }
            int w = static_cast<int>(watch_sets.size());
            watch_sets.push_back(subset);
            remaining.push_back(static_cast<int>(over.size()));
            for (int ti : over) tuple_watchers[ti].push_back(w);
        };
        if (sz == 1) {
            add_watch({n});
        } else {
            for_each_subset(n - 1, sz - 1, [&](const std::vector<int>& rest) {
                std::vector<int> subset = rest;
                subset.push_back(n);
                add_watch(subset);
            });
        }
    }

    auto subset_ok = [&](int w) {
        auto sub = induced(cur, watch_sets[w]);
        normalize_relations(sub);
        auto it = spec.forbidden_codes.find(sub.size);
        if (it == spec.forbidden_codes.end()) return true;
        return it->second.find(canonical_form(sub).code) == it->second.end();
    };
    for (std::size_t w = 0; w < watch_sets.size(); ++w)
        if (remaining[w] == 0 && !subset_ok(static_cast<int>(w))) return;

    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == fresh.size()) {
            FinStructure cand = cur;
            normalize_relations(cand);
            return fn(cand);
        }
        bool keep_going = true;
        for (int choice = 0; choice < 2 && keep_going; ++choice) {
            if (choice == 1) cur.relations[fresh[i].first].push_back(fresh[i].second);
            bool viable = true;
            for (int w : tuple_watchers[i])
                if (--remaining[w] == 0 && !subset_ok(w)) viable = false;
            if (viable) keep_going = self(self, i + 1);
            for (int w : tuple_watchers[i]) ++remaining[w];
            if (choice == 1) cur.relations[fresh[i].first].pop_back();
        }
        return keep_going;
    };
    rec(rec, 0);
}

struct GenMemo {
    std::mutex mu;
    std::unordered_map<std::string, std::vector<FinStructure>> reps;
    std::unordered_map<std::string, bool> flags;

    static GenMemo& instance() {
        static GenMemo memo;
        return memo;
    }
};

} // namespace detail

// One canonical representative per isomorphism type of size n in the class,
// sorted by canonical code. Results are memoized per (class, size) within
// the process; the memo never changes output, only cost.
inline std::vector<FinStructure> generate_structures(const ClassSpec& spec, int n) {
    if (n < 0) throw InputError("generate_structures: negative size");
    std::string key = hex64(spec.fingerprint()) + ":" + std::to_string(n);
    auto& memo = detail::GenMemo::instance();
    {
        std::lock_guard<std::mutex> lock(memo.mu);
        auto it = memo.reps.find(key);
        if (it != memo.reps.end()) return it->second;
    }

    std::vector<FinStructure> result;
    if (n == 0) {
        result.push_back(empty_structure(spec.sig));
    } else {
        std::vector<FinStructure> prev = generate_structures(spec, n - 1);
        std::vector<std::pair<std::string, FinStructure>> found;
        std::unordered_set<std::string> seen;
        for (const auto& base : prev) {
            detail::extend_members(spec, base, [&](const FinStructure& cand) {
                CanonicalCode cc = canonical_form(cand);
                if (seen.insert(cc.code).second)
                    found.emplace_back(cc.code, relabel(cand, cc.relabeling));
                return true;
            });
        }
        std::sort(found.begin(), found.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& [code, s] : found) result.push_back(std::move(s));
    }

    std::lock_guard<std::mutex> lock(memo.mu);
    memo.reps.emplace(key, result);
    return result;
}

// True iff the class has at least one member of size n. A backtracking
// search over labeled members, one vertex at a time (complete because
// membership is hereditary: every labeled member's initial segments are
// members). No canonical forms involved, so a positive answer is near
// instant and a negative one costs one labeled-member tree walk.
inline bool class_inhabited_at(const ClassSpec& spec, int n) {
    if (n <= 0) return true;
    std::string key = hex64(spec.fingerprint()) + ":inhabited:" + std::to_string(n);
    auto& memo = detail::GenMemo::instance();
    {
        std::lock_guard<std::mutex> lock(memo.mu);
        auto it = memo.flags.find(key);
        if (it != memo.flags.end()) return it->second;
    }
    bool found = false;
    auto rec = [&](auto&& self, const FinStructure& cur) -> void {
        if (found) return;
        if (cur.size == n) {
            found = true;
            return;
        }
        detail::extend_members(spec, cur, [&](const FinStructure& next) {
            self(self, next);
            return !found;
        });
    };
    rec(rec, empty_structure(spec.sig));
    std::lock_guard<std::mutex> lock(memo.mu);
    memo.flags[key] = found;
    return found;
}

} // namespace fraisse
