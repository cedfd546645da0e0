#pragma once

#include <fstream>
#include <sstream>

#include "fraisse/arrow.hpp"
#include "fraisse/sat.hpp"

namespace fraisse {

// DIMACS encoding of "a bad coloring exists": variables x(e,c) say object e
// has color c; exactly-one constraints per object; for every patch and
// every k-subset T of the colors, some object of the patch takes a color
// outside T. The formula is satisfiable iff the arrow FAILS.
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::size_t object_count = 0;
    int r = 0, k = 0;
    std::uint64_t fingerprint = 0;
};

inline int cnf_var(std::size_t object, int color, int r) {
    return static_cast<int>(object) * r + color;
}

inline CnfFormula bad_coloring_cnf(const ArrowObjects& obj, int r, int k) {
    if (r <= k) throw InputError("cnf export: r <= k is trivially-holds, nothing to export");
    if (k < 1) throw InputError("cnf export: k must be >= 1");
    CnfFormula f;
    f.object_count = obj.object_count;
    f.r = r;
    f.k = k;
    f.fingerprint = obj.fingerprint;
    f.num_vars = static_cast<int>(obj.object_count) * r;
    for (std::size_t e = 0; e < obj.object_count; ++e) {
        std::vector<int> at_least;
        for (int c = 1; c <= r; ++c) at_least.push_back(cnf_var(e, c, r));
        f.clauses.push_back(at_least);
        for (int c = 1; c <= r; ++c)
            for (int c2 = c + 1; c2 <= r; ++c2)
                f.clauses.push_back({-cnf_var(e, c, r), -cnf_var(e, c2, r)});
    }
    // k-subsets of [r]
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i + 1;
    std::vector<std::vector<int>> ksubsets;
    while (true) {
        ksubsets.push_back(subset);
        int i = k - 1;
        while (i >= 0 && subset[i] == r - (k - 1 - i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    for (const auto& patch : obj.patches) {
        for (const auto& t : ksubsets) {
            std::vector<int> clause;
            for (int e : patch)
                for (int c = 1; c <= r; ++c)
                    if (!std::binary_search(t.begin(), t.end(), c))
                        clause.push_back(cnf_var(e, c, r));
            f.clauses.push_back(clause); // empty patch gives the empty clause: UNSAT, correct
        }
    }
    return f;
}

inline void write_dimacs(const CnfFormula& f, std::ostream& out) {
    out << "c bad-coloring encoding, r=" << f.r << " k=" << f.k << "\n";
    out << "c fingerprint " << hex64(f.fingerprint) << "\n";
    for (std::size_t e = 0; e < f.object_count; ++e)
        for (int c = 1; c <= f.r; ++c)
            out << "c x " << cnf_var(e, c, f.r) << " = emb " << e << " color " << c << "\n";
    out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
    for (const auto& clause : f.clauses) {
        for (int lit : clause) out << lit << " ";
        out << "0\n";
    }
}

inline void export_bad_coloring_cnf(const CnfFormula& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    write_dimacs(f, out);
}

// Parses a solver model file: "s SATISFIABLE/UNSATISFIABLE" lines, "v" lines
// or bare literal lists; comments ignored. Returns nullopt for a declared
// UNSAT model file.
inline std::optional<std::vector<int>> parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    std::vector<int> lits;
    std::string line;
    bool declared_unsat = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (first == "s") {
            std::string verdict;
            ls >> verdict;
            if (verdict == "UNSATISFIABLE" || verdict == "UNSAT") declared_unsat = true;
            continue;
        }
        std::istringstream body(first == "v" ? line.substr(1) : line);
        int lit;
        while (body >> lit)
            if (lit != 0) lits.push_back(lit);
    }
    if (declared_unsat) return std::nullopt;
    if (lits.empty()) throw InputError(path + ": no literals found in model file");
    return lits;
}

// Reconstructs the coloring from a model and verifies it is a bad coloring;
// a model failing verification is a solver-integration error.
inline Coloring import_sat_model(const ArrowObjects& obj, int r, int k,
                                 const std::vector<int>& lits) {
    std::vector<int> assignment(obj.object_count, 0);
    for (int lit : lits) {
        if (lit <= 0) continue;
        if (lit > static_cast<int>(obj.object_count) * r)
            throw InputError("model: variable " + std::to_string(lit) + " out of range");
        std::size_t e = static_cast<std::size_t>((lit - 1) / r);
        int c = (lit - 1) % r + 1;
        if (assignment[e] != 0 && assignment[e] != c)
            throw InputError("model: object " + std::to_string(e) + " has two colors");
        assignment[e] = c;
    }
    Coloring col;
    col.num_colors = r;
    col.assignment = std::move(assignment);
    col.base_fingerprint = obj.fingerprint;
    if (!verify_bad_coloring(obj, col, k))
        throw InputError("model verification failed: not a bad coloring (solver integration error)");
    return col;
}

// The internal second route: decide the exported formula with the built-in
// DPLL solver. SAT means the arrow fails.
inline bool cnf_satisfiable(const CnfFormula& f, std::vector<int>* model_out = nullptr) {
    DpllSolver solver(f.num_vars, f.clauses);
    auto model = solver.solve();
    if (!model) return false;
    if (model_out) {
        model_out->clear();
        for (int v = 1; v <= f.num_vars; ++v)
            model_out->push_back((*model)[v - 1] ? v : -v);
    }
    return true;
}

} // namespace fraisse
