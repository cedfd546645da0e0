#pragma once

#include <optional>
#include <vector>

namespace fraisse {

// A small DPLL solver: unit propagation plus chronological backtracking on
// the first unassigned variable. Clauses are DIMACS-style signed literals.
// Only used as the second route of the arrow dual-route check; the desk-
// scale formulas here are tiny.
class DpllSolver {
public:
    DpllSolver(int num_vars, std::vector<std::vector<int>> clauses)
        : num_vars_(num_vars), clauses_(std::move(clauses)) {}

    // Returns a model (index v-1 = truth of variable v) or nullopt (UNSAT).
    std::optional<std::vector<bool>> solve() {
        std::vector<int> assign(num_vars_ + 1, 0); // 0 unknown, 1 true, -1 false
        if (!dpll(assign)) return std::nullopt;
        std::vector<bool> model(num_vars_);
        for (int v = 1; v <= num_vars_; ++v) model[v - 1] = assign[v] >= 0;
        return model;
    }

private:
    int num_vars_;
    std::vector<std::vector<int>> clauses_;

    // 1 = satisfied, 0 = undecided, -1 = conflict; unit literal returned
    static int clause_state(const std::vector<int>& clause, const std::vector<int>& assign,
                            int& unit) {
        int unassigned = 0;
        unit = 0;
        for (int lit : clause) {
            int v = lit > 0 ? lit : -lit;
            int val = assign[v];
            if (val == 0) {
                ++unassigned;
                unit = lit;
            } else if ((val > 0) == (lit > 0)) {
                return 1;
            }
        }
        if (unassigned == 0) return -1;
        unit = unassigned == 1 ? unit : 0;
        return 0;
    }

    bool propagate(std::vector<int>& assign, std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& clause : clauses_) {
                int unit = 0;
                int st = clause_state(clause, assign, unit);
                if (st == -1) return false;
                if (st == 0 && unit != 0) {
                    int v = unit > 0 ? unit : -unit;
                    assign[v] = unit > 0 ? 1 : -1;
                    trail.push_back(v);
                    changed = true;
                }
            }
        }
        return true;
    }

    bool dpll(std::vector<int>& assign) {
        std::vector<int> trail;
        if (!propagate(assign, trail)) {
            for (int v : trail) assign[v] = 0;
            return false;
        }
        int branch = 0;
        for (int v = 1; v <= num_vars_; ++v)
            if (assign[v] == 0) { branch = v; break; }
        if (branch == 0) return true;
        for (int val : {1, -1}) {
            assign[branch] = val;
            if (dpll(assign)) return true;
            assign[branch] = 0;
        }
        for (int v : trail) assign[v] = 0;
        return false;
    }
};

} // namespace fraisse
