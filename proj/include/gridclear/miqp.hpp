#pragma once

// Exact mixed-integer QP by branch-and-bound on binary variables.
// Best-first node selection (FIFO among equal bounds), most-fractional
// branching with lexicographic tie-break, down-branch first. Deterministic.

#include <cmath>
#include <queue>
#include <vector>

#include "gridclear/qp.hpp"

namespace gridclear {

struct MixedIntegerQp {
    QuadraticProgram qp;
    std::vector<int> binary_indices;

    void check() const {
        qp.check_dimensions();
        for (int j : binary_indices) {
            if (j < 0 || j >= qp.n) throw SolverError("miqp: binary index out of range");
            if (qp.lower[j] < -1e-12 || qp.upper[j] > 1.0 + 1e-12)
                throw SolverError("miqp: binary variable bounds must lie within [0,1]");
        }
    }
};

enum class MiqpStatus { optimal, infeasible, gap_limit };

inline const char* to_string(MiqpStatus s) {
    switch (s) {
        case MiqpStatus::optimal: return "optimal";
        case MiqpStatus::infeasible: return "infeasible";
        case MiqpStatus::gap_limit: return "gap-limit";
    }
    return "?";
}

struct MiqpSolution {
    Eigen::VectorXd x;
    double objective = kInf;
    MiqpStatus status = MiqpStatus::infeasible;
    double proven_gap = 0.0;
    long nodes_explored = 0;
};

namespace miqpdetail {

constexpr double kIntTol = 1e-6;

struct Node {
    std::vector<std::pair<int, int>> fixes;  // (binary index, value)
    double bound;
    long seq;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.seq > b.seq;                              // FIFO among equals
    }
};

}  // namespace miqpdetail

inline MiqpSolution solve_miqp(const MixedIntegerQp& p, double rel_gap = 0.0,
                               long node_limit = 200000, double solver_tol = 1e-8) {
    p.check();
    MiqpSolution best;
    best.status = MiqpStatus::infeasible;

    QpOptions qopt;
    qopt.tol = solver_tol;

    auto relax_with = [&](const std::vector<std::pair<int, int>>& fixes) {
        QuadraticProgram qp = p.qp;
        for (auto [j, v] : fixes) {
            qp.lower[j] = static_cast<double>(v);
            qp.upper[j] = static_cast<double>(v);
        }
        return qp;
    };

    std::priority_queue<miqpdetail::Node, std::vector<miqpdetail::Node>, miqpdetail::NodeOrder>
        open;
    long seq = 0;
    open.push({{}, -kInf, seq++});
    long nodes = 0;
    bool hit_node_limit = false;

    const auto prune_eps = [&](double incumbent) {
        return 1e-9 * std::max(1.0, std::abs(incumbent));
    };

    double best_open_bound_at_stop = kInf;

    while (!open.empty()) {
        if (nodes >= node_limit) {
            hit_node_limit = true;
            best_open_bound_at_stop = open.top().bound;
            break;
        }
        miqpdetail::Node node = open.top();
        open.pop();
        if (best.status == MiqpStatus::optimal &&
            node.bound >= best.objective - prune_eps(best.objective))
            continue;
        ++nodes;

        QuadraticProgram qp = relax_with(node.fixes);
        QpSolution rel = solve_qp(qp, qopt);
        if (rel.status == QpStatus::infeasible) continue;
        if (rel.status != QpStatus::optimal)
            throw SolverError("solve_miqp: node relaxation returned " +
                              std::string(to_string(rel.status)));
        if (best.status == MiqpStatus::optimal &&
            rel.objective >= best.objective - prune_eps(best.objective))
            continue;

        // Most-fractional branching variable; lexicographic tie-break.
        int branch_var = -1;
        double branch_score = kInf;
        for (int j : p.binary_indices) {
            const double u = rel.x[j];
            if (std::abs(u - std::round(u)) <= miqpdetail::kIntTol) continue;
            const double score = std::abs(u - 0.5);
            if (score < branch_score - 1e-15) {
                branch_score = score;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // Integral: snap, fix, and re-solve for an exact incumbent.
            std::vector<std::pair<int, int>> fixes = node.fixes;
            for (int j : p.binary_indices) {
                bool already = false;
                for (auto [k, v] : fixes)
                    if (k == j) { already = true; break; }
                if (!already)
                    fixes.emplace_back(j, static_cast<int>(std::llround(rel.x[j])));
            }
            QpSolution fixed = solve_qp(relax_with(fixes), qopt);
            if (fixed.status != QpStatus::optimal) continue;
            if (best.status != MiqpStatus::optimal || fixed.objective < best.objective - 1e-12) {
                best.x = fixed.x;
                for (auto [j, v] : fixes) best.x[j] = static_cast<double>(v);
                best.objective = fixed.objective;
                best.status = MiqpStatus::optimal;
            }
            continue;
        }

        miqpdetail::Node down{node.fixes, rel.objective, seq++};
        down.fixes.emplace_back(branch_var, 0);
        miqpdetail::Node up{node.fixes, rel.objective, seq++};
        up.fixes.emplace_back(branch_var, 1);
        open.push(std::move(down));
        open.push(std::move(up));
    }

    best.nodes_explored = nodes;
    if (best.status != MiqpStatus::optimal) {
        best.status = MiqpStatus::infeasible;
        best.proven_gap = 0.0;
        return best;
    }
    if (hit_node_limit) {
        const double lb = std::min(best_open_bound_at_stop, best.objective);
        best.proven_gap =
            std::max(0.0, (best.objective - lb) / std::max(1.0, std::abs(best.objective)));
        if (best.proven_gap > rel_gap) best.status = MiqpStatus::gap_limit;
    } else {
        best.proven_gap = 0.0;
    }
    return best;
}

}  // namespace gridclear
