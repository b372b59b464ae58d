#pragma once

// Convex quadratic programming: problem container, a sparse primal-dual
// interior-point solver (Mehrotra predictor-corrector over a regularized
// augmented KKT system), and an independent KKT residual checker.
//
// Dual conventions:
//   duals_eq[k]   = d(optimum)/d(b_eq[k])        (shadow price, any sign)
//   duals_ineq, duals_lower, duals_upper >= 0    (standard multipliers)

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gridclear/common.hpp"

namespace gridclear {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct QuadraticProgram {
    int n = 0;
    SpMat Q;          // n x n symmetric PSD
    Eigen::VectorXd c;
    double c0 = 0.0;  // constant objective offset
    SpMat A_eq;       // m_eq x n
    Eigen::VectorXd b_eq;
    SpMat A_ineq;     // m_in x n, rows A x <= b
    Eigen::VectorXd b_ineq;
    Eigen::VectorXd lower;  // n, -inf allowed
    Eigen::VectorXd upper;  // n, +inf allowed
    std::vector<std::string> var_names;

    void resize(int nvars) {
        n = nvars;
        Q.resize(n, n);
        c = Eigen::VectorXd::Zero(n);
        A_eq.resize(0, n);
        b_eq.resize(0);
        A_ineq.resize(0, n);
        b_ineq.resize(0);
        lower = Eigen::VectorXd::Constant(n, -kInf);
        upper = Eigen::VectorXd::Constant(n, kInf);
    }

    void check_dimensions() const {
        if (Q.rows() != n || Q.cols() != n) throw SolverError("qp: Q dimension mismatch");
        if (c.size() != n) throw SolverError("qp: c dimension mismatch");
        if (A_eq.cols() != n || A_eq.rows() != b_eq.size())
            throw SolverError("qp: equality system dimension mismatch");
        if (A_ineq.cols() != n || A_ineq.rows() != b_ineq.size())
            throw SolverError("qp: inequality system dimension mismatch");
        if (lower.size() != n || upper.size() != n)
            throw SolverError("qp: bounds dimension mismatch");
    }

    double objective_at(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(Q * x) + c.dot(x) + c0;
    }
};

enum class QpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::optimal: return "optimal";
        case QpStatus::infeasible: return "infeasible";
        case QpStatus::unbounded: return "unbounded";
        case QpStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

struct QpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd duals_eq;
    Eigen::VectorXd duals_ineq;
    Eigen::VectorXd duals_lower;
    Eigen::VectorXd duals_upper;
    double objective = 0.0;
    QpStatus status = QpStatus::iteration_limit;
    int iterations = 0;
    std::string message;
};

struct QpOptions {
    double tol = 1e-8;
    int max_iter = 120;
    std::optional<Eigen::VectorXd> initial_guess;
    bool allow_elastic_probe = true;  // feasibility phase after a failed solve
};

struct KktReport {
    double stationarity = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double complementarity = 0.0;
    bool pass = false;
};

namespace qpdetail {

// Inequality stack: [A_ineq; x <= ub rows; -x <= -lb rows].
struct IneqStack {
    SpMat G;
    Eigen::VectorXd h;
    std::vector<int> upper_vars;  // variable index per ub row
    std::vector<int> lower_vars;  // variable index per lb row
    int m_in = 0;
};

inline IneqStack build_ineq_stack(const QuadraticProgram& qp) {
    IneqStack st;
    st.m_in = static_cast<int>(qp.A_ineq.rows());
    for (int j = 0; j < qp.n; ++j) {
        if (std::isfinite(qp.upper[j])) st.upper_vars.push_back(j);
        if (std::isfinite(qp.lower[j])) st.lower_vars.push_back(j);
    }
    const int m = st.m_in + static_cast<int>(st.upper_vars.size() + st.lower_vars.size());
    st.G.resize(m, qp.n);
    st.h.resize(m);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(qp.A_ineq.nonZeros()) + st.upper_vars.size() +
                 st.lower_vars.size());
    for (int k = 0; k < qp.A_ineq.outerSize(); ++k)
        for (SpMat::InnerIterator it(qp.A_ineq, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int r = 0; r < st.m_in; ++r) st.h[r] = qp.b_ineq[r];
    int row = st.m_in;
    for (int j : st.upper_vars) {
        trip.emplace_back(row, j, 1.0);
        st.h[row] = qp.upper[j];
        ++row;
    }
    for (int j : st.lower_vars) {
        trip.emplace_back(row, j, -1.0);
        st.h[row] = -qp.lower[j];
        ++row;
    }
    st.G.setFromTriplets(trip.begin(), trip.end());
    return st;
}

// Ruiz equilibration of the (x, eq-row, ineq-row) blocks plus a scalar cost
// scaling. All diagonal, so duals and primal unscale exactly.
struct Scaling {
    Eigen::VectorXd d;    // per variable
    Eigen::VectorXd e_a;  // per equality row
    Eigen::VectorXd e_g;  // per inequality row
    double gamma = 1.0;   // cost scale
};

inline void max_abs_accumulate(const SpMat& M, Eigen::VectorXd& col_max,
                               Eigen::VectorXd& row_max) {
    for (int k = 0; k < M.outerSize(); ++k)
        for (SpMat::InnerIterator it(M, k); it; ++it) {
            const double a = std::abs(it.value());
            if (a > col_max[it.col()]) col_max[it.col()] = a;
            if (a > row_max[it.row()]) row_max[it.row()] = a;
        }
}

inline Scaling ruiz_equilibrate(SpMat& Q, Eigen::VectorXd& c, SpMat& A, Eigen::VectorXd& b,
                                SpMat& G, Eigen::VectorXd& h) {
    const int n = static_cast<int>(c.size());
    const int me = static_cast<int>(b.size());
    const int mg = static_cast<int>(h.size());
    Scaling sc;
    sc.d = Eigen::VectorXd::Ones(n);
    sc.e_a = Eigen::VectorXd::Ones(me);
    sc.e_g = Eigen::VectorXd::Ones(mg);

    for (int pass = 0; pass < 10; ++pass) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd row_a = Eigen::VectorXd::Zero(me);
        Eigen::VectorXd row_g = Eigen::VectorXd::Zero(mg);
        Eigen::VectorXd dummy_q = Eigen::VectorXd::Zero(n);
        max_abs_accumulate(Q, col, dummy_q);
        max_abs_accumulate(A, col, row_a);
        max_abs_accumulate(G, col, row_g);
        auto step = [](double m) { return m > 0 ? 1.0 / std::sqrt(m) : 1.0; };
        Eigen::VectorXd sx(n), sa(me), sg(mg);
        for (int j = 0; j < n; ++j) sx[j] = step(col[j]);
        for (int r = 0; r < me; ++r) sa[r] = step(row_a[r]);
        for (int r = 0; r < mg; ++r) sg[r] = step(row_g[r]);

        // Apply: Q <- Dx Q Dx, A <- Da A Dx, G <- Dg G Dx.
        for (int k = 0; k < Q.outerSize(); ++k)
            for (SpMat::InnerIterator it(Q, k); it; ++it)
                it.valueRef() *= sx[it.row()] * sx[it.col()];
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it)
                it.valueRef() *= sa[it.row()] * sx[it.col()];
        for (int k = 0; k < G.outerSize(); ++k)
            for (SpMat::InnerIterator it(G, k); it; ++it)
                it.valueRef() *= sg[it.row()] * sx[it.col()];
        c = c.cwiseProduct(sx);
        b = b.cwiseProduct(sa);
        h = h.cwiseProduct(sg);
        sc.d = sc.d.cwiseProduct(sx);
        sc.e_a = sc.e_a.cwiseProduct(sa);
        sc.e_g = sc.e_g.cwiseProduct(sg);

        double worst = 0.0;
        for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(1.0 - sx[j]));
        if (worst < 1e-3) break;
    }

    double qmax = 0.0;
    for (int k = 0; k < Q.outerSize(); ++k)
        for (SpMat::InnerIterator it(Q, k); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
    const double cn = c.size() > 0 ? c.lpNorm<Eigen::Infinity>() : 0.0;
    sc.gamma = 1.0 / std::max(1.0, std::max(qmax, cn));
    Q *= sc.gamma;
    c *= sc.gamma;
    return sc;
}

struct IpmWork {
    // Scaled data.
    SpMat Q, A, G;
    Eigen::VectorXd c, b, h;
    Scaling sc;
    int n = 0, me = 0, mg = 0;
};

// Augmented KKT matrix [P + G' W G + dx I, A'; A, -dy I] built from triplets.
inline SpMat build_kkt(const IpmWork& w, const Eigen::VectorXd& wdiag, double reg_x,
                       double reg_y) {
    const int dim = w.n + w.me;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(w.Q.nonZeros() + 2 * w.A.nonZeros() +
                                          w.G.nonZeros() * 4 + dim));
    for (int k = 0; k < w.Q.outerSize(); ++k)
        for (SpMat::InnerIterator it(w.Q, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    // G' diag(wdiag) G
    SpMat GtWG;
    {
        SpMat W(w.mg, w.mg);
        std::vector<Triplet> wt;
        wt.reserve(static_cast<std::size_t>(w.mg));
        for (int r = 0; r < w.mg; ++r) wt.emplace_back(r, r, wdiag[r]);
        W.setFromTriplets(wt.begin(), wt.end());
        GtWG = w.G.transpose() * W * w.G;
    }
    for (int k = 0; k < GtWG.outerSize(); ++k)
        for (SpMat::InnerIterator it(GtWG, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < w.A.outerSize(); ++k)
        for (SpMat::InnerIterator it(w.A, k); it; ++it) {
            trip.emplace_back(w.n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
            trip.emplace_back(static_cast<int>(it.col()), w.n + static_cast<int>(it.row()),
                              it.value());
        }
    for (int j = 0; j < w.n; ++j) trip.emplace_back(j, j, reg_x);
    for (int r = 0; r < w.me; ++r) trip.emplace_back(w.n + r, w.n + r, -reg_y);
    SpMat K(dim, dim);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

struct IpmResult {
    Eigen::VectorXd x, y, z, s;  // scaled iterates
    QpStatus status = QpStatus::iteration_limit;
    int iterations = 0;
    std::string message;
};

// Unscaled residual norms for termination.
struct RawResiduals {
    double r_dual = 0.0;
    double r_eq = 0.0;
    double r_in = 0.0;
    double comp = 0.0;
};

inline IpmResult run_ipm(const IpmWork& w, const QpOptions& opt,
                         const std::optional<Eigen::VectorXd>& scaled_guess,
                         const QuadraticProgram& raw, const IneqStack& stack) {
    IpmResult res;
    const int n = w.n, me = w.me, mg = w.mg;
    const double reg = 1e-9;

    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    SpMat K;
    double cur_reg_x = reg, cur_reg_y = reg;

    auto factor = [&](const Eigen::VectorXd& wdiag) -> bool {
        double reg_x = reg, reg_y = reg;
        for (int attempt = 0; attempt < 6; ++attempt) {
            K = build_kkt(w, wdiag, reg_x, reg_y);
            if (!analyzed) {
                ldlt.analyzePattern(K);
                analyzed = true;
            }
            ldlt.factorize(K);
            if (ldlt.info() == Eigen::Success) {
                cur_reg_x = reg_x;
                cur_reg_y = reg_y;
                return true;
            }
            reg_x *= 100.0;
            reg_y *= 100.0;
        }
        return false;
    };

    // Solve against the factored K with refinement that compensates the
    // static regularization (targets the unregularized augmented system).
    auto solve_aug = [&](const Eigen::VectorXd& rx, const Eigen::VectorXd& ry,
                         Eigen::VectorXd& dx, Eigen::VectorXd& dy) {
        Eigen::VectorXd rhs(n + me);
        rhs.head(n) = rx;
        if (me > 0) rhs.tail(me) = ry;
        Eigen::VectorXd sol = ldlt.solve(rhs);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd resid = rhs - K * sol;
            resid.head(n) += cur_reg_x * sol.head(n);
            if (me > 0) resid.tail(me) -= cur_reg_y * sol.tail(me);
            if (resid.lpNorm<Eigen::Infinity>() < 1e-14) break;
            sol += ldlt.solve(resid);
        }
        dx = sol.head(n);
        dy = me > 0 ? Eigen::VectorXd(sol.tail(me)) : Eigen::VectorXd();
    };

    // Starting point: equality-regularized least-squares solve with W = I.
    Eigen::VectorXd x, y, z, s;
    {
        if (!factor(Eigen::VectorXd::Ones(mg))) {
            res.message = "initial KKT factorization failed (Q not PSD within tolerance?)";
            throw SolverError("solve_qp: " + res.message);
        }
        Eigen::VectorXd dx, dy;
        solve_aug(-w.c + w.G.transpose() * w.h, w.b, dx, dy);
        x = scaled_guess ? *scaled_guess : dx;
        y = Eigen::VectorXd::Zero(me);
        if (mg > 0) {
            Eigen::VectorXd s_raw = w.h - w.G * x;
            const double mn = mg > 0 ? s_raw.minCoeff() : 1.0;
            const double shift = mn > 0.1 ? 0.0 : (0.1 - mn) + 1.0;
            s = s_raw.array() + shift;
            z = Eigen::VectorXd::Ones(mg);
        } else {
            s.resize(0);
            z.resize(0);
        }
    }

    const double tol = opt.tol;
    double prev_rin = kInf;
    int stall_count = 0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        // Raw (unscaled) residuals decide convergence.
        Eigen::VectorXd x_raw = x.cwiseProduct(w.sc.d);
        Eigen::VectorXd y_raw(me), z_raw(mg);
        for (int r = 0; r < me; ++r) y_raw[r] = w.sc.e_a[r] * y[r] / w.sc.gamma;
        for (int r = 0; r < mg; ++r) z_raw[r] = w.sc.e_g[r] * z[r] / w.sc.gamma;

        RawResiduals rr;
        {
            Eigen::VectorXd rd = raw.Q * x_raw + raw.c;
            if (me > 0) rd += raw.A_eq.transpose() * y_raw;
            if (mg > 0) rd += stack.G.transpose() * z_raw;
            rr.r_dual = n > 0 ? rd.lpNorm<Eigen::Infinity>() : 0.0;
            if (me > 0) rr.r_eq = (raw.A_eq * x_raw - raw.b_eq).lpNorm<Eigen::Infinity>();
            if (mg > 0) {
                Eigen::VectorXd viol = stack.G * x_raw - stack.h;
                rr.r_in = std::max(0.0, viol.maxCoeff());
                Eigen::VectorXd s_raw_units = stack.h - stack.G * x_raw;
                double comp = 0.0;
                for (int r = 0; r < mg; ++r)
                    comp = std::max(comp, std::abs(z_raw[r] * std::max(s_raw_units[r], 0.0)));
                rr.comp = comp;
            }
        }
        const double scale_d = std::max(1.0, raw.c.size() ? raw.c.lpNorm<Eigen::Infinity>() : 0.0);
        double hmax = 0.0;
        for (int r = 0; r < mg; ++r)
            if (std::isfinite(stack.h[r])) hmax = std::max(hmax, std::abs(stack.h[r]));
        const double scale_p =
            std::max(1.0, std::max(me ? raw.b_eq.lpNorm<Eigen::Infinity>() : 0.0, hmax));
        if (rr.r_dual <= 0.5 * tol * scale_d && rr.r_eq <= 0.5 * tol * scale_p &&
            rr.r_in <= 0.5 * tol * scale_p && rr.comp <= 0.5 * tol * scale_d) {
            res.status = QpStatus::optimal;
            res.iterations = iter;
            res.x = x;
            res.y = y;
            res.z = z;
            res.s = s;
            return res;
        }

        // Scaled residuals drive the Newton step.
        Eigen::VectorXd rd = w.Q * x + w.c;
        if (me > 0) rd += w.A.transpose() * y;
        if (mg > 0) rd += w.G.transpose() * z;
        Eigen::VectorXd rp = me > 0 ? Eigen::VectorXd(w.A * x - w.b) : Eigen::VectorXd();
        Eigen::VectorXd rg = mg > 0 ? Eigen::VectorXd(w.G * x + s - w.h) : Eigen::VectorXd();
        const double mu = mg > 0 ? s.dot(z) / mg : 0.0;

        // Divergence heuristics.
        const double obj_scaled = 0.5 * x.dot(w.Q * x) + w.c.dot(x);
        if (obj_scaled < -1e14 && rr.r_eq <= 1e-6 * scale_p && rr.r_in <= 1e-6 * scale_p) {
            res.status = QpStatus::unbounded;
            res.iterations = iter;
            res.x = x;
            res.y = y;
            res.z = z;
            res.s = s;
            res.message = "objective diverging on a feasible ray";
            return res;
        }
        const double dual_mag = std::max(me ? y.lpNorm<Eigen::Infinity>() : 0.0,
                                         mg ? z.lpNorm<Eigen::Infinity>() : 0.0);
        if (dual_mag > 1e12) break;
        if (mg > 0) {
            if (rr.r_in > 1e-8 && rr.r_in > 0.9999 * prev_rin)
                ++stall_count;
            else
                stall_count = 0;
            prev_rin = rr.r_in;
            if (stall_count > 25) break;
        }

        Eigen::VectorXd wdiag(mg);
        for (int r = 0; r < mg; ++r) wdiag[r] = z[r] / std::max(s[r], 1e-300);
        if (!factor(wdiag)) {
            res.message = "KKT factorization failed";
            break;
        }

        auto newton = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                          Eigen::VectorXd& dz, Eigen::VectorXd& ds) {
            // rc is the complementarity target: S dz + Z ds = rc.
            Eigen::VectorXd rhs_x = -rd;
            if (mg > 0) {
                Eigen::VectorXd zinv_rc(mg);
                for (int r = 0; r < mg; ++r) zinv_rc[r] = rc[r] / std::max(z[r], 1e-300);
                Eigen::VectorXd tmp = rg + zinv_rc;  // part multiplied by Dw
                Eigen::VectorXd dw_tmp(mg);
                for (int r = 0; r < mg; ++r) dw_tmp[r] = wdiag[r] * tmp[r];
                rhs_x -= w.G.transpose() * dw_tmp;
            }
            Eigen::VectorXd rhs_y = me > 0 ? Eigen::VectorXd(-rp) : Eigen::VectorXd();
            solve_aug(rhs_x, rhs_y, dx, dy);
            if (mg > 0) {
                ds = -rg - w.G * dx;
                dz.resize(mg);
                for (int r = 0; r < mg; ++r)
                    dz[r] = (rc[r] - z[r] * ds[r]) / std::max(s[r], 1e-300);
            } else {
                ds.resize(0);
                dz.resize(0);
            }
        };

        auto max_step = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
            double a = 1.0;
            for (int r = 0; r < v.size(); ++r)
                if (dv[r] < 0) a = std::min(a, -v[r] / dv[r]);
            return a;
        };

        Eigen::VectorXd dx, dy, dz, ds;
        if (mg > 0) {
            // Predictor.
            Eigen::VectorXd rc_aff(mg);
            for (int r = 0; r < mg; ++r) rc_aff[r] = -s[r] * z[r];
            newton(rc_aff, dx, dy, dz, ds);
            const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
            double mu_aff = 0.0;
            for (int r = 0; r < mg; ++r)
                mu_aff += (s[r] + a_aff * ds[r]) * (z[r] + a_aff * dz[r]);
            mu_aff /= mg;
            const double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3);
            // Corrector.
            Eigen::VectorXd rc(mg);
            for (int r = 0; r < mg; ++r) rc[r] = sigma * mu - s[r] * z[r] - ds[r] * dz[r];
            newton(rc, dx, dy, dz, ds);
            const double alpha = 0.99 * std::min(max_step(s, ds), max_step(z, dz));
            if (alpha < 1e-11) {
                ++stall_count;
                if (stall_count > 3) break;
            }
            x += alpha * dx;
            y += alpha * dy;
            z += alpha * dz;
            s += alpha * ds;
        } else {
            // Pure equality QP: one Newton step solves the KKT system.
            Eigen::VectorXd empty;
            newton(empty, dx, dy, dz, ds);
            x += dx;
            y += dy;
        }
        res.iterations = iter + 1;
    }

    res.x = x;
    res.y = y;
    res.z = z;
    res.s = s;
    res.status = QpStatus::iteration_limit;
    return res;
}

}  // namespace qpdetail

inline QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& opt = {});

namespace qpdetail {

// Elastic feasibility probe: minimize total constraint violation. A strictly
// positive optimum certifies infeasibility of the original program.
inline double elastic_violation(const QuadraticProgram& qp, const QpOptions& opt) {
    const IneqStack stack = build_ineq_stack(qp);
    const int n = qp.n;
    const int me = static_cast<int>(qp.A_eq.rows());
    const int mg = static_cast<int>(stack.G.rows());

    QuadraticProgram el;
    el.resize(n + mg + 2 * me);
    std::vector<Triplet> qt;
    for (int j = 0; j < n; ++j) qt.emplace_back(j, j, 1e-8);
    el.Q.setFromTriplets(qt.begin(), qt.end());
    for (int r = 0; r < mg; ++r) el.c[n + r] = 1.0;
    for (int r = 0; r < 2 * me; ++r) el.c[n + mg + r] = 1.0;

    // G x - t <= h
    std::vector<Triplet> gt;
    for (int k = 0; k < stack.G.outerSize(); ++k)
        for (SpMat::InnerIterator it(stack.G, k); it; ++it)
            gt.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int r = 0; r < mg; ++r) gt.emplace_back(r, n + r, -1.0);
    el.A_ineq.resize(mg, el.n);
    el.A_ineq.setFromTriplets(gt.begin(), gt.end());
    el.b_ineq = stack.h;

    // A x + t+ - t- = b
    std::vector<Triplet> at;
    for (int k = 0; k < qp.A_eq.outerSize(); ++k)
        for (SpMat::InnerIterator it(qp.A_eq, k); it; ++it)
            at.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int r = 0; r < me; ++r) {
        at.emplace_back(r, n + mg + r, 1.0);
        at.emplace_back(r, n + mg + me + r, -1.0);
    }
    el.A_eq.resize(me, el.n);
    el.A_eq.setFromTriplets(at.begin(), at.end());
    el.b_eq = qp.b_eq;

    for (int r = 0; r < mg + 2 * me; ++r) el.lower[n + r] = 0.0;

    QpOptions eopt;
    eopt.tol = std::max(opt.tol, 1e-9);
    eopt.max_iter = opt.max_iter;
    eopt.allow_elastic_probe = false;
    const QpSolution sol = solve_qp(el, eopt);
    if (sol.status != QpStatus::optimal) return -1.0;  // probe inconclusive
    double viol = 0.0;
    for (int r = n; r < el.n; ++r) viol += std::max(0.0, sol.x[r]);
    return viol;
}

}  // namespace qpdetail

inline QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& opt) {
    qp.check_dimensions();
    QpSolution sol;
    const qpdetail::IneqStack stack = qpdetail::build_ineq_stack(qp);

    // Immediate bound contradictions (lower > upper) short-circuit.
    for (int j = 0; j < qp.n; ++j)
        if (qp.lower[j] > qp.upper[j] + 1e-12) {
            sol.status = QpStatus::infeasible;
            sol.message = "contradictory bounds on variable " + std::to_string(j);
            return sol;
        }

    qpdetail::IpmWork w;
    w.Q = qp.Q;
    w.c = qp.c;
    w.A = qp.A_eq;
    w.b = qp.b_eq;
    w.G = stack.G;
    w.h = stack.h;
    w.sc = qpdetail::ruiz_equilibrate(w.Q, w.c, w.A, w.b, w.G, w.h);
    w.n = qp.n;
    w.me = static_cast<int>(qp.A_eq.rows());
    w.mg = static_cast<int>(stack.G.rows());

    std::optional<Eigen::VectorXd> guess;
    if (opt.initial_guess) {
        Eigen::VectorXd g = *opt.initial_guess;
        if (g.size() != qp.n) throw SolverError("solve_qp: initial guess dimension mismatch");
        guess = g.cwiseQuotient(w.sc.d);
    }

    qpdetail::IpmResult r = qpdetail::run_ipm(w, opt, guess, qp, stack);
    sol.iterations = r.iterations;
    sol.message = r.message;

    if (r.status == QpStatus::iteration_limit && opt.allow_elastic_probe) {
        const double viol = qpdetail::elastic_violation(qp, opt);
        const double feas_eps =
            1e-7 * (1.0 + std::max(qp.b_eq.size() ? qp.b_eq.lpNorm<Eigen::Infinity>() : 0.0,
                                   stack.h.size() ? stack.h.lpNorm<Eigen::Infinity>() : 0.0));
        if (viol > feas_eps) {
            sol.status = QpStatus::infeasible;
            sol.message = "elastic probe violation " + format_double(viol);
            return sol;
        }
    }

    // Unscale.
    sol.x = r.x.cwiseProduct(w.sc.d);
    sol.duals_eq.resize(w.me);
    for (int k = 0; k < w.me; ++k)
        sol.duals_eq[k] = -w.sc.e_a[k] * r.y[k] / w.sc.gamma;  // shadow-price sign
    Eigen::VectorXd z_raw(w.mg);
    for (int k = 0; k < w.mg; ++k) z_raw[k] = w.sc.e_g[k] * r.z[k] / w.sc.gamma;
    sol.duals_ineq = z_raw.head(stack.m_in);
    sol.duals_upper = Eigen::VectorXd::Zero(qp.n);
    sol.duals_lower = Eigen::VectorXd::Zero(qp.n);
    int row = stack.m_in;
    for (int j : stack.upper_vars) sol.duals_upper[j] = z_raw[row++];
    for (int j : stack.lower_vars) sol.duals_lower[j] = z_raw[row++];
    sol.objective = qp.objective_at(sol.x);
    sol.status = r.status;
    return sol;
}

/// Residual check recomputed from the raw problem data (independent of the
/// solver's internal scaling). Pass iff all four norms are within tol.
inline KktReport check_kkt(const QuadraticProgram& qp, const QpSolution& sol, double tol) {
    KktReport rep;
    Eigen::VectorXd st = qp.Q * sol.x + qp.c;
    if (qp.A_eq.rows() > 0) st -= qp.A_eq.transpose() * sol.duals_eq;
    if (qp.A_ineq.rows() > 0) st += qp.A_ineq.transpose() * sol.duals_ineq;
    st += sol.duals_upper;
    st -= sol.duals_lower;
    rep.stationarity = qp.n > 0 ? st.lpNorm<Eigen::Infinity>() : 0.0;

    double primal = 0.0;
    if (qp.A_eq.rows() > 0)
        primal = std::max(primal, (qp.A_eq * sol.x - qp.b_eq).lpNorm<Eigen::Infinity>());
    if (qp.A_ineq.rows() > 0) {
        Eigen::VectorXd v = qp.A_ineq * sol.x - qp.b_ineq;
        primal = std::max(primal, std::max(0.0, v.maxCoeff()));
    }
    for (int j = 0; j < qp.n; ++j) {
        if (std::isfinite(qp.lower[j])) primal = std::max(primal, qp.lower[j] - sol.x[j]);
        if (std::isfinite(qp.upper[j])) primal = std::max(primal, sol.x[j] - qp.upper[j]);
    }
    rep.primal = primal;

    double dual = 0.0;
    if (sol.duals_ineq.size() > 0) dual = std::max(dual, -sol.duals_ineq.minCoeff());
    if (sol.duals_lower.size() > 0) dual = std::max(dual, -sol.duals_lower.minCoeff());
    if (sol.duals_upper.size() > 0) dual = std::max(dual, -sol.duals_upper.minCoeff());
    rep.dual = std::max(0.0, dual);

    double comp = 0.0;
    if (qp.A_ineq.rows() > 0) {
        Eigen::VectorXd slack = qp.b_ineq - qp.A_ineq * sol.x;
        for (int r = 0; r < slack.size(); ++r)
            comp = std::max(comp, std::abs(sol.duals_ineq[r] * slack[r]));
    }
    for (int j = 0; j < qp.n; ++j) {
        if (std::isfinite(qp.lower[j]))
            comp = std::max(comp, std::abs(sol.duals_lower[j] * (sol.x[j] - qp.lower[j])));
        if (std::isfinite(qp.upper[j]))
            comp = std::max(comp, std::abs(sol.duals_upper[j] * (qp.upper[j] - sol.x[j])));
    }
    rep.complementarity = comp;

    rep.pass = rep.stationarity <= tol && rep.primal <= tol && rep.dual <= tol &&
               rep.complementarity <= tol;
    return rep;
}

}  // namespace gridclear
