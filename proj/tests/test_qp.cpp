#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "gridclear/common.hpp"
#include "gridclear/qp.hpp"

using namespace gridclear;

namespace {

QuadraticProgram make_qp(int n) {
    QuadraticProgram qp;
    qp.resize(n);
    return qp;
}

void set_diag(QuadraticProgram& qp, const std::vector<double>& d) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i)
        t.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    qp.Q.setFromTriplets(t.begin(), t.end());
}

}  // namespace

TEST_CASE("one-variable bound solve: min x^2 s.t. x >= 1") {
    auto qp = make_qp(1);
    set_diag(qp, {2.0});
    qp.lower[0] = 1.0;
    auto sol = solve_qp(qp);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-7));
    CHECK(sol.objective == Catch::Approx(1.0).margin(1e-7));
    CHECK(sol.duals_lower[0] == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("symmetric equality: min x^2+y^2 s.t. x+y=2") {
    auto qp = make_qp(2);
    set_diag(qp, {2.0, 2.0});
    qp.A_eq.resize(1, 2);
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 1.0}};
    qp.A_eq.setFromTriplets(t.begin(), t.end());
    qp.b_eq.resize(1);
    qp.b_eq[0] = 2.0;
    auto sol = solve_qp(qp);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(sol.x[1] == Catch::Approx(1.0).margin(1e-8));
    // Shadow-price convention: d(opt)/db = +2 at b = 2.
    CHECK(sol.duals_eq[0] == Catch::Approx(2.0).margin(1e-6));

    SECTION("exact solution passes check_kkt with zero-ish residuals") {
        auto rep = check_kkt(qp, sol, 1e-7);
        CHECK(rep.pass);
    }
    SECTION("perturbing x by 1e-3 trips stationarity by about 2e-3") {
        QpSolution bad = sol;
        bad.x[0] += 1e-3;
        auto rep = check_kkt(qp, bad, 1e-6);
        CHECK_FALSE(rep.pass);
        CHECK(rep.stationarity == Catch::Approx(2e-3).epsilon(0.05));
    }
}

TEST_CASE("clipped unconstrained optimum: min (x-3)^2 with x in [0,2]") {
    auto qp = make_qp(1);
    set_diag(qp, {2.0});
    qp.c[0] = -6.0;
    qp.c0 = 9.0;
    qp.lower[0] = 0.0;
    qp.upper[0] = 2.0;
    auto sol = solve_qp(qp);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.x[0] == Catch::Approx(2.0).margin(1e-7));
    CHECK(sol.objective == Catch::Approx(1.0).margin(1e-6));
    CHECK(sol.duals_upper[0] == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("infeasible program is certified by the elastic probe") {
    auto qp = make_qp(1);
    set_diag(qp, {2.0});
    qp.lower[0] = 3.0;
    qp.upper[0] = kInf;
    qp.A_ineq.resize(1, 1);
    std::vector<Triplet> t{{0, 0, 1.0}};
    qp.A_ineq.setFromTriplets(t.begin(), t.end());
    qp.b_ineq.resize(1);
    qp.b_ineq[0] = 1.0;  // x <= 1 contradicts x >= 3
    auto sol = solve_qp(qp);
    CHECK(sol.status == QpStatus::infeasible);
}

TEST_CASE("randomized QPs: KKT self-consistency and optimality vs feasible points") {
    Rng rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5));
        auto qp = make_qp(n);
        // PSD Q = L L^T with unit-scale entries.
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) L(i, j) = rng.uniform(-1.0, 1.0);
        Eigen::MatrixXd Qd = L * L.transpose();
        std::vector<Triplet> qt;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) qt.emplace_back(i, j, Qd(i, j));
        qp.Q.setFromTriplets(qt.begin(), qt.end());
        for (int i = 0; i < n; ++i) qp.c[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            qp.lower[i] = -2.0 - rng.uniform(0.0, 1.0);
            qp.upper[i] = 2.0 + rng.uniform(0.0, 1.0);
        }
        // One equality through a random interior point, one loose inequality.
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.uniform(-1.0, 1.0);
        qp.A_eq.resize(1, n);
        std::vector<Triplet> at;
        Eigen::VectorXd arow(n);
        for (int i = 0; i < n; ++i) {
            arow[i] = rng.uniform(-1.0, 1.0);
            at.emplace_back(0, i, arow[i]);
        }
        qp.A_eq.setFromTriplets(at.begin(), at.end());
        qp.b_eq.resize(1);
        qp.b_eq[0] = arow.dot(x0);
        qp.A_ineq.resize(1, n);
        std::vector<Triplet> gt;
        Eigen::VectorXd grow(n);
        for (int i = 0; i < n; ++i) {
            grow[i] = rng.uniform(-1.0, 1.0);
            gt.emplace_back(0, i, grow[i]);
        }
        qp.A_ineq.setFromTriplets(gt.begin(), gt.end());
        qp.b_ineq.resize(1);
        qp.b_ineq[0] = grow.dot(x0) + rng.uniform(0.1, 1.0);

        auto sol = solve_qp(qp);
        REQUIRE(sol.status == QpStatus::optimal);
        auto rep = check_kkt(qp, sol, 1e-7);
        INFO("trial " << trial << " stationarity=" << rep.stationarity << " primal=" << rep.primal
                      << " comp=" << rep.complementarity);
        CHECK(rep.pass);

        // Objective no worse than at feasible points projected onto the equality.
        for (int probe = 0; probe < 5; ++probe) {
            Eigen::VectorXd xp(n);
            for (int i = 0; i < n; ++i)
                xp[i] = x0[i] + rng.uniform(-0.3, 0.3);
            // Project back onto the equality row.
            xp -= arow * ((arow.dot(xp) - qp.b_eq[0]) / arow.squaredNorm());
            bool feas = (qp.A_ineq * xp - qp.b_ineq).maxCoeff() <= 0;
            for (int i = 0; i < n && feas; ++i)
                feas = xp[i] >= qp.lower[i] && xp[i] <= qp.upper[i];
            if (!feas) continue;
            CHECK(sol.objective <= qp.objective_at(xp) + 1e-6);
        }
    }
}

TEST_CASE("equality duals price perturbations") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3;
        auto qp = make_qp(n);
        set_diag(qp, {2.0 + rng.uniform(0.0, 1.0), 2.0 + rng.uniform(0.0, 1.0),
                      2.0 + rng.uniform(0.0, 1.0)});
        for (int i = 0; i < n; ++i) qp.c[i] = rng.uniform(-1.0, 1.0);
        qp.A_eq.resize(1, n);
        std::vector<Triplet> at{{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, rng.uniform(0.5, 1.5)}};
        qp.A_eq.setFromTriplets(at.begin(), at.end());
        qp.b_eq.resize(1);
        qp.b_eq[0] = rng.uniform(-1.0, 1.0);

        auto sol = solve_qp(qp);
        REQUIRE(sol.status == QpStatus::optimal);
        const double eps = 1e-5;
        QuadraticProgram qp2 = qp;
        qp2.b_eq[0] += eps;
        auto sol2 = solve_qp(qp2);
        REQUIRE(sol2.status == QpStatus::optimal);
        const double fd = (sol2.objective - sol.objective) / eps;
        CHECK(fd == Catch::Approx(sol.duals_eq[0]).margin(1e-3));
    }
}

TEST_CASE("dimension mismatch is rejected") {
    auto qp = make_qp(2);
    set_diag(qp, {1.0, 1.0});
    qp.c.resize(3);
    CHECK_THROWS_AS(solve_qp(qp), SolverError);
}
