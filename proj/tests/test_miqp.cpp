#include <catch2/catch_amalgamated.hpp>

#include "gridclear/miqp.hpp"

using namespace gridclear;

namespace {

MixedIntegerQp scalar_binary(double target) {
    // min (x - target)^2, x in {0,1}
    MixedIntegerQp p;
    p.qp.resize(1);
    std::vector<Triplet> t{{0, 0, 2.0}};
    p.qp.Q.setFromTriplets(t.begin(), t.end());
    p.qp.c[0] = -2.0 * target;
    p.qp.c0 = target * target;
    p.qp.lower[0] = 0.0;
    p.qp.upper[0] = 1.0;
    p.binary_indices = {0};
    return p;
}

}  // namespace

TEST_CASE("binary scalar rounds to the nearer point") {
    auto sol = solve_miqp(scalar_binary(0.4));
    REQUIRE(sol.status == MiqpStatus::optimal);
    CHECK(sol.x[0] == 0.0);
    CHECK(sol.objective == Catch::Approx(0.16).margin(1e-8));
}

TEST_CASE("tie at 0.5 resolves to the down branch") {
    auto sol = solve_miqp(scalar_binary(0.5));
    REQUIRE(sol.status == MiqpStatus::optimal);
    CHECK(sol.x[0] == 0.0);
    CHECK(sol.objective == Catch::Approx(0.25).margin(1e-8));
}

TEST_CASE("infeasible root relaxation reports infeasible") {
    auto p = scalar_binary(0.5);
    p.qp.A_ineq.resize(1, 1);
    std::vector<Triplet> t{{0, 0, 1.0}};
    p.qp.A_ineq.setFromTriplets(t.begin(), t.end());
    p.qp.b_ineq.resize(1);
    p.qp.b_ineq[0] = -1.0;  // x <= -1 contradicts x >= 0
    auto sol = solve_miqp(p);
    CHECK(sol.status == MiqpStatus::infeasible);
}

TEST_CASE("random small MIQPs match brute-force enumeration") {
    Rng rng(777);
    for (int trial = 0; trial < 30; ++trial) {
        const int nb = 2 + static_cast<int>(rng.uniform_index(5));  // 2..6 binaries
        const int nc = 2;                                           // continuous vars
        const int n = nb + nc;
        MixedIntegerQp p;
        p.qp.resize(n);
        std::vector<Triplet> qt;
        for (int i = 0; i < n; ++i) qt.emplace_back(i, i, 0.2 + rng.uniform(0.0, 2.0));
        p.qp.Q.setFromTriplets(qt.begin(), qt.end());
        for (int i = 0; i < n; ++i) p.qp.c[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < nb; ++i) {
            p.qp.lower[i] = 0.0;
            p.qp.upper[i] = 1.0;
            p.binary_indices.push_back(i);
        }
        for (int i = nb; i < n; ++i) {
            p.qp.lower[i] = -2.0;
            p.qp.upper[i] = 2.0;
        }
        // A coupling row keeps the continuous part interesting.
        p.qp.A_ineq.resize(1, n);
        std::vector<Triplet> at;
        for (int i = 0; i < n; ++i) at.emplace_back(0, i, rng.uniform(-1.0, 1.0));
        p.qp.A_ineq.setFromTriplets(at.begin(), at.end());
        p.qp.b_ineq.resize(1);
        p.qp.b_ineq[0] = rng.uniform(0.5, 2.0);

        auto sol = solve_miqp(p, 0.0);

        // Enumeration oracle: fix every binary pattern, solve the QP.
        double best = kInf;
        bool any = false;
        for (int mask = 0; mask < (1 << nb); ++mask) {
            QuadraticProgram qp = p.qp;
            for (int i = 0; i < nb; ++i) {
                const double v = (mask >> i) & 1 ? 1.0 : 0.0;
                qp.lower[i] = v;
                qp.upper[i] = v;
            }
            auto s = solve_qp(qp);
            if (s.status == QpStatus::optimal) {
                any = true;
                best = std::min(best, s.objective);
            }
        }
        if (!any) {
            CHECK(sol.status == MiqpStatus::infeasible);
            continue;
        }
        REQUIRE(sol.status == MiqpStatus::optimal);
        INFO("trial " << trial << " nodes=" << sol.nodes_explored);
        CHECK(sol.objective == Catch::Approx(best).epsilon(1e-6).margin(1e-8));
        for (int i = 0; i < nb; ++i) CHECK((sol.x[i] == 0.0 || sol.x[i] == 1.0));
    }
}
