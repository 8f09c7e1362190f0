// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <nnsimplify/rational_lp.hpp>

using namespace nnsimplify;

namespace {

ConstraintSystem box_system(std::size_t n, const Rational& lo, const Rational& hi) {
    ConstraintSystem sys(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Rational> row(n, Rational(0));
        row[j] = 1;
        sys.add(row, hi);
        for (Rational& c : row) c = 0;
        row[j] = -1;
        sys.add(std::move(row), -lo);
    }
    return sys;
}

}  // namespace

TEST_CASE("double conversion is exact") {
    for (double x : {0.0, 1.0, -2.0, 0.5, 0.1, -1.3, 4.2, 1e-300, 3e200}) {
        CHECK(to_double(to_rational(x)) == x);
    }
    CHECK(to_rational(0.5) == Rational(1, 2));
    CHECK(to_rational(-2.0) == Rational(-2));
}

TEST_CASE("simplex maximizes over a box") {
    ConstraintSystem sys = box_system(3, Rational(-1), Rational(1));
    const LpSolution sol = maximize(sys, {Rational(2), Rational(-3), Rational(1)});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Rational(6));
    CHECK(sol.point == std::vector<Rational>{Rational(1), Rational(-1), Rational(1)});
}

TEST_CASE("simplex detects infeasibility") {
    ConstraintSystem sys(1);
    sys.add({Rational(1)}, Rational(0));    // x <= 0
    sys.add({Rational(-1)}, Rational(-1));  // x >= 1
    const LpSolution sol = maximize(sys, {Rational(1)});
    CHECK(sol.status == LpStatus::Infeasible);
    CHECK_FALSE(fourier_motzkin_feasible(sys));
}

TEST_CASE("simplex handles a diagonal cut") {
    ConstraintSystem sys = box_system(2, Rational(0), Rational(1));
    sys.add({Rational(1), Rational(1)}, Rational(1));  // x + y <= 1
    const LpSolution sol = maximize(sys, {Rational(1), Rational(2)});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Rational(2));
    CHECK(sol.point[1] == Rational(1));
}

TEST_CASE("simplex agrees with vertex enumeration and fourier-motzkin on random systems") {
    std::mt19937_64 rng(321);
    int feasible_count = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 3;
        ConstraintSystem sys = box_system(n, Rational(-2), Rational(2));
        const std::size_t extra = 1 + rng() % 4;
        for (std::size_t i = 0; i < extra; ++i) {
            std::vector<Rational> row(n);
            for (Rational& c : row) {
                c = Rational(static_cast<int>(rng() % 9) - 4);
            }
            sys.add(std::move(row), Rational(static_cast<int>(rng() % 11) - 5, 2));
        }
        std::vector<Rational> objective(n);
        for (Rational& c : objective) c = Rational(static_cast<int>(rng() % 9) - 4);

        const LpSolution via_simplex = maximize(sys, objective);
        const auto via_vertices = vertex_enumerate_max(sys, objective);
        const bool fm = fourier_motzkin_feasible(sys);

        if (via_simplex.status == LpStatus::Optimal) {
            ++feasible_count;
            REQUIRE(fm);
            REQUIRE(via_vertices.has_value());
            REQUIRE(via_vertices->value == via_simplex.value);
            // The simplex point must satisfy every constraint.
            for (std::size_t i = 0; i < sys.rows.size(); ++i) {
                Rational lhs = 0;
                for (std::size_t j = 0; j < n; ++j) lhs += sys.rows[i][j] * via_simplex.point[j];
                REQUIRE(lhs <= sys.rhs[i]);
            }
        } else {
            REQUIRE_FALSE(fm);
            REQUIRE_FALSE(via_vertices.has_value());
        }
    }
    CHECK(feasible_count > 50);  // the suite must exercise both outcomes
}

TEST_CASE("degenerate equality-like systems stay solvable") {
    // x <= 1 and x >= 1 pin the variable.
    ConstraintSystem sys(2);
    sys.add({Rational(1), Rational(0)}, Rational(1));
    sys.add({Rational(-1), Rational(0)}, Rational(-1));
    sys.add({Rational(0), Rational(1)}, Rational(3));
    sys.add({Rational(0), Rational(-1)}, Rational(3));
    const LpSolution sol = maximize(sys, {Rational(1), Rational(1)});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Rational(4));
}
