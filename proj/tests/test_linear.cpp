#include "doctest.h"

#include <cmath>

#include "tslab/linear.hpp"

using namespace tslab;

namespace {
CoefficientExpr C(const std::string& s) { return CoefficientExpr::parse(s); }

LinearSystem scalar_system(const std::string& a, const std::string& f, TimeScale ts) {
    return LinearSystem({{C(a)}}, {C(f)}, std::move(ts));
}
} // namespace

TEST_CASE("fundamental matrix on the integers follows the product recursion") {
    auto sys = scalar_system("0-0.5", "0", TimeScale::integers(-4, 10));
    auto X = fundamental_matrix(sys, 0.0);
    for (int t = -4; t <= 10; ++t)
        CHECK(grid_matrix_at(X, t, 1)(0, 0) ==
              doctest::Approx(std::pow(0.5, t)).epsilon(1e-12));
}

TEST_CASE("fundamental matrix identities") {
    auto sys0 = scalar_system("0", "0", TimeScale::periodic_union(1, 1, 0, 6));
    auto X0 = fundamental_matrix(sys0, 0.0);
    for (double t : X0.times()) CHECK(grid_matrix_at(X0, t, 1)(0, 0) == doctest::Approx(1.0));

    auto sysr = scalar_system("2", "0", TimeScale::reals(0, 1));
    auto Xr = fundamental_matrix(sysr, 0.0);
    CHECK(grid_matrix_at(Xr, 1.0, 1)(0, 0) ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-6));

    // Exact scattered-point recursion X(sigma(s)) = (I + mu A) X(s).
    auto pu = TimeScale::periodic_union(1, 1, 0, 8);
    auto sysp = LinearSystem({{C("0-0.3"), C("0.1")}, {C("0"), C("0-0.2")}},
                             {C("0"), C("0")}, pu);
    auto Xp = fundamental_matrix(sysp, 0.0);
    for (double s : pu.scattered_points()) {
        double mu = pu.graininess(s);
        Eigen::MatrixXd lhs = grid_matrix_at(Xp, pu.sigma(s), 2);
        Eigen::MatrixXd rhs =
            (Eigen::MatrixXd::Identity(2, 2) + mu * sysp.A_at(s)) * grid_matrix_at(Xp, s, 2);
        CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("check_dichotomy margins") {
    auto ts = TimeScale::integers(0, 40);
    auto sys = scalar_system("0-0.5", "0", ts);
    DichotomyData d;
    d.P = Eigen::MatrixXd::Identity(1, 1);
    d.k = 1.0;
    d.alpha = 0.5;
    d.fundamental = fundamental_matrix(sys, 0.0);
    auto rep = check_dichotomy(sys, d, 400);
    CHECK(rep.holds); // 0.5^n <= (2/3)^n

    d.alpha = 1.5; // 1/(1+1.5) = 0.4 < 0.5: decay claim too strong
    auto bad = check_dichotomy(sys, d, 400);
    CHECK(!bad.holds);
    CHECK(bad.worst_margin_forward < -1e-9);
    CHECK(bad.witness_t > bad.witness_s); // witness pair reported

    // Identity dynamics admit no dichotomy with P = I.
    auto sid = scalar_system("0", "0", ts);
    DichotomyData di;
    di.P = Eigen::MatrixXd::Identity(1, 1);
    di.k = 2.0;
    di.alpha = 0.3;
    di.fundamental = fundamental_matrix(sid, 0.0);
    CHECK(!check_dichotomy(sid, di, 400).holds);
}

TEST_CASE("diagonal dichotomy") {
    // Equality case: on the reals with c = 1, alpha = 1 and the margin is flat zero.
    auto r = TimeScale::reals(0, 10);
    auto d = diagonal_dichotomy({C("1")}, r);
    CHECK(d.alpha == doctest::Approx(1.0));
    CHECK(d.k == doctest::Approx(1.0));
    auto sys = scalar_system("0-1", "0", r);
    auto rep = check_dichotomy(sys, d, 500);
    CHECK(rep.holds);
    CHECK(rep.worst_margin_forward >= -1e-9);
    CHECK(rep.worst_margin_forward <= 1e-6);

    auto z = TimeScale::integers(0, 30);
    auto dz = diagonal_dichotomy({C("0.5")}, z);
    auto sysz = scalar_system("0-0.5", "0", z);
    CHECK(check_dichotomy(sysz, dz, 400).holds);

    CHECK_THROWS_AS(diagonal_dichotomy({C("abs(sin(t))")}, TimeScale::reals(0, 20)),
                    DomainError); // inf 0
    CHECK_THROWS_AS(diagonal_dichotomy({C("1")}, TimeScale::integers(0, 10)),
                    RegressivityError); // 1 - mu c = 0
}

TEST_CASE("lemma41 preconditions") {
    auto r = TimeScale::reals(0, 10);
    auto s1 = scalar_system("0-1", "0", r);
    auto rep1 = lemma41_preconditions(s1, 200);
    CHECK(rep1.bounded);
    CHECK(rep1.max_inv_a == doctest::Approx(1.0));
    CHECK(rep1.max_inv_i_mu_a == doctest::Approx(1.0));

    auto s2 = scalar_system("0-(3+abs(sin(t)))", "0", r);
    auto rep2 = lemma41_preconditions(s2, 2000);
    CHECK(rep2.max_inv_a == doctest::Approx(1.0 / 3.0).epsilon(1e-4));

    auto s3 = scalar_system("0-1", "0", TimeScale::integers(0, 10));
    auto rep3 = lemma41_preconditions(s3, 10);
    CHECK(rep3.singular_i_mu_a > 0); // I + mu A = 0 on Z
    CHECK(!rep3.bounded);
}

TEST_CASE("bounded solution oracles") {
    // Z, a = 0.5, f = 1: geometric series sums to 2.
    auto z = TimeScale::integers(-60, 10);
    auto sysz = scalar_system("0-0.5", "1", z);
    auto dz = diagonal_dichotomy({C("0.5")}, z);
    auto solz = bounded_solution(sysz, dz, 1e-6);
    CHECK(solz.tail_bound <= 1e-6);
    for (double t = 0; t <= 10; t += 1)
        CHECK(solz.x.value_at(t)[0] == doctest::Approx(2.0).epsilon(1e-6));

    // R, a = 1, f = 1: integral of e^{-u} is 1.
    auto r = TimeScale::reals(-30, 5);
    auto sysr = scalar_system("0-1", "1", r);
    auto dr = diagonal_dichotomy({C("1")}, r);
    auto solr = bounded_solution(sysr, dr, 1e-6);
    for (double t : {0.0, 2.0, 5.0})
        CHECK(solr.x.value_at(t)[0] == doctest::Approx(1.0).epsilon(1e-6));

    // f = 0 gives the zero solution.
    auto sys0 = scalar_system("0-1", "0", r);
    auto sol0 = bounded_solution(sys0, dr, 1e-6);
    CHECK(sol0.x.max_abs() <= 1e-15);

    // Window too small for the requested tolerance.
    auto small = TimeScale::integers(-5, 5);
    auto syss = scalar_system("0-0.5", "1", small);
    auto ds = diagonal_dichotomy({C("0.5")}, small);
    CHECK_THROWS_AS(bounded_solution(syss, ds, 1e-9), ConvergenceError);
}

TEST_CASE("bounded solution satisfies the dynamic equation") {
    auto pu = TimeScale::periodic_union(1, 1, -40, 10);
    auto sys = scalar_system("0-(0.6+0.1*sin(t))", "0.5+0.2*cos(t)", pu);
    auto d = diagonal_dichotomy({C("0.6+0.1*sin(t)")}, pu);
    auto sol = bounded_solution(sys, d, 1e-5);
    const auto& x = sol.x;
    // Exact at scattered points.
    for (double s : pu.scattered_points()) {
        if (!x.covers(s) || !x.covers(pu.sigma(s))) continue;
        double mu = pu.graininess(s);
        double lhs = x.value_at(pu.sigma(s))[0];
        double rhs = x.value_at(s)[0] +
                     mu * (sys.A_at(s)(0, 0) * x.value_at(s)[0] + sys.f_at(s)(0));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
    // Finite-difference residual at dense nodes.
    int checked = 0;
    for (size_t i = 0; i < x.size(); i += 37) {
        double t = x.times()[i];
        if (pu.graininess(t) > 0 || t >= x.t_back() - 0.05 || t <= x.t_front() + 0.05)
            continue;
        double lhs = delta_derivative(x, t);
        double rhs = sys.A_at(t)(0, 0) * x.value_at(t)[0] + sys.f_at(t)(0);
        CHECK(std::fabs(lhs - rhs) <= 1e-4);
        ++checked;
    }
    CHECK(checked > 3);
}

TEST_CASE("bounded solution is linear in the forcing") {
    auto z = TimeScale::integers(-50, 10);
    auto d = diagonal_dichotomy({C("0.4")}, z);
    auto s1 = scalar_system("0-0.4", "1", z);
    auto s2 = scalar_system("0-0.4", "0.3*sin(t)", z);
    auto s12 = scalar_system("0-0.4", "1+0.3*sin(t)", z);
    double tol = 1e-5;
    auto x1 = bounded_solution(s1, d, tol);
    auto x2 = bounded_solution(s2, d, tol);
    auto x12 = bounded_solution(s12, d, tol);
    for (double t = 0; t <= 10; t += 2) {
        CHECK(x12.x.value_at(t)[0] ==
              doctest::Approx(x1.x.value_at(t)[0] + x2.x.value_at(t)[0]).epsilon(2 * tol));
    }
}

TEST_CASE("closed-form convolution on Z") {
    auto z = TimeScale::integers(-50, 8);
    double c = 0.35;
    auto f = [](double s) { return 0.3 + 0.2 * std::sin(s); };
    auto sys = scalar_system("0-0.35", "0.3+0.2*sin(t)", z);
    auto d = diagonal_dichotomy({C("0.35")}, z);
    auto sol = bounded_solution(sys, d, 1e-6);
    for (double t = 0; t <= 8; t += 1) {
        double expect = 0.0;
        for (double s = -50; s < t; s += 1) expect += std::pow(1 - c, t - 1 - s) * f(s);
        CHECK(sol.x.value_at(t)[0] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("two-sided dichotomy with a nontrivial projection") {
    auto r = TimeScale::reals(-20, 20);
    auto sys = LinearSystem({{C("0-1"), C("0")}, {C("0"), C("1")}}, {C("1"), C("1")}, r);
    DichotomyData d;
    d.P = Eigen::MatrixXd::Zero(2, 2);
    d.P(0, 0) = 1.0;
    d.k = 1.5;
    d.alpha = 1.0;
    d.fundamental = fundamental_matrix(sys, 0.0);
    CHECK(check_dichotomy(sys, d, 300).holds);
    auto sol = bounded_solution(sys, d, 1e-3);
    for (double t : {-2.0, 0.0, 3.0}) {
        CHECK(sol.x.value_at(t)[0] == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(sol.x.value_at(t)[1] == doctest::Approx(-1.0).epsilon(1e-3));
    }
}

TEST_CASE("non-regressive construction is recorded and enforced on use") {
    auto z = TimeScale::integers(0, 10);
    auto sys = scalar_system("0-1", "0", z); // 1 - mu = 0 on Z
    CHECK(!sys.regressive());
    CHECK_THROWS_AS(fundamental_matrix(sys, 0.0), RegressivityError);
}
