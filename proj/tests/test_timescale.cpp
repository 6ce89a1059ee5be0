#include "doctest.h"

#include <cmath>
#include <random>

#include "tslab/timescale.hpp"

using namespace tslab;

TEST_CASE("generator traces") {
    auto z = TimeScale::integers(0, 3);
    REQUIRE(z.intervals().size() == 4);
    CHECK(z.intervals()[0].lo == 0.0);
    CHECK(z.intervals()[3].lo == 3.0);

    auto r = TimeScale::reals(0, 1);
    REQUIRE(r.intervals().size() == 1);
    CHECK(r.intervals()[0].lo == 0.0);
    CHECK(r.intervals()[0].hi == 1.0);

    // Enumerating k(a+b)+[0,a] on [0,4] gives [0,1], [2,3], [4,4].
    auto pu = TimeScale::periodic_union(1, 1, 0, 4);
    REQUIRE(pu.intervals().size() == 3);
    CHECK(pu.intervals()[0].lo == doctest::Approx(0.0));
    CHECK(pu.intervals()[0].hi == doctest::Approx(1.0));
    CHECK(pu.intervals()[1].lo == doctest::Approx(2.0));
    CHECK(pu.intervals()[1].hi == doctest::Approx(3.0));
    CHECK(pu.intervals()[2].lo == doctest::Approx(4.0));
    CHECK(pu.intervals()[2].hi == doctest::Approx(4.0));

    auto st = TimeScale::step(0.5, 0, 2);
    CHECK(st.intervals().size() == 5);

    CHECK_THROWS_AS(TimeScale::reals(1, 1), DomainError);
    CHECK_THROWS_AS(TimeScale::periodic_union(0, 1, 0, 4), DomainError);
    CHECK_THROWS_AS(TimeScale::integers(0.2, 0.8), DomainError); // empty trace
}

TEST_CASE("jump operators and graininess") {
    auto z = TimeScale::integers(0, 10);
    CHECK(z.sigma(3) == 4.0);
    CHECK(z.rho_back(3) == 2.0);
    CHECK(z.graininess(3) == 1.0);
    CHECK(z.sigma(10) == 10.0);  // window maximum, flagged edge
    CHECK(z.rho_back(0) == 0.0);
    CHECK_THROWS_AS(z.sigma(0.5), DomainError);

    auto r = TimeScale::reals(0, 1);
    CHECK(r.sigma(0.5) == 0.5);
    CHECK(r.rho_back(0.5) == 0.5);
    CHECK(r.graininess(0.5) == 0.0);

    auto pu = TimeScale::periodic_union(1, 1, 0, 6);
    CHECK(pu.sigma(1) == 2.0);
    CHECK(pu.rho_back(2) == 1.0);
    CHECK(pu.graininess(1) == 1.0);
    CHECK(pu.graininess(0.5) == 0.0);
    CHECK(pu.sup_graininess() == 1.0);
    CHECK(z.sup_graininess() == 1.0);
    CHECK(r.sup_graininess() == 0.0);
}

TEST_CASE("point classification consistent with jumps") {
    auto pu = TimeScale::periodic_union(1, 1, 0, 6);
    CHECK(pu.classify(0.5) == PointClass::DenseBoth);
    CHECK(pu.classify(1.0) == PointClass::RightScattered);
    CHECK(pu.classify(2.0) == PointClass::LeftScattered);
    auto z = TimeScale::integers(0, 5);
    CHECK(z.classify(2) == PointClass::Isolated);
    CHECK(z.classify(0) == PointClass::RightScattered);
}

TEST_CASE("translate_intersect") {
    auto z = TimeScale::integers(0, 10);
    auto z1 = z.translate_intersect(1.0);
    CHECK(!z1.empty());
    CHECK(z1.intervals().size() == 10); // {0..9}
    auto zf = z.translate_intersect(0.3);
    CHECK(zf.empty());

    auto r = TimeScale::reals(0, 1);
    auto rt = r.translate_intersect(0.5);
    REQUIRE(rt.intervals().size() == 1);
    CHECK(rt.intervals()[0].lo == doctest::Approx(0.0));
    CHECK(rt.intervals()[0].hi == doctest::Approx(0.5));

    // Subset property: adding tau maps T_tau into T.
    auto pu = TimeScale::periodic_union(1, 1, 0, 8);
    for (double tau : {2.0, 4.0, 0.5}) {
        auto tt = pu.translate_intersect(tau);
        for (const auto& iv : tt.intervals()) {
            CHECK(pu.contains(iv.lo));
            CHECK(pu.contains(iv.hi));
            CHECK(pu.contains(iv.lo + tau));
            CHECK(pu.contains(iv.hi + tau));
        }
    }
}

TEST_CASE("distance") {
    auto a = TimeScale::explicit_scale({{0, 1}}, 0, 2);
    auto b = TimeScale::explicit_scale({{0.2, 1.2}}, 0, 2);
    CHECK(TimeScale::distance(a, b) == doctest::Approx(0.2));
    CHECK(TimeScale::distance(b, a) == doctest::Approx(0.2)); // symmetric

    auto z = TimeScale::integers(0, 10);
    CHECK(TimeScale::distance(z, z) == 0.0);

    auto empty = z.translate_intersect(0.3);
    CHECK(std::isinf(TimeScale::distance(z, empty)));

    // dist(T,T)=0 for every generated scale.
    for (const auto& ts : {TimeScale::reals(-2, 5), TimeScale::step(0.25, 0, 3),
                           TimeScale::periodic_union(1.5, 0.5, -4, 4)})
        CHECK(TimeScale::distance(ts, ts) == 0.0);

    // Isolated point vs interval: sup attained at a gap midpoint.
    auto c = TimeScale::explicit_scale({{0, 0}, {10, 10}}, -1, 11);
    auto d = TimeScale::explicit_scale({{0, 10}}, -1, 11);
    CHECK(TimeScale::distance(c, d) == doctest::Approx(5.0));
}

TEST_CASE("translation numbers") {
    // Periodicity gives exact zeros at multiples of (a+b).
    auto pu = TimeScale::periodic_union(1, 1, -8, 8);
    auto tr = translation_numbers(pu, 0.0, -6, 6, 0.5);
    std::vector<double> expect = {-6, -4, -2, 0, 2, 4, 6};
    REQUIRE(tr.taus.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i)
        CHECK(tr.taus[i] == doctest::Approx(expect[i]));

    // On the reals every scanned shift is accepted.
    auto r = TimeScale::reals(-5, 5);
    auto trr = translation_numbers(r, 0.0, -2, 2, 0.5);
    CHECK(trr.taus.size() == 9);

    // On the integers only integer shifts survive even with slack epsilon.
    auto z = TimeScale::integers(-10, 10);
    auto trz = translation_numbers(z, 0.1, -3, 3, 0.25);
    std::vector<double> ez = {-3, -2, -1, 0, 1, 2, 3};
    REQUIRE(trz.taus.size() == ez.size());
    for (size_t i = 0; i < ez.size(); ++i) CHECK(trz.taus[i] == doctest::Approx(ez[i]));
}

TEST_CASE("translation set symmetry and additivity") {
    // Lemma-style properties: tau accepted => -tau accepted with equal distance;
    // sums of accepted shifts stay within doubled epsilon.
    auto pu = TimeScale::periodic_union(2, 1, -12, 12);
    auto tr = translation_numbers(pu, 0.2, -9, 9, 0.3);
    REQUIRE(!tr.taus.empty());
    for (double tau : tr.taus) {
        bool has_neg = false;
        for (double other : tr.taus)
            if (std::fabs(other + tau) < 1e-9) has_neg = true;
        CHECK(has_neg);
        double d1 = TimeScale::distance(pu.translate_intersect(tau), pu);
        double d2 = TimeScale::distance(pu.translate_intersect(-tau), pu);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    }
    std::mt19937 rng(7);
    std::uniform_int_distribution<size_t> pick(0, tr.taus.size() - 1);
    for (int it = 0; it < 30; ++it) {
        double t1 = tr.taus[pick(rng)], t2 = tr.taus[pick(rng)];
        double sum = t1 + t2;
        if (sum < tr.search_lo || sum > tr.search_hi) continue;
        auto shifted = pu.translate_intersect(sum);
        if (shifted.empty()) continue;
        double lo = std::max(pu.window_start(), pu.window_start() - sum);
        double hi = std::min(pu.window_end(), pu.window_end() - sum);
        if (lo >= hi) continue;
        double d = TimeScale::distance(pu.clipped(lo, hi), shifted.clipped(lo, hi));
        CHECK(d <= 2 * tr.epsilon + 1e-9);
    }
}

TEST_CASE("core_intersection") {
    auto z = TimeScale::integers(0, 10);
    auto core = core_intersection(z, {1.0, 2.0});
    CHECK(!core.empty());
    CHECK(core.contains(0));
    CHECK(core.contains(8));

    auto r = TimeScale::reals(0, 2);
    auto cr = core_intersection(r, {0.5});
    REQUIRE(cr.intervals().size() == 1);
    CHECK(cr.intervals()[0].lo == doctest::Approx(0.0));
    CHECK(cr.intervals()[0].hi == doctest::Approx(1.5));

    auto pu = TimeScale::periodic_union(1, 1, 0, 4);
    auto cp = core_intersection(pu, {2.0});
    REQUIRE(!cp.empty());
    CHECK(cp.intervals()[0].lo == doctest::Approx(0.0));
    CHECK(cp.intervals()[0].hi == doctest::Approx(1.0));

    auto none = core_intersection(z, {0.5});
    CHECK(none.empty());
}

TEST_CASE("jump image stays in scale on sampled interior points") {
    for (const auto& ts : {TimeScale::integers(-5, 5), TimeScale::reals(-1, 3),
                           TimeScale::step(0.5, 0, 4), TimeScale::periodic_union(1, 1, 0, 8)}) {
        for (double t : ts.sample_points(16)) {
            double s = ts.sigma(t), b = ts.rho_back(t);
            CHECK(ts.contains(s));
            CHECK(ts.contains(b));
            CHECK(s >= t);
            CHECK(b <= t);
            CHECK(ts.graininess(t) >= 0.0);
        }
    }
}
