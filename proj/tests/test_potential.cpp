#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcsf/errors.hpp"
#include "mcsf/potential.hpp"
#include "oracles.hpp"

using namespace mcsf;

namespace {

std::vector<Vec2> regular_ngon(Vec2 center, double radius, int n) {
    std::vector<Vec2> poly;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * kPi * i / n;
        poly.push_back(center + Vec2{radius * std::cos(a), radius * std::sin(a)});
    }
    return poly;
}

} // namespace

TEST_CASE("eval_phi") {
    PotentialField f0(0.0, {{0.0, 0.0}});
    CHECK(f0.eval({1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));

    PotentialField f1(1.0, {{0.0, 0.0}, {2.0, 0.0}});
    CHECK(f1.eval({1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(f0.eval({0.0, 0.0}), Error);
    try {
        f0.eval({0.0, 0.0});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EvalAtSingularity);
    }
}

TEST_CASE("grad_phi") {
    PotentialField f0(0.0, {{0.0, 0.0}});
    Vec2 g = f0.grad({1.0, 0.0});
    CHECK(g.x == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g.y == doctest::Approx(0.0));
    // single-center mass-0 equality case of the gradient bound
    CHECK(norm(g) == doctest::Approx(2.0 * f0.eval({1.0, 0.0}) * f0.eval({1.0, 0.0}))
                         .epsilon(1e-12));

    Vec2 g2 = f0.grad({0.0, 2.0});
    CHECK(g2.x == doctest::Approx(0.0));
    CHECK(g2.y == doctest::Approx(-0.125).epsilon(1e-15));

    PotentialField fsym(0.0, {{-1.0, 0.0}, {1.0, 0.0}});
    Vec2 g3 = fsym.grad({0.0, 0.0});
    CHECK(norm(g3) == doctest::Approx(0.0));
}

TEST_CASE("grad_phi matches finite differences") {
    PotentialField f(0.7, {{0.0, 0.0}, {2.0, 0.3}, {-1.0, 1.5}});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double h = 1e-5;
    int checked = 0;
    while (checked < 50) {
        Vec2 x{u(rng), u(rng)};
        if (f.nearest_distance(x) < 0.2) continue;
        Vec2 g = f.grad(x);
        double gx = (f.eval(x + Vec2{h, 0}) - f.eval(x - Vec2{h, 0})) / (2 * h);
        double gy = (f.eval(x + Vec2{0, h}) - f.eval(x - Vec2{0, h})) / (2 * h);
        CHECK(std::abs(g.x - gx) / std::max(1.0, std::abs(gx)) < 1e-6);
        CHECK(std::abs(g.y - gy) / std::max(1.0, std::abs(gy)) < 1e-6);
        ++checked;
    }
}

TEST_CASE("gradient bound |grad phi| <= 2 phi^2") {
    PotentialField f(0.3, {{0.0, 0.0}, {1.0, 0.2}, {-0.4, 0.9}, {2.2, -0.7}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 20000; ++i) {
        Vec2 x{u(rng), u(rng)};
        if (f.nearest_distance(x) < 1e-6) continue;
        double phi = f.eval(x);
        CHECK(norm(f.grad(x)) <= 2.0 * phi * phi * (1.0 + 1e-12));
    }
}

TEST_CASE("normal_log_phi") {
    PotentialField f(0.0, {{0.0, 0.0}});
    // Exact value of phi^{-1/2} |<grad phi / phi, n>| at distance 1,
    // radial normal: sqrt(2) for the single-center mass-0 field.
    CHECK(f.normal_log_phi({1.0, 0.0}, {1.0, 0.0}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    // tangential direction sees nothing
    CHECK(f.normal_log_phi({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));

    // r^{-1/2} growth towards the singularity
    double v1 = f.normal_log_phi({0.1, 0.0}, {1.0, 0.0});
    double v2 = f.normal_log_phi({0.01, 0.0}, {1.0, 0.0});
    CHECK(v2 / v1 == doctest::Approx(std::sqrt(10.0)).epsilon(0.01));
}

TEST_CASE("nearest_singularity") {
    PotentialField f(0.0, {{0.0, 0.0}, {2.0, 0.0}});
    auto n0 = f.nearest_singularity({0.4, 0.0});
    CHECK(n0.index == 0);
    CHECK(n0.distance == doctest::Approx(0.4));

    auto tie = f.nearest_singularity({1.0, 0.0});
    CHECK(tie.index == 0); // tie-break to the lowest index
    CHECK(tie.distance == doctest::Approx(1.0));

    auto excl = f.nearest_singularity({0.4, 0.0}, {0});
    CHECK(excl.index == 1);
    CHECK(excl.distance == doctest::Approx(1.6));

    CHECK_THROWS_AS(f.nearest_singularity({0.0, 0.0}, {0, 1}), Error);
}

TEST_CASE("weighted_area of the unit disk with a center singularity") {
    PotentialField f(0.0, {{0.0, 0.0}});
    auto poly = regular_ngon({0.0, 0.0}, 1.0, 256);
    CHECK(f.weighted_area(poly) == doctest::Approx(kPi).epsilon(1e-3));
}

TEST_CASE("weighted_area mass part and far singularity") {
    PotentialField f(2.0, {{10.0, 10.0}});
    std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    double full = f.weighted_area(square);
    PotentialField fm(0.0, {{10.0, 10.0}});
    double sing_term = fm.weighted_area(square);
    CHECK(full == doctest::Approx(2.0 + sing_term).epsilon(1e-12));
    CHECK(sing_term > 0.0);
    double mc = testing::monte_carlo_weighted_area(f, square, 4'000'000, 123);
    CHECK(full == doctest::Approx(mc).epsilon(1e-3));
}

TEST_CASE("weighted_area triangle against the quadrature oracle") {
    PotentialField f(0.0, {{1.0, 0.25}});
    std::vector<Vec2> tri{{0, 0}, {2, 0}, {1, 1}};
    double got = f.weighted_area(tri);
    double ref = testing::quadrature_weighted_area(f, tri);
    CHECK(got == doctest::Approx(ref).epsilon(1e-3));
}

TEST_CASE("weighted_area additivity under subdivision") {
    PotentialField f(0.4, {{0.3, 0.4}, {1.7, 0.2}});
    std::vector<Vec2> poly{{0, 0}, {2, 0}, {2.3, 1.1}, {1.0, 1.8}, {-0.4, 1.0}};
    // split along the chord from vertex 0 to vertex 2
    std::vector<Vec2> a{{0, 0}, {2, 0}, {2.3, 1.1}};
    std::vector<Vec2> b{{0, 0}, {2.3, 1.1}, {1.0, 1.8}, {-0.4, 1.0}};
    double whole = f.weighted_area(poly);
    double parts = f.weighted_area(a) + f.weighted_area(b);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-10));
}

TEST_CASE("weighted_area oracle agreement on random polygons") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ur(0.8, 1.9), ua(-0.25, 0.25), up(-1.2, 1.2);
    std::uniform_int_distribution<int> nsing(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        // star-shaped random polygon: jittered radii around a circle
        int nv = 9;
        std::vector<Vec2> poly;
        for (int i = 0; i < nv; ++i) {
            double ang = 2.0 * kPi * i / nv + ua(rng);
            double r = ur(rng);
            poly.push_back({r * std::cos(ang), r * std::sin(ang)});
        }
        int k = nsing(rng);
        std::vector<Vec2> sing;
        for (int i = 0; i < k; ++i) {
            Vec2 p{up(rng), up(rng)};
            if (point_polygon_boundary_dist(p, poly) < 0.1) {
                --i;
                continue;
            }
            sing.push_back(p);
        }
        if (sing.empty()) sing.push_back({5.0, 5.0}); // keep the field valid
        PotentialField f(trial % 2 == 0 ? 0.0 : 0.5, sing);
        double got = f.weighted_area(poly);
        double ref = testing::quadrature_weighted_area(f, poly);
        CHECK(got == doctest::Approx(ref).epsilon(1e-3));
    }
}

TEST_CASE("weighted_area boundary and vertex singularities") {
    PotentialField f(0.0, {{0.5, 0.0}});
    std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK_THROWS_AS(f.weighted_area(square), Error); // inside an edge

    // A singularity exactly at a polygon vertex integrates fine.
    PotentialField fv(0.0, {{0.0, 0.0}});
    double got = fv.weighted_area(square);
    double ref = testing::quadrature_weighted_area(fv, square);
    CHECK(got == doctest::Approx(ref).epsilon(2e-3));

    std::vector<Vec2> crossing{{0, 0}, {3, 0}, {3, 1}, {1, -0.5}, {0, 1}};
    PotentialField far(0.0, {{5.0, 5.0}});
    CHECK_THROWS_AS(far.weighted_area(crossing), Error);
}

TEST_CASE("field construction guards") {
    CHECK_THROWS_AS(PotentialField(-1.0, {{0, 0}}), Error);
    CHECK_THROWS_AS(PotentialField(0.0, {}), Error);
    CHECK_THROWS_AS(PotentialField(0.0, {{0, 0}, {0, 0}}), Error);
    PotentialField single(0.0, {{0, 0}});
    CHECK(single.min_separation() == 1.0);
}
