#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "henon/dynamics.hpp"

using namespace henon;

TEST_CASE("forward map hand iterations") {
    const MapParameters mp;
    const StatePoint origin_image = map_forward({0.0, 0.0}, mp);
    CHECK(origin_image.x == 1.0);
    CHECK(origin_image.y == 0.0);

    const StatePoint next = map_forward({1.0, 0.0}, mp);
    CHECK(next.x == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(next.y == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("second component identity is exact") {
    const MapParameters mp;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const StatePoint p{uniform_range(rng, -2.0, 2.0), uniform_range(rng, -2.0, 2.0)};
        CHECK(map_forward(p, mp).y == mp.b * p.x);
    }
}

TEST_CASE("fixed point maps to itself") {
    const MapParameters mp;
    // independent arithmetic: positive root of a x^2 + (1-b) x - 1 = 0
    const double xs = ((mp.b - 1.0) + std::sqrt((1.0 - mp.b) * (1.0 - mp.b) + 4.0 * mp.a)) / (2.0 * mp.a);
    CHECK(xs == doctest::Approx(0.6313545).epsilon(1e-6));
    const StatePoint p{xs, mp.b * xs};

    const StatePoint image = map_forward(p, mp);
    CHECK(std::abs(image.x - p.x) < 1e-12);
    CHECK(std::abs(image.y - p.y) < 1e-12);

    const StatePoint library = attractor_fixed_point(mp);
    CHECK(library.x == xs);
    CHECK(library.y == mp.b * xs);

    const StatePoint pre = map_inverse(p, mp);
    CHECK(std::abs(pre.x - p.x) < 1e-12);
    CHECK(std::abs(pre.y - p.y) < 1e-12);
}

TEST_CASE("inverse undoes forward within 1e-12 per coordinate") {
    const MapParameters mp;
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 10000; ++i) {
        const StatePoint p{uniform_range(rng, -2.0, 2.0), uniform_range(rng, -2.0, 2.0)};
        const StatePoint back = map_inverse(map_forward(p, mp), mp);
        CHECK(std::abs(back.x - p.x) < 1e-12);
        CHECK(std::abs(back.y - p.y) < 1e-12);
    }
    // and in the other composition order
    for (int i = 0; i < 10000; ++i) {
        const StatePoint p{uniform_range(rng, -1.5, 1.5), uniform_range(rng, -0.45, 0.45)};
        const StatePoint back = map_forward(map_inverse(p, mp), mp);
        CHECK(std::abs(back.x - p.x) < 1e-12);
        CHECK(std::abs(back.y - p.y) < 1e-12);
    }

    const StatePoint unit = map_inverse({1.0, 0.0}, mp);
    CHECK(unit.x == 0.0);
    CHECK(unit.y == 0.0);
}

TEST_CASE("orbit from the origin matches hand iterations") {
    const MapParameters mp;
    const Orbit orbit = generate_orbit({0.0, 0.0}, 2, 0, mp);
    REQUIRE(orbit.points.size() == 2);
    CHECK(orbit.points[0].x == 1.0);
    CHECK(orbit.points[0].y == 0.0);
    CHECK(orbit.points[1].x == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(orbit.points[1].y == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("orbit length contract") {
    const MapParameters mp;
    for (const std::size_t length : {1UL, 17UL, 1000UL}) {
        CHECK(generate_orbit({0.05, 0.05}, length, 25, mp).points.size() == length);
    }
    CHECK_THROWS_AS(generate_orbit({0.0, 0.0}, 0, 0, mp), ConfigError);
}

TEST_CASE("post burn-in orbit stays inside the attractor box") {
    const MapParameters mp;
    const Orbit orbit = generate_orbit({0.0, 0.0}, 10000, 1000, mp);
    for (const auto& p : orbit.points) {
        CHECK(std::abs(p.x) < 1.5);
        CHECK(std::abs(p.y) < 0.45);
    }
}

TEST_CASE("orbit stays finite for a million iterations near the origin") {
    const MapParameters mp;
    StatePoint p{0.01, -0.02};
    for (int i = 0; i < 1000000; ++i) {
        p = map_forward(p, mp);
        REQUIRE(is_finite(p));
    }
    CHECK(std::abs(p.x) < 1.5);
}

TEST_CASE("identical seeds give bit-identical orbits") {
    const MapParameters mp;
    std::mt19937_64 rng_a(99), rng_b(99);
    const Orbit a = generate_attractor_orbit(rng_a, 5000, 1000, mp);
    const Orbit b = generate_attractor_orbit(rng_b, 5000, 1000, mp);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.points[i].y == b.points[i].y);
    }
}

TEST_CASE("escaping seed raises an orbit-escape error") {
    const MapParameters mp;
    CHECK_THROWS_AS(generate_orbit({5.0, 5.0}, 10, 0, mp), OrbitEscapeError);
}

TEST_CASE("entropy constant is the published value") {
    CHECK(kTopologicalEntropy == 0.465);
}
