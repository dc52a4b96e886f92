#pragma once

#include <cstddef>

#include "henon/common.hpp"

namespace henon {

// Published topological entropy of the Henon attractor at a=1.4, b=0.3.
// Used as the reference rate for the scaling fits; never recomputed here.
inline constexpr double kTopologicalEntropy = 0.465;

inline StatePoint map_forward(const StatePoint& p, const MapParameters& mp) {
    return {1.0 - mp.a * p.x * p.x + p.y, mp.b * p.x};
}

inline StatePoint map_inverse(const StatePoint& p, const MapParameters& mp) {
    const double xn = p.y / mp.b;
    return {xn, p.x - 1.0 + mp.a * xn * xn};
}

inline StatePoint iterate_forward(StatePoint p, int steps, const MapParameters& mp) {
    for (int i = 0; i < steps; ++i) p = map_forward(p, mp);
    return p;
}

inline StatePoint iterate_inverse(StatePoint p, int steps, const MapParameters& mp) {
    for (int i = 0; i < steps; ++i) p = map_inverse(p, mp);
    return p;
}

// The fixed point inside the attractor region, x* = ((b-1) + sqrt((1-b)^2 + 4a)) / 2a.
StatePoint attractor_fixed_point(const MapParameters& mp);

struct Orbit {
    std::vector<StatePoint> points;
    std::size_t burn_in = 0;
    MapParameters params;
};

// Iterates burn_in + length times from seed_point and keeps the last `length`
// images (the seed itself is not part of the orbit). Throws OrbitEscapeError
// if the trajectory leaves the basin.
Orbit generate_orbit(StatePoint seed_point, std::size_t length, std::size_t burn_in,
                     const MapParameters& mp);

// Seeds uniformly from [-0.1, 0.1]^2 and retries escaped seeds (up to 100 draws).
Orbit generate_attractor_orbit(std::mt19937_64& rng, std::size_t length, std::size_t burn_in,
                               const MapParameters& mp);

inline constexpr std::size_t kDefaultBurnIn = 1000;
inline constexpr int kMaxSeedRetries = 100;

// Trajectories that leave this box never return; used for escape detection.
inline constexpr double kEscapeRadius = 10.0;

inline bool escaped(const StatePoint& p) {
    return !is_finite(p) || std::abs(p.x) > kEscapeRadius || std::abs(p.y) > kEscapeRadius;
}

}  // namespace henon
