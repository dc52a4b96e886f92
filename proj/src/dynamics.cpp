#include "henon/dynamics.hpp"

#include <cmath>

namespace henon {

StatePoint attractor_fixed_point(const MapParameters& mp) {
    // x = 1 - a x^2 + b x  =>  a x^2 + (1 - b) x - 1 = 0, take the root on the attractor side
    const double xs = ((mp.b - 1.0) + std::sqrt((1.0 - mp.b) * (1.0 - mp.b) + 4.0 * mp.a)) / (2.0 * mp.a);
    return {xs, mp.b * xs};
}

Orbit generate_orbit(StatePoint seed_point, std::size_t length, std::size_t burn_in,
                     const MapParameters& mp) {
    if (length < 1) throw ConfigError("orbit length must be >= 1");
    Orbit orbit;
    orbit.burn_in = burn_in;
    orbit.params = mp;
    orbit.points.reserve(length);

    StatePoint p = seed_point;
    for (std::size_t i = 0; i < burn_in + length; ++i) {
        p = map_forward(p, mp);
        if (escaped(p)) {
            throw OrbitEscapeError("orbit escaped at iterate " + std::to_string(i + 1));
        }
        if (i >= burn_in) orbit.points.push_back(p);
    }
    return orbit;
}

Orbit generate_attractor_orbit(std::mt19937_64& rng, std::size_t length, std::size_t burn_in,
                               const MapParameters& mp) {
    for (int attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
        const StatePoint seed{uniform_range(rng, -0.1, 0.1), uniform_range(rng, -0.1, 0.1)};
        try {
            return generate_orbit(seed, length, burn_in, mp);
        } catch (const OrbitEscapeError&) {
            continue;
        }
    }
    throw OrbitEscapeError("no seed survived " + std::to_string(kMaxSeedRetries) + " attempts");
}

}  // namespace henon
