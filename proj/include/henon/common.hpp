#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace henon {

struct MapParameters {
    double a = 1.4;
    double b = 0.3;
};

struct StatePoint {
    double x = 0.0;
    double y = 0.0;
};

inline bool is_finite(const StatePoint& p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
}

// --- error taxonomy (mapped to distinct CLI exit codes) ---

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OrbitEscapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ClassStarvationError : public std::runtime_error {
public:
    ClassStarvationError(bool starved_class, std::size_t obtained, std::size_t wanted)
        : std::runtime_error("class starvation: class " +
                             std::string(starved_class ? "true (exceedance)" : "false (no exceedance)") +
                             " yielded " + std::to_string(obtained) + " of " +
                             std::to_string(wanted) + " windows within the orbit budget"),
          starved_class_is_true(starved_class) {}
    bool starved_class_is_true;
};

class TrainingDivergedError : public std::runtime_error {
public:
    explicit TrainingDivergedError(int epoch)
        : std::runtime_error("training diverged (non-finite loss) at epoch " + std::to_string(epoch)),
          epoch(epoch) {}
    int epoch;
};

// --- deterministic seeding and sampling helpers ---
//
// All randomness flows through std::mt19937_64 engines whose seeds are derived
// from a master seed via splitmix64 mixing. Distribution helpers are hand-rolled
// so sequences do not depend on the standard library implementation.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum class SeedPurpose : std::uint64_t {
    orbit = 1,
    train_data = 2,
    test_data = 3,
    weight_init = 4,
    shuffle = 5,
    sweep_cell = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

// uniform double in [0, 1) from the top 53 bits
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// unbiased integer in [0, n) by rejection
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

// Fisher-Yates; kept local so shuffles are identical across library versions
template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline constexpr const char* kVersionString = "henon-predict 0.1.0";

}  // namespace henon
