#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "henon/common.hpp"

namespace henon {

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::vector<double> m;  // first-moment accumulator, congruent to the parameters
    std::vector<double> v;  // second-moment accumulator

    AdamState() = default;
    AdamState(std::size_t n_params, const AdamConfig& cfg)
        : config(cfg), m(n_params, 0.0), v(n_params, 0.0) {}
};

// One bias-corrected update: m and v track gradient and squared-gradient
// moving averages; params[i] -= alpha * m_hat / (sqrt(v_hat) + epsilon).
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state);

}  // namespace henon
