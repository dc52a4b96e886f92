#include "henon/optimizer.hpp"

#include <cmath>

namespace henon {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        throw ConfigError("adam_step: shape mismatch");
    }
    const AdamConfig& c = state.config;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

    double* m = state.m.data();
    double* v = state.v.data();
    const double* g = grad.data();
    double* p = params.data();
    const std::size_t n = params.size();
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= c.alpha * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

}  // namespace henon
