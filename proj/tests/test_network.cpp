#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "henon/network.hpp"
#include "henon/optimizer.hpp"

using namespace henon;

namespace {

// test-only oracle: central finite differences of the batch loss
std::vector<double> finite_difference_gradient(NetworkParameters params, const BatchView& batch,
                                               double step = 1e-5) {
    std::vector<double> grad(params.values.size());
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        const double saved = params.values[i];
        params.values[i] = saved + step;
        const double up = loss(params, batch);
        params.values[i] = saved - step;
        const double down = loss(params, batch);
        params.values[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double relative_l2_error(std::span<const double> a, std::span<const double> b) {
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff2 += (a[i] - b[i]) * (a[i] - b[i]);
        norm2 += a[i] * a[i] + b[i] * b[i];
    }
    return std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12);
}

struct RandomBatch {
    std::vector<double> features;
    std::vector<std::uint8_t> labels;
    BatchView view(std::size_t dim) const {
        return {features.data(), labels.data(), labels.size(), dim};
    }
};

RandomBatch make_batch(std::mt19937_64& rng, std::size_t count, std::size_t dim) {
    RandomBatch batch;
    batch.features.resize(count * dim);
    batch.labels.resize(count);
    for (auto& f : batch.features) f = uniform_range(rng, -2.0, 2.0);
    for (auto& l : batch.labels) l = static_cast<std::uint8_t>(rng() & 1);
    return batch;
}

}  // namespace

TEST_CASE("parameter counting") {
    const NetworkTopology baseline = baseline_topology(10);
    const ParameterCounts counts = count_parameters(baseline);
    CHECK(counts.weights == 3644);
    CHECK(counts.biases == 145);
    CHECK(counts.total() == 3789);

    CHECK_THROWS_AS(validate_topology({{4, 2}}), ConfigError);      // too few layers
    CHECK_THROWS_AS(validate_topology({{4, 8, 3}}), ConfigError);   // output must be 2
    CHECK_THROWS_AS(validate_topology({{4, 0, 2}}), ConfigError);   // empty layer
}

TEST_CASE("zero network outputs equal probabilities") {
    const NetworkParameters params = zero_parameters({{4, 5, 2}});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> input{uniform_range(rng, -1, 1), uniform_range(rng, -1, 1),
                                        uniform_range(rng, -1, 1), uniform_range(rng, -1, 1)};
        const auto probs = forward_pass(params, input);
        CHECK(probs[0] == 0.5);
        CHECK(probs[1] == 0.5);
    }
}

TEST_CASE("hand-built logits give the textbook softmax value") {
    // hidden ReLU passes the positive input through; output row 0 sums it to 1
    NetworkParameters params = zero_parameters({{2, 3, 2}});
    auto w1 = params.weights(0);
    w1[0 * 2 + 0] = 1.0;  // hidden unit 0 copies x0
    auto w2 = params.weights(1);
    w2[0 * 3 + 0] = 1.0;  // logit 0 reads hidden unit 0

    ActivationCache cache;
    const auto probs = forward_pass(params, std::vector<double>{1.0, 0.0}, &cache);
    // logits (1, 0): p = (e/(e+1), 1/(e+1))
    CHECK(probs[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    CHECK(cache.activations.size() == 3);
    CHECK(cache.activations[1][0] == 1.0);
    CHECK(cache.probabilities[0] == probs[0]);
}

TEST_CASE("softmax outputs stay normalized and shift-invariant") {
    std::mt19937_64 rng(17);
    const NetworkTopology topology{{3, 4, 2}};
    for (int i = 0; i < 10000; ++i) {
        NetworkParameters params = initialize_parameters(topology, rng());
        // exercise bias shifts of both logits by the same constant
        const double shift = uniform_range(rng, -3.0, 3.0);
        const std::vector<double> input{uniform_range(rng, -2, 2), uniform_range(rng, -2, 2),
                                        uniform_range(rng, -2, 2)};
        const auto p = forward_pass(params, input);
        CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);

        auto out_bias = params.biases(1);
        out_bias[0] += shift;
        out_bias[1] += shift;
        const auto q = forward_pass(params, input);
        CHECK(std::abs(q[0] - p[0]) < 1e-12);
        CHECK(std::abs(q[1] - p[1]) < 1e-12);
    }
}

TEST_CASE("loss hand values") {
    const NetworkTopology topology{{2, 2, 2}};

    SUBCASE("uniform predictions give ln 2") {
        const NetworkParameters params = zero_parameters(topology);
        std::mt19937_64 rng(5);
        const RandomBatch batch = make_batch(rng, 64, 2);
        CHECK(loss(params, batch.view(2)) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    }

    SUBCASE("confident correct predictions give vanishing loss") {
        // logits strongly favor class 1 for positive inputs
        NetworkParameters params = zero_parameters(topology);
        auto w1 = params.weights(0);
        w1[0] = 1.0;  // hidden 0 = relu(x0)
        auto w2 = params.weights(1);
        w2[1 * 2 + 0] = 60.0;  // logit1 = 60 * hidden0

        std::vector<double> features{2.0, 0.0};
        std::vector<std::uint8_t> labels{1};
        const BatchView batch{features.data(), labels.data(), 1, 2};
        CHECK(loss(params, batch) < 1e-8);
    }

    SUBCASE("batch loss is the mean of single-sample losses") {
        std::mt19937_64 rng(6);
        const NetworkParameters params = initialize_parameters(topology, 44);
        const RandomBatch batch = make_batch(rng, 16, 2);
        double mean = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            const BatchView one{batch.features.data() + i * 2, batch.labels.data() + i, 1, 2};
            mean += loss(params, one);
        }
        mean /= 16.0;
        CHECK(loss(params, batch.view(2)) == doctest::Approx(mean).epsilon(1e-12));
    }

    SUBCASE("empty batch is rejected") {
        const NetworkParameters params = zero_parameters(topology);
        const BatchView empty{nullptr, nullptr, 0, 2};
        CHECK_THROWS_AS(loss(params, empty), ConfigError);
    }
}

TEST_CASE("zero-weight network gradient has the hand-derived structure") {
    // one hidden unit: ReLU(0) blocks every path except the output biases,
    // whose gradient is the mean of (p - onehot) = (0.5 - y)
    NetworkParameters params = zero_parameters({{2, 1, 2}});
    std::vector<double> features{0.3, -0.4, 0.1, 0.9};
    std::vector<std::uint8_t> labels{1, 0};
    const BatchView batch{features.data(), labels.data(), 2, 2};

    std::vector<double> grad(params.values.size());
    backward_pass(params, batch, grad);

    const auto& out_layer = params.layers[1];
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const bool is_out_bias = i >= out_layer.bias_offset && i < out_layer.bias_offset + 2;
        if (!is_out_bias) CHECK(grad[i] == 0.0);
    }
    // labels (1, 0): mean delta_0 = ((0.5-0) + (0.5-1))/2 = 0, mean delta_1 = 0
    CHECK(grad[out_layer.bias_offset + 0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(grad[out_layer.bias_offset + 1] == doctest::Approx(0.0).epsilon(1e-15));

    // an unbalanced batch leaves +-(p - y) in the output bias slots
    std::vector<std::uint8_t> ones{1, 1};
    const BatchView batch_true{features.data(), ones.data(), 2, 2};
    backward_pass(params, batch_true, grad);
    CHECK(grad[out_layer.bias_offset + 0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(grad[out_layer.bias_offset + 1] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("backprop matches central finite differences on small networks") {
    // biases are drawn away from zero so no pre-activation sits exactly on the
    // ReLU kink, where a central difference stops being a valid oracle
    std::mt19937_64 rng(2024);
    for (const NetworkTopology& topology :
         {NetworkTopology{{4, 5, 2}}, NetworkTopology{{2, 3, 3, 3, 2}}}) {
        for (int trial = 0; trial < 10; ++trial) {
            NetworkParameters params = initialize_parameters(topology, rng());
            for (int l = 0; l < topology.trainable_layers(); ++l) {
                for (double& b : params.biases(l)) b = uniform_range(rng, -0.2, 0.2);
            }
            const std::size_t dim = static_cast<std::size_t>(topology.input_dim());
            const RandomBatch batch = make_batch(rng, 8, dim);
            std::vector<double> grad(params.values.size());
            backward_pass(params, batch.view(dim), grad);
            const auto fd = finite_difference_gradient(params, batch.view(dim));
            CHECK(relative_l2_error(grad, fd) < 1e-6);
        }
    }
}

TEST_CASE("duplicated batch leaves the gradient unchanged") {
    std::mt19937_64 rng(31);
    const NetworkParameters params = initialize_parameters({{3, 6, 4, 2}}, 8);
    RandomBatch batch = make_batch(rng, 5, 3);

    std::vector<double> grad_single(params.values.size());
    backward_pass(params, batch.view(3), grad_single);

    RandomBatch doubled;
    doubled.features = batch.features;
    doubled.features.insert(doubled.features.end(), batch.features.begin(), batch.features.end());
    doubled.labels = batch.labels;
    doubled.labels.insert(doubled.labels.end(), batch.labels.begin(), batch.labels.end());

    std::vector<double> grad_double(params.values.size());
    backward_pass(params, doubled.view(3), grad_double);

    for (std::size_t i = 0; i < grad_single.size(); ++i) {
        CHECK(grad_double[i] == doctest::Approx(grad_single[i]).epsilon(1e-12));
    }
}

TEST_CASE("adam: zero gradient leaves parameters untouched") {
    std::vector<double> params{0.5, -0.25, 3.0};
    const std::vector<double> grad{0.0, 0.0, 0.0};
    AdamState state(params.size(), {});
    adam_step(params, grad, state);
    CHECK(state.step == 1);
    CHECK(params[0] == 0.5);
    CHECK(params[1] == -0.25);
    CHECK(params[2] == 3.0);
}

TEST_CASE("adam: first step moves by about -alpha * sign(gradient)") {
    std::vector<double> params{1.0, 1.0};
    const std::vector<double> grad{0.37, -2.4};
    AdamState state(params.size(), {});
    adam_step(params, grad, state);
    CHECK(params[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(1.0 + 1e-3).epsilon(1e-6));
}

TEST_CASE("adam: two steps reproduce a hand trace on a 1-parameter quadratic") {
    // loss = theta^2 / 2, gradient = theta; defaults alpha=1e-3, b1=0.9, b2=0.999, eps=1e-8
    const AdamConfig cfg;
    double theta = 1.0;

    // independent scalar recomputation of two updates
    double m = 0.0, v = 0.0, ref = theta;
    for (int step = 1; step <= 2; ++step) {
        const double g = ref;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m / (1.0 - std::pow(cfg.beta1, step));
        const double v_hat = v / (1.0 - std::pow(cfg.beta2, step));
        ref -= cfg.alpha * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }

    std::vector<double> params{theta};
    AdamState state(1, cfg);
    for (int step = 0; step < 2; ++step) {
        const std::vector<double> grad{params[0]};
        adam_step(params, grad, state);
    }
    CHECK(params[0] == doctest::Approx(ref).epsilon(1e-15));
    CHECK(state.step == 2);
}

TEST_CASE("initialization is seeded and leaves biases at zero") {
    const NetworkTopology topology = baseline_topology(10);
    const NetworkParameters a = initialize_parameters(topology, 123);
    const NetworkParameters b = initialize_parameters(topology, 123);
    const NetworkParameters c = initialize_parameters(topology, 124);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);

    for (int l = 0; l < topology.trainable_layers(); ++l) {
        const auto& layer = a.layers[static_cast<std::size_t>(l)];
        const double limit = std::sqrt(6.0 / (layer.in + layer.out));
        for (const double w : a.weights(l)) {
            CHECK(std::abs(w) <= limit);
        }
        for (const double bias : a.biases(l)) CHECK(bias == 0.0);
    }
}
