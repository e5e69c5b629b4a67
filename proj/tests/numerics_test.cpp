#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"
#include "density/numerics/gradcheck.hpp"
#include "density/numerics/layers.hpp"
#include "density/numerics/ntw.hpp"
#include "density/numerics/params.hpp"
#include "density/numerics/tensor.hpp"
#include "testutil.hpp"

using namespace density;
using namespace density::numerics;

namespace {

// Scalar readout loss over a single layer so gradients reach every output.
// The probe input lives in the ParamSet so finite differences also cover
// input gradients.
struct LayerProbe {
    LayerSpec spec;
    Tensor readout;

    double loss(const ParamSet& params) const {
        Tensor out = forward(spec, params, "layer", params.at("input"));
        double acc = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) acc += readout[i] * out[i];
        return acc;
    }

    void analytic(const ParamSet& params, Gradients& grads) const {
        const Tensor& input = params.at("input");
        LayerGradients g = backward(spec, params, "layer", input, readout);
        grads.accumulate("input", g.input);
        if (spec.has_params()) {
            grads.accumulate("layer.weight", g.weight);
            grads.accumulate("layer.bias", g.bias);
        }
    }
};

GradCheckReport check_layer(const LayerSpec& spec, const Tensor& input, Rng& rng, double tolerance) {
    ParamSet params;
    params.add("input", input);
    for (const auto& [suffix, shape] : spec.param_shapes()) {
        params.add("layer." + suffix, glorot_init(shape, rng));
    }
    LayerProbe probe;
    probe.spec = spec;
    const auto out_shape = infer_output_shape(spec, input.shape());
    probe.readout = testutil::random_tensor(out_shape, rng);

    return gradient_check([&probe](const ParamSet& p) { return probe.loss(p); },
                          [&probe](const ParamSet& p, Gradients& g) { probe.analytic(p, g); }, params, tolerance);
}

}  // namespace

TEST_CASE("relu forward matches definition") {
    ParamSet none;
    Tensor out = forward(LayerSpec::relu(), none, "", Tensor::from_values({-1, 0, 2}));
    CHECK(out.values() == std::vector<double>{0, 0, 2});
}

TEST_CASE("softmax of zeros is uniform") {
    ParamSet none;
    Tensor out = forward(LayerSpec::softmax(), none, "", Tensor::from_values({0, 0, 0, 0}));
    for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("conv forward on hand-summed sliding windows") {
    ParamSet params;
    params.add("c.weight", Tensor::full({1, 1, 2, 2}, 1.0));
    params.add("c.bias", Tensor::zeros({1}));
    Tensor input({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Tensor out = forward(LayerSpec::conv(1, 1, 2, 2), params, "c", input);
    CHECK(out.shape() == std::vector<int>{1, 2, 2});
    CHECK(out.values() == std::vector<double>{12, 16, 24, 28});
}

TEST_CASE("conv shape errors name the layer") {
    ParamSet params;
    params.add("c.weight", Tensor::zeros({2, 3, 3, 3}));
    params.add("c.bias", Tensor::zeros({2}));
    Tensor input({1, 8, 8});
    CHECK_THROWS_WITH_AS(forward(LayerSpec::conv(3, 2, 3, 3), params, "c", input),
                         doctest::Contains("conv"), Error);

    Tensor small({3, 2, 2});
    CHECK_THROWS_WITH_AS(forward(LayerSpec::conv(3, 2, 3, 3), params, "c", small),
                         doctest::Contains("does not fit"), Error);
}

TEST_CASE("same padding preserves spatial size at stride 1") {
    Rng rng(11);
    auto spec = LayerSpec::conv(2, 3, 3, 3, 1, /*same_padding=*/true);
    CHECK(infer_output_shape(spec, {2, 9, 7}) == std::vector<int>{3, 9, 7});

    ParamSet params;
    params.add("c.weight", glorot_init({3, 2, 3, 3}, rng));
    params.add("c.bias", Tensor::zeros({3}));
    Tensor input = testutil::random_tensor({2, 9, 7}, rng);
    Tensor out = forward(spec, params, "c", input);
    CHECK(out.shape() == std::vector<int>{3, 9, 7});
}

TEST_CASE("relu backward routes upstream through positive inputs only") {
    ParamSet none;
    LayerGradients g = backward(LayerSpec::relu(), none, "", Tensor::from_values({-1, 2}),
                                Tensor::from_values({5, 5}));
    CHECK(g.input.values() == std::vector<double>{0, 5});
}

TEST_CASE("fully connected input gradient of sum(y) equals column sums of W") {
    Rng rng(7);
    const int nin = 5, nout = 3;
    ParamSet params;
    params.add("f.weight", glorot_init({nout, nin}, rng));
    params.add("f.bias", Tensor::zeros({nout}));
    Tensor x = testutil::random_tensor({nin}, rng);

    LayerGradients g = backward(LayerSpec::fully_connected(nin, nout), params, "f", x,
                                Tensor::full({nout}, 1.0));
    const Tensor& w = params.at("f.weight");
    for (int i = 0; i < nin; ++i) {
        double col = 0.0;
        for (int o = 0; o < nout; ++o) col += w[static_cast<std::size_t>(o) * nin + i];
        CHECK(g.input[i] == doctest::Approx(col).epsilon(1e-12));
    }
}

TEST_CASE("every layer kind passes finite-difference checks on random instances") {
    Rng rng(20240915);
    for (int instance = 0; instance < 8; ++instance) {
        const int h = rng.uniform_int(5, 9);
        const int w = rng.uniform_int(5, 9);
        const int ic = rng.uniform_int(1, 3);
        const int oc = rng.uniform_int(1, 3);

        auto conv = check_layer(LayerSpec::conv(ic, oc, 3, 3, rng.uniform_int(1, 2), instance % 2 == 0),
                                testutil::random_tensor({ic, h, w}, rng), rng, 1e-4);
        CHECK_MESSAGE(conv.pass, "conv instance ", instance, " max rel err ", conv.max_rel_error);

        auto pool = check_layer(LayerSpec::maxpool(2, 2), testutil::separated_random_tensor({ic, h, w}, rng),
                                rng, 1e-4);
        CHECK_MESSAGE(pool.pass, "maxpool instance ", instance, " max rel err ", pool.max_rel_error);

        auto relu = check_layer(LayerSpec::relu(), testutil::random_tensor_away_from_zero({ic, h, w}, rng),
                                rng, 1e-4);
        CHECK_MESSAGE(relu.pass, "relu instance ", instance, " max rel err ", relu.max_rel_error);

        auto gap = check_layer(LayerSpec::global_avg_pool(), testutil::random_tensor({ic, h, w}, rng), rng, 1e-4);
        CHECK_MESSAGE(gap.pass, "gap instance ", instance, " max rel err ", gap.max_rel_error);

        const int nin = rng.uniform_int(3, 10);
        const int nout = rng.uniform_int(2, 6);
        auto fc = check_layer(LayerSpec::fully_connected(nin, nout), testutil::random_tensor({nin}, rng), rng,
                              1e-4);
        CHECK_MESSAGE(fc.pass, "fc instance ", instance, " max rel err ", fc.max_rel_error);

        auto sm = check_layer(LayerSpec::softmax(), testutil::random_tensor({nin}, rng), rng, 1e-4);
        CHECK_MESSAGE(sm.pass, "softmax instance ", instance, " max rel err ", sm.max_rel_error);
    }
}

TEST_CASE("softmax outputs are probability vectors") {
    Rng rng(33);
    for (int i = 0; i < 50; ++i) {
        ParamSet none;
        Tensor out = forward(LayerSpec::softmax(), none, "", testutil::random_tensor({6}, rng, -30, 30));
        double total = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            CHECK(out[k] >= 0.0);
            CHECK(out[k] <= 1.0);
            total += out[k];
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("forward is deterministic bit for bit") {
    Rng rng(99);
    ParamSet params;
    params.add("c.weight", glorot_init({4, 2, 3, 3}, rng));
    params.add("c.bias", glorot_init({4}, rng));
    Tensor input = testutil::random_tensor({2, 10, 8}, rng);
    auto spec = LayerSpec::conv(2, 4, 3, 3);
    Tensor a = forward(spec, params, "c", input);
    Tensor b = forward(spec, params, "c", input);
    CHECK(a.values() == b.values());
}

TEST_CASE("maxpool backward routes each upstream entry to exactly one input cell") {
    Rng rng(17);
    auto spec = LayerSpec::maxpool(2, 2);  // stride = window: disjoint
    Tensor input = testutil::separated_random_tensor({2, 6, 6}, rng);
    Tensor upstream = testutil::random_tensor(infer_output_shape(spec, input.shape()), rng);
    ParamSet none;
    LayerGradients g = backward(spec, none, "", input, upstream);
    CHECK(g.input.sum() == doctest::Approx(upstream.sum()).epsilon(1e-12));

    std::size_t touched = 0;
    for (std::size_t i = 0; i < g.input.size(); ++i) touched += g.input[i] != 0.0 ? 1 : 0;
    CHECK(touched == upstream.size());
}

TEST_CASE("cross entropy matches the clamped log formula") {
    CHECK(cross_entropy(Tensor::from_values({1, 0, 0, 0}), 0) == 0.0);
    CHECK(cross_entropy(Tensor::from_values({0.25, 0.25, 0.25, 0.25}), 2) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(cross_entropy(Tensor::from_values({0.7, 0.1, 0.1, 0.1}), 1) ==
          doctest::Approx(-std::log(0.1)).epsilon(1e-12));
    CHECK(cross_entropy(Tensor::from_values({0, 1}), 0) == doctest::Approx(-std::log(1e-12)));
    CHECK_THROWS_AS(cross_entropy(Tensor::from_values({0.5, 0.5}), 2), Error);
    CHECK_THROWS_AS(cross_entropy(Tensor::from_values({0.5, 0.5}), -1), Error);
}

TEST_CASE("adam with zero gradients is a fixed point from initialization") {
    Rng rng(5);
    ParamSet params;
    params.add("w", glorot_init({4, 3}, rng));
    const auto before = params.at("w").values();

    Gradients zero(params);
    for (int i = 0; i < 10; ++i) adam_step(params, zero, 1e-3);
    CHECK(params.at("w").values() == before);
    CHECK(params.step() == 10);
}

TEST_CASE("adam first step magnitude is approximately the learning rate") {
    ParamSet params;
    params.add("w", Tensor::from_values({1.0}));
    Gradients g(params);
    g.at("w")[0] = 1.0;
    adam_step(params, g, 1e-3);
    CHECK(params.at("w")[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-9));
}

TEST_CASE("adam converges on a 1-D quadratic") {
    ParamSet params;
    params.add("w", Tensor::from_values({0.0}));
    for (int step = 0; step < 500; ++step) {
        Gradients g(params);
        g.at("w")[0] = 2.0 * (params.at("w")[0] - 3.0);
        adam_step(params, g, 0.1);
    }
    CHECK(std::abs(params.at("w")[0] - 3.0) < 0.01);
}

TEST_CASE("adam moments decay toward zero under zero gradients") {
    ParamSet params;
    params.add("w", Tensor::from_values({1.0}));
    Gradients g(params);
    g.at("w")[0] = 1.0;
    adam_step(params, g, 1e-3);
    const double m1 = params.first_moment("w")[0];

    Gradients zero(params);
    adam_step(params, zero, 1e-3);
    adam_step(params, zero, 1e-3);
    CHECK(std::abs(params.first_moment("w")[0]) < std::abs(m1));
    CHECK(params.first_moment("w")[0] == doctest::Approx(m1 * 0.9 * 0.9).epsilon(1e-12));
}

TEST_CASE("adam rejects non-finite gradients naming the parameter") {
    ParamSet params;
    params.add("tricky", Tensor::from_values({1.0}));
    Gradients g(params);
    g.at("tricky")[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(adam_step(params, g, 1e-3), doctest::Contains("tricky"), Error);
}

TEST_CASE("glorot samples respect the bound and are seed deterministic") {
    CHECK(glorot_bound({100, 100}) == doctest::Approx(std::sqrt(6.0 / 200.0)).epsilon(1e-12));

    Rng a(42), b(42);
    Tensor t1 = glorot_init({100, 100}, a);
    Tensor t2 = glorot_init({100, 100}, b);
    CHECK(t1.values() == t2.values());

    const double bound = glorot_bound({100, 100});
    for (double v : t1.values()) {
        CHECK(v <= bound);
        CHECK(v >= -bound);
    }

    Rng c(7);
    Tensor big = glorot_init({512, 512}, c);
    CHECK(std::abs(big.sum() / static_cast<double>(big.size())) < 0.01);
}

TEST_CASE("gradient check is near exact for a linear model") {
    Rng rng(123);
    ParamSet params;
    params.add("f.weight", glorot_init({3, 6}, rng));
    params.add("f.bias", glorot_init({3}, rng));
    Tensor x = testutil::random_tensor({6}, rng);
    auto spec = LayerSpec::fully_connected(6, 3);
    Tensor readout = testutil::random_tensor({3}, rng);

    auto loss = [&](const ParamSet& p) {
        Tensor y = forward(spec, p, "f", x);
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += readout[i] * y[i];
        return acc;
    };
    auto analytic = [&](const ParamSet& p, Gradients& g) {
        LayerGradients lg = backward(spec, p, "f", x, readout);
        g.accumulate("f.weight", lg.weight);
        g.accumulate("f.bias", lg.bias);
    };
    auto report = gradient_check(loss, analytic, params, 1e-7);
    CHECK(report.pass);
    CHECK(report.max_rel_error < 1e-7);
}

TEST_CASE("gradient check passes a conv+dense toy network") {
    Rng rng(2024);
    Stack stack = {
        {LayerSpec::conv(1, 2, 3, 3), "conv"},
        {LayerSpec::relu(), ""},
        {LayerSpec::global_avg_pool(), ""},
        {LayerSpec::fully_connected(2, 3), "out"},
        {LayerSpec::softmax(), ""},
    };
    ParamSet params;
    for (const auto& node : stack) {
        for (const auto& [suffix, shape] : node.spec.param_shapes()) {
            if (suffix == "bias") {
                params.add(node.prefix + "." + suffix, Tensor::zeros(shape));
            } else {
                params.add(node.prefix + "." + suffix, glorot_init(shape, rng));
            }
        }
    }
    Tensor input = testutil::random_tensor({1, 8, 7}, rng);
    const int label = 1;

    auto loss = [&](const ParamSet& p) { return cross_entropy(forward_stack(stack, p, input), label); };
    auto analytic = [&](const ParamSet& p, Gradients& g) {
        std::vector<Tensor> acts;
        Tensor probs = forward_stack(stack, p, input, &acts);
        backward_stack(stack, p, acts, cross_entropy_backward(probs, label), g);
    };
    auto report = gradient_check(loss, analytic, params, 1e-4);
    CHECK_MESSAGE(report.pass, "max rel err ", report.max_rel_error);
}

TEST_CASE("gradient check flags a doubled backward with relative error near 1/3") {
    Rng rng(55);
    ParamSet params;
    params.add("f.weight", glorot_init({2, 4}, rng));
    params.add("f.bias", glorot_init({2}, rng));
    Tensor x = testutil::random_tensor_away_from_zero({4}, rng);
    auto spec = LayerSpec::fully_connected(4, 2);
    Tensor readout = Tensor::full({2}, 1.0);

    auto loss = [&](const ParamSet& p) {
        Tensor y = forward(spec, p, "f", x);
        return y[0] + y[1];
    };
    auto corrupted = [&](const ParamSet& p, Gradients& g) {
        LayerGradients lg = backward(spec, p, "f", x, readout);
        g.accumulate("f.weight", lg.weight, 2.0);  // deliberately doubled
        g.accumulate("f.bias", lg.bias, 2.0);
    };
    auto report = gradient_check(loss, corrupted, params, 1e-4);
    CHECK_FALSE(report.pass);
    CHECK(report.max_rel_error == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("gradient check can subsample components deterministically") {
    Rng rng(77);
    ParamSet params;
    params.add("f.weight", glorot_init({8, 16}, rng));
    params.add("f.bias", glorot_init({8}, rng));
    Tensor x = testutil::random_tensor({16}, rng);
    auto spec = LayerSpec::fully_connected(16, 8);
    Tensor readout = testutil::random_tensor({8}, rng);

    auto loss = [&](const ParamSet& p) {
        Tensor y = forward(spec, p, "f", x);
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) acc += readout[i] * y[i];
        return acc;
    };
    auto analytic = [&](const ParamSet& p, Gradients& g) {
        LayerGradients lg = backward(spec, p, "f", x, readout);
        g.accumulate("f.weight", lg.weight);
        g.accumulate("f.bias", lg.bias);
    };
    GradCheckOptions opts;
    opts.max_probes_per_param = 10;
    auto report = gradient_check(loss, analytic, params, 1e-6, opts);
    CHECK(report.pass);
    CHECK(report.per_parameter[0].components_checked <= 10);
}

TEST_CASE("NTW container round-trips bit exactly") {
    testutil::TempDir tmp("ntw");
    Rng rng(404);
    ParamSet params;
    params.add("column.l0.weight", glorot_init({4, 1, 3, 3}, rng));
    params.add("column.l0.bias", testutil::random_tensor({4}, rng, -1e300, 1e300));
    params.add("head.out.weight", glorot_init({4, 16}, rng));

    const auto path = tmp.path() / "model.ntw";
    save_ntw(path, params);
    ParamSet loaded = load_ntw(path);

    CHECK(loaded.names() == params.names());
    for (const auto& name : params.names()) {
        CHECK(loaded.at(name).shape() == params.at(name).shape());
        CHECK(loaded.at(name).values() == params.at(name).values());
    }

    // Re-saving the loaded set reproduces the file byte for byte.
    const auto path2 = tmp.path() / "model2.ntw";
    save_ntw(path2, loaded);
    CHECK(density::read_text_file(path) == density::read_text_file(path2));
}

TEST_CASE("NTW loader rejects malformed containers") {
    testutil::TempDir tmp("ntwbad");
    const auto path = tmp.path() / "bad.ntw";
    density::write_text_file(path, "NOTAWEIGHTFILE");
    CHECK_THROWS_AS(load_ntw(path), Error);
}
