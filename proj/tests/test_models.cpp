#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "torch_doctest.hpp"

#include <cmath>

#include "latentpde/ansatz.hpp"
#include "latentpde/encoder.hpp"
#include "latentpde/errors.hpp"
#include "latentpde/hyper_unet.hpp"

using namespace latentpde;

namespace {

EncoderConfig ks_encoder_config(int64_t n = 512) {
    return {.num_levels = 4, .base_channels = 2, .input_length = n, .output_dim = 188};
}

EncoderConfig vb_encoder_config(int64_t n = 512) {
    return {.num_levels = 5, .base_channels = 2, .input_length = n, .output_dim = 84};
}

} // namespace

TEST_CASE("periodic_pad: circular wrap and identity") {
    auto u = torch::tensor({1.0, 2.0, 3.0, 4.0});
    auto padded = periodic_pad(u, 1);
    auto expect = torch::tensor({4.0, 1.0, 2.0, 3.0, 4.0, 1.0});
    CHECK(torch::equal(padded, expect));
    CHECK(torch::equal(periodic_pad(u, 0), u));
    CHECK_THROWS_AS(periodic_pad(u, 4), ConfigError);
}

TEST_CASE("periodic_pad + mean kernel matches a direct circular convolution") {
    torch::manual_seed(2);
    auto u = torch::randn({1, 1, 16}, torch::kFloat64);
    auto kernel = torch::ones({1, 1, 3}, torch::kFloat64) / 3.0;
    auto out = torch::conv1d(periodic_pad(u, 1), kernel);
    REQUIRE(out.size(2) == 16);

    // direct circular convolution oracle
    for (int i = 0; i < 16; ++i) {
        double acc = 0.0;
        for (int t = -1; t <= 1; ++t) {
            acc += u[0][0][(i + t + 16) % 16].item<double>() / 3.0;
        }
        CHECK(out[0][0][i].item<double>() == doctest::Approx(acc).epsilon(1e-12));
    }

    // constant field stays constant under the padded mean kernel
    auto constant = torch::full({1, 1, 32}, 0.7, torch::kFloat64);
    auto smoothed = torch::conv1d(periodic_pad(constant, 1), kernel);
    CHECK((smoothed - 0.7).abs().max().item<double>() < 1e-12);
}

TEST_CASE("encoder: output dim per system, eval determinism and batch independence") {
    torch::manual_seed(7);
    Encoder ks(ks_encoder_config());
    Encoder vb(vb_encoder_config());
    ks->eval();
    vb->eval();

    torch::NoGradGuard no_grad;
    auto u = torch::randn({512});
    CHECK(ks->forward(u).sizes() == torch::IntArrayRef({188}));
    CHECK(vb->forward(u).sizes() == torch::IntArrayRef({84}));

    auto once = ks->forward(u);
    auto twice = ks->forward(u);
    CHECK(torch::equal(once, twice));

    auto batch = torch::randn({5, 512});
    batch[2] = u;
    auto from_batch = ks->forward(batch)[2];
    CHECK(torch::allclose(from_batch, once, 1e-6, 1e-7));
}

TEST_CASE("encoder: intermediate shapes follow N/2^l and base*2^l") {
    torch::manual_seed(3);
    Encoder enc(ks_encoder_config(256));
    enc->eval();
    torch::NoGradGuard no_grad;
    auto trace = enc->forward_trace(torch::randn({2, 256}));
    REQUIRE(trace.level_outputs.size() == 4);
    for (int64_t level = 1; level <= 4; ++level) {
        auto& act = trace.level_outputs[static_cast<size_t>(level - 1)];
        CHECK(act.size(1) == 2LL << level);       // base_channels * 2^level
        CHECK(act.size(2) == 256LL >> level);     // N / 2^level
    }
}

TEST_CASE("encoder: non-divisible or mismatched input length") {
    CHECK_THROWS_AS(Encoder(EncoderConfig{.num_levels = 4,
                                          .base_channels = 2,
                                          .input_length = 500,
                                          .output_dim = 10}),
                    ConfigError);
    Encoder enc(ks_encoder_config(256));
    CHECK_THROWS_AS(enc->forward(torch::randn({512})), DimensionError);
}

TEST_CASE("encoder: parameter count within 25% of the published targets") {
    // informational targets: VB 186,268; KS/KdV 218,116
    Encoder vb(vb_encoder_config(512));
    Encoder ks(ks_encoder_config(512));
    const double vb_count = static_cast<double>(parameter_count(*vb));
    const double ks_count = static_cast<double>(parameter_count(*ks));
    CHECK(std::abs(vb_count - 186268.0) / 186268.0 < 0.25);
    CHECK(std::abs(ks_count - 218116.0) / 218116.0 < 0.25);
}

TEST_CASE("encoder: eval-mode input gradient matches finite differences") {
    torch::manual_seed(11);
    Encoder enc(EncoderConfig{
        .num_levels = 3, .base_channels = 2, .input_length = 32, .output_dim = 12});
    enc->to(torch::kFloat64);
    enc->eval();

    auto weights = torch::randn({12}, torch::kFloat64);
    auto u = torch::randn({32}, torch::kFloat64).set_requires_grad(true);
    auto value = (enc->forward(u) * weights).sum();
    value.backward();
    auto grad = u.grad().clone();

    const double h = 1e-6;
    auto fd = torch::zeros_like(grad);
    {
        torch::NoGradGuard no_grad;
        for (int64_t i = 0; i < 32; ++i) {
            auto up = u.detach().clone();
            auto um = u.detach().clone();
            up[i] += h;
            um[i] -= h;
            fd[i] = ((enc->forward(up) * weights).sum() - (enc->forward(um) * weights).sum()) /
                    (2.0 * h);
        }
    }
    CHECK(((grad - fd).norm() / grad.norm()).item<double>() < 1e-4);
}

TEST_CASE("hyper U-Net: shape contract and zero init") {
    torch::manual_seed(5);
    auto spec = AnsatzSpec::default_for_equation("viscid_burgers", 2.0);
    auto layout = ThetaLayout::for_ansatz(spec);
    HyperUNet net(layout, HyperUNetConfig{.d_w = 4, .d_l = 16, .d_g = 32});

    auto theta = torch::randn({84});
    auto out = net->forward(theta);
    CHECK(out.sizes() == theta.sizes());
    // final projection starts at zero, so the initial flow is identically zero
    CHECK(out.abs().max().item<double>() == 0.0);

    auto batch = torch::randn({6, 84});
    CHECK(net->forward(batch).sizes() == batch.sizes());

    CHECK_THROWS_AS(net->forward(torch::randn({83})), DimensionError);
}

TEST_CASE("hyper U-Net: batch consistency after randomizing the output head") {
    torch::manual_seed(6);
    auto layout = ThetaLayout::from_group_sizes({{"a", 5}, {"b", 3}});
    HyperUNet net(layout, HyperUNetConfig{.d_w = 3, .d_l = 8, .d_g = 12});
    for (auto& p : net->named_parameters()) {
        if (p.key().find("proj_out") != std::string::npos) p.value().data().normal_();
    }
    net->eval();

    torch::NoGradGuard no_grad;
    auto batch = torch::randn({4, 8});
    auto batched = net->forward(batch);
    for (int64_t i = 0; i < 4; ++i) {
        auto single = net->forward(batch[i]);
        CHECK(torch::allclose(batched[i], single, 1e-6, 1e-7));
    }
    // deterministic
    CHECK(torch::equal(net->forward(batch), batched));
}

TEST_CASE("hyper U-Net: gradient of ||apply(theta)||^2 matches finite differences") {
    torch::manual_seed(9);
    auto layout = ThetaLayout::from_group_sizes({{"a", 5}, {"b", 3}});
    HyperUNet net(layout, HyperUNetConfig{.d_w = 3, .d_l = 8, .d_g = 12});
    for (auto& p : net->named_parameters()) {
        if (p.key().find("proj_out") != std::string::npos) p.value().data().normal_();
    }
    net->to(torch::kFloat64);
    net->eval();

    auto theta = torch::randn({8}, torch::kFloat64).set_requires_grad(true);
    auto loss = net->forward(theta).pow(2).sum();
    loss.backward();
    auto grad = theta.grad().clone();

    const double h = 1e-6;
    auto fd = torch::zeros_like(grad);
    {
        torch::NoGradGuard no_grad;
        for (int64_t i = 0; i < 8; ++i) {
            auto tp = theta.detach().clone();
            auto tm = theta.detach().clone();
            tp[i] += h;
            tm[i] -= h;
            fd[i] = (net->forward(tp).pow(2).sum() - net->forward(tm).pow(2).sum()).item<double>() /
                    (2.0 * h);
        }
    }
    CHECK(((grad - fd).norm() / grad.norm()).item<double>() < 1e-4);
}

TEST_CASE("hyper U-Net: groups are isolated when cross paths are disabled") {
    torch::manual_seed(13);
    auto layout = ThetaLayout::from_group_sizes({{"a", 6}, {"b", 4}, {"c", 2}});
    HyperUNet net(layout, HyperUNetConfig{.d_w = 3, .d_l = 8, .d_g = 12});
    for (auto& p : net->named_parameters()) {
        if (p.key().find("proj_out") != std::string::npos) p.value().data().normal_();
    }
    net->eval();
    net->set_cross_group_paths(false);

    torch::NoGradGuard no_grad;
    auto theta = torch::randn({12});
    auto base = net->forward(theta);

    // perturb group 1's weight-level mixing parameters
    for (auto& p : net->named_parameters()) {
        if (p.key().find("g1_mix_w_down") != std::string::npos) p.value().data().add_(0.5);
    }
    auto bumped = net->forward(theta);

    auto seg = [&](const torch::Tensor& v, int g) {
        return v.narrow(0, layout.groups[static_cast<size_t>(g)].offset,
                        layout.groups[static_cast<size_t>(g)].size);
    };
    CHECK(torch::equal(seg(bumped, 0), seg(base, 0)));
    CHECK(!torch::equal(seg(bumped, 1), seg(base, 1)));
    CHECK(torch::equal(seg(bumped, 2), seg(base, 2)));

    // with cross paths on, the same perturbation reaches every group
    net->set_cross_group_paths(true);
    auto crossed = net->forward(theta);
    CHECK(!torch::equal(seg(crossed, 0), seg(base, 0)));
}

TEST_CASE("hyper U-Net: parameter count within 25% of the published targets") {
    // informational targets: VB 1,846,612; KS/KdV 17,963,932
    auto vb_layout =
        ThetaLayout::for_ansatz(AnsatzSpec::default_for_equation("viscid_burgers", 2.0));
    auto ks_layout = ThetaLayout::for_ansatz(
        AnsatzSpec::default_for_equation("kuramoto_sivashinsky", 64.0));

    HyperUNet vb(vb_layout, HyperUNetConfig::default_for_equation("viscid_burgers"));
    HyperUNet ks(ks_layout, HyperUNetConfig::default_for_equation("kuramoto_sivashinsky"));

    const double vb_count = static_cast<double>(parameter_count(*vb));
    const double ks_count = static_cast<double>(parameter_count(*ks));
    CHECK(std::abs(vb_count - 1846612.0) / 1846612.0 < 0.25);
    CHECK(std::abs(ks_count - 17963932.0) / 17963932.0 < 0.25);
}
