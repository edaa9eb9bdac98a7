#include "latentpde/hyper_unet.hpp"

#include <nlohmann/json.hpp>

#include "latentpde/errors.hpp"

namespace latentpde {

HyperUNetConfig HyperUNetConfig::default_for_equation(const std::string& equation) {
    HyperUNetConfig c;
    if (equation == "viscid_burgers") {
        c.d_w = 4;
        c.d_l = 128;
        c.d_g = 512;
    } else if (equation == "kuramoto_sivashinsky" || equation == "kdv") {
        c.d_w = 4;
        c.d_l = 512;
        c.d_g = 1024;
    } else {
        throw ConfigError("HyperUNetConfig: unknown equation '" + equation + "'");
    }
    return c;
}

nlohmann::json HyperUNetConfig::to_json() const {
    return {{"d_w", d_w}, {"d_l", d_l}, {"d_g", d_g}, {"mix_blocks", mix_blocks}};
}

HyperUNetConfig HyperUNetConfig::from_json(const nlohmann::json& j) {
    HyperUNetConfig c;
    c.d_w = j.at("d_w").get<int64_t>();
    c.d_l = j.at("d_l").get<int64_t>();
    c.d_g = j.at("d_g").get<int64_t>();
    c.mix_blocks = j.value("mix_blocks", 1);
    return c;
}

MixerBlockImpl::MixerBlockImpl(int64_t channels) {
    fc1 = register_module("fc1", torch::nn::Linear(channels, channels));
    fc2 = register_module("fc2", torch::nn::Linear(channels, channels));
    norm = register_module("norm",
                           torch::nn::LayerNorm(torch::nn::LayerNormOptions({channels})));
}

torch::Tensor MixerBlockImpl::forward(const torch::Tensor& x) {
    return norm(x + fc2(torch::silu(fc1(x))));
}

HyperUNetImpl::HyperUNetImpl(ThetaLayout layout, HyperUNetConfig config)
    : layout_(std::move(layout)), config_(config) {
    if (layout_.groups.empty()) throw ConfigError("HyperUNet: layout has no groups");
    const int64_t n_l = static_cast<int64_t>(layout_.groups.size());

    auto make_mix_stack = [&](const std::string& name, int64_t channels) {
        std::vector<MixerBlock> stack;
        for (int64_t m = 0; m < config_.mix_blocks; ++m) {
            auto block = MixerBlock(channels);
            register_module(name + "_m" + std::to_string(m), block);
            stack.push_back(block);
        }
        return stack;
    };

    for (int64_t g = 0; g < n_l; ++g) {
        const auto& group = layout_.groups[static_cast<size_t>(g)];
        const std::string tag = "g" + std::to_string(g);

        proj_in_.push_back(register_parameter(
            tag + "_proj_in", torch::randn({group.size, config_.d_w}) /
                                  std::sqrt(static_cast<double>(config_.d_w))));
        proj_out_.push_back(
            register_parameter(tag + "_proj_out", torch::zeros({group.size, config_.d_w})));

        mix_w_down_.push_back(make_mix_stack(tag + "_mix_w_down", config_.d_w));
        mix_w_up_.push_back(make_mix_stack(tag + "_mix_w_up", config_.d_w));
        mix_l_down_.push_back(make_mix_stack(tag + "_mix_l_down", config_.d_l));
        mix_l_up_.push_back(make_mix_stack(tag + "_mix_l_up", config_.d_l));

        down_.push_back(register_module(
            tag + "_down", torch::nn::Linear(group.size * config_.d_w, config_.d_l)));
        up_.push_back(register_module(
            tag + "_up", torch::nn::Linear(config_.d_l, group.size * config_.d_w)));
        merge_l_.push_back(
            register_module(tag + "_merge_l", torch::nn::Linear(2 * config_.d_l, config_.d_l)));
        merge_w_.push_back(
            register_module(tag + "_merge_w", torch::nn::Linear(2 * config_.d_w, config_.d_w)));
    }

    mix_global_ = make_mix_stack("mix_global", config_.d_g);
    compress_ = register_module("compress", torch::nn::Linear(n_l * config_.d_l, config_.d_g));
    expand_ = register_module("expand", torch::nn::Linear(config_.d_g, n_l * config_.d_l));
}

torch::Tensor HyperUNetImpl::mix(std::vector<MixerBlock>& stack, const torch::Tensor& x) {
    auto h = x;
    for (auto& block : stack) h = block(h);
    return h;
}

torch::Tensor HyperUNetImpl::forward(const torch::Tensor& theta) {
    const bool batched = theta.dim() == 2;
    auto th = batched ? theta : theta.unsqueeze(0);
    if (th.dim() != 2 || th.size(1) != layout_.total) {
        throw DimensionError("HyperUNet: theta length does not match layout total " +
                             std::to_string(layout_.total));
    }
    const int64_t n_l = static_cast<int64_t>(layout_.groups.size());

    std::vector<torch::Tensor> weight_feats(static_cast<size_t>(n_l));
    std::vector<torch::Tensor> layer_embeds(static_cast<size_t>(n_l));
    for (int64_t g = 0; g < n_l; ++g) {
        const auto& group = layout_.groups[static_cast<size_t>(g)];
        auto seg = th.narrow(1, group.offset, group.size); // [B, s]
        auto h = seg.unsqueeze(-1) * proj_in_[static_cast<size_t>(g)]; // [B, s, D_w]
        h = mix(mix_w_down_[static_cast<size_t>(g)], h);
        weight_feats[static_cast<size_t>(g)] = h;

        auto e = down_[static_cast<size_t>(g)](h.flatten(1)); // [B, D_l]
        layer_embeds[static_cast<size_t>(g)] = mix(mix_l_down_[static_cast<size_t>(g)], e);
    }

    torch::Tensor expanded;
    if (cross_group_paths_) {
        auto all_layers = torch::cat(layer_embeds, 1);          // [B, N_l * D_l]
        auto global_embed = mix(mix_global_, compress_(all_layers)); // [B, D_g]
        expanded = expand_(global_embed);                       // [B, N_l * D_l]
    }

    std::vector<torch::Tensor> outputs(static_cast<size_t>(n_l));
    for (int64_t g = 0; g < n_l; ++g) {
        const auto& group = layout_.groups[static_cast<size_t>(g)];
        auto from_global = cross_group_paths_
                               ? expanded.narrow(1, g * config_.d_l, config_.d_l)
                               : torch::zeros_like(layer_embeds[static_cast<size_t>(g)]);
        auto merged = merge_l_[static_cast<size_t>(g)](
            torch::cat({from_global, layer_embeds[static_cast<size_t>(g)]}, 1));
        merged = mix(mix_l_up_[static_cast<size_t>(g)], merged);

        auto h_up = up_[static_cast<size_t>(g)](merged).reshape(
            {th.size(0), group.size, config_.d_w});
        auto h = merge_w_[static_cast<size_t>(g)](
            torch::cat({h_up, weight_feats[static_cast<size_t>(g)]}, -1));
        h = mix(mix_w_up_[static_cast<size_t>(g)], h);

        outputs[static_cast<size_t>(g)] = (h * proj_out_[static_cast<size_t>(g)]).sum(-1);
    }

    auto out = torch::cat(outputs, 1);
    return batched ? out : out.squeeze(0);
}

} // namespace latentpde
