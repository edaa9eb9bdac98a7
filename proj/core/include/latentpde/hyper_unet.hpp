#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include <nlohmann/json_fwd.hpp>

#include "latentpde/ansatz.hpp"

namespace latentpde {

struct HyperUNetConfig {
    int64_t d_w = 4;    // per-weight channel width
    int64_t d_l = 512;  // layer-embedding width
    int64_t d_g = 1024; // global-embedding width
    int64_t mix_blocks = 1; // mixing blocks per level per leg

    static HyperUNetConfig default_for_equation(const std::string& equation);

    nlohmann::json to_json() const;
    static HyperUNetConfig from_json(const nlohmann::json& j);
    bool operator==(const HyperUNetConfig&) const = default;
};

/// Dense -> swish -> Dense -> residual -> LayerNorm over the last dimension.
class MixerBlockImpl : public torch::nn::Module {
public:
    explicit MixerBlockImpl(int64_t channels);
    torch::Tensor forward(const torch::Tensor& x);

private:
    torch::nn::Linear fc1{nullptr}, fc2{nullptr};
    torch::nn::LayerNorm norm{nullptr};
};
TORCH_MODULE(MixerBlock);

/// theta -> dtheta/dt on the weight/layer/graph levels of the ansatz
/// computational graph. Per group: 1->D_w projection, channel mixing,
/// locally-connected downsampling to a D_l embedding, layer mixing, global
/// compression to D_g, global mixing, then the mirrored upsampling leg with
/// skip concatenations, and a zero-initialized D_w->1 output projection.
class HyperUNetImpl : public torch::nn::Module {
public:
    HyperUNetImpl(ThetaLayout layout, HyperUNetConfig config);

    /// theta: [P] or [B, P]; returns the same shape.
    torch::Tensor forward(const torch::Tensor& theta);

    const ThetaLayout& layout() const { return layout_; }
    const HyperUNetConfig& config() const { return config_; }

    /// Diagnostic: with cross-group paths disabled the global leg is zeroed,
    /// so group g's output depends only on group g's input and parameters.
    void set_cross_group_paths(bool enabled) { cross_group_paths_ = enabled; }
    bool cross_group_paths() const { return cross_group_paths_; }

private:
    torch::Tensor mix(std::vector<MixerBlock>& stack, const torch::Tensor& x);

    ThetaLayout layout_;
    HyperUNetConfig config_;
    bool cross_group_paths_ = true;

    std::vector<torch::Tensor> proj_in_, proj_out_; // [s_g, D_w] each
    std::vector<std::vector<MixerBlock>> mix_w_down_, mix_l_down_, mix_l_up_, mix_w_up_;
    std::vector<MixerBlock> mix_global_;
    std::vector<torch::nn::Linear> down_, up_, merge_l_, merge_w_;
    torch::nn::Linear compress_{nullptr}, expand_{nullptr};
};
TORCH_MODULE(HyperUNet);

} // namespace latentpde
