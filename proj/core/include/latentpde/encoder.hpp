#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include <nlohmann/json_fwd.hpp>

namespace latentpde {

struct EncoderConfig {
    int64_t num_levels = 4;   // 4 (KS, KdV) or 5 (VB)
    int64_t base_channels = 2;
    int64_t input_length = 0; // grid points N, divisible by 2^num_levels
    int64_t output_dim = 0;   // theta length
    int64_t kernel_size = 3;

    nlohmann::json to_json() const;
    static EncoderConfig from_json(const nlohmann::json& j);
    bool operator==(const EncoderConfig&) const = default;
};

/// Circular wrap of the last dimension by pad entries on each side.
torch::Tensor periodic_pad(const torch::Tensor& u, int64_t pad);

/// Conv -> BatchNorm -> sin -> Conv -> BatchNorm with periodic padding,
/// plus a 1x1 projection shortcut when shape changes.
class EncoderResBlockImpl : public torch::nn::Module {
public:
    EncoderResBlockImpl(int64_t in_channels, int64_t out_channels, int64_t stride,
                        int64_t kernel_size);
    torch::Tensor forward(const torch::Tensor& x);

private:
    torch::nn::Conv1d conv1{nullptr}, conv2{nullptr}, projection{nullptr};
    torch::nn::BatchNorm1d bn1{nullptr}, bn2{nullptr};
    int64_t pad_;
};
TORCH_MODULE(EncoderResBlock);

/// Snapshot -> theta hypernetwork: num_levels stages of (downsampling block,
/// regular block), each halving length and doubling channels, then one fully
/// connected layer onto the theta dimension.
class EncoderImpl : public torch::nn::Module {
public:
    explicit EncoderImpl(EncoderConfig config);

    /// u: [N], [B, N] or [B, 1, N]; returns [output_dim] or [B, output_dim].
    torch::Tensor forward(const torch::Tensor& u);

    /// Per-level activations (for shape diagnostics) plus the final theta.
    struct Trace {
        std::vector<torch::Tensor> level_outputs;
        torch::Tensor theta;
    };
    Trace forward_trace(const torch::Tensor& u);

    const EncoderConfig& config() const { return config_; }

private:
    torch::Tensor prepare(const torch::Tensor& u, bool& batched) const;

    EncoderConfig config_;
    std::vector<EncoderResBlock> blocks_;
    torch::nn::Linear head{nullptr};
};
TORCH_MODULE(Encoder);

int64_t parameter_count(const torch::nn::Module& module);

} // namespace latentpde
