#include "latentpde/encoder.hpp"

#include <nlohmann/json.hpp>

#include "latentpde/errors.hpp"

namespace latentpde {

nlohmann::json EncoderConfig::to_json() const {
    return {{"num_levels", num_levels},
            {"base_channels", base_channels},
            {"input_length", input_length},
            {"output_dim", output_dim},
            {"kernel_size", kernel_size}};
}

EncoderConfig EncoderConfig::from_json(const nlohmann::json& j) {
    EncoderConfig c;
    c.num_levels = j.at("num_levels").get<int64_t>();
    c.base_channels = j.at("base_channels").get<int64_t>();
    c.input_length = j.at("input_length").get<int64_t>();
    c.output_dim = j.at("output_dim").get<int64_t>();
    c.kernel_size = j.value("kernel_size", 3);
    return c;
}

torch::Tensor periodic_pad(const torch::Tensor& u, int64_t pad) {
    if (pad == 0) return u;
    const int64_t n = u.size(-1);
    if (pad < 0 || pad >= n) {
        throw ConfigError("periodic_pad: pad must be in [0, N), got " + std::to_string(pad));
    }
    auto left = u.narrow(-1, n - pad, pad);
    auto right = u.narrow(-1, 0, pad);
    return torch::cat({left, u, right}, -1);
}

EncoderResBlockImpl::EncoderResBlockImpl(int64_t in_channels, int64_t out_channels,
                                         int64_t stride, int64_t kernel_size)
    : pad_((kernel_size - 1) / 2) {
    conv1 = register_module(
        "conv1", torch::nn::Conv1d(
                     torch::nn::Conv1dOptions(in_channels, out_channels, kernel_size)
                         .stride(stride)));
    bn1 = register_module("bn1", torch::nn::BatchNorm1d(out_channels));
    conv2 = register_module(
        "conv2",
        torch::nn::Conv1d(torch::nn::Conv1dOptions(out_channels, out_channels, kernel_size)));
    bn2 = register_module("bn2", torch::nn::BatchNorm1d(out_channels));
    if (in_channels != out_channels || stride != 1) {
        projection = register_module(
            "projection", torch::nn::Conv1d(torch::nn::Conv1dOptions(in_channels, out_channels, 1)
                                                .stride(stride)));
    }
}

torch::Tensor EncoderResBlockImpl::forward(const torch::Tensor& x) {
    auto h = conv1(periodic_pad(x, pad_));
    h = torch::sin(bn1(h));
    h = bn2(conv2(periodic_pad(h, pad_)));
    auto shortcut = projection ? projection(x) : x;
    return h + shortcut;
}

EncoderImpl::EncoderImpl(EncoderConfig config) : config_(std::move(config)) {
    if (config_.num_levels < 1) throw ConfigError("Encoder: num_levels must be >= 1");
    if (config_.output_dim < 1) throw ConfigError("Encoder: output_dim must be set");
    if (config_.input_length < 1 ||
        config_.input_length % (1LL << config_.num_levels) != 0) {
        throw ConfigError("Encoder: input_length " + std::to_string(config_.input_length) +
                          " is not divisible by 2^" + std::to_string(config_.num_levels));
    }

    int64_t in = 1;
    for (int64_t level = 1; level <= config_.num_levels; ++level) {
        const int64_t out = config_.base_channels << level;
        auto down = EncoderResBlock(in, out, 2, config_.kernel_size);
        auto regular = EncoderResBlock(out, out, 1, config_.kernel_size);
        register_module("level" + std::to_string(level) + "_down", down);
        register_module("level" + std::to_string(level) + "_regular", regular);
        blocks_.push_back(down);
        blocks_.push_back(regular);
        in = out;
    }
    // flattened width is channels * length = base_channels * input_length
    head = register_module(
        "head",
        torch::nn::Linear(config_.base_channels * config_.input_length, config_.output_dim));
}

torch::Tensor EncoderImpl::prepare(const torch::Tensor& u, bool& batched) const {
    torch::Tensor x = u;
    batched = true;
    if (x.dim() == 1) {
        x = x.unsqueeze(0);
        batched = false;
    }
    if (x.dim() == 2) x = x.unsqueeze(1); // [B, 1, N]
    if (x.dim() != 3 || x.size(1) != 1) {
        throw DimensionError("Encoder: expected [N], [B,N] or [B,1,N] input");
    }
    const int64_t n = x.size(2);
    if (n % (1LL << config_.num_levels) != 0) {
        throw ConfigError("Encoder: input length " + std::to_string(n) +
                          " is not divisible by 2^" + std::to_string(config_.num_levels));
    }
    if (n != config_.input_length) {
        throw DimensionError("Encoder: input length " + std::to_string(n) +
                             " does not match configured " +
                             std::to_string(config_.input_length));
    }
    return x;
}

EncoderImpl::Trace EncoderImpl::forward_trace(const torch::Tensor& u) {
    bool batched = true;
    auto x = prepare(u, batched);

    Trace trace;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        x = blocks_[i]->forward(x);
        if (i % 2 == 1) trace.level_outputs.push_back(x);
    }
    auto flat = x.flatten(1);
    trace.theta = head(flat);
    if (!batched) trace.theta = trace.theta.squeeze(0);
    return trace;
}

torch::Tensor EncoderImpl::forward(const torch::Tensor& u) {
    return forward_trace(u).theta;
}

int64_t parameter_count(const torch::nn::Module& module) {
    int64_t count = 0;
    for (const auto& p : module.parameters()) count += p.numel();
    return count;
}

} // namespace latentpde
