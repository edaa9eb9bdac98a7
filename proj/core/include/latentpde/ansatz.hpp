#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include <nlohmann/json_fwd.hpp>

#include "latentpde/grid.hpp"

namespace latentpde {

/// Functional form of the periodic decoder: K fixed sin/cos envelopes with
/// trainable phases, amplitude-modulated by a small MLP that maps the
/// feature channels onto themselves.
struct AnsatzSpec {
    std::vector<int64_t> mlp_features; // hidden widths
    std::string activation = "swish";  // swish | sin | relu | tanh
    int64_t num_freqs = 3;             // K
    std::string freq_profile = "dyadic"; // linear | dyadic
    bool has_zero_freq = false;
    double domain_length = 1.0;

    /// 2K sin/cos channels plus one constant channel when has_zero_freq.
    int64_t feature_dim() const;
    /// omega_k, k = 1..K: 2*pi*k/L (linear) or 2*pi*2^(k-1)/L (dyadic),
    /// so every term is exactly L-periodic.
    std::vector<double> frequencies() const;
    int64_t param_count() const;

    /// Table-style per-system defaults: VB (4,4)/swish/3/dyadic,
    /// KS (8,8)/sin/3/linear, KdV (8,8)/swish/6/dyadic + zero channel.
    static AnsatzSpec default_for_equation(const std::string& equation, double domain_length);

    nlohmann::json to_json() const;
    static AnsatzSpec from_json(const nlohmann::json& j);

    bool operator==(const AnsatzSpec&) const = default;
};

/// Flat-theta segment table. Segment order: layer0.weight, layer0.bias, ...,
/// phases (first K sin phases a_k, then K cos phases a_{-k}).
struct ThetaLayout {
    struct Segment {
        std::string name;
        std::vector<int64_t> shape;
        int64_t offset = 0;
        int64_t size = 0;
    };
    /// Contiguous group per MLP layer ({W, b} together) plus one for phases;
    /// this is the partition the latent dynamics model operates on.
    struct Group {
        std::string name;
        int64_t offset = 0;
        int64_t size = 0;
    };

    std::vector<Segment> segments;
    std::vector<Group> groups;
    int64_t total = 0;

    static ThetaLayout for_ansatz(const AnsatzSpec& spec);
    /// Ad-hoc layout from raw group sizes (for synthetic latent systems).
    static ThetaLayout from_group_sizes(const std::vector<std::pair<std::string, int64_t>>& sizes);

    const Segment& segment(const std::string& name) const;
};

/// Evaluator for the ansatz. Stateless apart from the spec; all trainable
/// state lives in the theta vectors.
class NfaDecoder {
public:
    explicit NfaDecoder(AnsatzSpec spec);

    const AnsatzSpec& spec() const { return spec_; }
    const ThetaLayout& layout() const { return layout_; }

    /// theta: [P] or [B,P]; x: scalar tensor, [M] or [B,M].
    /// Returns [M] / [B,M] matching the batching of the inputs.
    torch::Tensor evaluate(const torch::Tensor& theta, const torch::Tensor& x) const;
    torch::Tensor evaluate_on_grid(const torch::Tensor& theta, const Grid1D& grid) const;

    /// Plain-double convenience (no autograd).
    std::vector<double> evaluate(std::span<const double> theta,
                                 std::span<const double> x) const;

    /// Mutually inverse bijections between flat theta and per-segment tensors.
    std::vector<torch::Tensor> unflatten(const torch::Tensor& theta) const;
    torch::Tensor flatten(const std::vector<torch::Tensor>& tensors) const;

    /// Fan-in uniform MLP init, phases uniform in [0, 2*pi).
    torch::Tensor random_theta(torch::Generator& gen,
                               torch::Dtype dtype = torch::kFloat32) const;

private:
    AnsatzSpec spec_;
    ThetaLayout layout_;
    torch::Tensor frequencies_f64_;
};

struct AutoDecoderOptions {
    int64_t steps = 10000;
    double lr = 1e-3;
    double lr_decay_factor = 1.0; // multiply lr by this every steps_per_decay
    int64_t steps_per_decay = 1000;
    int64_t batch = 4;
    uint64_t seed = 0;
    torch::Dtype dtype = torch::kFloat32;
    int64_t log_every = 1000;
    /// Independent random inits per snapshot; the best fit is kept.
    int64_t num_restarts = 1;
};

struct AutoDecoderResult {
    torch::Tensor thetas;            // [S, P]
    std::vector<double> rel_rmse;    // absolute RMSE (0) for zero-norm targets
    std::vector<bool> zero_norm;
    std::vector<double> loss_history;
};

/// Auto-decoder fitting: per-snapshot theta vectors minimizing the mean
/// squared reconstruction error on the grid, no encoder involved.
AutoDecoderResult fit_auto_decoder(const std::vector<std::vector<double>>& snapshots,
                                   const AnsatzSpec& spec, const Grid1D& grid,
                                   const AutoDecoderOptions& opts);

} // namespace latentpde
