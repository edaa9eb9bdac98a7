#include "latentpde/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "latentpde/errors.hpp"

namespace latentpde {

namespace {

torch::Tensor apply_activation(const torch::Tensor& x, const std::string& activation) {
    if (activation == "swish") return torch::silu(x);
    if (activation == "sin") return torch::sin(x);
    if (activation == "relu") return torch::relu(x);
    if (activation == "tanh") return torch::tanh(x);
    throw ConfigError("AnsatzSpec: unknown activation '" + activation + "'");
}

} // namespace

int64_t AnsatzSpec::feature_dim() const {
    return 2 * num_freqs + (has_zero_freq ? 1 : 0);
}

std::vector<double> AnsatzSpec::frequencies() const {
    std::vector<double> w(static_cast<size_t>(num_freqs));
    const double base = 2.0 * std::numbers::pi / domain_length;
    for (int64_t k = 1; k <= num_freqs; ++k) {
        if (freq_profile == "linear") {
            w[static_cast<size_t>(k - 1)] = base * static_cast<double>(k);
        } else if (freq_profile == "dyadic") {
            w[static_cast<size_t>(k - 1)] = base * std::pow(2.0, static_cast<double>(k - 1));
        } else {
            throw ConfigError("AnsatzSpec: unknown freq_profile '" + freq_profile + "'");
        }
    }
    return w;
}

int64_t AnsatzSpec::param_count() const {
    int64_t count = 0;
    int64_t in = feature_dim();
    for (int64_t width : mlp_features) {
        count += in * width + width;
        in = width;
    }
    count += in * feature_dim() + feature_dim();
    count += 2 * num_freqs; // phases
    return count;
}

AnsatzSpec AnsatzSpec::default_for_equation(const std::string& equation, double domain_length) {
    AnsatzSpec spec;
    spec.domain_length = domain_length;
    if (equation == "viscid_burgers") {
        spec.mlp_features = {4, 4};
        spec.activation = "swish";
        spec.num_freqs = 3;
        spec.freq_profile = "dyadic";
        spec.has_zero_freq = false;
    } else if (equation == "kuramoto_sivashinsky") {
        spec.mlp_features = {8, 8};
        spec.activation = "sin";
        spec.num_freqs = 3;
        spec.freq_profile = "linear";
        spec.has_zero_freq = false;
    } else if (equation == "kdv") {
        spec.mlp_features = {8, 8};
        spec.activation = "swish";
        spec.num_freqs = 6;
        spec.freq_profile = "dyadic";
        spec.has_zero_freq = true;
    } else {
        throw ConfigError("AnsatzSpec: unknown equation '" + equation + "'");
    }
    return spec;
}

nlohmann::json AnsatzSpec::to_json() const {
    nlohmann::json j;
    j["features"] = mlp_features;
    j["activation"] = activation;
    j["num_freqs"] = num_freqs;
    j["freq_profile"] = freq_profile;
    j["has_zero_freq"] = has_zero_freq;
    j["domain_length"] = domain_length;
    return j;
}

AnsatzSpec AnsatzSpec::from_json(const nlohmann::json& j) {
    AnsatzSpec spec;
    spec.mlp_features = j.at("features").get<std::vector<int64_t>>();
    spec.activation = j.at("activation").get<std::string>();
    spec.num_freqs = j.at("num_freqs").get<int64_t>();
    spec.freq_profile = j.at("freq_profile").get<std::string>();
    spec.has_zero_freq = j.at("has_zero_freq").get<bool>();
    spec.domain_length = j.at("domain_length").get<double>();
    return spec;
}

ThetaLayout ThetaLayout::for_ansatz(const AnsatzSpec& spec) {
    ThetaLayout layout;
    const int64_t d_f = spec.feature_dim();

    std::vector<int64_t> dims;
    dims.push_back(d_f);
    for (int64_t w : spec.mlp_features) dims.push_back(w);
    dims.push_back(d_f);

    int64_t offset = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        const int64_t in = dims[l], out = dims[l + 1];
        const std::string prefix = "layer" + std::to_string(l);
        layout.segments.push_back({prefix + ".weight", {out, in}, offset, out * in});
        offset += out * in;
        layout.segments.push_back({prefix + ".bias", {out}, offset, out});
        offset += out;
        layout.groups.push_back({prefix, layout.segments[layout.segments.size() - 2].offset,
                                 out * in + out});
    }
    layout.segments.push_back({"phases", {2 * spec.num_freqs}, offset, 2 * spec.num_freqs});
    layout.groups.push_back({"phases", offset, 2 * spec.num_freqs});
    offset += 2 * spec.num_freqs;
    layout.total = offset;
    return layout;
}

ThetaLayout ThetaLayout::from_group_sizes(
    const std::vector<std::pair<std::string, int64_t>>& sizes) {
    ThetaLayout layout;
    int64_t offset = 0;
    for (const auto& [name, size] : sizes) {
        layout.segments.push_back({name, {size}, offset, size});
        layout.groups.push_back({name, offset, size});
        offset += size;
    }
    layout.total = offset;
    return layout;
}

const ThetaLayout::Segment& ThetaLayout::segment(const std::string& name) const {
    for (const auto& s : segments) {
        if (s.name == name) return s;
    }
    throw DimensionError("ThetaLayout: no segment named '" + name + "'");
}

NfaDecoder::NfaDecoder(AnsatzSpec spec)
    : spec_(std::move(spec)), layout_(ThetaLayout::for_ansatz(spec_)) {
    auto freqs = spec_.frequencies();
    frequencies_f64_ = torch::tensor(freqs, torch::kFloat64);
}

torch::Tensor NfaDecoder::evaluate(const torch::Tensor& theta, const torch::Tensor& x) const {
    const bool theta_batched = theta.dim() == 2;
    torch::Tensor th = theta_batched ? theta : theta.unsqueeze(0);
    if (th.size(1) != layout_.total) {
        throw DimensionError("NfaDecoder: theta length " + std::to_string(th.size(1)) +
                             " does not match layout total " + std::to_string(layout_.total));
    }
    const int64_t b = th.size(0);

    const bool x_scalar = x.dim() == 0;
    torch::Tensor xs = x_scalar ? x.reshape({1}) : x;
    const bool x_batched = xs.dim() == 2;
    if (x_batched && xs.size(0) != b) {
        throw DimensionError("NfaDecoder: batched x and theta disagree on batch size");
    }
    torch::Tensor xb = x_batched ? xs : xs.unsqueeze(0).expand({b, xs.size(0)});
    const auto dtype = th.scalar_type();
    xb = xb.to(dtype);

    const int64_t k = spec_.num_freqs;
    auto omega = frequencies_f64_.to(dtype);
    // [B, M, K] phase arguments
    auto wx = xb.unsqueeze(-1) * omega;

    const auto& ph = layout_.segment("phases");
    auto sin_phase = th.narrow(1, ph.offset, k).unsqueeze(1);
    auto cos_phase = th.narrow(1, ph.offset + k, k).unsqueeze(1);

    std::vector<torch::Tensor> channels{torch::sin(wx + sin_phase), torch::cos(wx + cos_phase)};
    if (spec_.has_zero_freq) {
        channels.push_back(torch::ones({b, xb.size(1), 1}, xb.options()));
    }
    auto feats = torch::cat(channels, -1); // [B, M, d_f]

    // per-sample MLP: weights are slices of theta
    auto h = feats;
    const size_t num_layers = spec_.mlp_features.size() + 1;
    for (size_t l = 0; l < num_layers; ++l) {
        const auto& ws = layout_.segment("layer" + std::to_string(l) + ".weight");
        const auto& bs = layout_.segment("layer" + std::to_string(l) + ".bias");
        auto w = th.narrow(1, ws.offset, ws.size).reshape({b, ws.shape[0], ws.shape[1]});
        auto bias = th.narrow(1, bs.offset, bs.size).unsqueeze(1);
        h = torch::bmm(h, w.transpose(1, 2)) + bias;
        if (l + 1 < num_layers) h = apply_activation(h, spec_.activation);
    }

    auto psi = (h * feats).sum(-1); // [B, M]
    if (!theta_batched && !x_batched) psi = psi.squeeze(0);
    if (x_scalar) psi = psi.squeeze(-1);
    return psi;
}

torch::Tensor NfaDecoder::evaluate_on_grid(const torch::Tensor& theta, const Grid1D& grid) const {
    auto x = torch::empty({grid.num_points}, torch::kFloat64);
    auto acc = x.accessor<double, 1>();
    for (int i = 0; i < grid.num_points; ++i) acc[i] = grid.point(i);
    return evaluate(theta, x.to(theta.scalar_type()));
}

std::vector<double> NfaDecoder::evaluate(std::span<const double> theta,
                                         std::span<const double> x) const {
    torch::NoGradGuard no_grad;
    auto th = torch::from_blob(const_cast<double*>(theta.data()),
                               {static_cast<int64_t>(theta.size())}, torch::kFloat64);
    auto xs = torch::from_blob(const_cast<double*>(x.data()),
                               {static_cast<int64_t>(x.size())}, torch::kFloat64);
    auto out = evaluate(th, xs).contiguous();
    return {out.data_ptr<double>(), out.data_ptr<double>() + out.numel()};
}

std::vector<torch::Tensor> NfaDecoder::unflatten(const torch::Tensor& theta) const {
    if (theta.dim() != 1 || theta.size(0) != layout_.total) {
        throw DimensionError("unflatten: expected flat theta of length " +
                             std::to_string(layout_.total));
    }
    std::vector<torch::Tensor> out;
    out.reserve(layout_.segments.size());
    for (const auto& seg : layout_.segments) {
        out.push_back(theta.narrow(0, seg.offset, seg.size).reshape(seg.shape));
    }
    return out;
}

torch::Tensor NfaDecoder::flatten(const std::vector<torch::Tensor>& tensors) const {
    if (tensors.size() != layout_.segments.size()) {
        throw DimensionError("flatten: expected " + std::to_string(layout_.segments.size()) +
                             " tensors, got " + std::to_string(tensors.size()));
    }
    std::vector<torch::Tensor> flat;
    flat.reserve(tensors.size());
    for (size_t i = 0; i < tensors.size(); ++i) {
        const auto& seg = layout_.segments[i];
        if (tensors[i].sizes() != torch::IntArrayRef(seg.shape)) {
            throw DimensionError("flatten: tensor " + std::to_string(i) +
                                 " does not match segment '" + seg.name + "' shape");
        }
        flat.push_back(tensors[i].reshape({-1}));
    }
    return torch::cat(flat);
}

torch::Tensor NfaDecoder::random_theta(torch::Generator& gen, torch::Dtype dtype) const {
    auto theta = torch::zeros({layout_.total}, dtype);
    const size_t num_layers = spec_.mlp_features.size() + 1;
    for (size_t l = 0; l < num_layers; ++l) {
        const auto& ws = layout_.segment("layer" + std::to_string(l) + ".weight");
        const auto& bs = layout_.segment("layer" + std::to_string(l) + ".bias");
        const double bound = 1.0 / std::sqrt(static_cast<double>(ws.shape[1]));
        theta.narrow(0, ws.offset, ws.size)
            .uniform_(-bound, bound, gen);
        theta.narrow(0, bs.offset, bs.size).uniform_(-bound, bound, gen);
    }
    const auto& ph = layout_.segment("phases");
    theta.narrow(0, ph.offset, ph.size).uniform_(0.0, 2.0 * std::numbers::pi, gen);
    return theta;
}

AutoDecoderResult fit_auto_decoder(const std::vector<std::vector<double>>& snapshots,
                                   const AnsatzSpec& spec, const Grid1D& grid,
                                   const AutoDecoderOptions& opts) {
    if (snapshots.empty()) throw ConfigError("fit_auto_decoder: no snapshots");
    const int64_t s_count = static_cast<int64_t>(snapshots.size());
    const int64_t n = grid.num_points;
    for (const auto& snap : snapshots) {
        if (static_cast<int64_t>(snap.size()) != n) {
            throw DimensionError("fit_auto_decoder: snapshot size mismatch with grid");
        }
    }

    NfaDecoder decoder(spec);
    auto targets = torch::empty({s_count, n}, torch::kFloat64);
    for (int64_t i = 0; i < s_count; ++i) {
        std::memcpy(targets[i].data_ptr<double>(), snapshots[static_cast<size_t>(i)].data(),
                    sizeof(double) * static_cast<size_t>(n));
    }
    auto norms = targets.norm(2, 1);

    std::vector<int64_t> active;
    std::vector<bool> zero_norm(static_cast<size_t>(s_count), false);
    for (int64_t i = 0; i < s_count; ++i) {
        if (norms[i].item<double>() == 0.0) {
            zero_norm[static_cast<size_t>(i)] = true;
        } else {
            active.push_back(i);
        }
    }

    const int64_t restarts = std::max<int64_t>(1, opts.num_restarts);
    auto gen = torch::make_generator<torch::CPUGeneratorImpl>(opts.seed);

    // one fit row per (snapshot, restart); rows are independent of each other
    std::vector<int64_t> row_snapshot;
    for (int64_t i : active) {
        for (int64_t r = 0; r < restarts; ++r) row_snapshot.push_back(i);
    }
    const int64_t rows = static_cast<int64_t>(row_snapshot.size());

    auto thetas = torch::zeros({rows, decoder.layout().total}, opts.dtype);
    for (int64_t r = 0; r < rows; ++r) thetas[r] = decoder.random_theta(gen, opts.dtype);
    thetas.set_requires_grad(true);

    auto targets_t = targets.to(opts.dtype);
    auto row_targets = rows > 0
                           ? targets_t.index_select(0, torch::tensor(row_snapshot, torch::kInt64))
                           : torch::Tensor();

    AutoDecoderResult result;
    if (rows > 0) {
        torch::optim::Adam optim({thetas}, torch::optim::AdamOptions(opts.lr));
        std::mt19937_64 rng(opts.seed);
        std::vector<int64_t> order(static_cast<size_t>(rows));
        for (int64_t r = 0; r < rows; ++r) order[static_cast<size_t>(r)] = r;

        const int64_t batch = std::min<int64_t>(opts.batch * restarts, rows);
        size_t cursor = order.size(); // trigger first shuffle
        for (int64_t step = 0; step < opts.steps; ++step) {
            if (opts.lr_decay_factor != 1.0) {
                const double lr = opts.lr * std::pow(opts.lr_decay_factor,
                                                     static_cast<double>(step / opts.steps_per_decay));
                for (auto& group : optim.param_groups()) {
                    group.options().set_lr(lr);
                }
            }
            if (cursor + static_cast<size_t>(batch) > order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            auto idx = torch::tensor(
                std::vector<int64_t>(order.begin() + static_cast<long>(cursor),
                                     order.begin() + static_cast<long>(cursor) + batch),
                torch::kInt64);
            cursor += static_cast<size_t>(batch);

            optim.zero_grad();
            auto pred = decoder.evaluate_on_grid(thetas.index_select(0, idx), grid);
            auto diff = pred - row_targets.index_select(0, idx);
            auto loss = diff.pow(2).sum(1).mean();
            if (!std::isfinite(loss.item<double>())) {
                throw NumericalError("fit_auto_decoder: non-finite loss at step " +
                                     std::to_string(step));
            }
            loss.backward();
            optim.step();
            if (step % opts.log_every == 0) result.loss_history.push_back(loss.item<double>());
        }
    }

    result.zero_norm = zero_norm;
    result.rel_rmse.resize(static_cast<size_t>(s_count), 0.0);
    result.thetas = torch::zeros({s_count, decoder.layout().total}, opts.dtype);
    if (rows > 0) {
        torch::NoGradGuard no_grad;
        auto fitted = thetas.detach();
        auto pred = decoder.evaluate_on_grid(fitted.to(torch::kFloat64), grid);
        std::vector<double> best(static_cast<size_t>(s_count),
                                 std::numeric_limits<double>::infinity());
        for (int64_t r = 0; r < rows; ++r) {
            const int64_t i = row_snapshot[static_cast<size_t>(r)];
            const double err = (pred[r] - targets[i]).norm().item<double>();
            if (err < best[static_cast<size_t>(i)]) {
                best[static_cast<size_t>(i)] = err;
                result.thetas[i] = fitted[r];
            }
        }
        for (int64_t i : active) {
            result.rel_rmse[static_cast<size_t>(i)] =
                best[static_cast<size_t>(i)] / norms[i].item<double>();
        }
    }
    return result;
}

} // namespace latentpde
