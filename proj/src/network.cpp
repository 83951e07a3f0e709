#include "nnosc/network.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace nnosc {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double neuron_input(std::span<const double> weights, double bias, std::span<const double> inputs) {
    if (weights.size() != inputs.size()) {
        throw std::invalid_argument("neuron_input: " + std::to_string(weights.size()) + " weights but " +
                                    std::to_string(inputs.size()) + " inputs");
    }
    double net = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        net += weights[j] * inputs[j];
    }
    return net;
}

std::size_t parameter_count(std::span<const std::size_t> hidden_sizes) {
    std::size_t count = 0;
    std::size_t in = 1;
    for (std::size_t h : hidden_sizes) {
        count += h * in + h;
        in = h;
    }
    return count + in + 1;
}

namespace {

std::vector<NetworkParams::Layer> make_layers(const std::vector<std::size_t>& hidden_sizes) {
    if (hidden_sizes.empty()) {
        throw std::invalid_argument("hidden_sizes must contain at least one layer");
    }
    std::vector<NetworkParams::Layer> layers;
    std::size_t in = 1;
    std::size_t offset = 0;
    auto push = [&](std::size_t out) {
        NetworkParams::Layer layer{in, out, offset, offset + in * out};
        offset = layer.bias_offset + out;
        layers.push_back(layer);
        in = out;
    };
    for (std::size_t h : hidden_sizes) {
        if (h == 0) {
            throw std::invalid_argument("hidden layer widths must be positive");
        }
        push(h);
    }
    push(1);
    return layers;
}

}  // namespace

NetworkParams::NetworkParams(std::vector<std::size_t> hidden_sizes)
    : hidden_sizes_(std::move(hidden_sizes)), layers_(make_layers(hidden_sizes_)),
      values_(parameter_count(hidden_sizes_), 0.0) {}

NetworkParams::NetworkParams(std::vector<std::size_t> hidden_sizes, std::vector<double> values)
    : hidden_sizes_(std::move(hidden_sizes)), layers_(make_layers(hidden_sizes_)), values_(std::move(values)) {
    if (values_.size() != parameter_count(hidden_sizes_)) {
        throw std::invalid_argument("parameter vector has " + std::to_string(values_.size()) +
                                    " entries, architecture needs " +
                                    std::to_string(parameter_count(hidden_sizes_)));
    }
}

double NetworkParams::weight(std::size_t l, std::size_t i, std::size_t j) const {
    const Layer& layer = layers_.at(l);
    return values_[layer.weight_offset + i * layer.in + j];
}

double& NetworkParams::weight(std::size_t l, std::size_t i, std::size_t j) {
    const Layer& layer = layers_.at(l);
    return values_[layer.weight_offset + i * layer.in + j];
}

double NetworkParams::bias(std::size_t l, std::size_t i) const { return values_[layers_.at(l).bias_offset + i]; }

double& NetworkParams::bias(std::size_t l, std::size_t i) { return values_[layers_.at(l).bias_offset + i]; }

bool NetworkParams::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

NetworkParams init_params(std::vector<std::size_t> hidden_sizes, std::uint64_t seed) {
    NetworkParams params(std::move(hidden_sizes));
    std::mt19937_64 rng(seed);
    auto values = params.values();
    for (const auto& layer : params.layers()) {
        const double r = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (std::size_t k = 0; k < layer.in * layer.out; ++k) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            values[layer.weight_offset + k] = r * (2.0 * u - 1.0);
        }
    }
    return params;
}

std::array<double, 3> JetTape::forward(const NetworkParams& params, double x) {
    const auto& layers = params.layers();
    const auto v = params.values();
    if (offsets_.size() != layers.size() + 1) {
        offsets_.assign(layers.size() + 1, 0);
        for (std::size_t l = 0; l < layers.size(); ++l) offsets_[l + 1] = offsets_[l] + layers[l].out;
        units_.resize(offsets_.back());
    }
    x_ = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const bool hidden = l + 1 < layers.size();
        const Unit* prev = l == 0 ? nullptr : &units_[offsets_[l - 1]];
        Unit* cur = &units_[offsets_[l]];
        for (std::size_t i = 0; i < layer.out; ++i) {
            const double* w = &v[layer.weight_offset + i * layer.in];
            double z = v[layer.bias_offset + i], dz = 0.0, ddz = 0.0;
            if (prev == nullptr) {
                z += w[0] * x;
                dz = w[0];
            } else {
                for (std::size_t j = 0; j < layer.in; ++j) {
                    z += w[j] * prev[j].a;
                    dz += w[j] * prev[j].da;
                    ddz += w[j] * prev[j].dda;
                }
            }
            Unit& u = cur[i];
            u.z = z;
            u.dz = dz;
            u.ddz = ddz;
            if (hidden) {
                const double s = sigmoid(z);
                const double s1 = s * (1.0 - s);
                const double s2 = s1 * (1.0 - 2.0 * s);
                u.a = s;
                u.da = s1 * dz;
                u.dda = s2 * dz * dz + s1 * ddz;
            } else {
                u.a = z;
                u.da = dz;
                u.dda = ddz;
            }
        }
    }
    const Unit& out = units_.back();
    return {out.a, out.da, out.dda};
}

void JetTape::accumulate_gradient(const NetworkParams& params, const std::array<double, 3>& seed,
                                  std::span<double> grad) {
    const auto& layers = params.layers();
    const auto v = params.values();
    // adj_ holds (abar, abar', abar'') for the current layer's outputs.
    adj_.assign(seed.begin(), seed.end());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& layer = layers[l];
        const bool hidden = l + 1 < layers.size();
        const Unit* cur = &units_[offsets_[l]];
        const Unit* prev = l == 0 ? nullptr : &units_[offsets_[l - 1]];
        adj_next_.assign(3 * layer.in, 0.0);
        for (std::size_t i = 0; i < layer.out; ++i) {
            const double ab = adj_[3 * i], dab = adj_[3 * i + 1], ddab = adj_[3 * i + 2];
            double zb = ab, dzb = dab, ddzb = ddab;
            if (hidden) {
                // a = s(z), a' = s1 z', a'' = s2 z'^2 + s1 z''; s1 = s(1-s), s2 = s1(1-2s), s3 = s2'.
                const double s = cur[i].a;
                const double s1 = s * (1.0 - s);
                const double s2 = s1 * (1.0 - 2.0 * s);
                const double s3 = s1 * (1.0 - 6.0 * s + 6.0 * s * s);
                const double dz = cur[i].dz;
                zb = ab * s1 + dab * s2 * dz + ddab * (s3 * dz * dz + s2 * cur[i].ddz);
                dzb = dab * s1 + ddab * 2.0 * s2 * dz;
                ddzb = ddab * s1;
            }
            grad[layer.bias_offset + i] += zb;
            const std::size_t row = layer.weight_offset + i * layer.in;
            if (prev == nullptr) {
                grad[row] += zb * x_ + dzb;
                adj_next_[0] += v[row] * zb;
                adj_next_[1] += v[row] * dzb;
                adj_next_[2] += v[row] * ddzb;
            } else {
                for (std::size_t j = 0; j < layer.in; ++j) {
                    grad[row + j] += zb * prev[j].a + dzb * prev[j].da + ddzb * prev[j].dda;
                    adj_next_[3 * j] += v[row + j] * zb;
                    adj_next_[3 * j + 1] += v[row + j] * dzb;
                    adj_next_[3 * j + 2] += v[row + j] * ddzb;
                }
            }
        }
        std::swap(adj_, adj_next_);
    }
}

double forward(const NetworkParams& params, double x) {
    const auto& layers = params.layers();
    const auto v = params.values();
    std::vector<double> a{x};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        std::vector<double> next(layer.out);
        for (std::size_t i = 0; i < layer.out; ++i) {
            const double net =
                neuron_input(v.subspan(layer.weight_offset + i * layer.in, layer.in), v[layer.bias_offset + i], a);
            next[i] = l + 1 < layers.size() ? sigmoid(net) : net;
        }
        a = std::move(next);
    }
    return a[0];
}

NetEval forward_jet(const NetworkParams& params, double x) {
    JetTape tape;
    const auto jet = tape.forward(params, x);
    NetEval eval;
    eval.value = jet[0];
    eval.dx = jet[1];
    eval.dxx = jet[2];
    return eval;
}

NetEval forward_with_derivatives(const NetworkParams& params, double x) {
    JetTape tape;
    const auto jet = tape.forward(params, x);
    NetEval eval;
    eval.value = jet[0];
    eval.dx = jet[1];
    eval.dxx = jet[2];
    eval.grad_value.assign(params.size(), 0.0);
    eval.grad_dx.assign(params.size(), 0.0);
    eval.grad_dxx.assign(params.size(), 0.0);
    tape.accumulate_gradient(params, {1.0, 0.0, 0.0}, eval.grad_value);
    tape.accumulate_gradient(params, {0.0, 1.0, 0.0}, eval.grad_dx);
    tape.accumulate_gradient(params, {0.0, 0.0, 1.0}, eval.grad_dxx);
    return eval;
}

std::string params_to_json(const NetworkParams& params) {
    nlohmann::json j;
    j["hidden_sizes"] = params.hidden_sizes();
    j["params"] = std::vector<double>(params.values().begin(), params.values().end());
    return j.dump();
}

NetworkParams params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("hidden_sizes") || !j.contains("params")) {
        throw std::invalid_argument("parameter snapshot needs \"hidden_sizes\" and \"params\"");
    }
    NetworkParams params(j.at("hidden_sizes").get<std::vector<std::size_t>>(),
                         j.at("params").get<std::vector<double>>());
    if (!params.all_finite()) {
        throw std::invalid_argument("parameter snapshot contains non-finite values");
    }
    return params;
}

}  // namespace nnosc
