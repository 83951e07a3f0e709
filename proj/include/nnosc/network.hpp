#ifndef NNOSC_NETWORK_HPP
#define NNOSC_NETWORK_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nnosc {

/// Logistic function 1 / (1 + e^{-x}); never overflows.
double sigmoid(double x);

/// w_0 + sum_j w_j x_j. Throws std::invalid_argument on length mismatch.
double neuron_input(std::span<const double> weights, double bias, std::span<const double> inputs);

/// Scalar-in, scalar-out multilayer perceptron: sigmoid hidden layers, linear output unit.
///
/// Parameters live in one flat vector. Layers are stored in order input -> output;
/// each layer contributes its weight matrix row-major (row i = destination unit i,
/// column j = source unit j) followed by its bias vector. For hidden_sizes = {H} the
/// layout is [W1 (H x 1), b1 (H), W2 (1 x H), b2 (1)].
class NetworkParams {
public:
    struct Layer {
        std::size_t in = 0;
        std::size_t out = 0;
        std::size_t weight_offset = 0;  // into values()
        std::size_t bias_offset = 0;

        bool operator==(const Layer&) const = default;
    };

    NetworkParams() = default;
    /// All parameters zero. Throws on empty or zero-width hidden_sizes.
    explicit NetworkParams(std::vector<std::size_t> hidden_sizes);
    /// Takes ownership of a flat parameter vector; throws if its size does not match.
    NetworkParams(std::vector<std::size_t> hidden_sizes, std::vector<double> values);

    const std::vector<std::size_t>& hidden_sizes() const { return hidden_sizes_; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// W(i, j) of layer l.
    double weight(std::size_t l, std::size_t i, std::size_t j) const;
    double& weight(std::size_t l, std::size_t i, std::size_t j);
    double bias(std::size_t l, std::size_t i) const;
    double& bias(std::size_t l, std::size_t i);

    const Layer& output_layer() const { return layers_.back(); }

    bool all_finite() const;

    bool operator==(const NetworkParams&) const = default;

private:
    std::vector<std::size_t> hidden_sizes_;
    std::vector<Layer> layers_;
    std::vector<double> values_;
};

/// Total parameter count for a 1 -> hidden... -> 1 network.
std::size_t parameter_count(std::span<const std::size_t> hidden_sizes);

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero. Uses mt19937_64
/// with the top 53 bits mapped to [0, 1), so the stream is identical on every platform.
NetworkParams init_params(std::vector<std::size_t> hidden_sizes, std::uint64_t seed);

double forward(const NetworkParams& params, double x);

/// Network output and its first two input derivatives, together with the gradient of
/// each of the three with respect to every parameter (same layout as values()).
struct NetEval {
    double value = 0.0;
    double dx = 0.0;
    double dxx = 0.0;
    std::vector<double> grad_value;
    std::vector<double> grad_dx;
    std::vector<double> grad_dxx;
};

NetEval forward_with_derivatives(const NetworkParams& params, double x);

/// Only value, dx and dxx; the gradient vectors are left empty.
NetEval forward_jet(const NetworkParams& params, double x);

/// Forward-mode jet (value, d/dx, d2/dx2) of every unit, kept for a reverse sweep.
/// Reusable across calls; holds no per-call allocations once sized.
class JetTape {
public:
    /// Runs the forward jet for x and returns (N, N', N'').
    std::array<double, 3> forward(const NetworkParams& params, double x);

    /// grad += d/dtheta (seed[0] N + seed[1] N' + seed[2] N'') for the last forward() call.
    void accumulate_gradient(const NetworkParams& params, const std::array<double, 3>& seed,
                             std::span<double> grad);

private:
    struct Unit {
        double z, dz, ddz;  // pre-activation jet
        double a, da, dda;  // post-activation jet
    };
    std::vector<std::size_t> offsets_;  // first unit of each layer in units_
    std::vector<Unit> units_;
    std::vector<double> adj_, adj_next_;  // 3 adjoints per unit
    double x_ = 0.0;
};

/// JSON snapshot: {"hidden_sizes": [...], "params": [...]} with params in the flat layout.
std::string params_to_json(const NetworkParams& params);
NetworkParams params_from_json(const std::string& text);

}  // namespace nnosc

#endif  // NNOSC_NETWORK_HPP
