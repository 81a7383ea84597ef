#include "rlab/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlab/dataset.hpp"
#include "rlab/rng.hpp"

namespace rlab {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Heaviside: return "heaviside";
        case Activation::Identity: return "identity";
    }
    return "relu";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "heaviside") return Activation::Heaviside;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

long Network::param_count() const {
    long p = 0;
    for (const auto& w : weights) p += static_cast<long>(w.rows * w.cols + w.rows);
    return p;
}

Network init_network(const std::vector<int>& layer_dims, Activation activation,
                     std::uint64_t seed) {
    if (layer_dims.size() < 2) throw std::invalid_argument("need at least input and output dims");
    for (int dim : layer_dims) {
        if (dim < 1) throw std::invalid_argument("layer dimensions must be >= 1");
    }
    Network net;
    net.layer_dims = layer_dims;
    net.activation = activation;
    net.seed = seed;
    Rng rng(derive_seed(seed, 0x696e6974ULL));
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-scale, scale);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

namespace {

inline double act(double t, Activation a) {
    switch (a) {
        case Activation::Relu: return t > 0.0 ? t : 0.0;
        case Activation::Tanh: return std::tanh(t);
        case Activation::Heaviside: return t >= 0.0 ? 1.0 : 0.0;
        case Activation::Identity: return t;
    }
    return t;
}

// derivative w.r.t. the pre-activation; Heaviside uses the sigmoid surrogate
inline double act_deriv(double t, Activation a, const GradOptions& opts) {
    switch (a) {
        case Activation::Relu: return t > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double y = std::tanh(t);
            return 1.0 - y * y;
        }
        case Activation::Heaviside: {
            const double tau = opts.surrogate_temperature;
            const double s = 1.0 / (1.0 + std::exp(-tau * t));
            return tau * s * (1.0 - s);
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

void require_differentiable(const Network& net, const GradOptions& opts) {
    if (net.activation == Activation::Heaviside && !opts.heaviside_surrogate) {
        throw std::domain_error("heaviside gradients require the surrogate to be enabled");
    }
}

struct ForwardTrace {
    std::vector<std::vector<double>> pre;   // pre-activations per layer
    std::vector<std::vector<double>> post;  // post[0] = input copy
};

ForwardTrace forward_trace(const Network& net, std::span<const double> x) {
    ForwardTrace t;
    t.post.emplace_back(x.begin(), x.end());
    const std::size_t L = net.num_layers();
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& w = net.weights[l];
        std::vector<double> pre(w.rows);
        for (std::size_t r = 0; r < w.rows; ++r) {
            pre[r] = net.biases[l][r] + dot(w.row_span(r), t.post.back());
        }
        std::vector<double> post(w.rows);
        const bool hidden = l + 1 < L;
        for (std::size_t r = 0; r < w.rows; ++r) {
            post[r] = hidden ? act(pre[r], net.activation) : pre[r];
        }
        t.pre.push_back(std::move(pre));
        t.post.push_back(std::move(post));
    }
    return t;
}

// Loss and d(loss)/d(scores) for one sample. Binary nets use the signed
// label 2y - 1 on the single score; multi-class uses softmax cross-entropy
// or the top-gap hinge.
double loss_and_score_grad(const Network& net, std::span<const double> scores,
                           int label, LossKind loss, std::vector<double>& dscores) {
    dscores.assign(scores.size(), 0.0);
    if (net.binary()) {
        const double y = 2.0 * label - 1.0;
        const double z = y * scores[0];
        if (loss == LossKind::CrossEntropy) {
            // softplus(-z), with the stable branch for large |z|
            double value, sig;
            if (z > 0) {
                value = std::log1p(std::exp(-z));
                sig = 1.0 / (1.0 + std::exp(-z));
            } else {
                value = -z + std::log1p(std::exp(z));
                sig = std::exp(z) / (1.0 + std::exp(z));
            }
            dscores[0] = -y * (1.0 - sig);
            return value;
        }
        // hinge
        const double m = 1.0 - z;
        if (m > 0.0) dscores[0] = -y;
        return m > 0.0 ? m : 0.0;
    }
    if (loss == LossKind::CrossEntropy) {
        const double mx = *std::max_element(scores.begin(), scores.end());
        double sum = 0.0;
        for (double s : scores) sum += std::exp(s - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t j = 0; j < scores.size(); ++j) {
            dscores[j] = std::exp(scores[j] - lse);
        }
        dscores[static_cast<std::size_t>(label)] -= 1.0;
        return lse - scores[static_cast<std::size_t>(label)];
    }
    // multi-class hinge on the top gap
    int rival = -1;
    double rival_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(scores.size()); ++j) {
        if (j == label) continue;
        if (scores[static_cast<std::size_t>(j)] > rival_score) {
            rival_score = scores[static_cast<std::size_t>(j)];
            rival = j;
        }
    }
    const double m = 1.0 - (scores[static_cast<std::size_t>(label)] - rival_score);
    if (m > 0.0) {
        dscores[static_cast<std::size_t>(label)] = -1.0;
        dscores[static_cast<std::size_t>(rival)] = 1.0;
        return m;
    }
    return 0.0;
}

// Backprop dscores through the trace; accumulates into grads, returns dx
// when input_grad is non-null.
void backprop(const Network& net, const ForwardTrace& t,
              std::vector<double> delta, const GradOptions& opts,
              Gradients* grads, std::vector<double>* input_grad) {
    const std::size_t L = net.num_layers();
    for (std::size_t l = L; l-- > 0;) {
        const Matrix& w = net.weights[l];
        const bool hidden = l + 1 < L;
        if (hidden) {
            for (std::size_t r = 0; r < w.rows; ++r) {
                delta[r] *= act_deriv(t.pre[l][r], net.activation, opts);
            }
        }
        if (grads) {
            Matrix& gw = grads->weights[l];
            const std::vector<double>& below = t.post[l];
            for (std::size_t r = 0; r < w.rows; ++r) {
                if (delta[r] == 0.0) continue;
                axpy(delta[r], below, {gw.row(r), gw.cols});
                grads->biases[l][r] += delta[r];
            }
        }
        if (l == 0 && !input_grad) break;
        std::vector<double> next(w.cols, 0.0);
        for (std::size_t r = 0; r < w.rows; ++r) {
            if (delta[r] == 0.0) continue;
            axpy(delta[r], w.row_span(r), next);
        }
        if (l == 0) {
            *input_grad = std::move(next);
            break;
        }
        delta = std::move(next);
    }
}

}  // namespace

std::vector<double> forward(const Network& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.input_dim()) {
        throw std::invalid_argument("forward: input dimension mismatch");
    }
    std::vector<double> cur(x.begin(), x.end());
    const std::size_t L = net.num_layers();
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& w = net.weights[l];
        std::vector<double> next(w.rows);
        const bool hidden = l + 1 < L;
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double pre = net.biases[l][r] + dot(w.row_span(r), cur);
            next[r] = hidden ? act(pre, net.activation) : pre;
        }
        cur = std::move(next);
    }
    return cur;
}

int argmax_index(std::span<const double> scores) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(scores.size()); ++j) {
        if (scores[static_cast<std::size_t>(j)] > scores[static_cast<std::size_t>(best)]) best = j;
    }
    return best;
}

int label_from_scores(const Network& net, std::span<const double> scores) {
    if (net.binary()) return scores[0] >= 0.0 ? 1 : 0;
    return argmax_index(scores);
}

int predict_label(const Network& net, std::span<const double> x) {
    const std::vector<double> scores = forward(net, x);
    return label_from_scores(net, scores);
}

Gradients grad_weights(const Network& net, const Matrix& batch_inputs,
                       const std::vector<int>& batch_labels, LossKind loss,
                       const GradOptions& opts) {
    if (batch_inputs.rows == 0) throw std::invalid_argument("grad_weights: empty batch");
    if (batch_inputs.rows != batch_labels.size()) {
        throw std::invalid_argument("grad_weights: batch size mismatch");
    }
    require_differentiable(net, opts);
    Gradients g;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.biases.emplace_back(net.weights[l].rows, 0.0);
    }
    std::vector<double> dscores;
    for (std::size_t i = 0; i < batch_inputs.rows; ++i) {
        const ForwardTrace t = forward_trace(net, batch_inputs.row_span(i));
        loss_and_score_grad(net, t.post.back(), batch_labels[i], loss, dscores);
        backprop(net, t, dscores, opts, &g, nullptr);
    }
    const double inv = 1.0 / static_cast<double>(batch_inputs.rows);
    for (auto& w : g.weights) {
        for (double& v : w.data) v *= inv;
    }
    for (auto& b : g.biases) {
        for (double& v : b) v *= inv;
    }
    return g;
}

std::vector<double> grad_input(const Network& net, std::span<const double> x,
                               std::span<const double> score_coeffs,
                               const GradOptions& opts) {
    if (static_cast<int>(score_coeffs.size()) != net.output_dim()) {
        throw std::invalid_argument("grad_input: coefficient dimension mismatch");
    }
    require_differentiable(net, opts);
    const ForwardTrace t = forward_trace(net, x);
    std::vector<double> delta(score_coeffs.begin(), score_coeffs.end());
    std::vector<double> dx;
    backprop(net, t, std::move(delta), opts, nullptr, &dx);
    return dx;
}

double batch_loss(const Network& net, const Matrix& inputs,
                  const std::vector<int>& labels, LossKind loss) {
    std::vector<double> dscores;
    double total = 0.0;
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        const std::vector<double> scores = forward(net, inputs.row_span(i));
        total += loss_and_score_grad(net, scores, labels[i], loss, dscores);
    }
    return total / static_cast<double>(inputs.rows);
}

double accuracy(const Network& net, const Matrix& inputs,
                const std::vector<int>& labels) {
    if (inputs.rows == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        if (predict_label(net, inputs.row_span(i)) == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(inputs.rows);
}

namespace {

struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    long step = 0;
};

void apply_update(Network& net, const Gradients& g, const TrainConfig& cfg,
                  AdamState& adam) {
    if (cfg.optimizer == Optimizer::Sgd) {
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
                net.weights[l].data[i] -= cfg.learning_rate * g.weights[l].data[i];
            }
            for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
                net.biases[l][i] -= cfg.learning_rate * g.biases[l][i];
            }
        }
        return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++adam.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam.step));
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        auto update = [&](double& param, double grad, double& m, double& v) {
            m = beta1 * m + (1.0 - beta1) * grad;
            v = beta2 * v + (1.0 - beta2) * grad * grad;
            param -= cfg.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + eps);
        };
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
            update(net.weights[l].data[i], g.weights[l].data[i],
                   adam.mw[l].data[i], adam.vw[l].data[i]);
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            update(net.biases[l][i], g.biases[l][i], adam.mb[l][i], adam.vb[l][i]);
        }
    }
}

}  // namespace

TrainResult train(Network net, const LabeledDataset& data, const TrainConfig& cfg) {
    if (data.n == 0) throw std::invalid_argument("train: empty dataset");
    const int classes = net.binary() ? 2 : net.output_dim();
    for (int label : data.labels) {
        if (label < 0 || label >= classes) {
            throw std::invalid_argument("train: label out of range");
        }
    }
    require_differentiable(net, cfg.grad);

    AdamState adam;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        adam.mw.emplace_back(net.weights[l].rows, net.weights[l].cols);
        adam.vw.emplace_back(net.weights[l].rows, net.weights[l].cols);
        adam.mb.emplace_back(net.biases[l].size(), 0.0);
        adam.vb.emplace_back(net.biases[l].size(), 0.0);
    }

    TrainResult result;
    Rng shuffle_rng(derive_seed(cfg.seed, 0x747261696eULL));
    const int batch = std::max(1, cfg.batch_size);
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const std::vector<std::size_t> order = shuffle_rng.permutation(data.n);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            Matrix bx(stop - start, data.d);
            std::vector<int> by(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                const double* src = data.inputs.row(order[i]);
                std::copy(src, src + data.d, bx.row(i - start));
                by[i - start] = data.labels[order[i]];
            }
            const Gradients g = grad_weights(net, bx, by, cfg.loss, cfg.grad);
            bool finite = true;
            for (const auto& w : g.weights) {
                for (double v : w.data) {
                    if (!std::isfinite(v)) { finite = false; break; }
                }
                if (!finite) break;
            }
            if (!finite || !std::isfinite(batch_loss(net, bx, by, cfg.loss))) {
                result.net = std::move(net);
                result.epochs = epoch;
                result.diverged = true;
                result.final_train_acc = 0.0;
                return result;
            }
            apply_update(net, g, cfg, adam);
        }
        const double acc = accuracy(net, data.inputs, data.labels);
        result.epochs = epoch;
        result.final_train_acc = acc;
        if (acc >= cfg.target_train_accuracy) {
            result.reached_target = true;
            break;
        }
    }
    result.net = std::move(net);
    return result;
}

}  // namespace rlab
