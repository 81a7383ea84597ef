#include "rlab/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rlab {

void save_model(const Network& net, const TrainMeta& meta, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    doc["layer_dims"] = net.layer_dims;
    doc["activation"] = activation_name(net.activation);
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    for (const Matrix& w : net.weights) weights.push_back(w.data);
    doc["weights"] = std::move(weights);
    doc["biases"] = net.biases;
    doc["seed"] = net.seed;
    doc["train_meta"] = {{"epochs", meta.epochs},
                         {"final_train_acc", meta.final_train_acc},
                         {"final_test_acc", meta.final_test_acc}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot write " + path);
    out << doc.dump(2) << "\n";
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    nlohmann::json doc;
    in >> doc;
    if (doc.at("format_version").get<int>() != 1) {
        throw std::runtime_error("load_model: unsupported format version");
    }
    LoadedModel loaded;
    Network& net = loaded.net;
    net.layer_dims = doc.at("layer_dims").get<std::vector<int>>();
    net.activation = activation_from_name(doc.at("activation").get<std::string>());
    net.seed = doc.at("seed").get<std::uint64_t>();
    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() + 1 != net.layer_dims.size()) {
        throw std::runtime_error("load_model: layer count mismatch");
    }
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
        const std::size_t rows = static_cast<std::size_t>(net.layer_dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(net.layer_dims[l]);
        Matrix w(rows, cols);
        const auto flat = weights.at(l).get<std::vector<double>>();
        if (flat.size() != rows * cols) {
            throw std::runtime_error("load_model: weight shape mismatch");
        }
        w.data = flat;
        net.weights.push_back(std::move(w));
        auto b = biases.at(l).get<std::vector<double>>();
        if (b.size() != rows) throw std::runtime_error("load_model: bias shape mismatch");
        net.biases.push_back(std::move(b));
    }
    const auto& meta = doc.at("train_meta");
    loaded.meta.epochs = meta.at("epochs").get<int>();
    loaded.meta.final_train_acc = meta.at("final_train_acc").get<double>();
    loaded.meta.final_test_acc = meta.at("final_test_acc").get<double>();
    return loaded;
}

}  // namespace rlab
