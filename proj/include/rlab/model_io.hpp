#pragma once

#include <string>

#include "rlab/network.hpp"

namespace rlab {

struct TrainMeta {
    int epochs = 0;
    double final_train_acc = 0.0;
    double final_test_acc = 0.0;
};

// JSON checkpoint, format_version 1. Weights are row-major per layer;
// numbers serialize as round-trip-exact decimals, so save/load is lossless.
void save_model(const Network& net, const TrainMeta& meta, const std::string& path);

struct LoadedModel {
    Network net;
    TrainMeta meta;
};

LoadedModel load_model(const std::string& path);

}  // namespace rlab
