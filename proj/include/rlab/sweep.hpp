#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/bounds.hpp"
#include "rlab/dataset.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/margin.hpp"
#include "rlab/network.hpp"

namespace rlab {

enum class Protocol { UntilThreshold, MatchSmallestEpochs, FixedEpochs };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

/// Where the sweep's train/test data comes from. Synthetic specs regenerate
/// deterministically from their parameters; file-backed specs load once.
struct DatasetSpec {
    enum class Kind { GaussianToy, Idx, Csv };
    Kind kind = Kind::GaussianToy;
    // gaussian toy
    int d = 784;
    double sigma = 1.0 / 28.0;
    double delta = 1.0;
    int n_train = 2048;
    int n_test = 512;
    std::uint64_t seed = 1;
    // idx / csv
    std::string train_images, train_labels, test_images, test_labels;
    std::string csv_path;
    double csv_train_fraction = 0.8;
    std::size_t limit = 0;

    static DatasetSpec parse(const std::string& text);
    std::string describe() const;
};

std::pair<LabeledDataset, LabeledDataset> realize_dataset(const DatasetSpec& spec);

struct SweepConfig {
    std::vector<int> widths{8, 16, 32, 64, 128};
    int depth = 4;  // hidden layers
    Activation activation = Activation::Relu;
    DatasetSpec data;
    Protocol protocol = Protocol::MatchSmallestEpochs;
    int fixed_epochs = 7;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    bool measure_stability = true;
    bool measure_costability = true;
    bool measure_lipschitz = true;
    bool measure_bounds = true;
    TrainConfig train;       // learning rate, batch size, max_epochs, loss
    AttackConfig attack;
    int attack_sample_cap = 500;
    bool eval_on_train = false;  // stability on the train split instead of test
    double law_eps = 0.1;   // echoed into the Corollary-style threshold
    double law_K = 1.0;
    int lipschitz_lower_trials = 16;

    // Desk-scale defaults: a cooler learning rate than the full-scale runs
    // keeps the matched-epoch budgets meaningful at widths 8..128.
    SweepConfig() {
        train.learning_rate = 3e-4;
        train.batch_size = 64;
        train.max_epochs = 40;
        train.target_train_accuracy = 0.99;
    }
};

// One width x seed run.
struct SweepCell {
    int width = 0;
    std::uint64_t seed = 0;
    long param_count = 0;
    int epochs = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double empirical_risk01 = 0.0;  // train-set 0-1 risk
    bool excluded = false;          // train_acc below the accuracy threshold
    bool diverged = false;
    double S_hat = std::numeric_limits<double>::quiet_NaN();
    double attack_success_rate = std::numeric_limits<double>::quiet_NaN();
    double S_star = std::numeric_limits<double>::quiet_NaN();
    double L_lo = std::numeric_limits<double>::quiet_NaN();
    double L_hi = std::numeric_limits<double>::quiet_NaN();
    double normalized = std::numeric_limits<double>::quiet_NaN();
    double threshold_S = std::numeric_limits<double>::quiet_NaN();
    bool chain_holds = true;  // S_hat >= S*/L_hi when both measured
    int chain_pointwise_ok = 0;
    int chain_pointwise_checked = 0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

// Per-width aggregate over exactly the configured seeds.
struct SweepRecord {
    int width = 0;
    long param_count = 0;
    MeanStd epochs, train_acc, test_acc, S_hat, S_star, L_lo, L_hi, normalized,
        empirical_risk01;
    double threshold_S = 0.0;
    int excluded_seeds = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;      // width-major, seed-minor order
    std::vector<SweepRecord> records;  // one per width
    double isoperimetry_c = 0.0;       // nominal c echoed into thresholds
    int calibrated_epochs = -1;        // match-smallest calibration (per seed max)
};

double empirical_risk_01(const Network& net, const LabeledDataset& data);

SweepResult run_sweep(const SweepConfig& cfg);

struct LawVerdict {
    int width = 0;
    std::uint64_t seed = 0;
    bool applicable = false;  // empirical risk <= best test risk - eps
    bool below_threshold = false;
    double stability = 0.0;
    double threshold = 0.0;
    double ratio = 0.0;  // stability / threshold
};

// Diagnostic only: the absolute constant K is unknown, so verdicts report
// ratios rather than pass/fail.
std::vector<LawVerdict> law_check(const std::vector<SweepCell>& cells,
                                  double eps, double K, double c, double d,
                                  double n);

// sweep.csv (row per width x seed), sweep.json (aggregates), and SVG plots
// of S_hat, S*/L_hi and test accuracy vs width with +-1 std bands. Output is
// byte-deterministic for a fixed config.
void emit_reports(const SweepResult& result, const SweepConfig& cfg,
                  const std::string& out_dir);

// Count of nondecreasing consecutive steps in the per-width seed means.
int monotone_step_count(const std::vector<SweepRecord>& records,
                        MeanStd SweepRecord::* field);

}  // namespace rlab
