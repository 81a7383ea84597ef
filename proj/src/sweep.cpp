#include "rlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rlab/rng.hpp"
#include "rlab/svg.hpp"

namespace rlab {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::UntilThreshold: return "until-threshold";
        case Protocol::MatchSmallestEpochs: return "match-smallest";
        case Protocol::FixedEpochs: return "fixed-epochs";
    }
    return "match-smallest";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "until-threshold") return Protocol::UntilThreshold;
    if (name == "match-smallest") return Protocol::MatchSmallestEpochs;
    if (name == "fixed-epochs") return Protocol::FixedEpochs;
    throw std::invalid_argument("unknown protocol: " + name);
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("dataset spec: expected key=value, got " + item);
        }
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

}  // namespace

DatasetSpec DatasetSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    DatasetSpec spec;
    if (head == "gaussian") {
        spec.kind = Kind::GaussianToy;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "d") spec.d = std::stoi(v);
            else if (k == "sigma") spec.sigma = std::stod(v);
            else if (k == "delta") spec.delta = std::stod(v);
            else if (k == "n") spec.n_train = std::stoi(v);
            else if (k == "ntest") spec.n_test = std::stoi(v);
            else if (k == "seed") spec.seed = std::stoull(v);
            else throw std::invalid_argument("dataset spec: unknown key " + k);
        }
    } else if (head == "idx") {
        spec.kind = Kind::Idx;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "train_images") spec.train_images = v;
            else if (k == "train_labels") spec.train_labels = v;
            else if (k == "test_images") spec.test_images = v;
            else if (k == "test_labels") spec.test_labels = v;
            else if (k == "limit") spec.limit = std::stoull(v);
            else throw std::invalid_argument("dataset spec: unknown key " + k);
        }
    } else if (head == "csv") {
        spec.kind = Kind::Csv;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "path") spec.csv_path = v;
            else if (k == "train_fraction") spec.csv_train_fraction = std::stod(v);
            else if (k == "seed") spec.seed = std::stoull(v);
            else throw std::invalid_argument("dataset spec: unknown key " + k);
        }
    } else {
        throw std::invalid_argument("dataset spec: unknown kind " + head);
    }
    return spec;
}

std::string DatasetSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::GaussianToy:
            out << "gaussian:d=" << d << ",sigma=" << sigma << ",delta=" << delta
                << ",n=" << n_train << ",ntest=" << n_test << ",seed=" << seed;
            break;
        case Kind::Idx:
            out << "idx:train_images=" << train_images;
            break;
        case Kind::Csv:
            out << "csv:path=" << csv_path;
            break;
    }
    return out.str();
}

std::pair<LabeledDataset, LabeledDataset> realize_dataset(const DatasetSpec& spec) {
    switch (spec.kind) {
        case DatasetSpec::Kind::GaussianToy: {
            LabeledDataset train = gen_gaussian_toy(
                spec.d, spec.n_train, spec.sigma, spec.delta, derive_seed(spec.seed, 1));
            LabeledDataset test = gen_gaussian_toy(
                spec.d, spec.n_test, spec.sigma, spec.delta, derive_seed(spec.seed, 2));
            return {std::move(train), std::move(test)};
        }
        case DatasetSpec::Kind::Idx:
            return {load_idx(spec.train_images, spec.train_labels, spec.limit),
                    load_idx(spec.test_images, spec.test_labels, spec.limit)};
        case DatasetSpec::Kind::Csv:
            return split(load_csv(spec.csv_path), spec.csv_train_fraction, spec.seed);
    }
    throw std::invalid_argument("realize_dataset: unknown kind");
}

double empirical_risk_01(const Network& net, const LabeledDataset& data) {
    return 1.0 - accuracy(net, data.inputs, data.labels);
}

namespace {

std::vector<int> network_dims(int d, int width, int depth, int num_classes) {
    std::vector<int> dims;
    dims.push_back(d);
    for (int l = 0; l < depth; ++l) dims.push_back(width);
    dims.push_back(num_classes == 2 ? 1 : num_classes);
    return dims;
}

Matrix eval_points(const LabeledDataset& data, int cap) {
    const int n = cap > 0 ? std::min(data.n, cap) : data.n;
    Matrix points(n, data.d);
    std::copy(data.inputs.data.begin(),
              data.inputs.data.begin() + std::size_t(n) * data.d,
              points.data.begin());
    return points;
}

MeanStd aggregate(const std::vector<double>& values) {
    MeanStd ms;
    if (values.empty()) return ms;
    double sum = 0.0;
    for (double v : values) sum += v;
    ms.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - ms.mean) * (v - ms.mean);
    ms.std = std::sqrt(sq / static_cast<double>(values.size()));
    return ms;
}

std::string fmt17(double v) {
    char buf[64];
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.widths.empty()) throw std::invalid_argument("sweep: no widths");
    if (!std::is_sorted(cfg.widths.begin(), cfg.widths.end()) ||
        std::adjacent_find(cfg.widths.begin(), cfg.widths.end()) != cfg.widths.end()) {
        throw std::invalid_argument("sweep: widths must be strictly increasing");
    }
    if (cfg.seeds.empty()) throw std::invalid_argument("sweep: need at least one seed");

    const auto [train_set, test_set] = realize_dataset(cfg.data);
    SweepResult result;
    result.isoperimetry_c = cfg.data.kind == DatasetSpec::Kind::GaussianToy
                                ? cfg.data.sigma * cfg.data.sigma * cfg.data.d
                                : 1.0;

    // epoch budget per seed under the match-smallest protocol
    std::vector<int> calibrated(cfg.seeds.size(), cfg.fixed_epochs);
    if (cfg.protocol == Protocol::MatchSmallestEpochs) {
        // calibration replays exactly what the measured smallest-width cell
        // will run: same init and shuffle streams
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(cfg.seeds[si],
                                  0x7363686400ULL + static_cast<std::uint64_t>(cfg.widths.front()));
            Network net = init_network(
                network_dims(train_set.d, cfg.widths.front(), cfg.depth,
                             train_set.num_classes),
                cfg.activation, derive_seed(cfg.seeds[si], 0x6e657400ULL + cfg.widths.front()));
            const TrainResult calibration = train(std::move(net), train_set, tc);
            calibrated[si] = calibration.epochs;
            result.calibrated_epochs =
                std::max(result.calibrated_epochs, calibration.epochs);
        }
    }

    for (int width : cfg.widths) {
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            const std::uint64_t seed = cfg.seeds[si];
            SweepCell cell;
            cell.width = width;
            cell.seed = seed;

            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(seed, 0x7363686400ULL + static_cast<std::uint64_t>(width));
            switch (cfg.protocol) {
                case Protocol::UntilThreshold:
                    break;  // stop at the accuracy target or max_epochs
                case Protocol::MatchSmallestEpochs:
                    tc.max_epochs = calibrated[si];
                    tc.target_train_accuracy = 2.0;  // run the full budget
                    break;
                case Protocol::FixedEpochs:
                    tc.max_epochs = cfg.fixed_epochs;
                    tc.target_train_accuracy = 2.0;
                    break;
            }

            Network net = init_network(
                network_dims(train_set.d, width, cfg.depth, train_set.num_classes),
                cfg.activation, derive_seed(seed, 0x6e657400ULL + static_cast<std::uint64_t>(width)));
            cell.param_count = net.param_count();
            TrainResult trained = train(std::move(net), train_set, tc);
            cell.epochs = trained.epochs;
            cell.diverged = trained.diverged;
            cell.train_acc = trained.final_train_acc;
            cell.empirical_risk01 = 1.0 - cell.train_acc;
            cell.excluded = cell.train_acc < cfg.train.target_train_accuracy;
            if (!trained.diverged) {
                cell.test_acc = accuracy(trained.net, test_set.inputs, test_set.labels);
                const Matrix points =
                    eval_points(cfg.eval_on_train ? train_set : test_set,
                                cfg.attack_sample_cap);
                StabilityReport stability;
                if (cfg.measure_stability) {
                    AttackConfig ac = cfg.attack;
                    ac.seed = derive_seed(seed, 0x61747400ULL + static_cast<std::uint64_t>(width));
                    stability = class_stability(trained.net, points, ac);
                    cell.S_hat = stability.S_hat;
                    cell.attack_success_rate = stability.attack_success_rate;
                }
                if (cfg.measure_costability || cfg.measure_lipschitz) {
                    const CoStabilityReport cs = normalized_costability(
                        trained.net, points, cfg.lipschitz_lower_trials,
                        derive_seed(seed, 0x6c697000ULL + static_cast<std::uint64_t>(width)));
                    cell.S_star = cs.S_star;
                    cell.L_lo = cs.L_lo;
                    cell.L_hi = cs.L_hi;
                    cell.normalized = cs.normalized;
                    if (cfg.measure_stability) {
                        const ChainCheck check =
                            chain_inequality_check(trained.net, points, stability, cs);
                        cell.chain_holds = check.holds;
                        cell.chain_pointwise_ok = check.pointwise_ok;
                        cell.chain_pointwise_checked = check.pointwise_checked;
                    }
                }
                if (cfg.measure_bounds) {
                    BoundInputs bi;
                    bi.n = train_set.n;
                    bi.d = train_set.d;
                    bi.logF = static_cast<double>(cell.param_count);
                    bi.c = result.isoperimetry_c;
                    bi.K = cfg.law_K;
                    bi.eps = cfg.law_eps;
                    cell.threshold_S = robustness_threshold_finite(bi).value;
                }
            }
            result.cells.push_back(std::move(cell));
        }
    }

    // per-width aggregates over exactly the configured seeds
    const std::size_t n_seeds = cfg.seeds.size();
    for (std::size_t wi = 0; wi < cfg.widths.size(); ++wi) {
        SweepRecord rec;
        rec.width = cfg.widths[wi];
        std::vector<double> epochs, train_acc, test_acc, s_hat, s_star, l_lo, l_hi,
            normalized, risk;
        for (std::size_t si = 0; si < n_seeds; ++si) {
            const SweepCell& cell = result.cells[wi * n_seeds + si];
            rec.param_count = cell.param_count;
            rec.threshold_S = cell.threshold_S;
            if (cell.excluded) ++rec.excluded_seeds;
            epochs.push_back(cell.epochs);
            train_acc.push_back(cell.train_acc);
            test_acc.push_back(cell.test_acc);
            s_hat.push_back(cell.S_hat);
            s_star.push_back(cell.S_star);
            l_lo.push_back(cell.L_lo);
            l_hi.push_back(cell.L_hi);
            normalized.push_back(cell.normalized);
            risk.push_back(cell.empirical_risk01);
        }
        rec.epochs = aggregate(epochs);
        rec.train_acc = aggregate(train_acc);
        rec.test_acc = aggregate(test_acc);
        rec.S_hat = aggregate(s_hat);
        rec.S_star = aggregate(s_star);
        rec.L_lo = aggregate(l_lo);
        rec.L_hi = aggregate(l_hi);
        rec.normalized = aggregate(normalized);
        rec.empirical_risk01 = aggregate(risk);
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::vector<LawVerdict> law_check(const std::vector<SweepCell>& cells,
                                  double eps, double K, double c, double d,
                                  double n) {
    if (cells.empty()) throw std::invalid_argument("law_check: no records");
    double best_test_risk = 1.0;  // proxy for R*
    for (const SweepCell& cell : cells) {
        best_test_risk = std::min(best_test_risk, 1.0 - cell.test_acc);
    }
    std::vector<LawVerdict> verdicts;
    for (const SweepCell& cell : cells) {
        if (std::isnan(cell.S_hat)) {
            throw std::invalid_argument("law_check: cells lack stability measurements");
        }
        LawVerdict v;
        v.width = cell.width;
        v.seed = cell.seed;
        v.stability = cell.S_hat;
        BoundInputs bi;
        bi.n = n;
        bi.d = d;
        bi.logF = static_cast<double>(cell.param_count);
        bi.c = c;
        bi.K = K;
        bi.eps = eps;
        v.threshold = robustness_threshold_finite(bi).value;
        v.ratio = v.threshold > 0.0 ? v.stability / v.threshold
                                    : std::numeric_limits<double>::infinity();
        v.applicable = cell.empirical_risk01 <= best_test_risk - eps;
        v.below_threshold = v.stability < v.threshold;
        verdicts.push_back(v);
    }
    return verdicts;
}

int monotone_step_count(const std::vector<SweepRecord>& records,
                        MeanStd SweepRecord::* field) {
    int count = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if ((records[i].*field).mean >= (records[i - 1].*field).mean) ++count;
    }
    return count;
}

namespace {

nlohmann::ordered_json mean_std_json(const MeanStd& ms) {
    auto sanitize = [](double v) {
        return nlohmann::ordered_json(std::isfinite(v) ? nlohmann::ordered_json(v)
                                                       : nlohmann::ordered_json(fmt17(v)));
    };
    nlohmann::ordered_json j;
    j["mean"] = sanitize(ms.mean);
    j["std"] = sanitize(ms.std);
    return j;
}

}  // namespace

void emit_reports(const SweepResult& result, const SweepConfig& cfg,
                  const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    // CSV: one row per width x seed
    {
        std::ostringstream csv;
        csv << "width,seed,param_count,epochs,train_acc,test_acc,empirical_risk01,"
               "excluded,diverged,S_hat,attack_success_rate,S_star,L_lo,L_hi,"
               "normalized,threshold_S,chain_holds,chain_pointwise_ok,"
               "chain_pointwise_checked\n";
        for (const SweepCell& c : result.cells) {
            csv << c.width << ',' << c.seed << ',' << c.param_count << ','
                << c.epochs << ',' << fmt17(c.train_acc) << ',' << fmt17(c.test_acc)
                << ',' << fmt17(c.empirical_risk01) << ',' << (c.excluded ? 1 : 0)
                << ',' << (c.diverged ? 1 : 0) << ',' << fmt17(c.S_hat) << ','
                << fmt17(c.attack_success_rate) << ',' << fmt17(c.S_star) << ','
                << fmt17(c.L_lo) << ',' << fmt17(c.L_hi) << ','
                << fmt17(c.normalized) << ',' << fmt17(c.threshold_S) << ','
                << (c.chain_holds ? 1 : 0) << ',' << c.chain_pointwise_ok << ','
                << c.chain_pointwise_checked << '\n';
        }
        write_text_file((dir / "sweep.csv").string(), csv.str());
    }

    // JSON: config echo + per-width aggregates
    {
        nlohmann::ordered_json doc;
        nlohmann::ordered_json config;
        config["widths"] = cfg.widths;
        config["depth"] = cfg.depth;
        config["activation"] = activation_name(cfg.activation);
        config["data"] = cfg.data.describe();
        config["protocol"] = protocol_name(cfg.protocol);
        config["seeds"] = cfg.seeds;
        config["optimizer"] = cfg.train.optimizer == Optimizer::Adam ? "adam" : "sgd";
        config["learning_rate"] = cfg.train.learning_rate;
        config["batch_size"] = cfg.train.batch_size;
        config["max_epochs"] = cfg.train.max_epochs;
        config["target_train_accuracy"] = cfg.train.target_train_accuracy;
        config["attack_sample_cap"] = cfg.attack_sample_cap;
        config["eps_grid"] = cfg.attack.eps_grid;
        config["pgd_steps"] = cfg.attack.pgd_steps;
        config["bisect_rel_tol"] = cfg.attack.bisect_rel_tol;
        config["eval_on_train"] = cfg.eval_on_train;
        config["law_eps"] = cfg.law_eps;
        config["law_K"] = cfg.law_K;
        config["isoperimetry_c"] = result.isoperimetry_c;
        config["heaviside_surrogate"] = cfg.activation == Activation::Heaviside;
        doc["config"] = std::move(config);
        if (cfg.protocol == Protocol::MatchSmallestEpochs) {
            doc["calibrated_epochs"] = result.calibrated_epochs;
        }
        nlohmann::ordered_json records = nlohmann::ordered_json::array();
        for (const SweepRecord& rec : result.records) {
            nlohmann::ordered_json r;
            r["width"] = rec.width;
            r["param_count"] = rec.param_count;
            r["epochs"] = mean_std_json(rec.epochs);
            r["train_acc"] = mean_std_json(rec.train_acc);
            r["test_acc"] = mean_std_json(rec.test_acc);
            r["S_hat"] = mean_std_json(rec.S_hat);
            r["S_star"] = mean_std_json(rec.S_star);
            r["L_lo"] = mean_std_json(rec.L_lo);
            r["L_hi"] = mean_std_json(rec.L_hi);
            r["normalized"] = mean_std_json(rec.normalized);
            r["empirical_risk01"] = mean_std_json(rec.empirical_risk01);
            r["threshold_S"] = rec.threshold_S;
            r["excluded_seeds"] = rec.excluded_seeds;
            records.push_back(std::move(r));
        }
        doc["records"] = std::move(records);
        doc["monotone_steps_S_hat"] =
            monotone_step_count(result.records, &SweepRecord::S_hat);
        doc["monotone_steps_normalized"] =
            monotone_step_count(result.records, &SweepRecord::normalized);
        write_text_file((dir / "sweep.json").string(), doc.dump(2) + "\n");
    }

    // SVG plots with +-1 std bands
    auto make_chart = [&](const std::string& title, const std::string& y_label,
                          MeanStd SweepRecord::* field, const std::string& file) {
        SvgChart chart;
        chart.title = title;
        chart.x_label = "width";
        chart.y_label = y_label;
        chart.log_x = true;
        SvgSeries series;
        series.label = y_label;
        for (const SweepRecord& rec : result.records) {
            series.x.push_back(rec.width);
            series.y.push_back((rec.*field).mean);
            series.band.push_back((rec.*field).std);
        }
        chart.series.push_back(std::move(series));
        write_text_file((dir / file).string(), chart.render());
    };
    make_chart("class stability vs width", "S_hat", &SweepRecord::S_hat,
               "stability_vs_width.svg");
    make_chart("normalized co-stability vs width", "S*/L_hi",
               &SweepRecord::normalized, "normalized_costability_vs_width.svg");
    make_chart("test accuracy vs width", "test_acc", &SweepRecord::test_acc,
               "test_acc_vs_width.svg");
}

}  // namespace rlab
