// rlab: train / measure / evaluate robustness quantities from the command line.
//
// Exit codes: 0 success, 2 validation error, 3 measurement failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlab/bounds.hpp"
#include "rlab/dataset.hpp"
#include "rlab/isoperimetry.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/margin.hpp"
#include "rlab/model_io.hpp"
#include "rlab/network.hpp"
#include "rlab/report_json.hpp"
#include "rlab/rng.hpp"
#include "rlab/sweep.hpp"
#include "rlab/svg.hpp"

namespace {

using rlab::Matrix;

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stod(item));
    }
    if (values.empty()) throw std::invalid_argument("empty list: " + text);
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (double v : parse_double_list(text)) values.push_back(static_cast<int>(v));
    return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stoull(item));
    }
    if (values.empty()) throw std::invalid_argument("empty seed list");
    return values;
}

std::vector<double> parse_t_grid(const std::string& text) {
    // start:stop:step, inclusive of the endpoint up to rounding
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
        throw std::invalid_argument("t-grid must be start:stop:step");
    }
    std::vector<double> grid;
    for (double t = parts[0]; t <= parts[1] + 1e-12; t += parts[2]) grid.push_back(t);
    return grid;
}

rlab::MeasureSpec parse_measure(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    rlab::MeasureSpec spec;
    if (head == "gaussian") spec.kind = rlab::MeasureKind::GaussianIsotropic;
    else if (head == "sphere") spec.kind = rlab::MeasureKind::SphereUniform;
    else if (head == "mixture") spec.kind = rlab::MeasureKind::GaussianMixture;
    else throw std::invalid_argument("unknown measure kind: " + head);
    if (colon == std::string::npos) return spec;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("measure: key=value expected");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "d") spec.d = std::stoi(value);
        else if (key == "sigma") spec.sigma2 = std::stod(value) * std::stod(value);
        else if (key == "sigma2") spec.sigma2 = std::stod(value);
        else if (key == "delta") spec.delta = std::stod(value);
        else throw std::invalid_argument("measure: unknown key " + key);
    }
    return spec;
}

void write_output(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
    } else {
        rlab::write_text_file(path, body);
    }
}

// --config file contents (flat TOML key = value, or a JSON object) are
// appended after the user flags so they take precedence.
std::vector<std::string> config_to_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::vector<std::string> args;
    auto push_kv = [&args](const std::string& key, const std::string& value) {
        args.push_back("--" + key);
        if (!value.empty()) args.push_back(value);
    };
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json doc;
        in >> doc;
        if (!doc.is_object()) throw std::invalid_argument("config: expected a JSON object");
        for (const auto& [key, value] : doc.items()) {
            if (value.is_boolean()) {
                if (value.get<bool>()) args.push_back("--" + key);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) {
                    if (!joined.empty()) joined += ",";
                    joined += v.is_string() ? v.get<std::string>() : v.dump();
                }
                push_kv(key, joined);
            } else if (value.is_string()) {
                push_kv(key, value.get<std::string>());
            } else {
                push_kv(key, value.dump());
            }
        }
        return args;
    }
    // flat TOML: `key = value` lines, # comments, [sections] ignored
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
            value = value.substr(1, value.size() - 2);
            std::string joined;
            std::stringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) {
                const auto b = item.find_first_not_of(" \t\"");
                const auto e = item.find_last_not_of(" \t\"");
                if (b == std::string::npos) continue;
                if (!joined.empty()) joined += ",";
                joined += item.substr(b, e - b + 1);
            }
            value = joined;
        }
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value == "false") {
            continue;
        } else {
            push_kv(key, value);
        }
    }
    return args;
}

Matrix stability_points(const std::string& data_spec, bool on_train, int cap) {
    const rlab::DatasetSpec spec = rlab::DatasetSpec::parse(data_spec);
    auto [train, test] = rlab::realize_dataset(spec);
    const rlab::LabeledDataset& chosen = on_train ? train : test;
    const int n = cap > 0 ? std::min(chosen.n, cap) : chosen.n;
    Matrix points(n, chosen.d);
    std::copy(chosen.inputs.data.begin(),
              chosen.inputs.data.begin() + std::size_t(n) * chosen.d,
              points.data.begin());
    return points;
}

int run(int argc, char** argv) {
    CLI::App app{"robustness measurement lab"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // ---- train ----
    auto* cmd_train = app.add_subcommand("train", "train a dense classifier");
    std::string tr_data = "gaussian:d=784,sigma=0.0357143,delta=1,n=4096,ntest=1024";
    std::string tr_dims, tr_activation = "relu", tr_optimizer = "adam",
                tr_loss = "cross_entropy", tr_out = "model.json";
    int tr_width = 32, tr_depth = 4, tr_batch = 256, tr_epochs = 40;
    double tr_lr = 1e-3, tr_target = 0.99;
    std::uint64_t tr_seed = 0;
    cmd_train->add_option("--data", tr_data, "dataset spec");
    cmd_train->add_option("--dims", tr_dims, "explicit layer dims, e.g. 784,128,1");
    cmd_train->add_option("--width", tr_width, "hidden width");
    cmd_train->add_option("--depth", tr_depth, "hidden layers");
    cmd_train->add_option("--activation", tr_activation, "relu|tanh|heaviside|identity");
    cmd_train->add_option("--optimizer", tr_optimizer, "adam|sgd");
    cmd_train->add_option("--loss", tr_loss, "cross_entropy|hinge");
    cmd_train->add_option("--lr", tr_lr, "learning rate");
    cmd_train->add_option("--batch", tr_batch, "batch size");
    cmd_train->add_option("--epochs", tr_epochs, "max epochs");
    cmd_train->add_option("--target-acc", tr_target, "stop at this train accuracy");
    cmd_train->add_option("--seed", tr_seed, "seed");
    cmd_train->add_option("--out", tr_out, "checkpoint path");

    // ---- stability ----
    auto* cmd_stab = app.add_subcommand("stability", "attack-based class stability");
    std::string st_model, st_data, st_eps = "0.01,0.05,0.1,0.2,0.5,1.0,2.0",
                st_out = "report.json";
    int st_pgd_steps = 40, st_cap = 0;
    double st_tol = 1e-3;
    std::uint64_t st_seed = 0;
    bool st_box = false, st_on_train = false, st_no_samples = false;
    cmd_stab->add_option("--model", st_model, "model checkpoint")->required();
    cmd_stab->add_option("--data", st_data, "dataset spec")->required();
    cmd_stab->add_option("--eps-grid", st_eps, "ascending eps grid");
    cmd_stab->add_option("--pgd-steps", st_pgd_steps, "PGD steps per eps");
    cmd_stab->add_option("--tol", st_tol, "bisection relative tolerance");
    cmd_stab->add_option("--seed", st_seed, "seed");
    cmd_stab->add_option("--cap", st_cap, "max samples to attack (0 = all)");
    cmd_stab->add_flag("--box", st_box, "constrain the search to [0,1]^d");
    cmd_stab->add_flag("--on-train", st_on_train, "evaluate on the train split");
    cmd_stab->add_flag("--summary-only", st_no_samples, "omit per-sample entries");
    cmd_stab->add_option("--out", st_out, "report path");

    // ---- costability ----
    auto* cmd_cost = app.add_subcommand("costability", "co-stability and S*/L");
    std::string co_model, co_data, co_out = "report.json";
    int co_cap = 0, co_trials = 16;
    std::uint64_t co_seed = 0;
    bool co_on_train = false;
    cmd_cost->add_option("--model", co_model)->required();
    cmd_cost->add_option("--data", co_data)->required();
    cmd_cost->add_option("--cap", co_cap, "max samples (0 = all)");
    cmd_cost->add_option("--lower-trials", co_trials, "random probes for L_lo");
    cmd_cost->add_option("--seed", co_seed);
    cmd_cost->add_flag("--on-train", co_on_train);
    cmd_cost->add_option("--out", co_out);

    // ---- lipschitz ----
    auto* cmd_lip = app.add_subcommand("lipschitz", "certified Lipschitz interval");
    std::string lip_model, lip_data, lip_out;
    int lip_trials = 64;
    std::uint64_t lip_seed = 0;
    cmd_lip->add_option("--model", lip_model)->required();
    cmd_lip->add_option("--data", lip_data, "optional points for the witness search");
    cmd_lip->add_option("--lower-trials", lip_trials);
    cmd_lip->add_option("--seed", lip_seed);
    cmd_lip->add_option("--out", lip_out);

    // ---- bounds ----
    auto* cmd_bounds = app.add_subcommand("bounds", "closed-form bound evaluators");
    std::string bo_formula;
    rlab::BoundInputs bi;
    double bo_R = 0.0, bo_loss_L = 1.0;
    std::string bo_loss = "zero_one", bo_out;
    bool bo_minimize = false;
    cmd_bounds->add_option("--formula", bo_formula,
                           "basic|refined|finite-threshold|infinite|"
                           "infinite-threshold|gap|compare")->required();
    cmd_bounds->add_option("--n", bi.n);
    cmd_bounds->add_option("--d", bi.d);
    cmd_bounds->add_option("--logF", bi.logF, "log|F| or parameter count p");
    cmd_bounds->add_option("--c", bi.c);
    cmd_bounds->add_option("--S", bi.S);
    cmd_bounds->add_option("--S-star", bi.S_star);
    cmd_bounds->add_option("--L", bi.L);
    cmd_bounds->add_option("--K", bi.K);
    cmd_bounds->add_option("--K1", bi.K1);
    cmd_bounds->add_option("--K2", bi.K2);
    cmd_bounds->add_option("--W", bi.W);
    cmd_bounds->add_option("--J", bi.J);
    cmd_bounds->add_option("--eps-tilde", bi.eps_tilde);
    cmd_bounds->add_option("--eps", bi.eps);
    cmd_bounds->add_option("--delta", bi.delta);
    cmd_bounds->add_option("--a", bi.a);
    cmd_bounds->add_option("--rademacher", bo_R, "Rademacher value for the gap bound");
    cmd_bounds->add_option("--loss", bo_loss, "zero_one|lipschitz (gap bound)");
    cmd_bounds->add_option("--loss-L", bo_loss_L, "loss Lipschitz constant");
    cmd_bounds->add_flag("--minimize-eps-tilde", bo_minimize);
    cmd_bounds->add_option("--out", bo_out);

    // ---- isoperimetry ----
    auto* cmd_iso = app.add_subcommand("isoperimetry", "concentration tail test");
    std::string iso_measure = "gaussian:d=784,sigma=0.0357143";
    std::string iso_fn = "clipped-linear", iso_grid = "0.0:3.0:0.1", iso_out,
                iso_model;
    double iso_c = 1.0, iso_bound = 0.0;
    int iso_samples = 100000, iso_coord = 0;
    std::uint64_t iso_seed = 0;
    cmd_iso->add_option("--measure", iso_measure, "gaussian:d=..,sigma=.. | sphere:d=..");
    cmd_iso->add_option("--fn", iso_fn, "clipped-linear|distance|network-score");
    cmd_iso->add_option("--model", iso_model, "model for network-score");
    cmd_iso->add_option("--coord", iso_coord, "score coordinate");
    cmd_iso->add_option("--c", iso_c, "isoperimetry constant to test");
    cmd_iso->add_option("--samples", iso_samples);
    cmd_iso->add_option("--t-grid", iso_grid, "start:stop:step");
    cmd_iso->add_option("--bound", iso_bound, "clip bound (0 = auto)");
    cmd_iso->add_option("--seed", iso_seed);
    cmd_iso->add_option("--out", iso_out);

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "width sweep with measurements");
    rlab::SweepConfig sc;
    std::string sw_widths = "8,16,32,64,128", sw_seeds = "0,1,2,3,4";
    std::string sw_data = "gaussian:d=784,sigma=0.0357143,delta=1,n=2048,ntest=512";
    std::string sw_protocol = "match-smallest", sw_activation = "relu",
                sw_out = "sweep_out", sw_loss = "cross_entropy";
    cmd_sweep->add_option("--widths", sw_widths);
    cmd_sweep->add_option("--depth", sc.depth);
    cmd_sweep->add_option("--data", sw_data);
    cmd_sweep->add_option("--protocol", sw_protocol,
                          "until-threshold|match-smallest|fixed-epochs");
    cmd_sweep->add_option("--fixed-epochs", sc.fixed_epochs);
    cmd_sweep->add_option("--seeds", sw_seeds);
    cmd_sweep->add_option("--activation", sw_activation);
    cmd_sweep->add_option("--loss", sw_loss);
    std::string sw_optimizer = "adam";
    cmd_sweep->add_option("--optimizer", sw_optimizer, "adam|sgd");
    cmd_sweep->add_option("--lr", sc.train.learning_rate);
    cmd_sweep->add_option("--batch", sc.train.batch_size);
    cmd_sweep->add_option("--max-epochs", sc.train.max_epochs);
    cmd_sweep->add_option("--target-acc", sc.train.target_train_accuracy);
    cmd_sweep->add_option("--attack-cap", sc.attack_sample_cap);
    cmd_sweep->add_option("--law-eps", sc.law_eps);
    cmd_sweep->add_option("--law-K", sc.law_K);
    bool sw_no_stability = false, sw_no_costability = false, sw_on_train = false;
    cmd_sweep->add_flag("--no-stability", sw_no_stability);
    cmd_sweep->add_flag("--no-costability", sw_no_costability);
    cmd_sweep->add_flag("--on-train", sw_on_train);
    cmd_sweep->add_option("--out", sw_out, "output directory");

    // ---- law-check ----
    auto* cmd_law = app.add_subcommand("law-check", "threshold verdicts for a sweep");
    std::string law_csv, law_out;
    double law_eps = 0.1, law_K = 1.0, law_c = 1.0, law_d = 784, law_n = 2048;
    cmd_law->add_option("--sweep-csv", law_csv, "sweep.csv from `rlab sweep`")->required();
    cmd_law->add_option("--eps", law_eps);
    cmd_law->add_option("--K", law_K);
    cmd_law->add_option("--c", law_c);
    cmd_law->add_option("--d", law_d);
    cmd_law->add_option("--n", law_n);
    cmd_law->add_option("--out", law_out);

    // --config pre-pass: appended args win under TakeLast
    std::vector<std::string> args;
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            config_path = argv[++i];
        } else if (arg.rfind("--config=", 0) == 0) {
            config_path = arg.substr(9);
        } else {
            args.push_back(std::move(arg));
        }
    }
    if (!config_path.empty()) {
        for (std::string& extra : config_to_args(config_path)) {
            args.push_back(std::move(extra));
        }
    }
    try {
        std::vector<const char*> raw;
        raw.push_back("rlab");
        for (const std::string& a : args) raw.push_back(a.c_str());
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    if (*cmd_train) {
        const rlab::DatasetSpec spec = rlab::DatasetSpec::parse(tr_data);
        auto [train_set, test_set] = rlab::realize_dataset(spec);
        std::vector<int> dims;
        if (!tr_dims.empty()) {
            dims = parse_int_list(tr_dims);
        } else {
            dims.push_back(train_set.d);
            for (int l = 0; l < tr_depth; ++l) dims.push_back(tr_width);
            dims.push_back(train_set.num_classes == 2 ? 1 : train_set.num_classes);
        }
        rlab::TrainConfig tc;
        tc.optimizer = tr_optimizer == "sgd" ? rlab::Optimizer::Sgd : rlab::Optimizer::Adam;
        tc.learning_rate = tr_lr;
        tc.batch_size = tr_batch;
        tc.max_epochs = tr_epochs;
        tc.target_train_accuracy = tr_target;
        tc.loss = tr_loss == "hinge" ? rlab::LossKind::Hinge : rlab::LossKind::CrossEntropy;
        tc.seed = tr_seed;
        rlab::Network net = rlab::init_network(
            dims, rlab::activation_from_name(tr_activation), tr_seed);
        const rlab::TrainResult result = rlab::train(std::move(net), train_set, tc);
        if (result.diverged) throw std::runtime_error("training diverged (NaN loss)");
        rlab::TrainMeta meta;
        meta.epochs = result.epochs;
        meta.final_train_acc = result.final_train_acc;
        meta.final_test_acc =
            rlab::accuracy(result.net, test_set.inputs, test_set.labels);
        rlab::save_model(result.net, meta, tr_out);
        std::cout << "trained " << result.epochs << " epochs, train_acc "
                  << result.final_train_acc << ", test_acc " << meta.final_test_acc
                  << ", saved " << tr_out << "\n";
        return 0;
    }

    if (*cmd_stab) {
        const rlab::LoadedModel model = rlab::load_model(st_model);
        const Matrix points = stability_points(st_data, st_on_train, st_cap);
        rlab::AttackConfig ac;
        ac.eps_grid = parse_double_list(st_eps);
        ac.pgd_steps = st_pgd_steps;
        ac.bisect_rel_tol = st_tol;
        ac.box_constrain = st_box;
        ac.seed = st_seed;
        const rlab::StabilityReport report =
            rlab::class_stability(model.net, points, ac);
        write_output(st_out, rlab::stability_report_json(report, model.net,
                                                         !st_no_samples));
        std::cout << "S_hat " << report.S_hat << " success_rate "
                  << report.attack_success_rate << "\n";
        return 0;
    }

    if (*cmd_cost) {
        const rlab::LoadedModel model = rlab::load_model(co_model);
        const Matrix points = stability_points(co_data, co_on_train, co_cap);
        const rlab::CoStabilityReport report =
            rlab::normalized_costability(model.net, points, co_trials, co_seed);
        write_output(co_out, rlab::costability_report_json(report, model.net));
        std::cout << "S_star " << report.S_star << " normalized " << report.normalized
                  << "\n";
        return 0;
    }

    if (*cmd_lip) {
        const rlab::LoadedModel model = rlab::load_model(lip_model);
        Matrix points(0, model.net.input_dim());
        if (!lip_data.empty()) points = stability_points(lip_data, false, 0);
        const rlab::LipschitzInterval interval =
            rlab::lipschitz_interval(model.net, points, lip_trials, lip_seed);
        write_output(lip_out, rlab::lipschitz_report_json(interval));
        return 0;
    }

    if (*cmd_bounds) {
        std::string body;
        if (bo_formula == "basic") {
            body = rlab::bound_result_json(rlab::rademacher_bound_basic(bi));
        } else if (bo_formula == "refined") {
            body = rlab::bound_result_json(rlab::rademacher_bound_refined(bi));
        } else if (bo_formula == "finite-threshold") {
            body = rlab::bound_result_json(rlab::robustness_threshold_finite(bi));
        } else if (bo_formula == "infinite") {
            if (bo_minimize) {
                const rlab::EpsTildeOptimum best = rlab::minimize_eps_tilde(bi);
                body = rlab::bound_result_json(best.bound);
                std::cout << "eps_tilde* = " << best.eps_tilde << "\n";
            } else {
                body = rlab::bound_result_json(rlab::rademacher_bound_infinite(bi));
            }
        } else if (bo_formula == "infinite-threshold") {
            body = rlab::bound_result_json(rlab::robustness_threshold_infinite(bi));
        } else if (bo_formula == "gap") {
            const rlab::GapLoss loss = bo_loss == "zero_one"
                                           ? rlab::GapLoss::ZeroOne
                                           : rlab::GapLoss::Lipschitz;
            body = rlab::bound_result_json(rlab::generalization_gap_bound(
                bo_R, bi.a, bi.delta, bi.n, loss, bo_loss_L));
        } else if (bo_formula == "compare") {
            body = rlab::comparison_json(rlab::compare_to_standard(bi));
        } else {
            throw std::invalid_argument("unknown formula: " + bo_formula);
        }
        write_output(bo_out, body);
        return 0;
    }

    if (*cmd_iso) {
        const rlab::MeasureSpec measure = parse_measure(iso_measure);
        const double sigma = std::sqrt(measure.sigma2);
        rlab::TestFunction fn;
        rlab::LoadedModel model;
        if (iso_fn == "clipped-linear") {
            std::vector<double> u(measure.d, 0.0);
            rlab::Rng rng(rlab::derive_seed(iso_seed, 0x666e00ULL));
            for (double& v : u) v = rng.normal();
            const double norm = rlab::norm2(u);
            for (double& v : u) v /= norm;
            const double bound = iso_bound > 0.0 ? iso_bound : 10.0 * sigma;
            fn = rlab::TestFunction::clipped_linear(std::move(u), bound);
        } else if (iso_fn == "distance") {
            std::vector<double> origin(measure.d, 0.0);
            const double bound = iso_bound > 0.0
                                     ? iso_bound
                                     : 10.0 * (sigma * std::sqrt(measure.d) + 1.0);
            fn = rlab::TestFunction::distance_to_point(std::move(origin), bound);
        } else if (iso_fn == "network-score") {
            if (iso_model.empty()) throw std::invalid_argument("network-score needs --model");
            model = rlab::load_model(iso_model);
            const double bound = iso_bound > 0.0 ? iso_bound : 1e6;
            fn = rlab::TestFunction::network_score(model.net, iso_coord, bound);
        } else {
            throw std::invalid_argument("unknown test function: " + iso_fn);
        }
        const rlab::ConcentrationReport report = rlab::concentration_test(
            measure, fn, iso_c, iso_samples, parse_t_grid(iso_grid), iso_seed);
        write_output(iso_out, rlab::concentration_report_json(report, measure));
        std::cout << "violations " << report.violations.size() << " c_hat "
                  << report.c_hat << " (" << rlab::regime_name(
                         rlab::regime_classifier(measure)) << " regime)\n";
        return 0;
    }

    if (*cmd_sweep) {
        sc.widths = parse_int_list(sw_widths);
        sc.seeds = parse_seed_list(sw_seeds);
        sc.data = rlab::DatasetSpec::parse(sw_data);
        sc.protocol = rlab::protocol_from_name(sw_protocol);
        sc.activation = rlab::activation_from_name(sw_activation);
        sc.train.loss = sw_loss == "hinge" ? rlab::LossKind::Hinge
                                           : rlab::LossKind::CrossEntropy;
        sc.train.optimizer =
            sw_optimizer == "sgd" ? rlab::Optimizer::Sgd : rlab::Optimizer::Adam;
        sc.measure_stability = !sw_no_stability;
        sc.measure_costability = !sw_no_costability;
        sc.measure_lipschitz = !sw_no_costability;
        sc.eval_on_train = sw_on_train;
        if (sc.activation == rlab::Activation::Heaviside) {
            sc.measure_costability = false;  // S*/L undefined without L
            sc.measure_lipschitz = false;
        }
        const rlab::SweepResult result = rlab::run_sweep(sc);
        rlab::emit_reports(result, sc, sw_out);
        std::cout << "wrote " << sw_out << "/sweep.csv, sweep.json and plots\n";
        return 0;
    }

    if (*cmd_law) {
        // read the cells back from sweep.csv
        std::ifstream in(law_csv);
        if (!in) throw std::invalid_argument("cannot open " + law_csv);
        std::string line;
        std::getline(in, line);  // header
        std::vector<rlab::SweepCell> cells;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string cell_text;
            std::vector<std::string> cols;
            while (std::getline(ss, cell_text, ',')) cols.push_back(cell_text);
            if (cols.size() < 17) throw std::runtime_error("law-check: short CSV row");
            rlab::SweepCell cell;
            cell.width = std::stoi(cols[0]);
            cell.seed = std::stoull(cols[1]);
            cell.param_count = std::stol(cols[2]);
            cell.train_acc = std::stod(cols[4]);
            cell.test_acc = std::stod(cols[5]);
            cell.empirical_risk01 = std::stod(cols[6]);
            cell.S_hat = std::stod(cols[9]);
            cells.push_back(cell);
        }
        const std::vector<rlab::LawVerdict> verdicts =
            rlab::law_check(cells, law_eps, law_K, law_c, law_d, law_n);
        double best_risk = 1.0;
        for (const auto& cell : cells) {
            best_risk = std::min(best_risk, 1.0 - cell.test_acc);
        }
        write_output(law_out,
                     rlab::law_verdicts_json(verdicts, law_eps, law_K, best_risk));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
