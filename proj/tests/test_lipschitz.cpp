#include <doctest.h>

#include <cmath>

#include "rlab/dataset.hpp"
#include "rlab/lipschitz.hpp"
#include "rlab/rng.hpp"
#include "test_oracles.hpp"

using namespace rlab;

namespace {

Network linear_net(const std::vector<double>& w, double b) {
    Network net = init_network({static_cast<int>(w.size()), 1}, Activation::Identity, 0);
    std::copy(w.begin(), w.end(), net.weights[0].row(0));
    net.biases[0][0] = b;
    return net;
}

Network diag_relu_net() {
    // W1 = diag(1,2), relu, W2 = diag(3,1)
    Network net = init_network({2, 2, 2}, Activation::Relu, 0);
    net.weights[0].fill(0.0);
    net.weights[0](0, 0) = 1.0;
    net.weights[0](1, 1) = 2.0;
    net.biases[0] = {0.0, 0.0};
    net.weights[1].fill(0.0);
    net.weights[1](0, 0) = 3.0;
    net.weights[1](1, 1) = 1.0;
    net.biases[1] = {0.0, 0.0};
    return net;
}

}  // namespace

TEST_CASE("co-margin worked values") {
    Network net = linear_net({0.0, 0.0}, 0.3);
    const std::vector<double> x{1.0, 1.0};
    CHECK(co_margin(net, x) == doctest::Approx(0.3));

    Network three = init_network({1, 3}, Activation::Identity, 0);
    three.weights[0].fill(0.0);
    three.biases[0] = {0.7, 0.2, 0.1};
    const std::vector<double> z{0.0};
    CHECK(co_margin(three, z) == doctest::Approx(0.5));

    three.biases[0] = {0.7, 0.7, 0.1};  // tied top scores
    CHECK(co_margin(three, z) == doctest::Approx(0.0));
}

TEST_CASE("co-stability of constant scores and positive homogeneity") {
    Network net = init_network({2, 2}, Activation::Identity, 0);
    net.weights[0].fill(0.0);
    net.biases[0] = {1.0, 0.0};
    Matrix points(5, 2);
    CHECK(co_stability(net, points).S_star == doctest::Approx(1.0));

    Network trained = init_network({3, 4, 3}, Activation::Tanh, 8);
    Matrix sample(32, 3);
    Rng rng(10);
    for (double& v : sample.data) v = rng.normal();
    const double before = co_stability(trained, sample).S_star;
    for (double& v : trained.weights.back().data) v *= 2.0;
    for (double& v : trained.biases.back()) v *= 2.0;
    CHECK(co_stability(trained, sample).S_star == doctest::Approx(2.0 * before));
}

TEST_CASE("binary linear co-stability matches the folded-normal mean") {
    std::vector<double> e1(64, 0.0);
    e1[0] = 1.0;
    const Network net = linear_net(e1, 0.0);
    Matrix points(2000, 64);
    Rng rng(12);
    for (double& v : points.data) v = rng.normal();
    const CoStabilityReport report = co_stability(net, points);
    CHECK(report.S_star ==
          doctest::Approx(oracle::kFoldedNormalMean).epsilon(0.05));
}

TEST_CASE("per-class co-stability components sum to the total") {
    Network net = init_network({4, 6, 3}, Activation::Relu, 19);
    Matrix points(64, 4);
    Rng rng(20);
    for (double& v : points.data) v = rng.normal();
    const CoStabilityReport report = co_stability(net, points);
    double total = 0.0;
    for (double v : report.per_class) total += v;
    CHECK(total == doctest::Approx(report.S_star).epsilon(1e-15));
}

TEST_CASE("spectral norm of simple matrices") {
    Matrix two_i(3, 3);
    for (int i = 0; i < 3; ++i) two_i(i, i) = 2.0;
    CHECK(spectral_norm(two_i) == doctest::Approx(2.0).epsilon(1e-10));

    CHECK(lipschitz_upper(diag_relu_net()) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("power iteration tracks a dense SVD oracle on random matrices") {
    Rng rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix m(50, 50);
        for (double& v : m.data) v = rng.normal();
        const double via_power = spectral_norm(m);
        const double via_jacobi = oracle::jacobi_svd_sigma_max(m);
        CHECK(std::abs(via_power - via_jacobi) / via_jacobi <= 1e-6);
    }
}

TEST_CASE("gradient witness bounds for linear and relu nets") {
    const std::vector<double> w{1.0, -2.0, 2.0};
    const Network lin = linear_net(w, 0.3);
    Matrix one_point(1, 3);
    one_point(0, 0) = 0.5;
    CHECK(lipschitz_lower(lin, one_point, 4, 7) == doctest::Approx(3.0));  // |w| = 3

    const Network diag = diag_relu_net();
    Matrix positive(1, 2);
    positive(0, 0) = 1.0;
    positive(0, 1) = 1.0;
    CHECK(lipschitz_lower(diag, positive, 0, 7) >= 3.0);

    // soundness: witnesses never exceed the certified upper bound
    Network random_net = init_network({5, 8, 8, 2}, Activation::Tanh, 21);
    Matrix probes(16, 5);
    Rng rng(22);
    for (double& v : probes.data) v = rng.normal();
    const double lo = lipschitz_lower(random_net, probes, 32, 5);
    const double hi = lipschitz_upper(random_net);
    CHECK(lo <= hi * (1.0 + 1e-9));
}

TEST_CASE("heaviside nets have no Lipschitz interval") {
    const Network net = init_network({3, 4, 1}, Activation::Heaviside, 0);
    Matrix points(2, 3);
    CHECK_THROWS_AS(lipschitz_upper(net), std::domain_error);
    CHECK_THROWS_AS(lipschitz_lower(net, points, 2, 0), std::domain_error);
    const LipschitzInterval interval = lipschitz_interval(net, points, 2, 0);
    CHECK_FALSE(interval.defined);
    CHECK_THROWS_AS(normalized_costability(net, points), std::domain_error);
}

TEST_CASE("normalized co-stability of a unit-normal linear score equals stability") {
    // g = d_f for a linear classifier: L = 1 and S* = S(f)
    std::vector<double> w{0.6, 0.8};  // unit norm
    const Network net = linear_net(w, 0.0);
    Matrix points(512, 2);
    Rng rng(44);
    for (double& v : points.data) v = rng.normal();
    const CoStabilityReport report = normalized_costability(net, points, 8, 3);
    CHECK(report.L_hi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.normalized == doctest::Approx(report.S_star).epsilon(1e-9));
    // closed form: S(f) = E|w.x| with |w| = 1
    double direct = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        direct += std::abs(signed_distance_exact(w, 0.0, points.row_span(i)));
    }
    direct /= points.rows;
    CHECK(report.normalized == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("rescaling a single-layer score leaves the normalized ratio fixed") {
    const std::vector<double> w{1.5, -0.5, 1.0};
    Matrix points(128, 3);
    Rng rng(46);
    for (double& v : points.data) v = rng.normal();
    const CoStabilityReport base = normalized_costability(linear_net(w, 0.0), points, 8, 3);
    std::vector<double> scaled_w = w;
    for (double& v : scaled_w) v *= 7.5;
    const CoStabilityReport scaled =
        normalized_costability(linear_net(scaled_w, 0.0), points, 8, 3);
    CHECK(scaled.normalized == doctest::Approx(base.normalized).epsilon(1e-12));
}

TEST_CASE("rescaling the final layer moves no labels while S* scales") {
    Network net = init_network({4, 6, 3}, Activation::Relu, 51);
    Matrix points(64, 4);
    Rng rng(52);
    for (double& v : points.data) v = rng.normal();
    std::vector<int> labels;
    for (std::size_t i = 0; i < points.rows; ++i) {
        labels.push_back(predict_label(net, points.row_span(i)));
    }
    const double s_before = co_stability(net, points).S_star;
    for (double& v : net.weights.back().data) v *= 4.0;
    for (double& v : net.biases.back()) v *= 4.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        CHECK(predict_label(net, points.row_span(i)) == labels[i]);
    }
    CHECK(co_stability(net, points).S_star == doctest::Approx(4.0 * s_before));
}

TEST_CASE("constant classifier reports the infinity sentinel") {
    Network net = linear_net({0.0, 0.0}, 1.0);
    Matrix points(4, 2);
    const CoStabilityReport report = normalized_costability(net, points, 2, 0);
    CHECK(report.S_star == doctest::Approx(1.0));
    CHECK(report.L_hi == 0.0);
    CHECK(std::isinf(report.normalized));
}

TEST_CASE("soft sign worked points and clamping") {
    for (double gamma : {0.1, 0.5, 1.0}) {
        CHECK(soft_sign(0.5 * gamma, gamma) == doctest::Approx(0.5));
        CHECK(soft_sign(gamma, gamma) == 1.0);
        CHECK(soft_sign(-gamma, gamma) == -1.0);
        CHECK(soft_sign(3.0 * gamma, gamma) == 1.0);
        CHECK(soft_sign(-2.5 * gamma, gamma) == -1.0);
    }
    CHECK_THROWS_AS(soft_sign(0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(soft_sign(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("soft sign is 1/gamma-Lipschitz over random pairs") {
    Rng rng(61);
    for (double gamma : {0.1, 0.5, 1.0}) {
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double a = 3.0 * rng.normal();
            const double b = 3.0 * rng.normal();
            if (a == b) continue;
            worst = std::max(worst, std::abs(soft_sign(a, gamma) - soft_sign(b, gamma)) /
                                        std::abs(a - b));
        }
        CHECK(worst <= 1.0 / gamma + 1e-12);
    }
}

TEST_CASE("surrogate net divides the Lipschitz bound by gamma") {
    const Network net = linear_net({3.0, 4.0}, 0.0);
    const SurrogateNet sur = surrogate_net(net, 0.5);
    CHECK(sur.lipschitz_upper_bound() == doctest::Approx(5.0 / 0.5).epsilon(1e-9));
    const std::vector<double> x{0.02, 0.01};  // score 0.1 inside the ramp
    CHECK(sur.eval(x) == doctest::Approx(0.2));

    Matrix points(64, 2);
    Rng rng(62);
    for (double& v : points.data) v = rng.normal();
    const SurrogateNet auto_gamma = surrogate_net_default_gamma(net, points);
    const double s_star = co_stability(net, points).S_star;
    CHECK(auto_gamma.gamma == doctest::Approx(s_star / 2.0));
}

TEST_CASE("chain inequality on a linear classifier is tight") {
    const std::vector<double> w{2.0, -1.0, 0.5};
    const Network net = linear_net(w, 0.0);
    Matrix points(256, 3);
    Rng rng(71);
    for (double& v : points.data) v = rng.normal();
    const StabilityReport margins = class_stability(net, points, AttackConfig{});
    const CoStabilityReport costability = normalized_costability(net, points, 8, 1);
    const ChainCheck check = chain_inequality_check(net, points, margins, costability);
    CHECK(check.holds);
    CHECK(check.pointwise_holds);
    CHECK(check.pointwise_checked > 0);
    // both sides are E|w.x|/|w| for a linear score, so the slack is tiny
    CHECK(check.slack / check.lhs <= 0.05);
}

TEST_CASE("chain inequality holds on a trained relu net") {
    const LabeledDataset data = gen_gaussian_toy(6, 256, 0.4, 1.0, 81);
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.seed = 81;
    const TrainResult trained =
        train(init_network({6, 16, 16, 1}, Activation::Relu, 81), data, cfg);
    Matrix points(64, 6);
    std::copy(data.inputs.data.begin(), data.inputs.data.begin() + 64 * 6,
              points.data.begin());
    const StabilityReport margins = class_stability(trained.net, points, AttackConfig{});
    const CoStabilityReport costability =
        normalized_costability(trained.net, points, 8, 2);
    const ChainCheck check = chain_inequality_check(trained.net, points, margins,
                                                    costability);
    CHECK(check.holds);
    CHECK(check.pointwise_holds);
}

TEST_CASE("parameter proximity alone does not bound label distance") {
    // g_w(x) = w * tanh(x): nearby parameters w = +-eps/2 flip the sign of
    // every score, even though each classifier has a single boundary point.
    // Low co-stability is exactly what licenses the flip.
    const double eps = 1e-3;
    auto scaled_tanh = [](double w) {
        Network net = init_network({1, 1, 1}, Activation::Tanh, 0);
        net.weights[0](0, 0) = 1.0;
        net.biases[0][0] = 0.0;
        net.weights[1](0, 0) = w;
        net.biases[1][0] = 0.0;
        return net;
    };
    const Network plus = scaled_tanh(eps / 2.0);
    const Network minus = scaled_tanh(-eps / 2.0);
    Rng rng(97);
    Matrix points(100, 1);
    for (double& v : points.data) {
        do {
            v = 2.0 * rng.normal();
        } while (v == 0.0);
    }
    int flipped = 0;
    double worst_co_margin = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        if (predict_label(plus, points.row_span(i)) !=
            predict_label(minus, points.row_span(i))) {
            ++flipped;
        }
        worst_co_margin = std::max(worst_co_margin, co_margin(plus, points.row_span(i)));
    }
    CHECK(flipped == 100);                    // labels disagree everywhere
    CHECK(worst_co_margin <= eps / 2.0);      // because the scores sit near zero
    // each classifier alone is stable: the margin at x is |x|
    const MarginEstimate est = attack_margin(plus, std::vector<double>{0.8},
                                             AttackConfig{});
    CHECK(est.estimated_margin == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("chain inequality rejects mismatched sample sets") {
    const Network net = linear_net({1.0, 1.0}, 0.0);
    Matrix points(8, 2);
    Rng rng(91);
    for (double& v : points.data) v = rng.normal();
    const StabilityReport margins = class_stability(net, points, AttackConfig{});
    Matrix other(4, 2);
    for (double& v : other.data) v = rng.normal();
    const CoStabilityReport costability = normalized_costability(net, other, 2, 0);
    CHECK_THROWS_AS(chain_inequality_check(net, points, margins, costability),
                    std::invalid_argument);
}
