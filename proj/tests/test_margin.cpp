#include <doctest.h>

#include <cmath>

#include "rlab/dataset.hpp"
#include "rlab/margin.hpp"
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

// g(x) = relu(x1 - 1) + relu(-x1 - 1) - 1/2: the sample at the origin sits
// in a flat region (zero gradient), which forces the PGD fallback; the true
// boundary is at |x1| = 3/2.
Network dead_zone_net() {
    Network net = init_network({2, 2, 1}, Activation::Relu, 0);
    net.weights[0].fill(0.0);
    net.weights[0](0, 0) = 1.0;
    net.weights[0](1, 0) = -1.0;
    net.biases[0] = {-1.0, -1.0};
    net.weights[1](0, 0) = 1.0;
    net.weights[1](0, 1) = 1.0;
    net.biases[1][0] = -0.5;
    return net;
}

}  // namespace

TEST_CASE("signed distance to a hyperplane") {
    const std::vector<double> w{3.0, 4.0};
    const std::vector<double> x{3.0, 4.0};
    CHECK(signed_distance_exact(w, 0.0, x) == doctest::Approx(5.0));
    const std::vector<double> neg{-3.0, -4.0};
    CHECK(signed_distance_exact(w, 0.0, neg) == doctest::Approx(-5.0));
    const std::vector<double> boundary{4.0, -3.0};
    CHECK(signed_distance_exact(w, 0.0, boundary) == doctest::Approx(0.0));
    LinearClassifier clf{w, 0.0};
    CHECK(clf.label(boundary) == 1);  // sgn(0) = +1
    CHECK_THROWS_AS(signed_distance_exact(std::vector<double>{0.0, 0.0}, 0.0, x),
                    std::invalid_argument);
}

TEST_CASE("attack margin on a 1-D threshold classifier") {
    const Network net = linear_net({1.0}, -0.5);  // sgn(x - 0.5)
    const std::vector<double> x{0.7};
    const MarginEstimate est = attack_margin(net, x, AttackConfig{});
    CHECK(est.status == MarginStatus::Refined);
    CHECK(est.estimated_margin >= 0.198);
    CHECK(est.estimated_margin <= 0.202);
}

TEST_CASE("attack margin matches the hyperplane oracle") {
    const Network net = linear_net({3.0, 4.0}, 0.0);
    const std::vector<double> x{3.0, 4.0};
    const MarginEstimate est = attack_margin(net, x, AttackConfig{});
    CHECK(est.estimated_margin == doctest::Approx(5.0).epsilon(0.05));
    CHECK(est.estimated_margin >= 5.0 * (1.0 - 1e-9));  // upper-bound semantics
}

TEST_CASE("constant classifier caps at max eps") {
    Network net = linear_net({0.0, 0.0}, 1.0);  // always class 1
    const std::vector<double> x{0.3, -0.7};
    const MarginEstimate est = attack_margin(net, x, AttackConfig{});
    CHECK(est.status == MarginStatus::FailedCapped);
    CHECK(est.estimated_margin == doctest::Approx(2.0));
}

TEST_CASE("class stability of g = x1 matches the folded-normal mean") {
    const int d = 784, n = 2000;
    std::vector<double> e1(d, 0.0);
    e1[0] = 1.0;
    const Network net = linear_net(e1, 0.0);
    Matrix points(n, d);
    Rng rng(31);
    for (double& v : points.data) v = rng.normal();
    const StabilityReport report = class_stability(net, points, AttackConfig{});
    CHECK(report.S_hat ==
          doctest::Approx(oracle::kFoldedNormalMean).epsilon(0.05));
    CHECK(report.attack_success_rate > 0.99);
}

TEST_CASE("single boundary point has near-zero stability") {
    const Network net = linear_net({1.0, 0.0}, 0.0);
    Matrix points(1, 2);
    points(0, 0) = 0.0;
    points(0, 1) = 3.0;
    const StabilityReport report = class_stability(net, points, AttackConfig{});
    CHECK(report.S_hat <= 0.01);
}

TEST_CASE("stability scales with the input geometry") {
    const std::vector<double> w{1.0, -2.0, 0.5};
    Matrix points(64, 3);
    Rng rng(17);
    for (double& v : points.data) v = rng.normal();
    const Network base = linear_net(w, 0.4);
    const StabilityReport before = class_stability(base, points, AttackConfig{});
    Matrix scaled(64, 3);
    for (std::size_t i = 0; i < points.data.size(); ++i) {
        scaled.data[i] = 3.0 * points.data[i];
    }
    const Network stretched = linear_net(w, 3.0 * 0.4);
    const StabilityReport after = class_stability(stretched, scaled, AttackConfig{});
    CHECK(after.S_hat == doctest::Approx(3.0 * before.S_hat).epsilon(0.02));
}

TEST_CASE("refined estimates come with verified witnesses and a clean side") {
    Network net = init_network({4, 8, 3}, Activation::Tanh, 23);
    Matrix points(20, 4);
    Rng rng(29);
    for (double& v : points.data) v = rng.normal();
    const StabilityReport report = class_stability(net, points, AttackConfig{});
    for (const MarginEstimate& est : report.per_sample) {
        if (est.status == MarginStatus::FailedCapped) continue;
        REQUIRE(est.witness.size() == 4);
        const std::vector<double> x(points.row(est.sample_index),
                                    points.row(est.sample_index) + 4);
        CHECK(predict_label(net, est.witness) != est.predicted_label);
        CHECK(dist2(x, est.witness) ==
              doctest::Approx(est.estimated_margin).epsilon(1e-9));
        if (est.status == MarginStatus::Refined) {
            std::vector<double> inside(4);
            for (int j = 0; j < 4; ++j) {
                inside[j] = x[j] + 0.99 * (est.witness[j] - x[j]);
            }
            CHECK(predict_label(net, inside) == est.predicted_label);
        }
    }
}

TEST_CASE("pgd fallback engages on flat regions and respects grid refinement") {
    const Network net = dead_zone_net();
    const std::vector<double> x{0.0, 0.0};
    AttackConfig coarse;
    coarse.eps_grid = {0.5, 2.0};
    const MarginEstimate a = attack_margin(net, x, coarse, 7);
    CHECK(a.attack_used == AttackKind::PgdGrid);
    if (a.status == MarginStatus::GridHit) {
        CHECK(a.estimated_margin >= 1.5);  // true distance to the boundary
        CHECK(a.estimated_margin <= 2.0);
        CHECK(predict_label(net, a.witness) != a.predicted_label);
    }
    AttackConfig fine = coarse;
    fine.eps_grid = {0.5, 1.0, 1.6, 1.8, 2.0};
    const MarginEstimate b = attack_margin(net, x, fine, 7);
    CHECK(b.estimated_margin <= a.estimated_margin + 1e-12);

    // capped samples keep the cap when only finer values are added
    AttackConfig short_grid;
    short_grid.eps_grid = {0.2, 1.0};
    const MarginEstimate c = attack_margin(net, x, short_grid, 7);
    CHECK(c.status == MarginStatus::FailedCapped);
    CHECK(c.estimated_margin == doctest::Approx(1.0));
}

TEST_CASE("multiclass margin components vanish off the predicted class") {
    Network net = init_network({3, 6, 3}, Activation::Tanh, 41);
    const std::vector<double> x{0.4, -0.2, 1.1};
    const MulticlassMargin mm = multiclass_margin(net, x, AttackConfig{});
    const int pred = mm.predicted_class_estimate.predicted_label;
    for (int j = 0; j < 3; ++j) {
        if (j != pred) CHECK(mm.per_class[static_cast<std::size_t>(j)] == 0.0);
    }
    CHECK(mm.sum == mm.per_class[static_cast<std::size_t>(pred)]);  // exact identity
}

TEST_CASE("two-class reduction agrees with the binary margin") {
    const std::vector<double> w{3.0, 4.0};
    const Network binary = linear_net(w, 0.0);
    Network two_output = init_network({2, 2}, Activation::Identity, 0);
    for (int j = 0; j < 2; ++j) {
        two_output.weights[0](0, j) = -w[static_cast<std::size_t>(j)];
        two_output.weights[0](1, j) = w[static_cast<std::size_t>(j)];
    }
    two_output.biases[0] = {0.0, 0.0};
    const std::vector<double> x{3.0, 4.0};
    const MarginEstimate direct = attack_margin(binary, x, AttackConfig{});
    const MulticlassMargin reduced = multiclass_margin(two_output, x, AttackConfig{});
    CHECK(reduced.sum == doctest::Approx(direct.estimated_margin).epsilon(0.02));
}

TEST_CASE("exact signed distance functions are 1-Lipschitz") {
    Rng rng(53);
    LinearClassifier clf;
    clf.w = {1.5, -0.3, 2.0};
    clf.b = 0.7;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> a(3), b(3);
        for (double& v : a) v = 3.0 * rng.normal();
        for (double& v : b) v = 3.0 * rng.normal();
        pairs.emplace_back(std::move(a), std::move(b));
    }
    const double ratio = sdf_lipschitz_check(
        [&](std::span<const double> x) { return clf.sdf(x); }, pairs);
    CHECK(ratio <= 1.0 + 1e-9);

    // the normal direction saturates the constant
    const double wn = norm2(clf.w);
    std::vector<double> p0{0.1, 0.2, 0.3};
    std::vector<double> p1 = p0;
    for (int j = 0; j < 3; ++j) p1[j] += 0.8 * clf.w[static_cast<std::size_t>(j)] / wn;
    const double saturated = sdf_lipschitz_check(
        [&](std::span<const double> x) { return clf.sdf(x); }, {{p0, p1}});
    CHECK(saturated == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-threshold classifier stays 1-Lipschitz") {
    const Thresholds1D clf{{-1.0, 2.0}, 1};  // labels +, -, +
    CHECK(clf.label(-5.0) == 1);
    CHECK(clf.label(0.0) == -1);
    CHECK(clf.label(3.0) == 1);
    CHECK(clf.sdf(0.0) == doctest::Approx(-1.0));
    CHECK(clf.label(-1.0) == 1);      // cut points close the +1 region
    CHECK(clf.sdf(-1.0) == 0.0);
    Rng rng(59);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
    for (int i = 0; i < 1000; ++i) {
        pairs.push_back({{6.0 * rng.normal()}, {6.0 * rng.normal()}});
    }
    const double ratio = sdf_lipschitz_check(
        [&](std::span<const double> x) { return clf.sdf(x[0]); }, pairs);
    CHECK(ratio <= 1.0 + 1e-9);
}

TEST_CASE("classifiers are recovered by the sign of their signed distance") {
    Rng rng(61);
    LinearClassifier clf;
    clf.w = {0.8, -1.1};
    clf.b = -0.25;
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{2.0 * rng.normal(), 2.0 * rng.normal()};
        CHECK(sign_convention(clf.sdf(x)) == clf.label(x));
    }
    const Thresholds1D t{{0.5}, 1};
    for (int i = 0; i < 1000; ++i) {
        const double x = 2.0 * rng.normal();
        CHECK((t.sdf(x) >= 0.0 ? 1 : -1) == t.label(x));
    }
    CHECK(t.label(0.5) == 1);
    CHECK(sign_convention(t.sdf(0.5)) == 1);
}
