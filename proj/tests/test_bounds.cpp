#include <doctest.h>

#include <cmath>

#include "rlab/bounds.hpp"
#include "rlab/rng.hpp"
#include "bounds_oracle.hpp"

using namespace rlab;

namespace {

oracle::BigInputs to_big(const BoundInputs& in) {
    oracle::BigInputs big;
    big.n = in.n; big.d = in.d; big.logF = in.logF; big.c = in.c;
    big.S = in.S; big.S_star = in.S_star; big.L = in.L;
    big.K = in.K; big.K1 = in.K1; big.K2 = in.K2;
    big.W = in.W; big.J = in.J; big.eps_tilde = in.eps_tilde;
    big.eps = in.eps; big.delta = in.delta; big.a = in.a;
    return big;
}

double oracle_rel_error(double value, const oracle::Big& exact) {
    const double e = exact.convert_to<double>();
    return std::abs(value - e) / std::max(std::abs(e), 1e-300);
}

BoundInputs worked_basic() {
    BoundInputs in;
    in.K1 = 1; in.n = 100; in.c = 1; in.S = 0.5; in.logF = 1000; in.d = 784;
    return in;
}

BoundInputs worked_infinite() {
    BoundInputs in;
    in.K = 1; in.n = 100; in.L = 2; in.S_star = 0.4; in.logF = 1000; in.d = 784;
    in.c = 1; in.W = 10; in.J = 5; in.eps_tilde = 0.01;
    return in;
}

}  // namespace

TEST_CASE("basic Rademacher bound worked instance") {
    const BoundResult r = rademacher_bound_basic(worked_basic());
    CHECK(r.value == doctest::Approx(0.714286).epsilon(2e-4));
    CHECK(r.terms[0].value == doctest::Approx(0.1));
    CHECK(r.dominant_term == "stability");
    CHECK(oracle_rel_error(r.value, oracle::rademacher_basic(to_big(worked_basic()))) <=
          1e-12);
    CHECK(r.value == r.terms[1].value);  // value = max(terms)
}

TEST_CASE("basic bound dominance limits and homogeneity") {
    BoundInputs in;
    in.K1 = 1; in.n = 1; in.S = 1e6; in.d = 1e6; in.logF = 10; in.c = 1;
    const BoundResult r = rademacher_bound_basic(in);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.dominant_term == "sample");

    BoundInputs base = worked_basic();
    const double t2 = rademacher_bound_basic(base).terms[1].value;
    const double t1 = rademacher_bound_basic(base).terms[0].value;
    base.S *= 2.0;
    const BoundResult doubled = rademacher_bound_basic(base);
    CHECK(doubled.terms[1].value == doctest::Approx(t2 / 2.0));
    CHECK(doubled.terms[0].value == doctest::Approx(t1));
}

TEST_CASE("refined Rademacher bound worked instance") {
    BoundInputs in = worked_basic();
    in.K2 = 1;
    const BoundResult r = rademacher_bound_refined(in);
    CHECK(r.value == doctest::Approx(0.225877).epsilon(2e-4));
    CHECK(r.terms[2].value == doctest::Approx(4.56e-11).epsilon(1e-2));
    CHECK(oracle_rel_error(r.value, oracle::rademacher_refined(to_big(in))) <= 1e-12);
}

TEST_CASE("refined concentration term saturates at 2 K2 as S vanishes") {
    BoundInputs in = worked_basic();
    in.S = 1e-160;
    const BoundResult r = rademacher_bound_refined(in);
    CHECK(r.terms[2].value == doctest::Approx(2.0 * in.K2).epsilon(1e-12));
    in.S = 0.3;
    CHECK(rademacher_bound_refined(in).terms[2].value <= 2.0 * in.K2);
}

TEST_CASE("refined bound never exceeds the basic bound in its regime") {
    // logF >= n, K1 = K2, exp term non-dominant
    Rng rng(101);
    int checked = 0;
    while (checked < 1000) {
        BoundInputs in;
        in.n = 1.0 + std::floor(rng.uniform(1.0, 1000.0));
        in.logF = in.n * rng.uniform(1.0, 50.0);
        in.d = 1.0 + std::floor(rng.uniform(1.0, 2000.0));
        in.c = rng.uniform(0.01, 10.0);
        in.S = rng.uniform(0.01, 5.0);
        const BoundResult refined = rademacher_bound_refined(in);
        if (refined.dominant_term == "concentration") continue;
        const BoundResult basic = rademacher_bound_basic(in);
        CHECK(refined.value <= basic.value * (1.0 + 1e-12));
        ++checked;
    }
}

TEST_CASE("finite-class robustness threshold worked instance") {
    BoundInputs in;
    in.K = 1; in.eps = 0.1; in.c = 1; in.logF = 1000; in.n = 100; in.d = 784;
    const BoundResult r = robustness_threshold_finite(in);
    CHECK(r.value == doctest::Approx(3.38814).epsilon(2e-4));
    CHECK(r.terms[1].value == doctest::Approx(0.204399).epsilon(2e-4));
    CHECK(oracle_rel_error(r.value, oracle::threshold_finite(to_big(in))) <= 1e-12);
}

TEST_CASE("threshold log term vanishes at eps = 6K and the value falls with n") {
    BoundInputs in;
    in.K = 0.125; in.eps = 0.75; in.c = 1; in.logF = 2; in.n = 100; in.d = 784;
    const BoundResult r = robustness_threshold_finite(in);
    CHECK(r.terms[1].value == 0.0);
    CHECK(r.value == doctest::Approx(r.terms[0].value));

    BoundInputs grow = in;
    double prev = robustness_threshold_finite(grow).value;
    for (double n : {200.0, 400.0, 800.0, 1600.0}) {
        grow.n = n;
        const double cur = robustness_threshold_finite(grow).value;
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("infinite-class Rademacher bound worked instance") {
    const BoundInputs in = worked_infinite();
    const BoundResult r = rademacher_bound_infinite(in);
    CHECK(r.value == doctest::Approx(2.00535).epsilon(2e-4));
    CHECK(r.terms[0].value == doctest::Approx(0.1));
    CHECK(r.terms[2].value == doctest::Approx(0.0396817).epsilon(2e-4));
    CHECK(r.terms[3].value == doctest::Approx(0.125));
    CHECK(r.dominant_term == "covering");
    CHECK(oracle_rel_error(r.value, oracle::rademacher_infinite(to_big(in))) <= 1e-12);
}

TEST_CASE("covering term blows up as eps_tilde shrinks, discretization as it grows") {
    BoundInputs in = worked_infinite();
    in.eps_tilde = 1e-12;
    const BoundResult tiny = rademacher_bound_infinite(in);
    CHECK(tiny.dominant_term == "covering");
    CHECK(tiny.value > rademacher_bound_infinite(worked_infinite()).value);
    in.eps_tilde = 1e6;
    const BoundResult huge = rademacher_bound_infinite(in);
    CHECK(huge.dominant_term == "discretization");
}

TEST_CASE("eps_tilde minimizer beats a dense grid scan") {
    const BoundInputs in = worked_infinite();
    const EpsTildeOptimum best = minimize_eps_tilde(in);
    // 1e4-point log-spaced scan as the oracle
    double grid_best = std::numeric_limits<double>::infinity();
    BoundInputs probe = in;
    for (int i = 0; i < 10000; ++i) {
        const double t = -9.0 + 15.0 * i / 9999.0;  // log10 range
        probe.eps_tilde = std::pow(10.0, t);
        grid_best = std::min(grid_best, rademacher_bound_infinite(probe).value);
    }
    CHECK(best.bound.value <= grid_best * (1.0 + 1e-9));
    probe.eps_tilde = 1e-9;
    CHECK(best.bound.value <= rademacher_bound_infinite(probe).value);
    probe.eps_tilde = 1e6;
    CHECK(best.bound.value <= rademacher_bound_infinite(probe).value);
}

TEST_CASE("infinite-class robustness threshold worked instance") {
    BoundInputs in = worked_infinite();
    in.eps = 0.1;
    const BoundResult r = robustness_threshold_infinite(in);
    CHECK(r.value == doctest::Approx(12.0321).epsilon(2e-4));
    CHECK(oracle_rel_error(r.value, oracle::threshold_infinite(to_big(in))) <= 1e-12);

    // second term shares the finite-case expression
    BoundInputs fin = in;
    const BoundResult finite = robustness_threshold_finite(fin);
    CHECK(r.terms[1].value == doctest::Approx(finite.terms[1].value).epsilon(1e-15));

    // monotone increasing in p
    double prev = 0.0;
    for (double p : {100.0, 1000.0, 10000.0}) {
        in.logF = p;
        const double cur = robustness_threshold_infinite(in).value;
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("generalization gap worked instance and contraction") {
    const BoundResult r = generalization_gap_bound(0.2, 1.0, 0.05, 100, GapLoss::ZeroOne);
    CHECK(r.value == doctest::Approx(0.471599).epsilon(2e-4));
    CHECK(r.terms[0].value == doctest::Approx(0.2));
    CHECK(oracle_rel_error(
              r.value, oracle::generalization_gap(0.2, 1.0, 0.05, 100, oracle::Big(1) / 2)) <=
          1e-12);

    CHECK_THROWS_AS(generalization_gap_bound(0.2, 1.0, 2.0, 100, GapLoss::ZeroOne),
                    std::invalid_argument);

    const BoundResult lip =
        generalization_gap_bound(0.2, 1.0, 0.05, 100, GapLoss::Lipschitz, 1.0);
    CHECK(lip.terms[0].value == doctest::Approx(2.0 * r.terms[0].value));
}

TEST_CASE("comparison crossover sits exactly at sqrt(c/d)") {
    BoundInputs in;
    in.n = 100; in.logF = 1000; in.c = 1; in.d = 784; in.S = 1.0;
    const BoundComparison cmp = compare_to_standard(in);
    CHECK(cmp.crossover_S == doctest::Approx(0.0357143).epsilon(1e-5));

    in.S = cmp.crossover_S;
    const BoundComparison at = compare_to_standard(in);
    CHECK(std::abs(at.term_ours - at.term_standard) <=
          1e-12 * std::max(at.term_ours, at.term_standard));

    in.S = 10.0 * cmp.crossover_S;
    CHECK(compare_to_standard(in).winner == "ours");
    in.S = 0.1 * cmp.crossover_S;
    CHECK(compare_to_standard(in).winner == "standard");
}

TEST_CASE("all evaluators match the 50-digit oracle on random inputs") {
    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        BoundInputs in;
        in.n = 1.0 + std::floor(rng.uniform(0.0, 1e5));
        in.d = 1.0 + std::floor(rng.uniform(0.0, 1e5));
        in.logF = rng.uniform(1.0, 1e6);
        in.c = rng.uniform(1e-3, 1e3);
        in.S = rng.uniform(1e-3, 10.0);
        in.S_star = rng.uniform(1e-3, 10.0);
        in.L = rng.uniform(1e-2, 1e2);
        in.K = rng.uniform(0.1, 10.0);
        in.K1 = rng.uniform(0.1, 10.0);
        in.K2 = rng.uniform(0.1, 10.0);
        in.W = rng.uniform(0.1, 100.0);
        in.J = rng.uniform(0.1, 100.0);
        in.eps_tilde = rng.uniform(1e-6, 10.0);
        in.eps = rng.uniform(0.01, 0.99);
        in.delta = rng.uniform(0.01, 0.99);
        in.a = rng.uniform(0.1, 10.0);
        const oracle::BigInputs big = to_big(in);
        CHECK(oracle_rel_error(rademacher_bound_basic(in).value,
                               oracle::rademacher_basic(big)) <= 1e-12);
        CHECK(oracle_rel_error(rademacher_bound_refined(in).value,
                               oracle::rademacher_refined(big)) <= 1e-12);
        CHECK(oracle_rel_error(robustness_threshold_finite(in).value,
                               oracle::threshold_finite(big)) <= 1e-12);
        CHECK(oracle_rel_error(rademacher_bound_infinite(in).value,
                               oracle::rademacher_infinite(big)) <= 1e-12);
        CHECK(oracle_rel_error(robustness_threshold_infinite(in).value,
                               oracle::threshold_infinite(big)) <= 1e-12);
        CHECK(oracle_rel_error(
                  generalization_gap_bound(in.S, in.a, in.delta, in.n, GapLoss::ZeroOne)
                      .value,
                  oracle::generalization_gap(in.S, in.a, in.delta, in.n,
                                             oracle::Big(1) / 2)) <= 1e-12);
        CHECK(oracle_rel_error(compare_to_standard(in).standard,
                               oracle::standard_bound(big)) <= 1e-12);
    }
}

TEST_CASE("constants scale every evaluator linearly") {
    BoundInputs in = worked_infinite();
    in.eps = 0.1;
    in.S = 0.5;
    const double lambda = 3.7;
    const double basic = rademacher_bound_basic(in).value;
    const double refined = rademacher_bound_refined(in).value;
    const double infinite = rademacher_bound_infinite(in).value;
    BoundInputs scaled = in;
    scaled.K *= lambda;
    scaled.K1 *= lambda;
    scaled.K2 *= lambda;
    CHECK(rademacher_bound_basic(scaled).value == doctest::Approx(lambda * basic));
    CHECK(rademacher_bound_refined(scaled).value == doctest::Approx(lambda * refined));
    CHECK(rademacher_bound_infinite(scaled).value == doctest::Approx(lambda * infinite));
}

TEST_CASE("domain violations raise and the logF < n regime warns") {
    BoundInputs in = worked_basic();
    in.S = 0.0;
    CHECK_THROWS_AS(rademacher_bound_basic(in), std::invalid_argument);
    in = worked_basic();
    in.n = 0;
    CHECK_THROWS_AS(rademacher_bound_basic(in), std::invalid_argument);
    in = worked_basic();
    in.logF = 10;  // < n = 100
    const BoundResult r = rademacher_bound_basic(in);
    REQUIRE(!r.warnings.empty());
    CHECK(r.warnings[0].find("logF < n") != std::string::npos);
}

TEST_CASE("empirical Rademacher worked values") {
    // singleton constant classifier on n = 4: exact value 1.5 / 4
    const std::vector<std::vector<double>> singleton{{1.0, 1.0, 1.0, 1.0}};
    const RademacherEstimate est = empirical_rademacher(singleton, 10000, 7);
    CHECK(std::abs(est.mean - 0.375) <= 3.0 * est.std_error);

    // all 2^4 dichotomies: sup correlation is n on every draw
    std::vector<std::vector<double>> dichotomies;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<double> row(4);
        for (int i = 0; i < 4; ++i) row[i] = (mask >> i) & 1 ? 1.0 : -1.0;
        dichotomies.push_back(std::move(row));
    }
    const RademacherEstimate full = empirical_rademacher(dichotomies, 200, 7);
    CHECK(full.mean == 1.0);
    CHECK(full.std_error == 0.0);
}

TEST_CASE("empirical Rademacher is monotone in the class under shared draws") {
    Rng rng(55);
    std::vector<std::vector<double>> small_class;
    for (int f = 0; f < 3; ++f) {
        std::vector<double> row(10);
        for (double& v : row) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        small_class.push_back(std::move(row));
    }
    std::vector<std::vector<double>> big_class = small_class;
    for (int f = 0; f < 5; ++f) {
        std::vector<double> row(10);
        for (double& v : row) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        big_class.push_back(std::move(row));
    }
    const RademacherEstimate small_est = empirical_rademacher(small_class, 500, 99);
    const RademacherEstimate big_est = empirical_rademacher(big_class, 500, 99);
    CHECK(small_est.mean <= big_est.mean + 1e-15);
}

TEST_CASE("empirical Rademacher input validation") {
    CHECK_THROWS_AS(empirical_rademacher({}, 500, 0), std::invalid_argument);
    CHECK_THROWS_AS(empirical_rademacher({{1.0, -1.0}}, 99, 0), std::invalid_argument);
    CHECK_THROWS_AS(empirical_rademacher({{1.0, 0.5}}, 500, 0), std::invalid_argument);
}
