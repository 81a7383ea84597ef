#include "rlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlab/rng.hpp"

namespace rlab {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

void require_sample_dims(const BoundInputs& in) {
    require(in.n >= 1.0, "bounds: n must be >= 1");
    require(in.d >= 1.0, "bounds: d must be >= 1");
}

void warn_logF(const BoundInputs& in, BoundResult& r) {
    if (in.logF < in.n) {
        r.warnings.push_back("logF < n: outside the regime the bound assumes");
    }
}

BoundResult finish_max(BoundResult r) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.terms.size(); ++i) {
        if (r.terms[i].value > r.terms[best].value) best = i;
    }
    r.value = r.terms[best].value;
    r.dominant_term = r.terms[best].name;
    return r;
}

// log(6K/eps), clamped at zero once eps >= 6K (the concentration constraint
// is already vacuous there).
double threshold_log(double K, double eps) {
    const double ratio = 6.0 * K / eps;
    return ratio > 1.0 ? std::log(ratio) : 0.0;
}

double covering_log(const BoundInputs& in) {
    return std::log(1.0 + 60.0 * in.W * in.J / in.eps_tilde);
}

void require_covering(const BoundInputs& in) {
    require(in.W > 0.0, "bounds: W must be > 0");
    require(in.J > 0.0, "bounds: J must be > 0");
    require(in.eps_tilde > 0.0, "bounds: eps_tilde must be > 0");
}

}  // namespace

BoundResult rademacher_bound_basic(const BoundInputs& in) {
    require_sample_dims(in);
    require(in.S > 0.0, "bounds: S must be > 0");
    require(in.logF > 0.0, "bounds: logF must be > 0");
    require(in.c > 0.0, "bounds: c must be > 0");
    require(in.K1 > 0.0, "bounds: K1 must be > 0");
    BoundResult r;
    r.formula_id = "rademacher_basic";
    warn_logF(in, r);
    r.terms.push_back({"sample", in.K1 / std::sqrt(in.n)});
    r.terms.push_back(
        {"stability",
         in.K1 * (std::sqrt(in.c) / in.S) * in.logF / (in.n * std::sqrt(in.d))});
    return finish_max(std::move(r));
}

BoundResult rademacher_bound_refined(const BoundInputs& in) {
    require_sample_dims(in);
    require(in.S > 0.0, "bounds: S must be > 0");
    require(in.logF > 0.0, "bounds: logF must be > 0");
    require(in.c > 0.0, "bounds: c must be > 0");
    require(in.K2 > 0.0, "bounds: K2 must be > 0");
    BoundResult r;
    r.formula_id = "rademacher_refined";
    warn_logF(in, r);
    r.terms.push_back({"sample", in.K2 / std::sqrt(in.n)});
    r.terms.push_back({"stability", in.K2 * (std::sqrt(in.c) / in.S) *
                                        std::sqrt(in.logF / (in.n * in.d))});
    r.terms.push_back(
        {"concentration",
         in.K2 * 2.0 * std::exp(-in.d * in.S * in.S / (8.0 * in.c))});
    return finish_max(std::move(r));
}

BoundResult robustness_threshold_finite(const BoundInputs& in) {
    require_sample_dims(in);
    require(in.logF > 0.0, "bounds: logF must be > 0");
    require(in.c > 0.0, "bounds: c must be > 0");
    require(in.K > 0.0, "bounds: K must be > 0");
    require(in.eps > 0.0 && in.eps < 1.0, "bounds: eps must be in (0,1)");
    BoundResult r;
    r.formula_id = "threshold_finite";
    warn_logF(in, r);
    r.terms.push_back({"stability", (3.0 * in.K / in.eps) *
                                        std::sqrt(in.c * in.logF / (in.n * in.d))});
    r.terms.push_back(
        {"concentration", std::sqrt((8.0 * in.c / in.d) * threshold_log(in.K, in.eps))});
    r = finish_max(std::move(r));
    // sample-size conditions as a function of K: K/sqrt(n) < eps/3 and
    // sqrt(2 log(2/delta)/n) < eps/2
    const double n_i = std::pow(3.0 * in.K / in.eps, 2.0);
    r.warnings.push_back("requires n > (3K/eps)^2 = " + std::to_string(n_i));
    if (in.delta > 0.0 && in.delta < 1.0) {
        const double n_ii = 8.0 * std::log(2.0 / in.delta) / (in.eps * in.eps);
        r.warnings.push_back("requires n > 8 log(2/delta)/eps^2 = " + std::to_string(n_ii));
    }
    return r;
}

BoundResult rademacher_bound_infinite(const BoundInputs& in) {
    require_sample_dims(in);
    require(in.S_star > 0.0, "bounds: S_star must be > 0");
    require(in.L > 0.0, "bounds: L must be > 0");
    require(in.logF > 0.0, "bounds: p must be > 0");
    require(in.c > 0.0, "bounds: c must be > 0");
    require(in.K > 0.0, "bounds: K must be > 0");
    require_covering(in);
    BoundResult r;
    r.formula_id = "rademacher_infinite";
    warn_logF(in, r);
    r.terms.push_back({"sample", in.K * std::sqrt(1.0 / in.n)});
    r.terms.push_back({"covering", in.K * (in.L / in.S_star) *
                                       std::sqrt(in.logF / (in.n * in.d)) *
                                       std::sqrt(in.c * covering_log(in))});
    r.terms.push_back(
        {"concentration",
         in.K * 2.0 *
             std::exp(-in.d * in.S_star * in.S_star / (8.0 * in.c * in.L * in.L))});
    r.terms.push_back({"discretization", in.K * (in.J / in.S_star) * in.eps_tilde});
    return finish_max(std::move(r));
}

BoundResult robustness_threshold_infinite(const BoundInputs& in) {
    require_sample_dims(in);
    require(in.logF > 0.0, "bounds: p must be > 0");
    require(in.c > 0.0, "bounds: c must be > 0");
    require(in.K > 0.0, "bounds: K must be > 0");
    require(in.eps > 0.0 && in.eps < 1.0, "bounds: eps must be in (0,1)");
    require_covering(in);
    BoundResult r;
    r.formula_id = "threshold_infinite";
    warn_logF(in, r);
    r.terms.push_back({"covering", (3.0 * in.K / in.eps) *
                                       std::sqrt(in.logF / (in.n * in.d)) *
                                       std::sqrt(in.c * covering_log(in))});
    r.terms.push_back(
        {"concentration", std::sqrt((8.0 * in.c / in.d) * threshold_log(in.K, in.eps))});
    return finish_max(std::move(r));
}

BoundResult generalization_gap_bound(double rademacher_value, double a,
                                     double delta, double n, GapLoss loss,
                                     double loss_lipschitz) {
    require(n >= 1.0, "bounds: n must be >= 1");
    require(rademacher_value >= 0.0, "bounds: Rademacher value must be >= 0");
    require(a > 0.0, "bounds: loss bound a must be > 0");
    require(delta > 0.0 && delta < 1.0, "bounds: delta must be in (0,1)");
    const double contraction = loss == GapLoss::ZeroOne ? 0.5 : loss_lipschitz;
    require(contraction > 0.0, "bounds: loss Lipschitz constant must be > 0");
    BoundResult r;
    r.formula_id = "generalization_gap";
    r.terms.push_back({"rademacher", 2.0 * contraction * rademacher_value});
    r.terms.push_back({"confidence", a * std::sqrt(2.0 * std::log(2.0 / delta) / n)});
    r.value = r.terms[0].value + r.terms[1].value;  // sum-form
    r.dominant_term = r.terms[0].value >= r.terms[1].value ? "rademacher" : "confidence";
    return r;
}

BoundComparison compare_to_standard(const BoundInputs& in) {
    BoundComparison cmp;
    cmp.ours = rademacher_bound_refined(in);
    cmp.term_ours = in.K2 * (std::sqrt(in.c) / in.S) * std::sqrt(in.logF / (in.n * in.d));
    cmp.term_standard = in.K2 * std::sqrt(in.logF / in.n);
    cmp.standard = in.K2 * (std::sqrt(1.0 / in.n) + std::sqrt(in.logF / in.n));
    cmp.crossover_S = std::sqrt(in.c / in.d);
    if (cmp.term_ours < cmp.term_standard) {
        cmp.winner = "ours";
    } else if (cmp.term_ours > cmp.term_standard) {
        cmp.winner = "standard";
    } else {
        cmp.winner = "tie";
    }
    return cmp;
}

EpsTildeOptimum minimize_eps_tilde(BoundInputs in, double lo, double hi) {
    require(lo > 0.0 && hi > lo, "bounds: invalid eps_tilde range");
    auto value_at = [&](double log_et) {
        in.eps_tilde = std::exp(log_et);
        return rademacher_bound_infinite(in).value;
    };
    // golden-section on log eps_tilde; the objective is a max of a
    // decreasing and an increasing branch, hence unimodal
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(lo), b = std::log(hi);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = value_at(x1), f2 = value_at(x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value_at(x2);
        }
    }
    EpsTildeOptimum best;
    best.eps_tilde = std::exp(0.5 * (a + b));
    in.eps_tilde = best.eps_tilde;
    best.bound = rademacher_bound_infinite(in);
    return best;
}

RademacherEstimate empirical_rademacher(
    const std::vector<std::vector<double>>& predictions, int draws,
    std::uint64_t seed) {
    if (predictions.empty()) {
        throw std::invalid_argument("empirical_rademacher: empty classifier set");
    }
    if (draws < 100) {
        throw std::invalid_argument("empirical_rademacher: needs at least 100 draws");
    }
    const std::size_t n = predictions.front().size();
    for (const auto& row : predictions) {
        if (row.size() != n) {
            throw std::invalid_argument("empirical_rademacher: ragged prediction matrix");
        }
        for (double v : row) {
            if (v != 1.0 && v != -1.0) {
                throw std::invalid_argument("empirical_rademacher: outputs must be +-1");
            }
        }
    }
    Rng rng(derive_seed(seed, 0x7261646dULL));
    std::vector<double> sigma(n);
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < draws; ++t) {
        for (double& s : sigma) s = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double sup = 0.0;
        for (const auto& row : predictions) {
            double corr = 0.0;
            for (std::size_t i = 0; i < n; ++i) corr += sigma[i] * row[i];
            sup = std::max(sup, std::abs(corr));
        }
        const double value = sup / static_cast<double>(n);
        sum += value;
        sum_sq += value * value;
    }
    RademacherEstimate est;
    est.draws = draws;
    est.mean = sum / draws;
    const double var = std::max(0.0, sum_sq / draws - est.mean * est.mean);
    est.std_error = std::sqrt(var / draws);
    return est;
}

}  // namespace rlab
