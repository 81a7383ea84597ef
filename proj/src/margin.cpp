#include "rlab/margin.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "rlab/parallel.hpp"
#include "rlab/rng.hpp"

namespace rlab {

double signed_distance_exact(std::span<const double> w, double b,
                             std::span<const double> x) {
    const double wn = norm2(w);
    if (wn == 0.0) throw std::invalid_argument("signed_distance_exact: zero normal");
    return (dot(w, x) + b) / wn;
}

namespace {

void check_finite(std::span<const double> scores) {
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::runtime_error("attack: non-finite score");
    }
}

// Margin functional relative to the clean prediction: positive while the
// label is unchanged, zero on the boundary. Also emits the coefficient
// vector mapping score-gradients to the margin gradient.
double margin_value(const Network& net, std::span<const double> scores,
                    int clean_label, std::vector<double>& coeffs) {
    coeffs.assign(scores.size(), 0.0);
    if (net.binary()) {
        const double sign = clean_label == 1 ? 1.0 : -1.0;
        coeffs[0] = sign;
        return sign * scores[0];
    }
    int rival = -1;
    double rival_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(scores.size()); ++j) {
        if (j == clean_label) continue;
        if (scores[static_cast<std::size_t>(j)] > rival_score) {
            rival_score = scores[static_cast<std::size_t>(j)];
            rival = j;
        }
    }
    coeffs[static_cast<std::size_t>(clean_label)] = 1.0;
    coeffs[static_cast<std::size_t>(rival)] = -1.0;
    return scores[static_cast<std::size_t>(clean_label)] - rival_score;
}

void clamp_box(std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

// Exact-forward label; flips are always verified with the true network, even
// when the search used surrogate gradients.
int exact_label(const Network& net, std::span<const double> x) {
    const std::vector<double> scores = forward(net, x);
    check_finite(scores);
    return label_from_scores(net, scores);
}

// Shrinks the flip distance along the ray x -> adv until the relative gap
// between the last clean and first adversarial points is below tol.
// Returns the adversarial distance; fills the witness point.
double bisect_ray(const Network& net, std::span<const double> x,
                  const std::vector<double>& adv, int clean_label, double tol,
                  std::vector<double>& witness) {
    const double dist = dist2(x, adv);
    std::vector<double> dir(sub(adv, x));
    for (double& v : dir) v /= dist;
    double lo = 0.0, hi = dist;
    std::vector<double> probe(x.size());
    witness.assign(adv.begin(), adv.end());
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = x[i] + mid * dir[i];
        if (exact_label(net, probe) != clean_label) {
            hi = mid;
            witness = probe;
        } else {
            lo = mid;
        }
    }
    return hi;
}

bool deepfool_search(const Network& net, std::span<const double> x,
                     const AttackConfig& cfg, int clean_label,
                     std::vector<double>& adv_out) {
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> coeffs;
    for (int step = 0; step < cfg.deepfool_max_steps; ++step) {
        const std::vector<double> scores = forward(net, cur);
        check_finite(scores);
        if (label_from_scores(net, scores) != clean_label) {
            adv_out = std::move(cur);
            return true;
        }
        const double m = margin_value(net, scores, clean_label, coeffs);
        const std::vector<double> grad = grad_input(net, cur, coeffs, cfg.grad);
        const double gg = dot(grad, grad);
        if (gg < 1e-24) return false;  // flat margin, linearization is useless
        const double scale = cfg.deepfool_overshoot * std::abs(m) / gg;
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= scale * grad[i];
        if (cfg.box_constrain) clamp_box(cur);
    }
    const std::vector<double> scores = forward(net, cur);
    check_finite(scores);
    if (label_from_scores(net, scores) != clean_label) {
        adv_out = std::move(cur);
        return true;
    }
    return false;
}

// L2 PGD toward the boundary within the eps ball; returns the first flipped
// iterate. Seeded per (sample, eps value) so refining the grid cannot change
// the outcome at pre-existing eps values.
bool pgd_search(const Network& net, std::span<const double> x,
                const AttackConfig& cfg, int clean_label, double eps,
                std::uint64_t sample_stream, std::vector<double>& adv_out) {
    std::uint64_t eps_bits;
    static_assert(sizeof(eps_bits) == sizeof(eps));
    std::memcpy(&eps_bits, &eps, sizeof(eps));
    Rng rng(derive_seed(sample_stream, eps_bits));
    const std::size_t d = x.size();
    // random start uniform in the ball
    std::vector<double> cur(d);
    {
        double nrm_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            cur[i] = rng.normal();
            nrm_sq += cur[i] * cur[i];
        }
        const double radius =
            eps * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        const double scale = nrm_sq > 0.0 ? radius / std::sqrt(nrm_sq) : 0.0;
        for (std::size_t i = 0; i < d; ++i) cur[i] = x[i] + scale * cur[i];
    }
    if (cfg.box_constrain) clamp_box(cur);

    const double step_size = 2.5 * eps / static_cast<double>(cfg.pgd_steps);
    std::vector<double> coeffs;
    for (int step = 0; step < cfg.pgd_steps; ++step) {
        const std::vector<double> scores = forward(net, cur);
        check_finite(scores);
        if (label_from_scores(net, scores) != clean_label) {
            adv_out = std::move(cur);
            return true;
        }
        margin_value(net, scores, clean_label, coeffs);
        std::vector<double> grad = grad_input(net, cur, coeffs, cfg.grad);
        double gn = norm2(grad);
        if (gn < 1e-18) {
            // flat spot: take a random unit step instead of stalling
            for (double& v : grad) v = rng.normal();
            gn = norm2(grad);
            if (gn == 0.0) continue;
        }
        for (std::size_t i = 0; i < d; ++i) cur[i] -= step_size * grad[i] / gn;
        // project back into the L2 ball around x
        double off_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = cur[i] - x[i];
            off_sq += diff * diff;
        }
        if (off_sq > eps * eps) {
            const double shrink = eps / std::sqrt(off_sq);
            for (std::size_t i = 0; i < d; ++i) {
                cur[i] = x[i] + (cur[i] - x[i]) * shrink;
            }
        }
        if (cfg.box_constrain) clamp_box(cur);
    }
    const std::vector<double> scores = forward(net, cur);
    check_finite(scores);
    if (label_from_scores(net, scores) != clean_label) {
        adv_out = std::move(cur);
        return true;
    }
    return false;
}

}  // namespace

MarginEstimate attack_margin(const Network& net, std::span<const double> x,
                             const AttackConfig& cfg, int sample_index) {
    if (cfg.eps_grid.empty()) throw std::invalid_argument("attack: empty eps grid");
    MarginEstimate est;
    est.sample_index = sample_index;
    est.predicted_label = exact_label(net, x);

    // Stage 1: iterative linearization, then bisection along the witness ray.
    std::vector<double> adv;
    if (deepfool_search(net, x, cfg, est.predicted_label, adv)) {
        est.estimated_margin =
            bisect_ray(net, x, adv, est.predicted_label, cfg.bisect_rel_tol,
                       est.witness);
        est.status = MarginStatus::Refined;
        est.attack_used = AttackKind::DeepfoolBisect;
        return est;
    }

    // Stage 2: PGD over the ascending grid; first success wins.
    std::vector<double> grid = cfg.eps_grid;
    std::sort(grid.begin(), grid.end());
    const std::uint64_t sample_stream =
        derive_seed(cfg.seed, 0x70676400ULL + static_cast<std::uint64_t>(sample_index));
    for (double eps : grid) {
        if (pgd_search(net, x, cfg, est.predicted_label, eps, sample_stream, adv)) {
            est.estimated_margin = dist2(x, adv);
            est.status = MarginStatus::GridHit;
            est.attack_used = AttackKind::PgdGrid;
            est.witness = std::move(adv);
            return est;
        }
    }
    est.estimated_margin = grid.back();
    est.status = MarginStatus::FailedCapped;
    est.attack_used = AttackKind::PgdGrid;
    return est;
}

StabilityReport class_stability(const Network& net, const Matrix& points,
                                const AttackConfig& cfg) {
    if (points.rows == 0) throw std::invalid_argument("class_stability: empty dataset");
    StabilityReport report;
    report.config = cfg;
    report.per_sample.resize(points.rows);
    std::vector<std::string> errors(points.rows);
    parallel_for(points.rows, [&](std::size_t i) {
        try {
            report.per_sample[i] =
                attack_margin(net, points.row_span(i), cfg, static_cast<int>(i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error("class_stability: sample " + std::to_string(i) +
                                     ": " + errors[i]);
        }
    }
    double total = 0.0;
    std::size_t successes = 0;
    for (const MarginEstimate& e : report.per_sample) {
        total += e.estimated_margin;
        if (e.status != MarginStatus::FailedCapped) ++successes;
    }
    report.S_hat = total / static_cast<double>(points.rows);
    report.attack_success_rate =
        static_cast<double>(successes) / static_cast<double>(points.rows);
    return report;
}

MulticlassMargin multiclass_margin(const Network& net, std::span<const double> x,
                                   const AttackConfig& cfg) {
    if (net.output_dim() < 2) {
        throw std::invalid_argument("multiclass_margin: needs a multi-class net");
    }
    MulticlassMargin result;
    result.per_class.assign(net.output_dim(), 0.0);
    result.predicted_class_estimate = attack_margin(net, x, cfg);
    const int pred = result.predicted_class_estimate.predicted_label;
    // f(z) != j already holds at z = x for every j != f(x), so those
    // components are exactly zero and the sum collapses to the predicted one.
    result.per_class[static_cast<std::size_t>(pred)] =
        result.predicted_class_estimate.estimated_margin;
    result.sum = result.per_class[static_cast<std::size_t>(pred)];
    return result;
}

double LinearClassifier::sdf(std::span<const double> x) const {
    return signed_distance_exact(w, b, x);
}

int LinearClassifier::label(std::span<const double> x) const {
    return dot(w, x) + b >= 0.0 ? 1 : -1;
}

int Thresholds1D::label(double x) const {
    int region = 0;
    for (double c : cuts) {
        if (x == c) return 1;  // cut points close the +1 set
        if (x > c) ++region;
    }
    return region % 2 == 0 ? first_label : -first_label;
}

double Thresholds1D::sdf(double x) const {
    double h = std::numeric_limits<double>::infinity();
    for (double c : cuts) h = std::min(h, std::abs(x - c));
    return label(x) > 0 ? h : -h;
}

double sdf_lipschitz_check(
    const std::function<double(std::span<const double>)>& sdf,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs) {
    double worst = 0.0;
    for (const auto& [a, b] : pairs) {
        const double dist = dist2(a, b);
        if (dist == 0.0) continue;
        worst = std::max(worst, std::abs(sdf(a) - sdf(b)) / dist);
    }
    return worst;
}

}  // namespace rlab
