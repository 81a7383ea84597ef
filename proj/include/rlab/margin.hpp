#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rlab/dataset.hpp"
#include "rlab/network.hpp"

namespace rlab {

enum class MarginStatus { Refined, GridHit, FailedCapped };
enum class AttackKind { DeepfoolBisect, PgdGrid };

struct AttackConfig {
    std::vector<double> eps_grid{0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
    int deepfool_max_steps = 50;
    double deepfool_overshoot = 1.02;
    double bisect_rel_tol = 1e-3;
    int pgd_steps = 40;
    bool box_constrain = false;  // clip the search to [0,1]^d (image data)
    std::uint64_t seed = 0;
    GradOptions grad;
};

/// One boundary-distance estimate. refined / grid_hit margins are certified
/// upper bounds: `witness` holds an input whose exact-forward label differs
/// from the clean prediction at distance estimated_margin from x.
struct MarginEstimate {
    int sample_index = 0;
    int predicted_label = 0;
    double estimated_margin = 0.0;
    MarginStatus status = MarginStatus::FailedCapped;
    AttackKind attack_used = AttackKind::PgdGrid;
    std::vector<double> witness;
};

struct StabilityReport {
    std::vector<MarginEstimate> per_sample;
    double S_hat = 0.0;                // mean estimated margin
    double attack_success_rate = 0.0;  // fraction with status != failed_capped
    AttackConfig config;
};

// (w.x + b) / |w|; sign matches the classifier label with sgn(0) = +1.
double signed_distance_exact(std::span<const double> w, double b,
                             std::span<const double> x);

// Two-stage search: DeepFool-style linearization refined by bisection along
// the witness ray; PGD over the ascending eps grid as fallback; cap at
// max(eps_grid) when nothing flips.
MarginEstimate attack_margin(const Network& net, std::span<const double> x,
                             const AttackConfig& cfg, int sample_index = 0);

StabilityReport class_stability(const Network& net, const Matrix& points,
                                const AttackConfig& cfg);

struct MulticlassMargin {
    std::vector<double> per_class;  // zero except at the predicted class
    double sum = 0.0;
    MarginEstimate predicted_class_estimate;
};

// One-vs-all margins: component j != f(x) vanishes (witness z = x), the
// predicted-class component is the attack margin, and the sum equals it.
MulticlassMargin multiclass_margin(const Network& net, std::span<const double> x,
                                   const AttackConfig& cfg);

// --- exact signed-distance oracles -----------------------------------------

struct LinearClassifier {
    std::vector<double> w;
    double b = 0.0;
    double sdf(std::span<const double> x) const;
    int label(std::span<const double> x) const;  // +1 / -1, sgn(0) = +1
};

/// 1-D classifier with alternating labels across sorted cut points. Cut
/// points themselves take label +1 so the +1 region is closed.
struct Thresholds1D {
    std::vector<double> cuts;  // strictly increasing
    int first_label = 1;       // label on (-inf, cuts[0])
    double sdf(double x) const;
    int label(double x) const;
};

// Max ratio |sdf(x1) - sdf(x2)| / |x1 - x2| over the pairs; coincident pairs
// are skipped.
double sdf_lipschitz_check(
    const std::function<double(std::span<const double>)>& sdf,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs);

}  // namespace rlab
