#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rlab {

/// Inputs shared by the bound evaluators. Formulas validate only the fields
/// they read; unset fields keep their defaults. logF < n draws a warning
/// (not an error) since the finite-class bounds assume log|F| >= n.
struct BoundInputs {
    double n = 0;          // samples
    double d = 0;          // ambient dimension
    double logF = 0;       // log|F|, or parameter count p
    double c = 1.0;        // isoperimetry constant
    double S = 0;          // class stability
    double S_star = 0;     // co-stability
    double L = 0;          // Lipschitz bound on the score class
    double K = 1.0;        // absolute constants, configurable, echoed
    double K1 = 1.0;
    double K2 = 1.0;
    double W = 0;          // parameter-space diameter
    double J = 0;          // parameterization Lipschitz constant
    double eps_tilde = 0;  // covering precision
    double eps = 0;        // accuracy gap, in (0,1)
    double delta = 0;      // confidence, in (0,1)
    double a = 1.0;        // loss bound
};

struct BoundTerm {
    std::string name;
    double value = 0.0;
};

struct BoundResult {
    double value = 0.0;
    std::vector<BoundTerm> terms;   // constants included, value = max (or sum)
    std::string dominant_term;      // argmax, lowest index on ties
    std::string formula_id;
    std::vector<std::string> warnings;
};

// K1 * max{ 1/sqrt(n), (sqrt(c)/S) * logF / (n sqrt(d)) }
BoundResult rademacher_bound_basic(const BoundInputs& in);

// K2 * max{ 1/sqrt(n), (sqrt(c)/S) * sqrt(logF/(n d)), 2 exp(-d S^2 / (8c)) }
BoundResult rademacher_bound_refined(const BoundInputs& in);

// max{ (3K/eps) sqrt(c logF/(n d)), sqrt((8c/d) log(6K/eps)) };
// the log clamps at 0 once eps >= 6K. Also reports the minimal n implied by
// the sample-size conditions as a function of K.
BoundResult robustness_threshold_finite(const BoundInputs& in);

// K * max{ sqrt(1/n), (L/S*) sqrt(p/(n d)) sqrt(c log(1 + 60 W J / et)),
//          2 exp(-d S*^2 / (8 c L^2)), (J/S*) et }
BoundResult rademacher_bound_infinite(const BoundInputs& in);

// Threshold on S*(g)/L(g):
// max{ (3K/eps) sqrt(p/(n d)) sqrt(c log(1 + 60 W J / et)),
//      sqrt((8c/d) log(6K/eps)) }
BoundResult robustness_threshold_infinite(const BoundInputs& in);

enum class GapLoss { ZeroOne, Lipschitz };

// 2 C R + a sqrt(2 log(2/delta) / n), sum-form; C = 1/2 for the 0-1 loss and
// C = loss_lipschitz for Lipschitz losses.
BoundResult generalization_gap_bound(double rademacher_value, double a,
                                     double delta, double n, GapLoss loss,
                                     double loss_lipschitz = 1.0);

/// Stability-aware bound vs the standard sqrt(logF/n) estimate. The winner
/// is decided by the competing stability-sensitive terms, which cross
/// exactly at S = sqrt(c/d).
struct BoundComparison {
    BoundResult ours;          // refined bound
    double standard = 0.0;     // K * (sqrt(1/n) + sqrt(logF/n))
    double term_ours = 0.0;    // (sqrt(c)/S) sqrt(logF/(n d)), scaled by K2
    double term_standard = 0;  // sqrt(logF/n), scaled by K2
    double crossover_S = 0.0;  // sqrt(c/d)
    std::string winner;        // "ours" | "standard" | "tie"
};

BoundComparison compare_to_standard(const BoundInputs& in);

// Golden-section search over log(eps_tilde) for the infinite-class bound.
struct EpsTildeOptimum {
    double eps_tilde = 0.0;
    BoundResult bound;
};

EpsTildeOptimum minimize_eps_tilde(BoundInputs in, double lo = 1e-9,
                                   double hi = 1e6);

struct RademacherEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int draws = 0;
};

// Monte Carlo (1/n) E_sigma sup_f |sum_i sigma_i f(x_i)| for a finite class
// given as its prediction matrix (rows = classifiers, entries in {-1, +1}).
RademacherEstimate empirical_rademacher(
    const std::vector<std::vector<double>>& predictions, int draws,
    std::uint64_t seed);

}  // namespace rlab
