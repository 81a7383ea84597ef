#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rlab/margin.hpp"
#include "rlab/network.hpp"

namespace rlab {

/// Certified bracket for L(g): lower is the best sampled gradient-norm
/// witness, upper the product of per-layer spectral norms (activations in
/// {relu, tanh, identity} are 1-Lipschitz). Heaviside scores have no finite
/// Lipschitz constant, so the interval is undefined for them.
struct LipschitzInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool defined = false;
    std::string method_lower = "gradient_witness";
    std::string method_upper = "spectral_product";
};

struct CoStabilityReport {
    double S_star = 0.0;                  // mean co-margin
    std::vector<double> per_class;        // S*^j, sums to S_star
    int n = 0;
    double L_lo = 0.0;
    double L_hi = 0.0;
    bool lipschitz_defined = false;
    // S_star / L_hi (headline, conservative) and S_star / L_lo.
    double normalized = std::numeric_limits<double>::quiet_NaN();
    double normalized_optimistic = std::numeric_limits<double>::quiet_NaN();
};

// Binary: |g(x)|. Multi-class: sum_j max(0, g_j - max_{i != j} g_i), which
// equals the top-two score gap.
double co_margin(const Network& net, std::span<const double> x);
std::vector<double> co_margin_components(const Network& net,
                                         std::span<const double> x);

// S* and its per-class decomposition only; no Lipschitz fields.
CoStabilityReport co_stability(const Network& net, const Matrix& points);

// Largest singular value by power iteration (200 iterations or relative
// change < 1e-10).
double spectral_norm(const Matrix& m, int max_iters = 200, double tol = 1e-10);

// Product of per-layer spectral norms. Throws std::domain_error for
// Heaviside activations.
double lipschitz_upper(const Network& net);

// Max gradient norm over the given points plus `trials` standard-normal
// probes; per output coordinate for multi-output nets. Throws for Heaviside.
double lipschitz_lower(const Network& net, const Matrix& points, int trials,
                       std::uint64_t seed);

LipschitzInterval lipschitz_interval(const Network& net, const Matrix& points,
                                     int trials, std::uint64_t seed);

// Full report including S*/L_hi and S*/L_lo. A zero L_hi with positive S*
// yields the +inf sentinel. Throws std::domain_error for Heaviside nets.
CoStabilityReport normalized_costability(const Network& net, const Matrix& points,
                                         int lower_trials = 16,
                                         std::uint64_t seed = 0);

// Piecewise-linear sign surrogate: -1 below -gamma, t/gamma inside, +1 above.
double soft_sign(double t, double gamma);

/// sgn_gamma composed with the score; Lipschitz bound L(g)/gamma. Default
/// gamma is S*(g)/2.
struct SurrogateNet {
    const Network* net = nullptr;
    double gamma = 1.0;
    double eval(std::span<const double> x) const;
    double lipschitz_upper_bound() const;  // lipschitz_upper(*net) / gamma
};

SurrogateNet surrogate_net(const Network& net, double gamma);
SurrogateNet surrogate_net_default_gamma(const Network& net, const Matrix& points);

struct ChainCheck {
    double lhs = 0.0;   // attack-estimated class stability
    double rhs = 0.0;   // S* / L_hi
    bool holds = false;
    double slack = 0.0;
    int pointwise_checked = 0;  // refined samples
    int pointwise_ok = 0;
    bool pointwise_holds = false;
};

// Aggregate S_hat >= S*/L_hi plus the pointwise form on refined estimates:
// margin(x) >= co_margin(x) / L_eff with L_eff = L_hi for binary scores and
// 2 L_hi for multi-class gaps. Throws std::invalid_argument when the report
// and point set disagree.
ChainCheck chain_inequality_check(const Network& net, const Matrix& points,
                                  const StabilityReport& margins,
                                  const CoStabilityReport& costability);

}  // namespace rlab
