#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlab/dataset.hpp"
#include "rlab/network.hpp"

namespace rlab {

/// Bounded Lipschitz test function with a known Lipschitz upper bound:
/// exact for clipped linear maps (|u|) and point distances (1), the spectral
/// product for network scores.
struct TestFunction {
    enum class Kind { ClippedLinear, DistanceToPoint, NetworkScore };
    Kind kind = Kind::ClippedLinear;
    std::vector<double> u;       // clipped_linear direction
    std::vector<double> x0;      // distance_to_point anchor
    const Network* net = nullptr;
    int coordinate = 0;          // network score coordinate
    double clip_bound = 0.0;     // |f| <= clip_bound everywhere
    double lipschitz_bound = 0.0;

    double eval(std::span<const double> x) const;

    static TestFunction clipped_linear(std::vector<double> u, double bound);
    static TestFunction distance_to_point(std::vector<double> x0, double bound);
    static TestFunction network_score(const Network& net, int coordinate,
                                      double bound);
};

struct ConcentrationReport {
    std::vector<double> t_grid;
    std::vector<double> empirical_tail;    // fraction |f - mean| >= t
    std::vector<double> theoretical_tail;  // 2 exp(-d t^2 / (2 c L^2))
    std::vector<int> violations;           // grid indices beyond the MC slack
    double c_used = 0.0;
    double c_hat = 0.0;  // smallest c validating the bound on the grid
    double sample_mean = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

// Empirical tail of |f - mean| vs the sub-Gaussian bound at rate c. A grid
// point is flagged only when the excess tops 3 sqrt(p(1-p)/n).
ConcentrationReport concentration_test(const MeasureSpec& measure,
                                       const TestFunction& f, double c,
                                       int n_samples,
                                       const std::vector<double>& t_grid,
                                       std::uint64_t seed);

// c_hat = max over grid points with 0 < p < 1 of d t^2 / (2 L^2 ln(2/p)).
// Throws std::runtime_error when no grid point is informative.
double estimate_c(const MeasureSpec& measure, const TestFunction& f,
                  int n_samples, const std::vector<double>& t_grid,
                  std::uint64_t seed);

enum class Regime { Concentrated, Diffuse };

// nominal c <= 1 classifies as concentrated (boundary inclusive).
Regime regime_classifier(const MeasureSpec& measure);
std::string regime_name(Regime r);

}  // namespace rlab
