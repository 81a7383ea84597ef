#include "rlab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlab/lipschitz.hpp"

namespace rlab {

double TestFunction::eval(std::span<const double> x) const {
    switch (kind) {
        case Kind::ClippedLinear:
            return std::clamp(dot(u, x), -clip_bound, clip_bound);
        case Kind::DistanceToPoint:
            return std::min(dist2(x, x0), clip_bound);
        case Kind::NetworkScore: {
            const std::vector<double> scores = forward(*net, x);
            return std::clamp(scores[static_cast<std::size_t>(coordinate)],
                              -clip_bound, clip_bound);
        }
    }
    return 0.0;
}

TestFunction TestFunction::clipped_linear(std::vector<double> u, double bound) {
    if (bound <= 0.0) throw std::invalid_argument("test function: bound must be > 0");
    TestFunction f;
    f.kind = Kind::ClippedLinear;
    f.lipschitz_bound = norm2(u);
    f.u = std::move(u);
    f.clip_bound = bound;
    return f;
}

TestFunction TestFunction::distance_to_point(std::vector<double> x0, double bound) {
    if (bound <= 0.0) throw std::invalid_argument("test function: bound must be > 0");
    TestFunction f;
    f.kind = Kind::DistanceToPoint;
    f.x0 = std::move(x0);
    f.clip_bound = bound;
    f.lipschitz_bound = 1.0;
    return f;
}

TestFunction TestFunction::network_score(const Network& net, int coordinate,
                                         double bound) {
    if (bound <= 0.0) throw std::invalid_argument("test function: bound must be > 0");
    if (coordinate < 0 || coordinate >= net.output_dim()) {
        throw std::invalid_argument("test function: coordinate out of range");
    }
    TestFunction f;
    f.kind = Kind::NetworkScore;
    f.net = &net;
    f.coordinate = coordinate;
    f.clip_bound = bound;
    f.lipschitz_bound = lipschitz_upper(net);
    return f;
}

ConcentrationReport concentration_test(const MeasureSpec& measure,
                                       const TestFunction& f, double c,
                                       int n_samples,
                                       const std::vector<double>& t_grid,
                                       std::uint64_t seed) {
    if (n_samples < 10000) {
        throw std::invalid_argument("concentration_test: needs n_samples >= 1e4");
    }
    if (c <= 0.0) throw std::invalid_argument("concentration_test: c must be > 0");
    if (t_grid.empty()) throw std::invalid_argument("concentration_test: empty t grid");
    for (double t : t_grid) {
        if (t < 0.0 || !std::isfinite(t)) {
            throw std::invalid_argument("concentration_test: degenerate t grid");
        }
    }

    const Matrix samples = sample_measure(measure, n_samples, seed);
    std::vector<double> values(n_samples);
    double mean = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        values[static_cast<std::size_t>(i)] = f.eval(samples.row_span(i));
        mean += values[static_cast<std::size_t>(i)];
    }
    mean /= n_samples;  // sample mean stands in for E[f]

    ConcentrationReport report;
    report.t_grid = t_grid;
    report.c_used = c;
    report.sample_mean = mean;
    report.n_samples = n_samples;
    report.seed = seed;
    const double d = static_cast<double>(measure.d);
    const double L = f.lipschitz_bound;
    report.c_hat = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        std::size_t count = 0;
        for (double v : values) {
            if (std::abs(v - mean) >= t) ++count;
        }
        const double p = static_cast<double>(count) / n_samples;
        const double bound =
            L > 0.0 ? 2.0 * std::exp(-d * t * t / (2.0 * c * L * L))
                    : (t > 0.0 ? 0.0 : 2.0);
        report.empirical_tail.push_back(p);
        report.theoretical_tail.push_back(std::min(bound, 2.0));
        const double slack = 3.0 * std::sqrt(p * (1.0 - p) / n_samples);
        if (p > report.theoretical_tail.back() + slack) {
            report.violations.push_back(static_cast<int>(k));
        }
        if (p > 0.0 && p < 1.0 && t > 0.0 && L > 0.0) {
            report.c_hat = std::max(
                report.c_hat, d * t * t / (2.0 * L * L * std::log(2.0 / p)));
        }
    }
    return report;
}

double estimate_c(const MeasureSpec& measure, const TestFunction& f,
                  int n_samples, const std::vector<double>& t_grid,
                  std::uint64_t seed) {
    const ConcentrationReport report =
        concentration_test(measure, f, 1.0, n_samples, t_grid, seed);
    if (report.c_hat <= 0.0) {
        throw std::runtime_error(
            "estimate_c: no grid point with 0 < empirical tail < 1");
    }
    return report.c_hat;
}

Regime regime_classifier(const MeasureSpec& measure) {
    return measure.nominal_c() <= 1.0 ? Regime::Concentrated : Regime::Diffuse;
}

std::string regime_name(Regime r) {
    return r == Regime::Concentrated ? "concentrated" : "diffuse";
}

}  // namespace rlab
