#include "rlab/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlab/rng.hpp"

namespace rlab {

double co_margin(const Network& net, std::span<const double> x) {
    const std::vector<double> scores = forward(net, x);
    if (net.binary()) return std::abs(scores[0]);
    const int top = argmax_index(scores);
    double rival = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(scores.size()); ++j) {
        if (j != top) rival = std::max(rival, scores[static_cast<std::size_t>(j)]);
    }
    // only j = argmax contributes to the one-vs-all sum
    return std::max(0.0, scores[static_cast<std::size_t>(top)] - rival);
}

std::vector<double> co_margin_components(const Network& net,
                                         std::span<const double> x) {
    const std::vector<double> scores = forward(net, x);
    if (net.binary()) {
        std::vector<double> comp(2, 0.0);
        const int label = scores[0] >= 0.0 ? 1 : 0;
        comp[static_cast<std::size_t>(label)] = std::abs(scores[0]);
        return comp;
    }
    std::vector<double> comp(scores.size(), 0.0);
    for (std::size_t j = 0; j < scores.size(); ++j) {
        double rival = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (i != j) rival = std::max(rival, scores[i]);
        }
        comp[j] = std::max(0.0, scores[j] - rival);
    }
    return comp;
}

CoStabilityReport co_stability(const Network& net, const Matrix& points) {
    if (points.rows == 0) throw std::invalid_argument("co_stability: empty dataset");
    CoStabilityReport report;
    const int classes = net.binary() ? 2 : net.output_dim();
    report.per_class.assign(classes, 0.0);
    report.n = static_cast<int>(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        const std::vector<double> comp = co_margin_components(net, points.row_span(i));
        for (int j = 0; j < classes; ++j) {
            report.per_class[static_cast<std::size_t>(j)] += comp[static_cast<std::size_t>(j)];
        }
    }
    for (double& v : report.per_class) v /= static_cast<double>(points.rows);
    report.S_star = 0.0;
    for (double v : report.per_class) report.S_star += v;
    return report;
}

double spectral_norm(const Matrix& m, int max_iters, double tol) {
    if (m.rows == 0 || m.cols == 0) return 0.0;
    std::vector<double> v(m.cols, 1.0 / std::sqrt(static_cast<double>(m.cols)));
    std::vector<double> mv(m.rows);
    double sigma = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t r = 0; r < m.rows; ++r) mv[r] = dot(m.row_span(r), v);
        // v <- M^T (M v)
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (mv[r] != 0.0) axpy(mv[r], m.row_span(r), v);
        }
        const double vn = norm2(v);
        if (vn == 0.0) return 0.0;  // hit the null space exactly
        for (double& x : v) x /= vn;
        const double next = std::sqrt(vn);
        if (it > 0 && std::abs(next - sigma) <= tol * std::max(1.0, next)) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

double lipschitz_upper(const Network& net) {
    if (net.activation == Activation::Heaviside) {
        throw std::domain_error("lipschitz_upper: undefined for heaviside scores");
    }
    double product = 1.0;
    for (const Matrix& w : net.weights) product *= spectral_norm(w);
    return product;
}

namespace {

double max_gradient_norm(const Network& net, std::span<const double> x) {
    double best = 0.0;
    std::vector<double> coeffs(net.output_dim(), 0.0);
    for (int j = 0; j < net.output_dim(); ++j) {
        coeffs.assign(net.output_dim(), 0.0);
        coeffs[static_cast<std::size_t>(j)] = 1.0;
        best = std::max(best, norm2(grad_input(net, x, coeffs)));
    }
    return best;
}

}  // namespace

double lipschitz_lower(const Network& net, const Matrix& points, int trials,
                       std::uint64_t seed) {
    if (net.activation == Activation::Heaviside) {
        throw std::domain_error("lipschitz_lower: undefined for heaviside scores");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        best = std::max(best, max_gradient_norm(net, points.row_span(i)));
    }
    Rng rng(derive_seed(seed, 0x6c697030ULL));
    std::vector<double> probe(net.input_dim());
    for (int t = 0; t < trials; ++t) {
        for (double& v : probe) v = rng.normal();
        best = std::max(best, max_gradient_norm(net, probe));
    }
    return best;
}

LipschitzInterval lipschitz_interval(const Network& net, const Matrix& points,
                                     int trials, std::uint64_t seed) {
    LipschitzInterval interval;
    if (net.activation == Activation::Heaviside) {
        interval.defined = false;
        return interval;
    }
    interval.defined = true;
    interval.upper = lipschitz_upper(net);
    interval.lower = lipschitz_lower(net, points, trials, seed);
    return interval;
}

CoStabilityReport normalized_costability(const Network& net, const Matrix& points,
                                         int lower_trials, std::uint64_t seed) {
    if (net.activation == Activation::Heaviside) {
        throw std::domain_error(
            "normalized co-stability undefined: heaviside scores have no "
            "finite Lipschitz constant");
    }
    CoStabilityReport report = co_stability(net, points);
    const LipschitzInterval interval = lipschitz_interval(net, points, lower_trials, seed);
    report.lipschitz_defined = true;
    report.L_lo = interval.lower;
    report.L_hi = interval.upper;
    auto ratio = [&](double L) {
        if (L > 0.0) return report.S_star / L;
        // constant nets are legal inputs: zero slope with positive offset
        return report.S_star > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    report.normalized = ratio(report.L_hi);
    report.normalized_optimistic = ratio(report.L_lo);
    return report;
}

double soft_sign(double t, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("soft_sign: gamma must be > 0");
    if (t <= -gamma) return -1.0;
    if (t >= gamma) return 1.0;
    return t / gamma;
}

double SurrogateNet::eval(std::span<const double> x) const {
    const std::vector<double> scores = forward(*net, x);
    return soft_sign(scores[0], gamma);
}

double SurrogateNet::lipschitz_upper_bound() const {
    return lipschitz_upper(*net) / gamma;
}

SurrogateNet surrogate_net(const Network& net, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("surrogate_net: gamma must be > 0");
    if (!net.binary()) {
        throw std::invalid_argument("surrogate_net: sign surrogate needs a binary score");
    }
    return SurrogateNet{&net, gamma};
}

SurrogateNet surrogate_net_default_gamma(const Network& net, const Matrix& points) {
    const CoStabilityReport cs = co_stability(net, points);
    if (cs.S_star <= 0.0) {
        throw std::invalid_argument("surrogate_net: S* = 0 leaves no default gamma");
    }
    return surrogate_net(net, cs.S_star / 2.0);
}

ChainCheck chain_inequality_check(const Network& net, const Matrix& points,
                                  const StabilityReport& margins,
                                  const CoStabilityReport& costability) {
    if (margins.per_sample.size() != points.rows) {
        throw std::invalid_argument("chain check: margin report and points disagree");
    }
    if (costability.n != static_cast<int>(points.rows)) {
        throw std::invalid_argument("chain check: co-stability report and points disagree");
    }
    if (!costability.lipschitz_defined) {
        throw std::invalid_argument("chain check: Lipschitz bound undefined");
    }
    ChainCheck check;
    check.lhs = margins.S_hat;
    check.rhs = costability.L_hi > 0.0
                    ? costability.S_star / costability.L_hi
                    : (costability.S_star > 0.0
                           ? std::numeric_limits<double>::infinity()
                           : 0.0);
    check.holds = check.lhs >= check.rhs;
    check.slack = check.lhs - check.rhs;
    // The binary score gap is L_hi-Lipschitz; a multi-class one-vs-all gap
    // only 2 L_hi.
    const double L_eff = net.binary() ? costability.L_hi : 2.0 * costability.L_hi;
    for (std::size_t i = 0; i < points.rows; ++i) {
        const MarginEstimate& est = margins.per_sample[i];
        if (est.status != MarginStatus::Refined) continue;
        ++check.pointwise_checked;
        const double cm = co_margin(net, points.row_span(i));
        const double lower = L_eff > 0.0
                                 ? cm / L_eff
                                 : (cm > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (est.estimated_margin >= lower) ++check.pointwise_ok;
    }
    check.pointwise_holds = check.pointwise_ok == check.pointwise_checked;
    return check;
}

}  // namespace rlab
