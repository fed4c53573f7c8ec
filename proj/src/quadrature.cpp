#include "stskotfs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "stskotfs/errors.hpp"

namespace stskotfs {

namespace {

QuadratureRule build_rule(int order, double a, double b) {
    constexpr double eps = 1e-15;
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    const int half = (order + 1) / 2;
    const double mid = 0.5 * (b + a);
    const double span = 0.5 * (b - a);
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th root
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double z_prev, derivative;
        do {
            double p_curr = 1.0, p_prev = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p_older = p_prev;
                p_prev = p_curr;
                p_curr = ((2.0 * j + 1.0) * z * p_prev - j * p_older) / (j + 1);
            }
            derivative = order * (z * p_curr - p_prev) / (z * z - 1.0);
            z_prev = z;
            z = z_prev - p_curr / derivative;
        } while (std::abs(z - z_prev) > eps);

        rule.nodes[i] = mid - span * z;
        rule.nodes[order - 1 - i] = mid + span * z;
        const double weight = 2.0 * span / ((1.0 - z * z) * derivative * derivative);
        rule.weights[i] = weight;
        rule.weights[order - 1 - i] = weight;
    }
    return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int order, double a, double b) {
    if (order < 1) fail(ErrorKind::InvalidParameter, "quadrature order must be >= 1");
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.try_emplace({order, a, b});
    if (inserted) it->second = build_rule(order, a, b);
    return it->second;
}

} // namespace stskotfs
