#include "lrdstable/quadrature.hpp"

#include "lrdstable/errors.hpp"
#include "lrdstable/normal.hpp"

namespace lrdstable::quadrature {

GaussLegendreRule gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("gauss_legendre: n must be positive");
    }
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(normal::kPi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace lrdstable::quadrature
