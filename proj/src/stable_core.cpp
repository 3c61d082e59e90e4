#include "lrdstable/stable_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrdstable/errors.hpp"
#include "lrdstable/normal.hpp"
#include "lrdstable/quadrature.hpp"

namespace lrdstable {

namespace {

using normal::kPi;
constexpr double kHalfPi = 0.5 * kPi;
constexpr double kCdfFailTolerance = 1e-6;

// Both tails of Phi at z, so angles near +-pi/2 keep full relative precision.
struct AngleFromGaussian {
    double gamma;
    double sin_gamma;
    double cos_gamma;
};

AngleFromGaussian angle_from(double z) {
    const double lower = normal::cdf(z);
    const double upper = normal::sf(z);
    if (lower < upper) {
        return {kPi * lower - kHalfPi, -std::cos(kPi * lower), std::sin(kPi * lower)};
    }
    return {kHalfPi - kPi * upper, std::cos(kPi * upper), std::sin(kPi * upper)};
}

double exp_neg_exp(double log_t) {
    if (log_t > 700.0) return 0.0;
    return std::exp(-std::exp(log_t));
}

}  // namespace

void validate(const StableParamsA& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 2.0) || !(p.beta >= -1.0 && p.beta <= 1.0) ||
        !(p.sigma > 0.0) || !std::isfinite(p.mu)) {
        throw DomainError("invalid stable parameters (A form)");
    }
}

void validate(const StableParamsB& p) {
    if (!(p.alpha > 0.0 && p.alpha < 2.0) || !(p.beta2 >= -1.0 && p.beta2 <= 1.0) ||
        !(p.sigma2 > 0.0) || !std::isfinite(p.mu)) {
        throw DomainError("invalid stable parameters (B form)");
    }
}

void validate_standard(double alpha, double beta2) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw DomainError("stability index must lie in (0, 2), got " + std::to_string(alpha));
    }
    if (!(beta2 >= -1.0 && beta2 <= 1.0)) {
        throw DomainError("asymmetry must lie in [-1, 1], got " + std::to_string(beta2));
    }
}

double k_alpha(double alpha) {
    const double s = alpha < 1.0 ? 1.0 : (alpha > 1.0 ? -1.0 : 0.0);
    return alpha - 1.0 + s;
}

double gamma0(double alpha, double beta2) {
    return -beta2 * kPi * k_alpha(alpha) / (2.0 * alpha);
}

StableParamsB convert_a_to_b(const StableParamsA& p) {
    validate(p);
    if (p.alpha >= 2.0) {
        throw DomainError("convert_a_to_b: alpha = 2 has no B form here");
    }
    if (p.alpha == 1.0) {
        return {1.0, p.beta, 2.0 * p.sigma / kPi, p.mu};
    }
    const double t = std::tan(kHalfPi * p.alpha);
    // tan(beta2 pi K / 2) = beta tan(pi alpha / 2); atan's principal branch
    // lands in [-1, 1] for both alpha regimes.
    const double beta2 = 2.0 * std::atan(p.beta * t) / (kPi * k_alpha(p.alpha));
    const double sigma2 = p.sigma * std::pow(1.0 + p.beta * p.beta * t * t, 1.0 / (2.0 * p.alpha));
    return {p.alpha, std::clamp(beta2, -1.0, 1.0), sigma2, p.mu};
}

StableParamsA convert_b_to_a(const StableParamsB& p) {
    validate(p);
    if (p.alpha == 1.0) {
        return {1.0, p.beta2, kPi * p.sigma2 / 2.0, p.mu};
    }
    const double t = std::tan(kHalfPi * p.alpha);
    const double beta = std::tan(p.beta2 * kPi * k_alpha(p.alpha) / 2.0) / t;
    const double sigma = p.sigma2 / std::pow(1.0 + beta * beta * t * t, 1.0 / (2.0 * p.alpha));
    return {p.alpha, std::clamp(beta, -1.0, 1.0), sigma, p.mu};
}

double gamma_of(double z) { return angle_from(z).gamma; }

double w_of(double z) {
    if (z < 0.0) {
        return -std::log1p(-normal::cdf(z));
    }
    return -normal::log_sf(z);
}

CmsAuxiliaries cms_auxiliaries(double z1, double z2, double alpha, double beta2) {
    return {gamma_of(z1), w_of(z2), gamma0(alpha, beta2)};
}

double cms_g0(double z1, double z2, double alpha, double beta2) {
    const auto ang = angle_from(z1);
    const double g0 = gamma0(alpha, beta2);
    const double s = std::sin(alpha * (ang.gamma - g0));
    if (s == 0.0) {
        return 0.0;
    }
    const double w = w_of(z2);
    const double c2 = std::cos(ang.gamma - alpha * (ang.gamma - g0));
    const double log_abs = std::log(std::abs(s)) - std::log(ang.cos_gamma) / alpha +
                           ((1.0 - alpha) / alpha) * (std::log(c2) - std::log(w));
    if (log_abs > std::log(std::numeric_limits<double>::max())) {
        return std::copysign(std::numeric_limits<double>::infinity(), s);
    }
    return std::copysign(std::exp(log_abs), s);
}

double cms_g1(double z1, double z2, double beta2) {
    const auto ang = angle_from(z1);
    const double lever = kHalfPi + beta2 * ang.gamma;
    const double tan_gamma = ang.sin_gamma / ang.cos_gamma;
    if (beta2 == 0.0) {
        return lever * tan_gamma;
    }
    const double w = w_of(z2);
    return lever * tan_gamma -
           beta2 * (std::log(w) + std::log(ang.cos_gamma) - std::log(lever));
}

double cms_transform(double z1, double z2, double alpha, double beta2) {
    return alpha == 1.0 ? cms_g1(z1, z2, beta2) : cms_g0(z1, z2, alpha, beta2);
}

double affine_map(double x, const StableParamsA& target) {
    validate(target);
    if (target.alpha == 1.0) {
        return target.sigma * x +
               (2.0 / kPi) * target.beta * target.sigma * std::log(target.sigma) + target.mu;
    }
    return target.sigma * x + target.mu;
}

double log_kernel_a(double gamma, double alpha, double g0) {
    const double cos_g = std::cos(gamma);
    return (alpha / (1.0 - alpha)) * (std::log(std::sin(alpha * (gamma - g0))) - std::log(cos_g)) +
           std::log(std::cos(gamma - alpha * (gamma - g0))) - std::log(cos_g);
}

double log_kernel_a1(double gamma, double beta2) {
    const double lever = kHalfPi + beta2 * gamma;
    return std::log(lever) - std::log(std::cos(gamma)) + lever * std::tan(gamma) / beta2;
}

std::vector<double> exponent_breakpoints(const std::function<double(double)>& log_t, double lo,
                                         double hi) {
    static constexpr double kLevels[] = {-30.0, -20.0, -12.0, -8.0, -5.0, -3.0, -2.0,
                                         -1.0,  0.0,   1.0,   2.0,  3.0,  4.5,  6.6};
    const double width = hi - lo;
    std::vector<double> probes;
    for (int k = 48; k >= 3; --k) probes.push_back(lo + width * std::ldexp(1.0, -k));
    for (int i = 1; i < 32; ++i) probes.push_back(lo + width * i / 32.0);
    for (int k = 3; k <= 48; ++k) probes.push_back(hi - width * std::ldexp(1.0, -k));
    std::vector<double> values(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) values[i] = log_t(probes[i]);

    std::vector<double> points{lo, hi};
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
        const double va = values[i];
        const double vb = values[i + 1];
        if (std::isnan(va) || std::isnan(vb)) continue;
        for (double level : kLevels) {
            if ((va < level) == (vb < level)) continue;
            double a = probes[i];
            double b = probes[i + 1];
            const bool a_below = va < level;
            for (int it = 0; it < 40 && b - a > 1e-15 * width; ++it) {
                const double mid = 0.5 * (a + b);
                if ((log_t(mid) < level) == a_below) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            points.push_back(0.5 * (a + b));
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

namespace {

// F(x) for the cases that integrate directly: alpha != 1 with x > 0, or
// alpha = 1 with beta2 > 0.
CdfValue cdf_direct(double x, double alpha, double beta2, double tol) {
    quadrature::QuadResult q;
    double offset = 0.0;
    double sign = 1.0;
    if (alpha == 1.0) {
        const double shift = -x / beta2;
        const auto log_t = [&](double g) { return shift + log_kernel_a1(g, beta2); };
        q = quadrature::integrate_piecewise([&](double g) { return exp_neg_exp(log_t(g)); },
                                            exponent_breakpoints(log_t, -kHalfPi, kHalfPi),
                                            tol * kPi);
    } else {
        const double g0 = gamma0(alpha, beta2);
        const double shift = (alpha / (alpha - 1.0)) * std::log(x);
        const auto log_t = [&](double g) { return shift + log_kernel_a(g, alpha, g0); };
        q = quadrature::integrate_piecewise([&](double g) { return exp_neg_exp(log_t(g)); },
                                            exponent_breakpoints(log_t, g0, kHalfPi),
                                            tol * kPi);
        if (alpha < 1.0) {
            offset = (g0 + kHalfPi) / kPi;
        } else {
            offset = 1.0;
            sign = -1.0;
        }
    }
    const double err = q.abs_error / kPi;
    if (!q.converged && err > kCdfFailTolerance) {
        throw QuadratureFailure("stable_cdf: quadrature error " + std::to_string(err) +
                                " at x = " + std::to_string(x));
    }
    return {std::clamp(offset + sign * q.value / kPi, 0.0, 1.0), err};
}

}  // namespace

CdfValue stable_cdf_with_error(double x, double alpha, double beta2, double tol) {
    validate_standard(alpha, beta2);
    if (std::isnan(x)) {
        throw DomainError("stable_cdf: x is NaN");
    }
    if (x == std::numeric_limits<double>::infinity()) return {1.0, 0.0};
    if (x == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
    if (alpha == 1.0) {
        if (beta2 == 0.0) {
            return {std::atan(2.0 * x / kPi) / kPi + 0.5, 0.0};
        }
        if (beta2 < 0.0) {
            const auto r = cdf_direct(-x, 1.0, -beta2, tol);
            return {1.0 - r.value, r.abs_error};
        }
        return cdf_direct(x, 1.0, beta2, tol);
    }
    if (x == 0.0) {
        return {(gamma0(alpha, beta2) + kHalfPi) / kPi, 0.0};
    }
    if (x < 0.0) {
        const auto r = cdf_direct(-x, alpha, -beta2, tol);
        return {1.0 - r.value, r.abs_error};
    }
    return cdf_direct(x, alpha, beta2, tol);
}

double stable_cdf(double x, double alpha, double beta2, double tol) {
    return stable_cdf_with_error(x, alpha, beta2, tol).value;
}

StableCdfTable::StableCdfTable(double alpha, double beta2, double step, double s_max)
    : alpha_(alpha), beta2_(beta2) {
    validate_standard(alpha, beta2);
    if (!(step > 0.0) || !(s_max > 4.0 * step)) {
        throw InvalidArgument("StableCdfTable: bad grid");
    }
    constexpr double kCoreHalfWidth = 1.0;
    outer_ = build(-s_max, s_max, step);
    if (s_max > kCoreHalfWidth) {
        core_ = build(-kCoreHalfWidth, kCoreHalfWidth, 0.25 * step);
    }
}

StableCdfTable::Grid StableCdfTable::build(double s_min, double s_max, double step) const {
    Grid grid;
    grid.s_min = s_min;
    grid.step = step;
    const auto count = static_cast<std::size_t>(std::llround((s_max - s_min) / step)) + 1;
    grid.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double s = s_min + step * static_cast<double>(i);
        grid.values[i] = stable_cdf(std::sinh(s), alpha_, beta2_);
    }
    return grid;
}

std::optional<double> StableCdfTable::Grid::at(double s) const {
    const double pos = (s - s_min) / step;
    if (!(pos >= 1.0) || !(pos < static_cast<double>(values.size()) - 2.0)) {
        return std::nullopt;
    }
    const auto i = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(i);
    const double fm = values[i - 1];
    const double f0 = values[i];
    const double f1 = values[i + 1];
    const double f2 = values[i + 2];
    return -t * (t - 1.0) * (t - 2.0) / 6.0 * fm + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f0 -
           (t + 1.0) * t * (t - 2.0) / 2.0 * f1 + (t + 1.0) * t * (t - 1.0) / 6.0 * f2;
}

double StableCdfTable::operator()(double x) const {
    const double s = std::asinh(x);
    auto value = core_.at(s);
    if (!value) value = outer_.at(s);
    if (!value) return stable_cdf(x, alpha_, beta2_);
    return std::clamp(*value, 0.0, 1.0);
}

}  // namespace lrdstable
