#include "lrdstable/hermite_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "lrdstable/errors.hpp"
#include "lrdstable/normal.hpp"
#include "lrdstable/quadrature.hpp"
#include "lrdstable/stable_core.hpp"

namespace lrdstable {

namespace {

using normal::kPi;
constexpr double kHalfPi = 0.5 * kPi;

// Phi^{-1}((gamma + pi/2) / pi), taking whichever tail is smaller. Nodes
// that round onto +-pi/2 get the smallest positive tail instead of a zero one,
// keeping the integrand finite.
double angle_quantile(double gamma) {
    constexpr double kTiny = std::numeric_limits<double>::denorm_min();
    const double lower = std::max((gamma + kHalfPi) / kPi, kTiny);
    const double upper = std::max((kHalfPi - gamma) / kPi, kTiny);
    return lower < 0.5 ? normal::quantile(lower) : -normal::quantile(upper);
}

// phi(Phi^{-1}(1 - e^{-t})) from log t.
double density_term(double log_t) {
    if (log_t > 700.0) return 0.0;
    const double t = std::exp(log_t);
    return normal::density_at_quantile(-std::expm1(-t), std::exp(-t));
}

double survival_term(double log_t) {
    if (log_t > 700.0) return 0.0;
    return std::exp(-std::exp(log_t));
}

enum class Which { J10, J01 };

// (1/pi) * integral over the CMS angle of the W-tail functional. For alpha
// != 1 this is over (gamma0, pi/2) with log t = (alpha/(alpha-1)) log x +
// log a(gamma); for alpha = 1, beta2 > 0 over (-pi/2, pi/2) with
// log t = -x/beta2 + log a1(gamma).
Coefficient angle_integral(Which which, double x, double alpha, double beta2, double tol) {
    double lo;
    double shift;
    double g0 = 0.0;
    if (alpha == 1.0) {
        lo = -kHalfPi;
        shift = -x / beta2;
    } else {
        g0 = gamma0(alpha, beta2);
        lo = g0;
        shift = (alpha / (alpha - 1.0)) * std::log(x);
    }
    auto log_t = [&](double g) {
        return shift + (alpha == 1.0 ? log_kernel_a1(g, beta2) : log_kernel_a(g, alpha, g0));
    };
    const auto points = exponent_breakpoints(log_t, lo, kHalfPi);
    quadrature::QuadResult q;
    if (which == Which::J10) {
        q = quadrature::integrate_piecewise(
            [&](double g) { return survival_term(log_t(g)) * angle_quantile(g); }, points,
            tol * kPi);
    } else {
        q = quadrature::integrate_piecewise([&](double g) { return density_term(log_t(g)); },
                                            points, tol * kPi);
    }
    if (!q.converged) {
        throw QuadratureFailure(std::string(which == Which::J10 ? "j10" : "j01") +
                                ": quadrature error " + std::to_string(q.abs_error / kPi) +
                                " above tolerance at x = " + std::to_string(x));
    }
    return {q.value / kPi, q.abs_error / kPi};
}

void check_inputs(double alpha, double beta2, double tol) {
    validate_standard(alpha, beta2);
    if (!(tol > 0.0)) {
        throw InvalidArgument("coefficient tolerance must be positive");
    }
}

Coefficient j10_impl(double x, double alpha, double beta2, double tol) {
    if (alpha == 1.0) {
        if (beta2 == 0.0) {
            // Indicator reduces to Z1 <= Phi^{-1}((arctan(2x/pi) + pi/2) / pi).
            return {-normal::pdf(angle_quantile(std::atan(2.0 * x / kPi))), 0.0};
        }
        if (beta2 < 0.0) {
            return j10_impl(-x, alpha, -beta2, tol);
        }
        return angle_integral(Which::J10, x, alpha, beta2, tol);
    }
    if (x < 0.0) {
        return j10_impl(-x, alpha, -beta2, tol);
    }
    // The atom at gamma <= gamma0 contributes E[Z1 1{Z1 <= z0}] = -phi(z0).
    // (A plus sign here fails the bivariate oracle.)
    const double atom = -normal::pdf(angle_quantile(gamma0(alpha, beta2)));
    if (x == 0.0) {
        return {atom, 0.0};
    }
    const auto integral = angle_integral(Which::J10, x, alpha, beta2, tol);
    if (alpha < 1.0) {
        return {integral.value + atom, integral.error};
    }
    return {-integral.value, integral.error};
}

Coefficient j01_impl(double x, double alpha, double beta2, double tol) {
    if (alpha == 1.0) {
        if (beta2 == 0.0) {
            return {0.0, 0.0};
        }
        if (beta2 < 0.0) {
            const auto r = j01_impl(-x, alpha, -beta2, tol);
            return {-r.value, r.error};
        }
        return angle_integral(Which::J01, x, alpha, beta2, tol);
    }
    if (x < 0.0) {
        const auto r = j01_impl(-x, alpha, -beta2, tol);
        return {-r.value, r.error};
    }
    if (x == 0.0) {
        return {0.0, 0.0};
    }
    const auto integral = angle_integral(Which::J01, x, alpha, beta2, tol);
    // For 1 < alpha < 2 the event is {W <= t}, whose Z2-moment is
    // -phi(Phi^{-1}(1 - e^{-t})): the integral enters with a minus sign.
    if (alpha > 1.0) {
        return {-integral.value, integral.error};
    }
    return integral;
}

}  // namespace

double hermite_poly(unsigned m, double u) {
    if (m == 0) return 1.0;
    double prev = 1.0;
    double cur = u;
    for (unsigned k = 1; k < m; ++k) {
        const double next = u * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double a_gamma(double gamma, double alpha, double g0) {
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) {
        throw DomainError("a_gamma: alpha must lie in (0, 1) or (1, 2)");
    }
    if (!(gamma > g0 && gamma < kHalfPi)) {
        throw DomainError("a_gamma: gamma outside (gamma0, pi/2)");
    }
    return std::exp(log_kernel_a(gamma, alpha, g0));
}

double a1_gamma(double gamma, double beta2) {
    if (beta2 == 0.0 || !(beta2 >= -1.0 && beta2 <= 1.0)) {
        throw DomainError("a1_gamma: beta2 must be nonzero and in [-1, 1]");
    }
    if (!(std::abs(gamma) < kHalfPi)) {
        throw DomainError("a1_gamma: |gamma| must be below pi/2");
    }
    return std::exp(log_kernel_a1(gamma, beta2));
}

Coefficient j10_with_error(double x, double alpha, double beta2, double tol) {
    check_inputs(alpha, beta2, tol);
    if (std::isinf(x)) return {0.0, 0.0};
    return j10_impl(x, alpha, beta2, tol);
}

double j10(double x, double alpha, double beta2, double tol) {
    return j10_with_error(x, alpha, beta2, tol).value;
}

Coefficient j01_with_error(double x, double alpha, double beta2, double tol) {
    check_inputs(alpha, beta2, tol);
    if (std::isinf(x)) return {0.0, 0.0};
    return j01_impl(x, alpha, beta2, tol);
}

double j01(double x, double alpha, double beta2, double tol) {
    return j01_with_error(x, alpha, beta2, tol).value;
}

// ---------------------------------------------------------------------------
// Bivariate oracle

namespace {

struct InnerSet {
    // bit 1: indicator at z2 = -L, bit 0: indicator at z2 = +L
    int shape = 0;
    double cut = 0.0;
};

class OracleIntegrand {
public:
    OracleIntegrand(HermiteIndex idx, double x, double alpha, double beta2, double half_width)
        : idx_(idx), x_(x), alpha_(alpha), beta2_(beta2), half_width_(half_width) {}

    bool below(double z1, double z2) const {
        return cms_transform(z1, z2, alpha_, beta2_) <= x_;
    }

    int shape(double z1) const {
        return (below(z1, -half_width_) ? 2 : 0) | (below(z1, half_width_) ? 1 : 0);
    }

    InnerSet inner_set(double z1) const {
        InnerSet s{shape(z1), 0.0};
        if (s.shape == 1 || s.shape == 2) {
            double lo = -half_width_;
            double hi = half_width_;
            const bool lo_state = s.shape == 2;
            for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (below(z1, mid) == lo_state) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            s.cut = 0.5 * (lo + hi);
        }
        return s;
    }

    // E_{Z2}[1{G(z1, Z2) <= x} He_m2(Z2)]
    double inner(double z1) const {
        const auto s = inner_set(z1);
        const unsigned m2 = idx_.m2;
        switch (s.shape) {
            case 3:
                return m2 == 0 ? 1.0 : 0.0;
            case 0:
                return 0.0;
            case 2:  // {z2 <= cut}
                return m2 == 0 ? normal::cdf(s.cut)
                               : -hermite_poly(m2 - 1, s.cut) * normal::pdf(s.cut);
            default:  // {z2 >= cut}
                return m2 == 0 ? normal::sf(s.cut)
                               : hermite_poly(m2 - 1, s.cut) * normal::pdf(s.cut);
        }
    }

    double operator()(double z1) const {
        return hermite_poly(idx_.m1, z1) * normal::pdf(z1) * inner(z1);
    }

    double half_width() const { return half_width_; }

private:
    HermiteIndex idx_;
    double x_;
    double alpha_;
    double beta2_;
    double half_width_;
};

double composite_gauss_legendre(const OracleIntegrand& f, const std::vector<double>& breaks,
                                std::size_t total_panels,
                                const quadrature::GaussLegendreRule& rule) {
    const double span = breaks.back() - breaks.front();
    double sum = 0.0;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        if (b <= a) continue;
        const auto panels = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(static_cast<double>(total_panels) * (b - a) / span)));
        const double h = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double pa = a + h * static_cast<double>(p);
            const double c = pa + 0.5 * h;
            double acc = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                acc += rule.weights[k] * f(c + 0.5 * h * rule.nodes[k]);
            }
            sum += 0.5 * h * acc;
        }
    }
    return sum;
}

}  // namespace

double j_oracle(HermiteIndex index, double x, double alpha, double beta2,
                const OracleOptions& options) {
    validate_standard(alpha, beta2);
    if (options.nodes < 64) {
        throw InvalidArgument("j_oracle: at least 64 nodes required");
    }
    if (std::isinf(x)) {
        if (x < 0.0) return 0.0;
        return (index.m1 == 0 && index.m2 == 0) ? 1.0 : 0.0;
    }
    const OracleIntegrand f(index, x, alpha, beta2, options.half_width);
    const double width = options.half_width;

    // Locate changes in the shape of the z2-set along z1.
    std::vector<double> breaks{-width};
    // The set shape can change on short z1 stretches when alpha is small;
    // scan much finer than the quadrature grid.
    const std::size_t scan = 8 * options.nodes;
    double prev_z = -width;
    int prev_shape = f.shape(prev_z);
    for (std::size_t i = 1; i <= scan; ++i) {
        const double z = -width + 2.0 * width * static_cast<double>(i) / static_cast<double>(scan);
        const int shape = f.shape(z);
        if (shape != prev_shape) {
            double lo = prev_z;
            double hi = z;
            for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (f.shape(mid) == prev_shape) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push_back(0.5 * (lo + hi));
        }
        prev_z = z;
        prev_shape = shape;
    }
    breaks.push_back(width);

    const auto rule = quadrature::gauss_legendre(16);
    // One 16-point panel per node: coarse starts can step over narrow peaks
    // in z1 and then "converge" on a wrong value.
    std::size_t panels = std::max<std::size_t>(4, options.nodes);
    double estimate = composite_gauss_legendre(f, breaks, panels, rule);
    for (int d = 0; d < options.max_doublings; ++d) {
        panels *= 2;
        const double refined = composite_gauss_legendre(f, breaks, panels, rule);
        const double change = std::abs(refined - estimate);
        estimate = refined;
        if (change < options.tol) {
            return estimate;
        }
    }
    throw NoConvergence("j_oracle: node doubling did not settle below tolerance");
}

int hermite_rank(double x, double alpha, double beta2, double tol) {
    if (std::abs(j10(x, alpha, beta2)) > tol || std::abs(j01(x, alpha, beta2)) > tol) {
        return 1;
    }
    for (unsigned q = 2; q <= 3; ++q) {
        for (unsigned m1 = 0; m1 <= q; ++m1) {
            if (std::abs(j_oracle({m1, q - m1}, x, alpha, beta2)) > tol) {
                return static_cast<int>(q);
            }
        }
    }
    throw RankUndetermined("hermite_rank: all coefficients up to order 3 are below tolerance");
}

// ---------------------------------------------------------------------------
// Normalization

double c_mD(int m, double d) {
    const double md = static_cast<double>(m) * d;
    if (m < 1 || !(d > 0.0) || !(md < 1.0)) {
        throw DomainError("c(m, D) requires m >= 1 and 0 < D < 1/m");
    }
    return 2.0 / ((1.0 - md) * (2.0 - md));
}

double sigma2_nq(const LrdModel& model, std::size_t n, int q) {
    if (n == 0 || q < 1) {
        throw InvalidArgument("sigma2_nq requires n >= 1 and q >= 1");
    }
    const double nn = static_cast<double>(n);
    double acc = 0.0;
    // Largest lags carry the smallest terms; sum them first.
    for (std::size_t k = n - 1; k >= 1; --k) {
        acc += (nn - static_cast<double>(k)) *
               std::pow(model.autocovariance(static_cast<double>(k)), q);
    }
    return (nn + 2.0 * acc) / (nn * nn);
}

double d_nm(int m, double d, std::size_t n, double l_at_n) {
    const double c = c_mD(m, d);
    const double md = static_cast<double>(m) * d;
    return std::sqrt(c * std::pow(static_cast<double>(n), -md) * std::pow(l_at_n, m));
}

double d_nm(int m, const LrdModel& model, std::size_t n) {
    return d_nm(m, model.memory_exponent(), n, model.slowly_varying(static_cast<double>(n)));
}

LrdNormalization lrd_normalization(const LrdModel& model, std::size_t n, int m,
                                   bool with_exact_variance) {
    LrdNormalization out;
    out.m = m;
    out.d = model.memory_exponent();
    out.n = n;
    out.c_mD = c_mD(m, out.d);
    out.l_at_n = model.slowly_varying(static_cast<double>(n));
    out.d_nm = d_nm(m, out.d, n, out.l_at_n);
    if (with_exact_variance) {
        out.sigma2_exact = sigma2_nq(model, n, m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tables and c0

std::vector<double> linear_grid(double x_min, double x_max, std::size_t points) {
    if (points < 2 || !(x_max > x_min)) {
        throw InvalidArgument("linear_grid: need x_min < x_max and at least 2 points");
    }
    std::vector<double> xs(points);
    for (std::size_t i = 0; i < points; ++i) {
        xs[i] = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return xs;
}

CoeffTable build_coeff_table(double alpha, double beta2, const std::vector<double>& xs,
                             double tol, unsigned workers) {
    check_inputs(alpha, beta2, tol);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw InvalidArgument("build_coeff_table: grid must be strictly increasing");
        }
    }
    CoeffTable table;
    table.alpha = alpha;
    table.beta2 = beta2;
    table.tol = tol;
    table.xs = xs;
    const std::size_t n = xs.size();
    table.j10.resize(n);
    table.j01.resize(n);
    table.err10.resize(n);
    table.err01.resize(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto a = j10_with_error(xs[i], alpha, beta2, tol);
            const auto b = j01_with_error(xs[i], alpha, beta2, tol);
            table.j10[i] = a.value;
            table.err10[i] = a.error;
            table.j01[i] = b.value;
            table.err01[i] = b.error;
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        work(0, n);
        return table;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return table;
}

namespace {

double coefficient_norm(double x, double alpha, double beta2, double tol) {
    return std::hypot(j10(x, alpha, beta2, tol), j01(x, alpha, beta2, tol));
}

}  // namespace

C0Result c0(double alpha, double beta2, const C0Options& options) {
    check_inputs(alpha, beta2, options.tol);
    double x_max = options.x_max_initial;
    auto tail_small = [&](double edge) {
        return std::abs(j10(edge, alpha, beta2, options.tol)) < options.tail_threshold &&
               std::abs(j01(edge, alpha, beta2, options.tol)) < options.tail_threshold &&
               std::abs(j10(-edge, alpha, beta2, options.tol)) < options.tail_threshold &&
               std::abs(j01(-edge, alpha, beta2, options.tol)) < options.tail_threshold;
    };
    while (!tail_small(x_max)) {
        x_max *= 2.0;
        if (x_max > options.x_max_limit) {
            throw NoConvergence("c0: coefficients do not decay inside the search limit");
        }
    }
    const double s_max = std::asinh(x_max);
    const auto half =
        static_cast<std::size_t>(std::ceil(s_max * options.points_per_unit));
    const double h = s_max / static_cast<double>(half);
    // Symmetric grid in s = asinh(x), always containing x = 0.
    std::vector<double> ss(2 * half + 1);
    for (std::size_t i = 0; i < ss.size(); ++i) {
        ss[i] = -s_max + h * static_cast<double>(i);
    }
    ss[half] = 0.0;
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        const double v = coefficient_norm(std::sinh(ss[i]), alpha, beta2, options.tol);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    // Golden-section refinement on the bracketing cells.
    double lo = ss[best == 0 ? 0 : best - 1];
    double hi = ss[std::min(best + 1, ss.size() - 1)];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = coefficient_norm(std::sinh(c), alpha, beta2, options.tol);
    double fd = coefficient_norm(std::sinh(d), alpha, beta2, options.tol);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = coefficient_norm(std::sinh(c), alpha, beta2, options.tol);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = coefficient_norm(std::sinh(d), alpha, beta2, options.tol);
        }
    }
    C0Result out;
    out.x_max = x_max;
    out.grid_points = ss.size();
    out.value = best_value;
    out.x_star = std::sinh(ss[best]);
    const double s_star = 0.5 * (lo + hi);
    const double refined = coefficient_norm(std::sinh(s_star), alpha, beta2, options.tol);
    if (refined > out.value) {
        out.value = refined;
        out.x_star = std::sinh(s_star);
    }
    return out;
}

}  // namespace lrdstable
