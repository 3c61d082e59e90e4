#pragma once

#include <functional>

#include <cstddef>
#include <optional>
#include <vector>

namespace lrdstable {

/// Stable law parameters in the (alpha, beta, sigma, mu) characteristic
/// function form with the tan(pi alpha / 2) skewness term.
struct StableParamsA {
    double alpha = 1.0;
    double beta = 0.0;
    double sigma = 1.0;
    double mu = 0.0;
};

/// Stable law parameters in Zolotarev's analytic form with K(alpha); this is
/// the parameterization the CMS transforms produce.
struct StableParamsB {
    double alpha = 1.0;
    double beta2 = 0.0;
    double sigma2 = 1.0;
    double mu = 0.0;
};

/// Angle and exponential variate built from the two driving Gaussians.
struct CmsAuxiliaries {
    double gamma = 0.0;
    double w = 0.0;
    double gamma0 = 0.0;
};

void validate(const StableParamsA& p);
void validate(const StableParamsB& p);

/// Throws DomainError unless 0 < alpha < 2 and -1 <= beta2 <= 1.
void validate_standard(double alpha, double beta2);

/// K(alpha) = alpha - 1 + sign(1 - alpha). Jumps from 1 to -1 across alpha = 1.
double k_alpha(double alpha);

/// gamma_0 = -beta2 * pi * K(alpha) / (2 alpha).
double gamma0(double alpha, double beta2);

StableParamsB convert_a_to_b(const StableParamsA& p);
StableParamsA convert_b_to_a(const StableParamsB& p);

/// gamma(z) = pi Phi(z) - pi/2.
double gamma_of(double z);
/// W(z) = -log(1 - Phi(z)).
double w_of(double z);
CmsAuxiliaries cms_auxiliaries(double z1, double z2, double alpha, double beta2);

/// Chambers-Mallows-Stuck transform for alpha != 1. Evaluated in log space;
/// returns +-inf only when the value exceeds the double range.
double cms_g0(double z1, double z2, double alpha, double beta2);
/// Chambers-Mallows-Stuck transform for alpha = 1.
double cms_g1(double z1, double z2, double beta2);
/// G0 or G1 depending on alpha.
double cms_transform(double z1, double z2, double alpha, double beta2);

/// Maps a standard (sigma = 1, mu = 0) draw to the target parameters.
double affine_map(double x, const StableParamsA& target);

/// log a(gamma) for alpha != 1; caller guarantees gamma0 < gamma < pi/2.
double log_kernel_a(double gamma, double alpha, double gamma0);
/// log a1(gamma) for alpha = 1, beta2 != 0; caller guarantees |gamma| < pi/2.
double log_kernel_a1(double gamma, double beta2);

/// Split points for integrals over the CMS angle whose integrands are
/// functions of t(gamma) = exp(log_t(gamma)): lo, hi and every angle where
/// log_t crosses one of a fixed set of levels spanning the transition of
/// exp(-t). For large |x| that transition is a thin layer at one endpoint;
/// probes placed geometrically toward both ends locate it.
std::vector<double> exponent_breakpoints(const std::function<double(double)>& log_t, double lo,
                                         double hi);

struct CdfValue {
    double value = 0.0;
    double abs_error = 0.0;
};

/// CDF of the standard law (sigma2 = 1, mu = 0) by quadrature over the CMS
/// angle. Throws QuadratureFailure if the error estimate stays above 1e-6.
CdfValue stable_cdf_with_error(double x, double alpha, double beta2, double tol = 1e-11);
double stable_cdf(double x, double alpha, double beta2, double tol = 1e-11);

/// Interpolated stable CDF for repeated evaluation. Cubic Lagrange
/// interpolation on a uniform grid in asinh(x), refined fourfold on
/// |asinh(x)| <= 1 where small-alpha CDFs bend sharply; falls back to direct
/// quadrature outside the tabulated range.
class StableCdfTable {
public:
    StableCdfTable(double alpha, double beta2, double step = 0.004, double s_max = 28.0);

    double operator()(double x) const;

    double alpha() const { return alpha_; }
    double beta2() const { return beta2_; }
    std::size_t size() const { return core_.values.size() + outer_.values.size(); }

private:
    struct Grid {
        double s_min = 0.0;
        double step = 1.0;
        std::vector<double> values;

        // Interpolated value, or nullopt when the four-point stencil would
        // leave the grid.
        std::optional<double> at(double s) const;
    };

    Grid build(double s_min, double s_max, double step) const;

    double alpha_;
    double beta2_;
    Grid core_;
    Grid outer_;
};

}  // namespace lrdstable
